#include "sps/algebra.hpp"

#include <algorithm>

namespace sps {

namespace {

bool same_signature(const Algebra& a, const Algebra& b) {
  if (&a == &b) return true;
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.gen(i).name != b.gen(i).name || !(a.gen(i).degree == b.gen(i).degree) ||
        a.gen(i).weight != b.gen(i).weight)
      return false;
  }
  return true;
}

void require_same(const Element& a, const Element& b) {
  if (!a.algebra() || !b.algebra()) fail(Errc::AlgebraMismatch, "element without algebra");
  if (!same_signature(*a.algebra(), *b.algebra()))
    fail(Errc::AlgebraMismatch, "elements belong to different algebras");
}

}  // namespace

std::uint32_t Monomial::total() const {
  std::uint32_t t = 0;
  for (auto e : exps) t += e;
  return t;
}

bool Monomial::operator<(const Monomial& o) const {
  std::uint32_t ta = total(), tb = o.total();
  if (ta != tb) return ta < tb;
  return exps < o.exps;
}

AlgebraPtr Algebra::make(std::vector<Generator> gens) {
  auto alg = std::shared_ptr<Algebra>(new Algebra());
  alg->gens_ = std::move(gens);
  for (std::size_t i = 0; i < alg->gens_.size(); ++i) {
    const auto& g = alg->gens_[i];
    if (g.name.empty()) fail(Errc::InvalidArgument, "generator with empty name");
    if (!alg->index_.emplace(g.name, i).second)
      fail(Errc::InvalidArgument, "duplicate generator name '" + g.name + "'");
    alg->odd_.push_back(g.degree.parity() == 1);
  }
  return alg;
}

std::optional<std::size_t> Algebra::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Element Algebra::q_of(std::size_t i) const {
  if (q_.empty()) return zero();
  return Element(shared_from_this(), q_[i]);
}

Element Algebra::delta_of(std::size_t i) const {
  if (delta_.empty()) return zero();
  return Element(shared_from_this(), delta_[i]);
}

Derivation Algebra::q() const {
  std::vector<Element> vals;
  for (std::size_t i = 0; i < size(); ++i) vals.push_back(q_of(i));
  return Derivation(shared_from_this(), TriDegree{1, 0, Flag::Equal}, 0, std::move(vals));
}

Derivation Algebra::delta() const {
  std::vector<Element> vals;
  for (std::size_t i = 0; i < size(); ++i) vals.push_back(delta_of(i));
  return Derivation(shared_from_this(), TriDegree{0, -1, Flag::Equal}, 0, std::move(vals));
}

Element Algebra::zero() const { return Element(shared_from_this(), {}); }

Element Algebra::one() const { return constant(Rat(1)); }

Element Algebra::constant(const Rat& c) const {
  Monomial m;
  m.exps.assign(size(), 0);
  return Element(shared_from_this(), {{m, c}});
}

Element Algebra::var(std::size_t i) const {
  if (i >= size()) fail(Errc::InvalidArgument, "generator index out of range");
  Monomial m;
  m.exps.assign(size(), 0);
  m.exps[i] = 1;
  return Element(shared_from_this(), {{m, Rat(1)}});
}

Element Algebra::var(const std::string& name) const {
  auto i = index_of(name);
  if (!i) fail(Errc::UnknownGenerator, "no generator named '" + name + "'");
  return var(*i);
}

Element Algebra::monomial(Monomial m, Rat coeff) const {
  if (m.exps.size() != size()) fail(Errc::InvalidArgument, "monomial length mismatch");
  return Element(shared_from_this(), {{std::move(m), std::move(coeff)}});
}

TriDegree Algebra::monomial_degree(const Monomial& m) const {
  TriDegree d;
  for (std::size_t i = 0; i < size(); ++i) {
    if (m.exps[i] == 0) continue;
    int e = static_cast<int>(m.exps[i]);
    d.cochain += e * gens_[i].degree.cochain;
    d.chain += e * gens_[i].degree.chain;
    if (gens_[i].degree.flag == Flag::Unequal && (e % 2) == 1) d.flag = flag_add(d.flag, Flag::Unequal);
  }
  return d;
}

int Algebra::monomial_weight(const Monomial& m) const {
  int w = 0;
  for (std::size_t i = 0; i < size(); ++i) w += static_cast<int>(m.exps[i]) * gens_[i].weight;
  return w;
}

int Algebra::monomial_parity(const Monomial& m) const { return monomial_degree(m).parity(); }

Derivation Algebra::partial(std::size_t i) const {
  std::vector<Element> vals(size());
  for (std::size_t j = 0; j < size(); ++j) vals[j] = (j == i) ? one() : zero();
  TriDegree shift{-gens_[i].degree.cochain, -gens_[i].degree.chain, gens_[i].degree.flag};
  return Derivation(shared_from_this(), shift, -gens_[i].weight, std::move(vals));
}

std::vector<Monomial> Algebra::monomials_up_to(
    std::uint32_t degree_bound, const std::function<bool(const Monomial&)>& keep) const {
  std::vector<Monomial> out;
  Monomial cur;
  cur.exps.assign(size(), 0);
  std::function<void(std::size_t, std::uint32_t)> rec = [&](std::size_t i, std::uint32_t left) {
    if (i == size()) {
      if (!keep || keep(cur)) out.push_back(cur);
      return;
    }
    std::uint32_t cap = odd_[i] ? std::min<std::uint32_t>(1, left) : left;
    for (std::uint32_t e = 0; e <= cap; ++e) {
      cur.exps[i] = e;
      rec(i + 1, left - e);
    }
    cur.exps[i] = 0;
  };
  rec(0, degree_bound);
  std::sort(out.begin(), out.end());
  return out;
}

int koszul_sign_elements(const Algebra& alg, const Monomial& a, const Monomial& b) {
  // Sign from interleaving the odd factors of b past the later odd factors of a.
  int inversions = 0;
  for (std::size_t j = 0; j < b.exps.size(); ++j) {
    if (b.exps[j] == 0 || !alg.odd(j)) continue;
    for (std::size_t i = j + 1; i < a.exps.size(); ++i)
      if (a.exps[i] != 0 && alg.odd(i)) ++inversions;
  }
  return (inversions % 2 == 0) ? 1 : -1;
}

Element::Element(AlgebraPtr alg, Terms terms) : alg_(std::move(alg)), terms_(std::move(terms)) {
  normalize();
}

void Element::normalize() {
  if (!alg_) return;
  Terms kept;
  kept.reserve(terms_.size());
  for (auto& [m, c] : terms_) {
    if (c == 0) continue;
    if (m.exps.size() != alg_->size()) fail(Errc::InvalidArgument, "monomial length mismatch");
    bool dead = false;
    for (std::size_t i = 0; i < m.exps.size(); ++i)
      if (m.exps[i] > 1 && alg_->odd(i)) { dead = true; break; }  // odd square
    if (!dead) kept.emplace_back(std::move(m), std::move(c));
  }
  std::sort(kept.begin(), kept.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  terms_.clear();
  for (auto& [m, c] : kept) {
    if (!terms_.empty() && terms_.back().first == m)
      terms_.back().second += c;
    else
      terms_.emplace_back(std::move(m), std::move(c));
  }
  std::erase_if(terms_, [](const auto& t) { return t.second == 0; });
}

Element Element::operator+(const Element& o) const {
  if (is_zero()) return o;
  if (o.is_zero()) return *this;
  require_same(*this, o);
  Terms t = terms_;
  t.insert(t.end(), o.terms_.begin(), o.terms_.end());
  return Element(alg_, std::move(t));
}

Element Element::operator-(const Element& o) const { return *this + (-o); }

Element Element::operator-() const {
  Terms t = terms_;
  for (auto& [m, c] : t) c = -c;
  Element r;
  r.alg_ = alg_;
  r.terms_ = std::move(t);
  return r;
}

Element Element::operator*(const Rat& s) const {
  if (s == 0) return alg_ ? alg_->zero() : Element();
  Terms t = terms_;
  for (auto& [m, c] : t) c *= s;
  Element r;
  r.alg_ = alg_;
  r.terms_ = std::move(t);
  return r;
}

Element operator*(const Rat& s, const Element& e) { return e * s; }

Element Element::operator*(const Element& o) const {
  if (is_zero()) return *this;
  if (o.is_zero()) return o;
  require_same(*this, o);
  const Algebra& alg = *alg_;
  std::map<Monomial, Rat> acc;
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : o.terms_) {
      bool dead = false;
      for (std::size_t i = 0; i < ma.exps.size(); ++i)
        if (ma.exps[i] && mb.exps[i] && alg.odd(i)) { dead = true; break; }
      if (dead) continue;
      int sign = koszul_sign_elements(alg, ma, mb);
      Monomial m;
      m.exps.resize(ma.exps.size());
      for (std::size_t i = 0; i < m.exps.size(); ++i) m.exps[i] = ma.exps[i] + mb.exps[i];
      Rat c = ca * cb;
      if (sign < 0) c = -c;
      acc[std::move(m)] += c;
    }
  }
  Terms t;
  for (auto& [m, c] : acc)
    if (c != 0) t.emplace_back(m, c);
  Element r;
  r.alg_ = alg_;
  r.terms_ = std::move(t);
  return r;
}

bool Element::operator==(const Element& o) const {
  if (is_zero() && o.is_zero()) return true;
  if (is_zero() != o.is_zero()) return false;
  require_same(*this, o);
  return terms_ == o.terms_;
}

Element Element::pow(std::uint32_t k) const {
  if (!alg_) fail(Errc::InvalidArgument, "pow of unbound element");
  Element r = alg_->one();
  for (std::uint32_t i = 0; i < k; ++i) r = r * (*this);
  return r;
}

bool Element::is_homogeneous(TriDegree* deg_out) const {
  if (is_zero()) return true;
  TriDegree d = alg_->monomial_degree(terms_[0].first);
  for (const auto& [m, c] : terms_)
    if (!(alg_->monomial_degree(m) == d)) return false;
  if (deg_out) *deg_out = d;
  return true;
}

std::map<int, Element> Element::by_weight() const {
  std::map<int, Terms> split;
  for (const auto& [m, c] : terms_) split[alg_->monomial_weight(m)].emplace_back(m, c);
  std::map<int, Element> out;
  for (auto& [w, t] : split) out.emplace(w, Element(alg_, std::move(t)));
  return out;
}

Element Element::weight_component(int w) const {
  if (!alg_) return Element();
  Terms t;
  for (const auto& [m, c] : terms_)
    if (alg_->monomial_weight(m) == w) t.emplace_back(m, c);
  return Element(alg_, std::move(t));
}

int Element::min_weight() const {
  if (is_zero()) return 0;
  int w = alg_->monomial_weight(terms_[0].first);
  for (const auto& [m, c] : terms_) w = std::min(w, alg_->monomial_weight(m));
  return w;
}

Element Element::substitute(const AlgebraPtr& target, const std::vector<Element>& images) const {
  if (!alg_) return Element();
  if (images.size() != alg_->size()) fail(Errc::InvalidArgument, "substitute: image count mismatch");
  Element out = target->zero();
  for (const auto& [m, c] : terms_) {
    Element prod = target->constant(c);
    for (std::size_t i = 0; i < m.exps.size(); ++i) {
      for (std::uint32_t k = 0; k < m.exps[i]; ++k) prod = prod * images[i];
      if (prod.is_zero()) break;
    }
    out = out + prod;
  }
  return out;
}

Rat Element::coeff(const Monomial& m) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                             [](const auto& t, const Monomial& key) { return t.first < key; });
  if (it != terms_.end() && it->first == m) return it->second;
  return Rat(0);
}

std::string Element::str() const {
  if (is_zero()) return "0";
  std::string s;
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    const auto& [m, c] = terms_[t];
    Rat a = c;
    bool neg = a < 0;
    if (neg) a = -a;
    if (t == 0)
      s += neg ? "-" : "";
    else
      s += neg ? " - " : " + ";
    std::string mono;
    for (std::size_t i = 0; i < m.exps.size(); ++i) {
      if (m.exps[i] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += alg_->gen(i).name;
      if (m.exps[i] > 1) mono += "^" + std::to_string(m.exps[i]);
    }
    if (mono.empty()) {
      s += a.get_str();
    } else {
      if (a != 1) s += a.get_str() + "*";
      s += mono;
    }
  }
  return s;
}

Derivation::Derivation(AlgebraPtr alg, TriDegree shift, int weight_shift, std::vector<Element> values)
    : alg_(std::move(alg)), shift_(shift), weight_shift_(weight_shift), values_(std::move(values)) {
  if (values_.size() != alg_->size()) fail(Errc::InvalidArgument, "derivation: value count mismatch");
}

Element Derivation::apply(const Element& a) const {
  if (a.is_zero()) return alg_->zero();
  require_same(alg_->zero(), a);
  const Algebra& alg = *alg_;
  Element out = alg.zero();
  int dpar = parity();
  for (const auto& [m, c] : a.terms()) {
    int prefix_parity = 0;
    for (std::size_t i = 0; i < m.exps.size(); ++i) {
      std::uint32_t e = m.exps[i];
      if (e == 0) continue;
      if (!values_[i].is_zero()) {
        Monomial prefix, rest;
        prefix.exps.assign(m.exps.size(), 0);
        rest.exps.assign(m.exps.size(), 0);
        for (std::size_t j = 0; j < i; ++j) prefix.exps[j] = m.exps[j];
        rest.exps[i] = e - 1;
        for (std::size_t j = i + 1; j < m.exps.size(); ++j) rest.exps[j] = m.exps[j];
        int sign = koszul_sign(dpar, prefix_parity);
        Rat coeff = c * e;
        if (sign < 0) coeff = -coeff;
        out = out + alg.monomial(prefix, coeff) * values_[i] * alg.monomial(rest, Rat(1));
      }
      prefix_parity = (prefix_parity + static_cast<int>(e % 2) * alg.gen(i).degree.parity()) % 2;
    }
  }
  return out;
}

Element rebind(const AlgebraPtr& target, const Element& e) {
  if (e.is_zero()) return target->zero();
  if (!same_signature(*target, *e.algebra()))
    fail(Errc::AlgebraMismatch, "rebind between incompatible algebras");
  return Element(target, e.terms());
}

AlgebraPtr make_cdga(std::vector<Generator> gens, std::map<std::string, Element> q_values,
                     std::map<std::string, Element> delta_values) {
  auto alg = std::shared_ptr<Algebra>(new Algebra());
  {
    AlgebraPtr proto = Algebra::make(gens);
    alg->gens_ = proto->gens();
    for (std::size_t i = 0; i < alg->gens_.size(); ++i) {
      alg->index_.emplace(alg->gens_[i].name, i);
      alg->odd_.push_back(alg->gens_[i].degree.parity() == 1);
    }
  }
  AlgebraPtr out = alg;
  auto install = [&](std::map<std::string, Element>& values, std::vector<Terms>& table,
                     TriDegree shift, const char* label) {
    if (values.empty()) return;
    table.assign(out->size(), Terms{});
    for (auto& [name, val] : values) {
      auto i = out->index_of(name);
      if (!i) fail(Errc::UnknownGenerator, std::string(label) + " value for unknown generator '" + name + "'");
      Element bound = rebind(out, val);
      TriDegree want = out->gen(*i).degree + shift;
      for (const auto& [m, c] : bound.terms()) {
        if (!(out->monomial_degree(m) == want))
          fail(Errc::DegreeMismatch, std::string(label) + "(" + name + ") has a term of degree " +
                                         out->monomial_degree(m).str() + ", expected " + want.str());
        if (out->monomial_weight(m) != out->gen(*i).weight)
          fail(Errc::DegreeMismatch, std::string(label) + "(" + name + ") changes weight");
      }
      table[*i] = bound.terms();
    }
  };
  install(q_values, alg->q_, TriDegree{1, 0, Flag::Equal}, "Q");
  install(delta_values, alg->delta_, TriDegree{0, -1, Flag::Equal}, "delta");

  Derivation q = out->q(), d = out->delta();
  for (std::size_t i = 0; i < out->size(); ++i) {
    const std::string& name = out->gen(i).name;
    if (!q.apply(out->q_of(i)).is_zero())
      fail(Errc::SquareNotZero, "Q^2 != 0 on generator '" + name + "'");
    if (!d.apply(out->delta_of(i)).is_zero())
      fail(Errc::SquareNotZero, "delta^2 != 0 on generator '" + name + "'");
    Element anti = q.apply(out->delta_of(i)) + d.apply(out->q_of(i));
    if (!anti.is_zero())
      fail(Errc::SquareNotZero, "Q delta + delta Q != 0 on generator '" + name + "'");
  }
  return out;
}

}  // namespace sps
