#include "sps/geometry.hpp"

#include <algorithm>

namespace sps {

const char* model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::NQ: return "NQ";
    case ModelKind::Dg: return "dg";
    case ModelKind::DgNQ: return "dgNQ";
  }
  return "?";
}

ManifoldModel ManifoldModel::make(ModelKind kind, AlgebraPtr alg) {
  ManifoldModel m;
  m.kind = kind;
  m.algebra = std::move(alg);
  for (std::size_t i = 0; i < m.algebra->size(); ++i) {
    const Generator& g = m.algebra->gen(i);
    if (g.weight != 0) fail(Errc::InvalidArgument, "model generators carry no weight");
    switch (kind) {
      case ModelKind::NQ:
        if (g.degree.chain != 0)
          fail(Errc::DegreeMismatch, "NQ model with chain-degree generator '" + g.name + "'");
        break;
      case ModelKind::Dg:
        if (g.degree.cochain != 0)
          fail(Errc::DegreeMismatch, "dg model with cochain-degree generator '" + g.name + "'");
        break;
      case ModelKind::DgNQ:
        if (g.degree.chain != 0 && g.degree.cochain != 0)
          fail(Errc::DegreeMismatch, "dgNQ generators split into cochain-only and chain-only parts");
        break;
    }
    if (g.degree.cochain < 0 || g.degree.chain < 0)
      fail(Errc::DegreeMismatch, "model generator with negative degree '" + g.name + "'");
    if (g.degree == TriDegree{0, 0, Flag::Equal}) m.base.push_back(g.name);
  }
  return m;
}

ManifoldModel ManifoldModel::point() { return make(ModelKind::Dg, make_cdga({}, {}, {})); }

ManifoldModel ManifoldModel::affine_space(const std::vector<std::string>& coords) {
  std::vector<Generator> gens;
  for (const auto& c : coords) gens.push_back({c, {0, 0, Flag::Equal}});
  return make(ModelKind::Dg, make_cdga(std::move(gens), {}, {}));
}

DeRham::DeRham(ManifoldModel model) : model_(std::move(model)) {
  const Algebra& A = *model_.algebra;
  n_ = A.size();
  std::vector<Generator> gens = A.gens();
  for (std::size_t i = 0; i < n_; ++i) {
    const Generator& g = A.gen(i);
    gens.push_back({"d(" + g.name + ")",
                    {g.degree.cochain, g.degree.chain, flag_add(g.degree.flag, Flag::Unequal)},
                    1});
  }
  dr_ = Algebra::make(std::move(gens));
  auto lift = [&](const Element& a) { return a.substitute(dr_, [&] {
                std::vector<Element> im;
                for (std::size_t i = 0; i < n_; ++i) im.push_back(dr_->var(i));
                return im;
              }()); };
  // d
  d_vals_.assign(dr_->size(), dr_->zero());
  for (std::size_t i = 0; i < n_; ++i) d_vals_[i] = dr_->var(n_ + i);
  Derivation d0(dr_, {0, 0, Flag::Unequal}, 1, d_vals_);
  // Q and delta, with Q(dg) = -d(Qg) so that all three pairwise anticommute
  q_vals_.assign(dr_->size(), dr_->zero());
  delta_vals_.assign(dr_->size(), dr_->zero());
  for (std::size_t i = 0; i < n_; ++i) {
    Element qi = lift(A.q_of(i));
    Element di = lift(A.delta_of(i));
    q_vals_[i] = qi;
    delta_vals_[i] = di;
    q_vals_[n_ + i] = -d0.apply(qi);
    delta_vals_[n_ + i] = -d0.apply(di);
  }
}

Element DeRham::embed(const Element& a) const {
  std::vector<Element> im;
  for (std::size_t i = 0; i < n_; ++i) im.push_back(dr_->var(i));
  return a.substitute(dr_, im);
}

Element DeRham::dgen(std::size_t i) const { return dr_->var(n_ + i); }

Element DeRham::d(const Element& a) const {
  return Derivation(dr_, {0, 0, Flag::Unequal}, 1, d_vals_).apply(a);
}

Element DeRham::qdel(const Element& a) const {
  Element out = Derivation(dr_, {1, 0, Flag::Equal}, 0, q_vals_).apply(a);
  return out + Derivation(dr_, {0, -1, Flag::Equal}, 0, delta_vals_).apply(a);
}

Element DeRham::total(const Element& a) const { return d(a) + qdel(a); }

Element DeRham::module_qdel(const Element& a) const {
  Element out = dr_->zero();
  for (auto& [w, comp] : a.by_weight()) {
    Element q = qdel(comp);
    out = out + ((w % 2 == 0) ? q : -q);
  }
  return out;
}

Element DeRham::contract(const Derivation& v, const Element& form) const {
  std::vector<Element> vals(dr_->size(), dr_->zero());
  for (std::size_t i = 0; i < n_; ++i) vals[n_ + i] = embed(v.value(i));
  TriDegree shift = v.shift() + TriDegree{0, 0, Flag::Unequal};
  return Derivation(dr_, shift, -1, vals).apply(form);
}

int DeRham::flag_coordinate(const Monomial& m) const {
  int f = dr_->monomial_degree(m).flag == Flag::Unequal ? 1 : 0;
  return (f + dr_->monomial_weight(m)) % 2;
}

int DeRham::dr_degree(const Monomial& m) const {
  TriDegree d = dr_->monomial_degree(m);
  return dr_->monomial_weight(m) + d.cochain - d.chain;
}

std::vector<Monomial> enumerate_bounded(const AlgebraPtr& alg, std::size_t base_count,
                                        std::uint32_t poly_bound, int weight_cutoff,
                                        int bidegree_cutoff) {
  std::vector<std::uint32_t> cap(alg->size());
  for (std::size_t i = 0; i < alg->size(); ++i) {
    const Generator& g = alg->gen(i);
    std::uint32_t c = 1000000;
    if (alg->odd(i)) c = 1;
    if (g.weight > 0) c = std::min<std::uint32_t>(c, weight_cutoff / g.weight);
    if (g.degree.cochain != 0)
      c = std::min<std::uint32_t>(c, bidegree_cutoff / std::abs(g.degree.cochain));
    if (g.degree.chain != 0)
      c = std::min<std::uint32_t>(c, bidegree_cutoff / std::abs(g.degree.chain));
    if (i < base_count && g.degree == TriDegree{0, 0, Flag::Equal})
      c = std::min<std::uint32_t>(c, poly_bound);
    if (c == 1000000)
      fail(Errc::InvalidArgument, "generator '" + g.name + "' admits no finite enumeration cap");
    cap[i] = c;
  }
  std::vector<Monomial> out;
  Monomial cur;
  cur.exps.assign(alg->size(), 0);
  std::uint32_t base_used = 0;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == alg->size()) {
      if (alg->monomial_weight(cur) <= weight_cutoff) out.push_back(cur);
      return;
    }
    bool is_base = i < base_count && alg->gen(i).degree == TriDegree{0, 0, Flag::Equal};
    for (std::uint32_t e = 0; e <= cap[i]; ++e) {
      if (is_base && base_used + e > poly_bound) break;
      cur.exps[i] = e;
      base_used += is_base ? e : 0;
      rec(i + 1);
      base_used -= is_base ? e : 0;
    }
    cur.exps[i] = 0;
  };
  rec(0);
  std::sort(out.begin(), out.end());
  return out;
}

Complex de_rham_complex(const DeRham& dr, const DeRhamOptions& opt, int fil_level,
                        std::set<int>* lossy) {
  const AlgebraPtr& D = dr.algebra();
  std::vector<Monomial> all =
      enumerate_bounded(D, dr.base_gen_count(), opt.poly_bound, opt.weight_cutoff);
  std::map<int, std::set<Monomial>> by_degree;
  for (auto& m : all) {
    int w = D->monomial_weight(m);
    if (w < fil_level) continue;
    int deg = dr.dr_degree(m);
    if (deg < opt.degree_lo - 1 || deg > opt.degree_hi + 1) continue;
    by_degree[deg].insert(m);
  }
  // Saturate upward so the window is closed under the differential; the
  // weight filtration beyond the cutoff is a legitimate quotient and stays
  // truncated. Degrees that grew beyond the seed enumeration are reported.
  for (int deg = opt.degree_lo - 1; deg <= opt.degree_hi; ++deg) {
    if (!by_degree.count(deg)) continue;
    for (const auto& m : by_degree.at(deg)) {
      Element img = dr.total(D->monomial(m));
      for (const auto& [mm, c] : img.terms()) {
        if (D->monomial_weight(mm) > opt.weight_cutoff) continue;
        if (by_degree[deg + 1].insert(mm).second && lossy) lossy->insert(deg + 1);
      }
    }
  }
  std::map<int, std::vector<Monomial>> bases;
  std::map<int, std::map<Monomial, std::size_t>> index;
  Complex out;
  for (auto& [deg, monos] : by_degree) {
    std::vector<Monomial> v(monos.begin(), monos.end());
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < v.size(); ++i) {
      index[deg][v[i]] = i;
      labels.push_back(D->monomial(v[i]).str());
    }
    bases[deg] = std::move(v);
    out.set_basis(deg, std::move(labels));
  }
  for (auto& [deg, monos] : bases) {
    if (deg > opt.degree_hi || !bases.count(deg + 1)) continue;
    QMat d(bases[deg + 1].size(), monos.size());
    for (std::size_t j = 0; j < monos.size(); ++j) {
      Element img = dr.total(D->monomial(monos[j]));
      for (const auto& [m, c] : img.terms()) {
        if (D->monomial_weight(m) > opt.weight_cutoff) continue;  // Fil quotient
        d.at(index[deg + 1].at(m), j) = c;
      }
    }
    out.set_differential(deg, std::move(d));
  }
  return out;
}

ClosureReport presymplectic_check(const DeRham& dr, const PreSymplecticStructure& om) {
  const AlgebraPtr& D = dr.algebra();
  for (const auto& [m, c] : om.omega.terms()) {
    int w = D->monomial_weight(m);
    if (w < 2 || w > om.cutoff)
      fail(Errc::DegreeMismatch, "pre-symplectic candidate outside Fil^2 within cutoff");
    if (dr.dr_degree(m) != om.shift_n + 2)
      fail(Errc::DegreeMismatch, "pre-symplectic candidate not of total degree n+2");
    if (dr.flag_coordinate(m) != (om.parity_reversed ? 1 : 0))
      fail(Errc::DegreeMismatch, "pre-symplectic candidate of wrong parity");
  }
  ClosureReport rep;
  Element res = dr.total(om.omega);
  rep.closed = true;
  auto parts = res.by_weight();
  for (int w = 2; w <= om.cutoff + 1; ++w) {
    Element r = res.weight_component(w);
    rep.residuals[w] = r;
    if (!r.is_zero()) rep.closed = false;
  }
  return rep;
}

Rat evaluate_at_point(const ManifoldModel& X, const Element& a,
                      const std::map<std::string, Rat>& point) {
  Rat out(0);
  const Algebra& A = *a.algebra();
  for (const auto& [m, c] : a.terms()) {
    Rat v = c;
    bool dead = false;
    for (std::size_t i = 0; i < m.exps.size() && !dead; ++i) {
      if (m.exps[i] == 0) continue;
      auto it = point.find(A.gen(i).name);
      if (it == point.end()) {
        dead = true;  // non-base generator: reduced to zero
      } else {
        for (std::uint32_t k = 0; k < m.exps[i]; ++k) v *= it->second;
      }
    }
    if (!dead) out += v;
  }
  return out;
}

Element reduce_to_base(const ManifoldModel& X, const Element& a) {
  const AlgebraPtr& A = a.algebra();
  std::vector<Element> im;
  for (std::size_t i = 0; i < A->size(); ++i) {
    bool is_base = std::find(X.base.begin(), X.base.end(), A->gen(i).name) != X.base.end();
    im.push_back(is_base ? A->var(i) : A->zero());
  }
  return a.substitute(A, im);
}

std::vector<std::map<std::string, Rat>> sample_points(const ManifoldModel& X,
                                                      const SampleOptions& opt) {
  std::vector<std::map<std::string, Rat>> pts;
  pts.push_back({});
  for (const auto& name : X.base) {
    std::vector<std::map<std::string, Rat>> next;
    for (const auto& p : pts) {
      for (const auto& v : opt.coords) {
        auto q = p;
        q[name] = v;
        next.push_back(std::move(q));
        if (next.size() >= opt.max_points) break;
      }
      if (next.size() >= opt.max_points) break;
    }
    pts = std::move(next);
  }
  return pts;
}

namespace {

Element element_determinant(const std::vector<std::vector<Element>>& m,
                            const std::vector<std::size_t>& rows,
                            const std::vector<std::size_t>& cols) {
  if (rows.size() == 1) return m[rows[0]][cols[0]];
  Element det;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    std::vector<std::size_t> sub_rows;
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (i != k) sub_rows.push_back(rows[i]);
    std::vector<std::size_t> sub_cols(cols.begin() + 1, cols.end());
    Element cof = element_determinant(m, sub_rows, sub_cols);
    Element term = m[rows[k]][cols[0]] * cof;
    if (k % 2 == 1) term = -term;
    det = det + term;
  }
  return det;
}

}  // namespace

std::size_t poly_matrix_rank(const std::vector<std::vector<Element>>& m) {
  if (m.empty() || m[0].empty()) return 0;
  std::size_t nr = m.size(), nc = m[0].size();
  for (std::size_t r = std::min(nr, nc); r >= 1; --r) {
    // all r-subsets of rows and columns
    auto subs = [&](std::size_t n) {
      std::vector<std::vector<std::size_t>> out;
      std::vector<std::size_t> cur;
      std::function<void(std::size_t)> rec = [&](std::size_t start) {
        if (cur.size() == r) { out.push_back(cur); return; }
        for (std::size_t i = start; i < n; ++i) {
          cur.push_back(i);
          rec(i + 1);
          cur.pop_back();
        }
      };
      rec(0);
      return out;
    };
    for (const auto& rows : subs(nr))
      for (const auto& cols : subs(nc))
        if (!element_determinant(m, rows, cols).is_zero()) return r;
  }
  return 0;
}

Complex PointComplex::to_complex() const {
  Complex c;
  for (const auto& [d, b] : bases) c.set_basis(d, b);
  for (const auto& [d, m] : diffs) c.set_differential(d, m);
  c.validate();
  return c;
}

bool cone_is_acyclic(const PointComplex& a, const PointComplex& b, const std::map<int, QMat>& f) {
  // cone(f)^d = b^d (+) a^{d+1}, differential [d_b, f; 0, -d_a]
  PointComplex cone;
  auto dim_a = [&](int d) { return a.bases.count(d) ? a.bases.at(d).size() : 0; };
  auto dim_b = [&](int d) { return b.bases.count(d) ? b.bases.at(d).size() : 0; };
  std::set<int> degs;
  for (const auto& [d, x] : a.bases) degs.insert(d - 1);
  for (const auto& [d, x] : b.bases) degs.insert(d);
  for (int d : degs) {
    std::vector<std::string> labels(dim_b(d) + dim_a(d + 1), "*");
    if (!labels.empty()) cone.bases[d] = labels;
  }
  auto diff_a = [&](int d) {
    if (a.diffs.count(d)) return a.diffs.at(d);
    return QMat(dim_a(d + 1), dim_a(d));
  };
  auto diff_b = [&](int d) {
    if (b.diffs.count(d)) return b.diffs.at(d);
    return QMat(dim_b(d + 1), dim_b(d));
  };
  auto fmat = [&](int d) {
    if (f.count(d)) return f.at(d);
    return QMat(dim_b(d), dim_a(d));
  };
  for (int d : degs) {
    std::size_t rows = dim_b(d + 1) + dim_a(d + 2);
    std::size_t cols = dim_b(d) + dim_a(d + 1);
    if (rows == 0 || cols == 0) continue;
    QMat m(rows, cols);
    QMat db = diff_b(d), fa = fmat(d + 1), da = diff_a(d + 1);
    for (std::size_t i = 0; i < db.rows(); ++i)
      for (std::size_t j = 0; j < db.cols(); ++j) m.at(i, j) = db.at(i, j);
    for (std::size_t i = 0; i < fa.rows(); ++i)
      for (std::size_t j = 0; j < fa.cols(); ++j) m.at(i, dim_b(d) + j) = fa.at(i, j);
    for (std::size_t i = 0; i < da.rows(); ++i)
      for (std::size_t j = 0; j < da.cols(); ++j) m.at(dim_b(d + 1) + i, dim_b(d) + j) = -da.at(i, j);
    cone.diffs[d] = std::move(m);
  }
  Complex c = cone.to_complex();
  for (int d = c.min_degree(); d <= c.max_degree(); ++d)
    if (c.cohomology(d).dimension != 0) return false;
  return true;
}

namespace {

// Tangent complex data reduced to the base ring: basis del_g per generator at
// total degree h_g - c_g, with differential [Q + delta, -].
struct TangentData {
  std::vector<Element> dcoeff;  // flattened (h, g): coefficient of del_h in [D, del_g]
  std::vector<int> degree;      // degree of del_g
};

TangentData tangent_data(const ManifoldModel& X) {
  const Algebra& A = *X.algebra;
  TangentData td;
  std::size_t n = A.size();
  td.dcoeff.assign(n * n, A.zero());
  td.degree.resize(n);
  Derivation q = A.q(), del = A.delta();
  for (std::size_t g = 0; g < n; ++g) {
    td.degree[g] = A.gen(g).degree.chain - A.gen(g).degree.cochain;
    int sign = A.gen(g).degree.parity() == 1 ? 1 : -1;  // -(-1)^{p(del_g)}
    Derivation pg = A.partial(g);
    for (std::size_t h = 0; h < n; ++h) {
      Element dh = A.q_of(h) + A.delta_of(h);
      td.dcoeff[h * n + g] = Rat(sign) * pg.apply(dh);
    }
  }
  return td;
}

}  // namespace

NondegeneracyReport symplectic_check(const DeRham& dr, const PreSymplecticStructure& om,
                                     const SampleOptions& opt) {
  NondegeneracyReport rep;
  ClosureReport cl = presymplectic_check(dr, om);
  if (!cl.closed) fail(Errc::InvalidArgument, "symplectic_check requires a pre-symplectic input");
  const ManifoldModel& X = dr.model();
  const Algebra& A = *X.algebra;
  std::size_t n = A.size();
  Element omega2 = om.omega.weight_component(2);
  if (omega2.is_zero() && n > 0) {
    rep.nondegenerate = false;
    rep.witness = "weight-2 component vanishes";
    return rep;
  }

  // pairing matrix in the base ring: sharp(del_g) = sum_h P[h][g] d(g_h)
  std::vector<std::vector<Element>> pairing(n, std::vector<Element>(n, A.zero()));
  for (std::size_t g = 0; g < n; ++g) {
    Element img = dr.contract(A.partial(g), omega2);
    for (const auto& [m, c] : img.terms()) {
      // img is weight 1: exactly one d-symbol
      std::size_t h = n;
      Monomial coeff_m = m;
      for (std::size_t i = 0; i < n; ++i)
        if (m.exps[n + i] > 0) { h = i; coeff_m.exps[n + i] -= 1; break; }
      if (h == n) continue;
      Monomial base_m;
      base_m.exps.assign(n, 0);
      for (std::size_t i = 0; i < n; ++i) base_m.exps[i] = coeff_m.exps[i];
      pairing[h][g] = pairing[h][g] + A.monomial(base_m, c);
    }
  }
  for (auto& row : pairing)
    for (auto& e : row) e = reduce_to_base(X, e);

  // generic-point rank over the fraction field
  if (poly_matrix_rank(pairing) < n) {
    rep.nondegenerate = false;
    rep.witness = "pairing matrix singular at the generic point";
    return rep;
  }

  TangentData td = tangent_data(X);
  for (const auto& pt : sample_points(X, opt)) {
    // tangent complex at the point
    PointComplex T, O;
    std::map<int, std::vector<std::size_t>> t_slots, o_slots;
    for (std::size_t g = 0; g < n; ++g) t_slots[td.degree[g]].push_back(g);
    for (std::size_t h = 0; h < n; ++h)
      o_slots[A.gen(h).degree.cochain - A.gen(h).degree.chain - om.shift_n].push_back(h);
    for (auto& [d, v] : t_slots) T.bases[d] = std::vector<std::string>(v.size(), "t");
    for (auto& [d, v] : o_slots) O.bases[d] = std::vector<std::string>(v.size(), "o");
    for (auto& [d, v] : t_slots) {
      if (!t_slots.count(d + 1)) continue;
      QMat m(t_slots[d + 1].size(), v.size());
      for (std::size_t j = 0; j < v.size(); ++j)
        for (std::size_t i = 0; i < t_slots[d + 1].size(); ++i)
          m.at(i, j) = evaluate_at_point(X, td.dcoeff[t_slots[d + 1][i] * n + v[j]], pt);
      T.diffs[d] = std::move(m);
    }
    // cotangent differential (module convention, then the sign probe below)
    auto omega_diff = [&](int sign) {
      std::map<int, QMat> out;
      for (auto& [d, v] : o_slots) {
        if (!o_slots.count(d + 1)) continue;
        QMat m(o_slots[d + 1].size(), v.size());
        for (std::size_t j = 0; j < v.size(); ++j) {
          Element img = dr.qdel(dr.dgen(v[j])) * Rat(sign);
          for (const auto& [mono, c] : img.terms()) {
            std::size_t h = n;
            for (std::size_t i = 0; i < n; ++i)
              if (mono.exps[n + i] > 0) { h = i; break; }
            if (h == n) continue;
            Monomial base_m;
            base_m.exps.assign(n, 0);
            for (std::size_t i = 0; i < n; ++i) base_m.exps[i] = mono.exps[i];
            for (std::size_t i = 0; i < o_slots[d + 1].size(); ++i)
              if (o_slots[d + 1][i] == h)
                m.at(i, j) += evaluate_at_point(X, reduce_to_base(X, A.monomial(base_m, c)), pt);
          }
        }
        out[d] = std::move(m);
      }
      return out;
    };
    std::map<int, QMat> fmap;
    for (auto& [d, v] : t_slots) {
      if (!o_slots.count(d)) {
        bool nonzero = false;
        for (std::size_t j = 0; j < v.size(); ++j)
          for (std::size_t h = 0; h < n; ++h)
            if (evaluate_at_point(X, pairing[h][v[j]], pt) != 0) nonzero = true;
        if (nonzero) {
          rep.nondegenerate = false;
          rep.witness = "sharp map not degree-aligned";
          return rep;
        }
        continue;
      }
      QMat m(o_slots[d].size(), v.size());
      for (std::size_t j = 0; j < v.size(); ++j)
        for (std::size_t i = 0; i < o_slots[d].size(); ++i)
          m.at(i, j) = evaluate_at_point(X, pairing[o_slots[d][i]][v[j]], pt);
      fmap[d] = std::move(m);
    }
    // probe both sign conventions for the cotangent differential; the chain
    // map condition (cone d^2 = 0) picks the consistent one
    bool ok = false;
    for (int sign : {1, -1}) {
      O.diffs = omega_diff(sign);
      try {
        if (cone_is_acyclic(T, O, fmap)) { ok = true; break; }
      } catch (const EngineError&) {
        continue;  // cone differential did not square to zero for this sign
      }
    }
    if (!ok) {
      rep.nondegenerate = false;
      std::string w = "cone not acyclic at point (";
      for (const auto& [k, v] : pt) w += k + "=" + v.get_str() + " ";
      rep.witness = w + ")";
      return rep;
    }
  }
  rep.nondegenerate = true;
  rep.witness = "generic minor rank " + std::to_string(n) + ", all sample cones acyclic";
  return rep;
}

TruncationReport truncation_pi0(const ManifoldModel& X, std::uint32_t poly_window) {
  if (X.kind != ModelKind::Dg) fail(Errc::InvalidArgument, "truncation_pi0 requires a dg model");
  const Algebra& A = *X.algebra;
  TruncationReport rep;
  rep.window = poly_window;
  for (std::size_t i = 0; i < A.size(); ++i)
    if (A.gen(i).degree.chain == 1) {
      Element d = A.delta_of(i);
      if (!d.is_zero()) rep.ideal_generators.push_back(d);
    }
  // H_0 = base-ring window modulo the ideal window
  std::vector<std::size_t> base_idx;
  for (std::size_t i = 0; i < A.size(); ++i)
    if (A.gen(i).degree.chain == 0) base_idx.push_back(i);
  auto chain0 = [&](const Monomial& m) {
    return A.monomial_degree(m).chain == 0 && m.total() <= poly_window;
  };
  std::vector<Monomial> basis = A.monomials_up_to(poly_window, chain0);
  std::map<Monomial, std::size_t> index;
  for (std::size_t i = 0; i < basis.size(); ++i) index[basis[i]] = i;
  std::vector<std::vector<Rat>> image;
  for (const Element& gen : rep.ideal_generators) {
    for (const Monomial& m : basis) {
      Element prod = A.monomial(m) * gen;
      std::vector<Rat> col(basis.size(), Rat(0));
      bool in_window = true;
      for (const auto& [mm, c] : prod.terms()) {
        auto it = index.find(mm);
        if (it == index.end()) { in_window = false; break; }
        col[it->second] = c;
      }
      if (in_window) image.push_back(std::move(col));
    }
  }
  rep.h0_dimension = basis.size() - column_space_dim(image, basis.size());
  return rep;
}

ManifoldModel product(const ManifoldModel& X, const ManifoldModel& Y) {
  const Algebra& A = *X.algebra;
  const Algebra& B = *Y.algebra;
  std::vector<Generator> gens = A.gens();
  std::vector<std::string> ynames;
  for (std::size_t i = 0; i < B.size(); ++i) {
    std::string name = B.gen(i).name;
    while (std::any_of(gens.begin(), gens.end(),
                       [&](const Generator& g) { return g.name == name; }))
      name += "'";
    ynames.push_back(name);
    gens.push_back({name, B.gen(i).degree, 0});
  }
  AlgebraPtr proto = Algebra::make(gens);
  std::vector<Element> imA, imB;
  for (std::size_t i = 0; i < A.size(); ++i) imA.push_back(proto->var(i));
  for (std::size_t i = 0; i < B.size(); ++i) imB.push_back(proto->var(A.size() + i));
  std::map<std::string, Element> qv, dv;
  for (std::size_t i = 0; i < A.size(); ++i) {
    if (!A.q_of(i).is_zero()) qv[A.gen(i).name] = A.q_of(i).substitute(proto, imA);
    if (!A.delta_of(i).is_zero()) dv[A.gen(i).name] = A.delta_of(i).substitute(proto, imA);
  }
  for (std::size_t i = 0; i < B.size(); ++i) {
    if (!B.q_of(i).is_zero()) qv[ynames[i]] = B.q_of(i).substitute(proto, imB);
    if (!B.delta_of(i).is_zero()) dv[ynames[i]] = B.delta_of(i).substitute(proto, imB);
  }
  ModelKind kind;
  if (X.kind == Y.kind)
    kind = X.kind;
  else
    kind = ModelKind::DgNQ;
  return ManifoldModel::make(kind, make_cdga(std::move(gens), std::move(qv), std::move(dv)));
}

}  // namespace sps
