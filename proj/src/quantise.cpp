#include "sps/quantise.hpp"

#include <algorithm>
#include <array>
#include <functional>

namespace sps {

namespace {

constexpr int kD2CrossSign = 1;  // cross-term convention of the BV extension

bool signature_eq(const AlgebraPtr& a, const AlgebraPtr& b) {
  if (a == b) return true;
  if (a->size() != b->size()) return false;
  for (std::size_t i = 0; i < a->size(); ++i)
    if (a->gen(i).name != b->gen(i).name || !(a->gen(i).degree == b->gen(i).degree)) return false;
  return true;
}

}  // namespace

OperatorSpacePtr OperatorSpace::make(ManifoldModel model, std::size_t arity) {
  auto sp = std::shared_ptr<OperatorSpace>(new OperatorSpace());
  sp->model_ = std::move(model);
  sp->arity_ = arity;
  const Algebra& A = *sp->model_.algebra;
  std::vector<Generator> gens = A.gens();
  for (std::size_t s = 1; s <= arity; ++s)
    for (std::size_t i = 0; i < A.size(); ++i) {
      const Generator& g = A.gen(i);
      gens.push_back({"y" + std::to_string(s) + "_" + g.name,
                      {-g.degree.cochain, -g.degree.chain, g.degree.flag},
                      1});
    }
  sp->ops_ = Algebra::make(std::move(gens));
  return sp;
}

std::size_t OperatorSpace::slot_index(std::size_t gen, std::size_t slot) const {
  return model_.algebra->size() * slot + gen;
}

Element OperatorSpace::slot_var(std::size_t gen, std::size_t slot) const {
  return ops_->var(slot_index(gen, slot));
}

Element OperatorSpace::embed(const Element& coefficient) const {
  std::vector<Element> im;
  for (std::size_t i = 0; i < model_.algebra->size(); ++i) im.push_back(ops_->var(i));
  return coefficient.substitute(ops_, im);
}

PolyDiffOperator PolyDiffOperator::make(OperatorSpacePtr space, Element elem) {
  PolyDiffOperator op;
  op.space = std::move(space);
  op.elem = std::move(elem);
  op.order_bound = op.order();
  return op;
}

int PolyDiffOperator::order() const {
  int k = 0;
  for (const auto& [m, c] : elem.terms()) k = std::max(k, space->algebra()->monomial_weight(m));
  return k;
}

PolyDiffOperator identity_op(const ManifoldModel& model) {
  auto sp = OperatorSpace::make(model, 1);
  return PolyDiffOperator::make(sp, sp->algebra()->one());
}

PolyDiffOperator multiplication_op(const ManifoldModel& model) {
  auto sp = OperatorSpace::make(model, 2);
  return PolyDiffOperator::make(sp, sp->algebra()->one());
}

PolyDiffOperator element_op(const ManifoldModel& model, const Element& a) {
  auto sp = OperatorSpace::make(model, 0);
  return PolyDiffOperator::make(sp, sp->embed(a));
}

namespace {

// apply the block of slot s (descending generator order acts first)
Element apply_block(const ManifoldModel& model, const Monomial& m, const OperatorSpace& sp,
                    std::size_t slot, const Element& arg) {
  const Algebra& A = *model.algebra;
  Element out = arg;
  std::size_t n = A.size();
  for (std::size_t ii = n; ii-- > 0;) {
    std::uint32_t e = m.exps[sp.slot_index(ii, slot)];
    for (std::uint32_t k = 0; k < e && !out.is_zero(); ++k) out = A.partial(ii).apply(out);
  }
  return out;
}

int block_parity(const Monomial& m, const OperatorSpace& sp, std::size_t slot) {
  const Algebra& A = *sp.model().algebra;
  int p = 0;
  for (std::size_t i = 0; i < A.size(); ++i)
    p += static_cast<int>(m.exps[sp.slot_index(i, slot)] % 2) * A.gen(i).degree.parity();
  return p % 2;
}

}  // namespace

Element apply_op(const PolyDiffOperator& op, const std::vector<Element>& args) {
  const OperatorSpace& sp = *op.space;
  const Algebra& A = *sp.model().algebra;
  if (args.size() != sp.arity()) fail(Errc::InvalidArgument, "operator arity mismatch");
  // split arguments into parity-homogeneous parts
  std::vector<std::array<Element, 2>> parts(args.size(), {A.zero(), A.zero()});
  for (std::size_t s = 0; s < args.size(); ++s) {
    if (!args[s].is_zero() && !signature_eq(args[s].algebra(), sp.model().algebra))
      fail(Errc::AlgebraMismatch, "argument lives in a different algebra");
    Terms even, odd;
    for (const auto& [m, c] : args[s].terms())
      (A.monomial_parity(m) == 0 ? even : odd).emplace_back(m, c);
    parts[s] = {Element(sp.model().algebra, even), Element(sp.model().algebra, odd)};
  }
  Element total = A.zero();
  std::size_t combos = std::size_t{1} << args.size();
  for (std::size_t mask = 0; mask < combos; ++mask) {
    std::vector<const Element*> sel(args.size());
    bool dead = false;
    for (std::size_t s = 0; s < args.size(); ++s) {
      sel[s] = &parts[s][(mask >> s) & 1];
      if (sel[s]->is_zero()) { dead = true; break; }
    }
    if (dead) continue;
    for (const auto& [m, c] : op.elem.terms()) {
      int sign = 1;
      int acc = 0;  // parity of earlier arguments
      for (std::size_t s = 0; s < args.size(); ++s) {
        if (block_parity(m, sp, s + 1) == 1 && acc == 1) sign = -sign;
        acc = (acc + static_cast<int>((mask >> s) & 1)) % 2;
      }
      Monomial coeff_m;
      coeff_m.exps.assign(A.size(), 0);
      for (std::size_t i = 0; i < A.size(); ++i) coeff_m.exps[i] = m.exps[i];
      Element value = A.monomial(coeff_m, c * sign);
      for (std::size_t s = 0; s < args.size() && !value.is_zero(); ++s)
        value = value * apply_block(sp.model(), m, sp, s + 1, *sel[s]);
      total = total + value;
    }
  }
  return total;
}

namespace {

// substitution between operator spaces given a slot relabelling; merge maps a
// slot to the sum of two consecutive slots in the target.
Element remap(const PolyDiffOperator& f, const OperatorSpacePtr& target,
              const std::function<Element(std::size_t gen, std::size_t slot)>& image) {
  const OperatorSpace& sp = *f.space;
  const Algebra& A = *sp.model().algebra;
  std::vector<Element> im;
  for (std::size_t i = 0; i < A.size(); ++i) im.push_back(target->algebra()->var(i));
  for (std::size_t s = 1; s <= sp.arity(); ++s)
    for (std::size_t i = 0; i < A.size(); ++i) im.push_back(image(i, s));
  return f.elem.substitute(target->algebra(), im);
}

}  // namespace

PolyDiffOperator hochschild_b(const PolyDiffOperator& f) {
  std::size_t m = f.arity();
  auto target = OperatorSpace::make(f.space->model(), m + 1);
  // a_1 f(a_2, ..., a_{m+1})
  Element out = remap(f, target, [&](std::size_t g, std::size_t s) {
    return target->slot_var(g, s + 1);
  });
  // merges
  for (std::size_t i = 1; i <= m; ++i) {
    Element piece = remap(f, target, [&](std::size_t g, std::size_t s) {
      if (s < i) return target->slot_var(g, s);
      if (s == i) return target->slot_var(g, i) + target->slot_var(g, i + 1);
      return target->slot_var(g, s + 1);
    });
    out = (i % 2 == 0) ? out + piece : out - piece;
  }
  // f(a_1, ..., a_m) a_{m+1}
  Element last = remap(f, target, [&](std::size_t g, std::size_t s) {
    return target->slot_var(g, s);
  });
  out = (m % 2 == 0) ? out - last : out + last;
  return PolyDiffOperator::make(target, std::move(out));
}

PolyDiffOperator cup(const PolyDiffOperator& f, const PolyDiffOperator& g) {
  if (!signature_eq(f.space->model().algebra, g.space->model().algebra))
    fail(Errc::AlgebraMismatch, "cup of operators over different models");
  std::size_t m = f.arity(), r = g.arity();
  auto target = OperatorSpace::make(f.space->model(), m + r);
  Element ef = remap(f, target, [&](std::size_t gg, std::size_t s) {
    return target->slot_var(gg, s);
  });
  Element eg = remap(g, target, [&](std::size_t gg, std::size_t s) {
    return target->slot_var(gg, s + m);
  });
  return PolyDiffOperator::make(target, ef * eg);
}

PolyDiffOperator insert_at(const PolyDiffOperator& f, std::size_t k, const PolyDiffOperator& g) {
  if (!signature_eq(f.space->model().algebra, g.space->model().algebra))
    fail(Errc::AlgebraMismatch, "insertion of operators over different models");
  std::size_t m = f.arity(), r = g.arity();
  if (k < 1 || k > m) fail(Errc::InvalidArgument, "insertion slot out of range");
  const Algebra& A = *f.space->model().algebra;
  std::size_t n = A.size();
  auto target = OperatorSpace::make(f.space->model(), m + r - 1);
  const AlgebraPtr& T = target->algebra();
  Element g_mapped = remap(g, target, [&](std::size_t gg, std::size_t s) {
    return target->slot_var(gg, k + s - 1);
  });
  Element out = T->zero();
  for (const auto& [mono, c] : f.elem.terms()) {
    // prefix: coefficient part and the blocks before slot k
    Monomial prefix, suffix;
    prefix.exps.assign(T->size(), 0);
    suffix.exps.assign(T->size(), 0);
    for (std::size_t i = 0; i < n; ++i) prefix.exps[i] = mono.exps[i];
    for (std::size_t s = 1; s <= m; ++s) {
      if (s == k) continue;
      std::size_t tslot = s < k ? s : s + r - 1;
      for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t e = mono.exps[f.space->slot_index(i, s)];
        (s < k ? prefix : suffix).exps[target->slot_index(i, tslot)] = e;
      }
    }
    // differentiate g's image by the block of slot k, highest index first
    Element core = g_mapped;
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t e = mono.exps[f.space->slot_index(i, k)];
      for (std::uint32_t rep = 0; rep < e && !core.is_zero(); ++rep) {
        // d/dx acting from the left on the composite: coefficient derivative
        // plus the slot bumps y_{x,s} for g's slots
        std::vector<Element> vals(T->size(), T->zero());
        vals[i] = T->one();
        Derivation dcoeff(T, {-A.gen(i).degree.cochain, -A.gen(i).degree.chain,
                              A.gen(i).degree.flag},
                          0, vals);
        Element bumped = T->zero();
        for (std::size_t s = 0; s < r; ++s)
          bumped = bumped + target->slot_var(i, k + s) * core;
        core = dcoeff.apply(core) + bumped;
      }
    }
    out = out + T->monomial(prefix, c) * core * T->monomial(suffix, Rat(1));
  }
  return PolyDiffOperator::make(target, std::move(out));
}

int op_parity(const PolyDiffOperator& f) {
  if (f.elem.is_zero()) return 0;
  int p = f.space->algebra()->monomial_parity(f.elem.terms()[0].first);
  for (const auto& [m, c] : f.elem.terms())
    if (f.space->algebra()->monomial_parity(m) != p)
      fail(Errc::InvalidArgument, "operator is not parity-homogeneous");
  return p;
}

int op_degree(const PolyDiffOperator& f) {
  return (static_cast<int>(f.arity()) - 1 + op_parity(f)) % 2;
}

namespace {

// Suspended (Gerstenhaber) composition. Operators compose as coderivations of
// the tensor coalgebra on the shifted algebra; the composite is recovered in
// canonical form by evaluating the composition on separating argument tuples
// and solving for the coefficients. All arithmetic is exact.

int dec_twist(const std::vector<int>& parities) {
  // sum_j (m - j) p(a_j), mod 2
  int m = static_cast<int>(parities.size());
  int e = 0;
  for (int j = 0; j < m; ++j) e += (m - 1 - j) * parities[j];
  return e % 2;
}

// candidate support: union of single-term raw insertions (no cancellation)
std::vector<Monomial> insertion_support(const PolyDiffOperator& f, std::size_t k,
                                        const PolyDiffOperator& g) {
  std::set<Monomial> sup;
  for (const auto& [mf, cf] : f.elem.terms())
    for (const auto& [mg, cg] : g.elem.terms()) {
      PolyDiffOperator f1 = PolyDiffOperator::make(f.space, f.space->algebra()->monomial(mf));
      PolyDiffOperator g1 = PolyDiffOperator::make(g.space, g.space->algebra()->monomial(mg));
      PolyDiffOperator raw = insert_at(f1, k, g1);
      for (const auto& [m, c] : raw.elem.terms()) sup.insert(m);
    }
  return {sup.begin(), sup.end()};
}

// suspended insertion f o_k g, with g parity-homogeneous
PolyDiffOperator suspended_insert(const PolyDiffOperator& f, std::size_t k,
                                  const PolyDiffOperator& g, int pg) {
  std::size_t m = f.arity(), r = g.arity();
  std::size_t M = m + r - 1;
  const ManifoldModel& model = f.space->model();
  const Algebra& A = *model.algebra;
  auto target = OperatorSpace::make(model, M);
  std::vector<Monomial> support = insertion_support(f, k, g);
  if (support.empty()) return PolyDiffOperator::make(target, target->algebra()->zero());
  int dg_susp = (pg + static_cast<int>(r) + 1) % 2;  // |g~| = p(g) + r - 1

  // separating arguments: all model monomials within the relevant degree
  std::uint32_t dmax = 0;
  for (const auto& mm : support) dmax = std::max(dmax, mm.total());
  std::vector<Monomial> args = A.monomials_up_to(dmax + 1);

  // iterate tuples; accumulate equations until the system determines the
  // coefficients, then keep a verification margin
  std::vector<std::size_t> idx(M, 0);
  std::vector<std::map<Monomial, std::vector<Rat>>> equations;  // per tuple
  std::vector<std::map<Monomial, Rat>> rhs_eq;
  std::size_t tuples_done = 0, max_tuples = 6000;
  std::size_t rows_collected = 0;
  std::size_t rows_soft_cap = 6 * support.size() + 40;
  std::function<void(std::size_t)> rec = [&](std::size_t slot) {
    if (tuples_done >= max_tuples) return;
    if (slot == M) {
      ++tuples_done;
      std::vector<Element> tuple;
      std::vector<int> par;
      for (std::size_t s = 0; s < M; ++s) {
        tuple.push_back(A.monomial(args[idx[s]]));
        par.push_back(A.monomial_parity(args[idx[s]]));
      }
      // RHS: dec^{-1} of f~ o_k g~
      std::vector<Element> gargs(tuple.begin() + (k - 1), tuple.begin() + (k - 1) + r);
      std::vector<int> gpar(par.begin() + (k - 1), par.begin() + (k - 1) + r);
      Element G = apply_op(g, gargs);
      int sign = dec_twist(gpar);  // from g~ = dec(g)
      int prefix = 0;
      for (std::size_t j = 0; j + 1 < k; ++j) prefix += par[j] + 1;
      sign = (sign + dg_susp * prefix) % 2;  // g~ passing the suspended prefix
      std::vector<Element> fargs;
      std::vector<int> fpar;
      for (std::size_t j = 0; j + 1 < k; ++j) {
        fargs.push_back(tuple[j]);
        fpar.push_back(par[j]);
      }
      fargs.push_back(G);
      int pG = pg;
      for (int p : gpar) pG = (pG + p) % 2;
      fpar.push_back(pG);
      for (std::size_t j = k - 1 + r; j < M; ++j) {
        fargs.push_back(tuple[j]);
        fpar.push_back(par[j]);
      }
      sign = (sign + dec_twist(fpar)) % 2;  // f~ = dec(f)
      sign = (sign + dec_twist(par)) % 2;   // dec^{-1} on the composite
      Element rhs_val = apply_op(f, fargs);
      if (sign == 1) rhs_val = -rhs_val;
      // equations: coordinates of candidate applications vs rhs
      std::map<Monomial, std::vector<Rat>> eq;
      std::map<Monomial, Rat> rv;
      for (std::size_t j = 0; j < support.size(); ++j) {
        PolyDiffOperator cand = PolyDiffOperator::make(target, target->algebra()->monomial(support[j]));
        Element val = apply_op(cand, tuple);
        for (const auto& [mm, c] : val.terms()) {
          auto& vec = eq[mm];
          if (vec.empty()) vec.assign(support.size(), Rat(0));
          vec[j] = c;
        }
      }
      for (const auto& [mm, c] : rhs_val.terms()) {
        rv[mm] = c;
        if (!eq.count(mm)) eq[mm].assign(support.size(), Rat(0));
      }
      rows_collected += eq.size();
      equations.push_back(std::move(eq));
      rhs_eq.push_back(std::move(rv));
      if (rows_collected >= rows_soft_cap) tuples_done = max_tuples;
      return;
    }
    for (std::size_t i = 0; i < args.size() && tuples_done < max_tuples; ++i) {
      idx[slot] = i;
      rec(slot + 1);
    }
  };
  rec(0);

  std::size_t total_rows = 0;
  for (auto& eq : equations) total_rows += eq.size();
  QMat sys(total_rows, support.size());
  std::vector<Rat> b(total_rows, Rat(0));
  std::size_t row = 0;
  for (std::size_t t = 0; t < equations.size(); ++t) {
    for (auto& [mm, vec] : equations[t]) {
      for (std::size_t j = 0; j < support.size(); ++j) sys.at(row, j) = vec[j];
      auto it = rhs_eq[t].find(mm);
      if (it != rhs_eq[t].end()) b[row] = it->second;
      ++row;
    }
  }
  auto sol = sys.solve(b);
  if (!sol) fail(Errc::InvalidArgument, "suspended composite is not representable");
  if (sys.rank() < support.size()) {
    // soft cap starved the system of independent rows; rebuild with all tuples
    equations.clear();
    rhs_eq.clear();
    tuples_done = 0;
    rows_collected = 0;
    rows_soft_cap = static_cast<std::size_t>(-1);
    rec(0);
    total_rows = 0;
    for (auto& eq : equations) total_rows += eq.size();
    sys = QMat(total_rows, support.size());
    b.assign(total_rows, Rat(0));
    row = 0;
    for (std::size_t t = 0; t < equations.size(); ++t) {
      for (auto& [mm, vec] : equations[t]) {
        for (std::size_t j = 0; j < support.size(); ++j) sys.at(row, j) = vec[j];
        auto it = rhs_eq[t].find(mm);
        if (it != rhs_eq[t].end()) b[row] = it->second;
        ++row;
      }
    }
    sol = sys.solve(b);
    if (!sol) fail(Errc::InvalidArgument, "suspended composite is not representable");
    if (sys.rank() < support.size())
      fail(Errc::InvalidArgument, "separating arguments do not determine the composite");
  }
  Element out = target->algebra()->zero();
  for (std::size_t j = 0; j < support.size(); ++j)
    if ((*sol)[j] != 0) out = out + target->algebra()->monomial(support[j], (*sol)[j]);
  return PolyDiffOperator::make(target, out);
}

}  // namespace

PolyDiffOperator brace1(const PolyDiffOperator& f, const PolyDiffOperator& g) {
  std::size_t m = f.arity();
  if (m == 0) {
    auto target = OperatorSpace::make(f.space->model(), g.arity() > 0 ? g.arity() - 1 : 0);
    return PolyDiffOperator::make(target, target->algebra()->zero());
  }
  std::size_t r = g.arity();
  auto target = OperatorSpace::make(f.space->model(), m + r - 1);
  Element acc = target->algebra()->zero();
  for (int pg = 0; pg <= 1; ++pg) {
    Terms part;
    for (const auto& [mm, c] : g.elem.terms())
      if (g.space->algebra()->monomial_parity(mm) == pg) part.emplace_back(mm, c);
    if (part.empty()) continue;
    PolyDiffOperator gp = PolyDiffOperator::make(g.space, Element(g.space->algebra(), part));
    for (std::size_t k = 1; k <= m; ++k)
      acc = acc + suspended_insert(f, k, gp, pg).elem;
  }
  return PolyDiffOperator::make(target, acc);
}

PolyDiffOperator op_bracket(const PolyDiffOperator& f, const PolyDiffOperator& g) {
  PolyDiffOperator fg = brace1(f, g);
  PolyDiffOperator gf = brace1(g, f);
  int sign = (op_degree(f) * op_degree(g)) % 2 == 0 ? 1 : -1;
  fg.elem = fg.elem - gf.elem * Rat(sign);
  return PolyDiffOperator::make(fg.space, fg.elem);
}

PolyDiffOperator involution_i(const PolyDiffOperator& f) {
  std::size_t m = f.arity();
  auto target = OperatorSpace::make(f.space->model(), m);
  Element rev = remap(f, target, [&](std::size_t g, std::size_t s) {
    return target->slot_var(g, m + 1 - s);
  });
  int e = static_cast<int>((m * (m + 1) / 2) % 2);
  Rat sign = (e == 0) ? Rat(-1) : Rat(1);  // -(-1)^{m(m+1)/2}
  return PolyDiffOperator::make(target, rev * sign);
}

PolyDiffOperator bv_laplacian(const ManifoldModel& dcrit, const Element& volume) {
  const Algebra& A = *dcrit.algebra;
  // volume must be invertible, hence a nonzero constant in the polynomial model
  if (volume.is_zero()) fail(Errc::NonUnitVolume, "volume vanishes");
  for (const auto& [m, c] : volume.terms())
    if (m.total() != 0) fail(Errc::NonUnitVolume, "volume is not an invertible constant");
  // coordinates and their antifields
  auto sp = OperatorSpace::make(dcrit, 1);
  Element e = sp->algebra()->zero();
  bool any = false;
  for (std::size_t i = 0; i < A.size(); ++i) {
    if (A.gen(i).degree.chain != 0) continue;
    auto anti = A.index_of("af_" + A.gen(i).name);
    if (!anti) fail(Errc::InvalidArgument, "model has no antifield for '" + A.gen(i).name + "'");
    e = e + sp->slot_var(i, 1) * sp->slot_var(*anti, 1);
    any = true;
  }
  if (!any) fail(Errc::InvalidArgument, "not a derived critical locus model");
  return PolyDiffOperator::make(sp, e);
}

// ---------------------------------------------------------------------------
// Twisted de Rham

TwistedDeRham twisted_de_rham(const ManifoldModel& M, const Element& f, int h_max,
                              std::uint32_t poly_window) {
  DeRham dr(M);
  const AlgebraPtr& D = dr.algebra();
  Element df = dr.d(dr.embed(rebind(M.algebra, f)));
  int max_weight = 0;
  for (std::size_t i = 0; i < D->size(); ++i)
    if (D->gen(i).weight == 1) ++max_weight;
  max_weight = std::min(max_weight, 6);

  // seeds: monomials by form weight
  std::vector<Monomial> all = enumerate_bounded(D, dr.base_gen_count(), poly_window, max_weight);
  std::map<int, std::set<std::pair<Monomial, int>>> by_weight;  // weight -> (monomial, hbar)
  for (auto& m : all) {
    int w = D->monomial_weight(m);
    for (int j = 0; j <= h_max; ++j) by_weight[w].insert({m, j});
  }
  auto dtw = [&](const Monomial& m, int j) {
    // hbar d + df /\ -
    std::vector<std::pair<std::pair<Monomial, int>, Rat>> out;
    Element wedge = df * D->monomial(m);
    for (const auto& [mm, c] : wedge.terms()) out.push_back({{mm, j}, c});
    if (j + 1 <= h_max) {
      Element dm = dr.d(D->monomial(m));
      for (const auto& [mm, c] : dm.terms()) out.push_back({{mm, j + 1}, c});
    }
    return out;
  };
  TwistedDeRham tw;
  tw.model = M;
  tw.h_max = h_max;
  // saturate upward in weight
  for (int w = 0; w < max_weight; ++w) {
    if (!by_weight.count(w)) continue;
    for (const auto& key : by_weight.at(w))
      for (const auto& [tgt, c] : dtw(key.first, key.second))
        if (by_weight[w + 1].insert(tgt).second) tw.extended.insert(w + 1);
  }
  std::map<int, std::map<std::pair<Monomial, int>, std::size_t>> index;
  for (auto& [w, keys] : by_weight) {
    std::vector<std::string> labels;
    std::size_t i = 0;
    for (const auto& key : keys) {
      index[w][key] = i++;
      labels.push_back(D->monomial(key.first).str() + "*h^" + std::to_string(key.second));
    }
    tw.complex.set_basis(w, std::move(labels));
  }
  for (auto& [w, keys] : by_weight) {
    if (!by_weight.count(w + 1)) continue;
    QMat d(by_weight[w + 1].size(), keys.size());
    std::size_t j = 0;
    for (const auto& key : keys) {
      for (const auto& [tgt, c] : dtw(key.first, key.second)) d.at(index[w + 1].at(tgt), j) += c;
      ++j;
    }
    tw.complex.set_differential(w, std::move(d));
  }
  tw.complex.validate();
  return tw;
}

TwistedAcyclicity twisted_acyclicity_line(const ManifoldModel& line, const Element& f, int h_max,
                                          std::uint32_t poly_window) {
  if (line.base.size() != 1) fail(Errc::InvalidArgument, "expected a one-dimensional model");
  TwistedAcyclicity out;
  TwistedDeRham tw = twisted_de_rham(line, f, h_max, poly_window);
  out.h0_trivial = tw.complex.differential(0).kernel_basis().empty();

  // explicit preimages: solve (hbar d + df) a = b with the Neumann series when
  // df/dx has an invertible constant term
  DeRham dr(line);
  const AlgebraPtr& D = dr.algebra();
  Element df = dr.d(dr.embed(rebind(line.algebra, f)));
  // df = u * dx with u in the base ring
  Element u = line.algebra->zero();
  for (const auto& [m, c] : df.terms()) {
    Monomial base;
    base.exps.assign(line.algebra->size(), 0);
    for (std::size_t i = 0; i < line.algebra->size(); ++i) base.exps[i] = m.exps[i];
    u = u + line.algebra->monomial(base, c);
  }
  Monomial unit;
  unit.exps.assign(line.algebra->size(), 0);
  Rat u0 = u.coeff(unit);
  if (u0 == 0) return out;  // no invertible leading term; only H^0 is certified
  bool all_solved = true;
  Derivation ddx = line.algebra->partial(0);
  Element ured = u * (Rat(1) / u0) - line.algebra->one();  // nilpotency source: u/u0 - 1
  for (std::uint32_t k = 0; k <= poly_window && all_solved; ++k) {
    // target b = x^k dx at each hbar order; solve a as a series
    Element xk = line.algebra->var(0).pow(k);
    for (int j = 0; j <= h_max && all_solved; ++j) {
      // a = sum_i a_i hbar^{j+i}: u a_0 = x^k; u a_{i+1} = -a_i'
      std::vector<Element> a(h_max + 1, line.algebra->zero());
      // division by u = u0(1 + ured): inverse via finite geometric series in
      // the polynomial window (exactness checked below)
      auto divide_u = [&](Element rhs) {
        Element acc = line.algebra->zero();
        Element term = rhs * (Rat(1) / u0);
        for (int it = 0; it <= static_cast<int>(poly_window) + 2 && !term.is_zero(); ++it) {
          acc = acc + term;
          term = -(term * ured) * Rat(1);
          // drop anything past the window; verification below is exact
          Terms keep;
          for (const auto& [m, c] : term.terms())
            if (m.total() <= poly_window + 2) keep.emplace_back(m, c);
          term = Element(line.algebra, keep);
        }
        return acc;
      };
      a[0] = divide_u(xk);
      for (int i = 0; j + i + 1 <= h_max; ++i) a[i + 1] = divide_u(-ddx.apply(a[i]));
      // verify: hbar a' + u a = x^k hbar^j exactly in the truncation
      bool good = true;
      for (int p = 0; p <= h_max - j; ++p) {
        Element lhs = u * a[p] + (p > 0 ? ddx.apply(a[p - 1]) : line.algebra->zero());
        Element want = (p == 0) ? xk : line.algebra->zero();
        if (!(lhs == want)) good = false;
      }
      if (!good) all_solved = false;
    }
  }
  out.h1_solvable = all_solved;
  return out;
}

// ---------------------------------------------------------------------------
// Right de Rham

RightDeRham::RightDeRham(ManifoldModel model, RightConnectionData nabla,
                         std::uint32_t check_window)
    : model_(std::move(model)), nabla_(std::move(nabla)) {
  pa_ = PolAlgebra::make(model_, -2, false);
  const Algebra& A = *model_.algebra;
  if (nabla_.nabla2.size() != A.size())
    fail(Errc::InvalidArgument, "nabla_2 table size mismatch");
  // flatness on a window
  std::vector<Monomial> window =
      enumerate_bounded(pa_->algebra(), A.size(), check_window, 3, 6);
  for (const auto& m : window) {
    Element e = pa_->algebra()->monomial(m);
    if (!differential(differential(e)).is_zero())
      fail(Errc::ConnectionNotFlat, "(D^nabla)^2 != 0 on " + e.str());
  }
}

Element RightDeRham::d1(const Element& a) const { return schouten(pa_, pa_->diff_element(), a); }

namespace {

Element d2_mono(const RightDeRham& rd, const PolAlgebraPtr& pa,
                const std::vector<Element>& nabla2, const Monomial& m) {
  const Algebra& P = *pa->algebra();
  std::size_t n = pa->model_gen_count();
  std::uint32_t t = m.total();
  if (t == 0 || pa->weight(m) == 0) return P.zero();
  if (t == 1) {
    std::size_t i = 0;
    while (m.exps[i] == 0) ++i;
    if (i < n) return P.zero();
    return pa->embed(nabla2[i - n]);
  }
  // split off the first factor and use the second-order Leibniz rule
  std::size_t z = 0;
  while (m.exps[z] == 0) ++z;
  Monomial zm, rest = m;
  zm.exps.assign(P.size(), 0);
  zm.exps[z] = 1;
  rest.exps[z] -= 1;
  int pz = P.gen(z).degree.parity();
  Element ez = P.var(z);
  Element erest = P.monomial(rest);
  Element out = d2_mono(rd, pa, nabla2, zm) * erest;
  Element tail = ez * d2_mono(rd, pa, nabla2, rest) +
                 Rat(kD2CrossSign) * schouten(pa, ez, erest);
  out = out + (pz == 0 ? tail : -tail);
  return out;
}

}  // namespace

Element RightDeRham::d2(const Element& a) const {
  Element out = pa_->algebra()->zero();
  for (const auto& [m, c] : a.terms()) out = out + d2_mono(*this, pa_, nabla_.nabla2, m) * c;
  return out;
}

Element RightDeRham::dk(const Element& a) const {
  if (nabla_.higher.empty()) return pa_->algebra()->zero();
  const Algebra& P = *pa_->algebra();
  std::size_t n = pa_->model_gen_count();
  Element out = P.zero();
  for (const auto& [m, c] : a.terms()) {
    Monomial duals, coeff;
    duals.exps.assign(P.size(), 0);
    coeff.exps.assign(P.size(), 0);
    for (std::size_t i = 0; i < P.size(); ++i)
      (i < n ? coeff : duals).exps[i] = m.exps[i];
    auto it = nabla_.higher.find(duals);
    if (it == nabla_.higher.end()) continue;
    out = out + P.monomial(coeff, c) * pa_->embed(it->second);
  }
  return out;
}

Element RightDeRham::differential(const Element& a) const { return d1(a) + d2(a) + dk(a); }

Element RightDeRham::linf_bracket(const std::vector<Element>& args) const {
  struct LinOp {
    int parity;
    std::function<Element(const Element&)> f;
  };
  LinOp acc{1, [this](const Element& e) { return differential(e); }};
  for (const Element& a : args) {
    if (a.is_zero()) return pa_->algebra()->zero();
    int pa_r = pa_->algebra()->monomial_parity(a.terms()[0].first);
    for (const auto& [m, c] : a.terms())
      if (pa_->algebra()->monomial_parity(m) != pa_r)
        fail(Errc::InvalidArgument, "bracket arguments must be parity-homogeneous");
    LinOp prev = acc;
    Element acopy = a;
    int sign = koszul_sign(prev.parity, pa_r);
    acc = LinOp{(prev.parity + pa_r) % 2, [prev, acopy, sign](const Element& e) {
                  return prev.f(acopy * e) - Rat(sign) * (acopy * prev.f(e));
                }};
  }
  return acc.f(pa_->algebra()->one());
}

Element RightDeRham::contract_form(const Element& polyvector, const Element& form,
                                   const DeRham& dr) const {
  // iterated interior product: duals against d-symbols, pairing 1
  const Algebra& P = *pa_->algebra();
  std::size_t n = pa_->model_gen_count();
  Element out = dr.algebra()->zero();
  for (const auto& [pm, pc] : polyvector.terms()) {
    // contract the dual factors one at a time, highest index first
    Element cur = form * pc;
    Monomial coeff;
    coeff.exps.assign(dr.algebra()->size(), 0);
    for (std::size_t i = 0; i < n; ++i) coeff.exps[i] = pm.exps[i];
    for (std::size_t i = n; i-- > 0;) {
      std::uint32_t e = pm.exps[n + i];
      for (std::uint32_t k = 0; k < e && !cur.is_zero(); ++k) {
        // interior product with del_{g_i}
        std::vector<Element> vals(dr.algebra()->size(), dr.algebra()->zero());
        vals[dr.base_gen_count() + i] = dr.algebra()->one();
        const Generator& g = dr.algebra()->gen(i);
        Derivation iota(dr.algebra(),
                        {-g.degree.cochain, -g.degree.chain, flag_add(g.degree.flag, Flag::Unequal)},
                        -1, vals);
        cur = iota.apply(cur);
      }
    }
    out = out + dr.algebra()->monomial(coeff, Rat(1)) * cur;
  }
  return out;
}

QuantisationElement QuantisationElement::zero(const RightDeRham& rd, int h_max) {
  QuantisationElement q;
  q.h_max = h_max;
  q.coeff.assign(h_max + 1, rd.carrier()->algebra()->zero());
  return q;
}

void QuantisationElement::validate(const RightDeRham& rd) const {
  if (static_cast<int>(coeff.size()) != h_max + 1)
    fail(Errc::InvalidArgument, "coefficient count mismatch");
  const PolAlgebraPtr& pa = rd.carrier();
  if (!coeff[0].is_zero())
    fail(Errc::DegreeMismatch, "quantisation element must vanish at hbar^0");
  for (int p = 0; p <= h_max; ++p)
    for (const auto& [m, c] : coeff[p].terms())
      if (pa->weight(m) > p + 1)
        fail(Errc::DegreeMismatch, "weight-" + std::to_string(pa->weight(m)) +
                                       " term carries hbar^" + std::to_string(p));
}

namespace {

using Series = std::vector<Element>;  // index = hbar power

Series series_zero(const PolAlgebraPtr& pa, int h_max) {
  return Series(h_max + 1, pa->algebra()->zero());
}

Series series_mul(const PolAlgebraPtr& pa, const Series& a, const Series& b) {
  Series out = series_zero(pa, static_cast<int>(a.size()) - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; i + j < a.size(); ++j) out[i + j] = out[i + j] + a[i] * b[j];
  return out;
}

Series series_exp(const PolAlgebraPtr& pa, const Series& s) {
  // requires s[0] = 0
  Series out = series_zero(pa, static_cast<int>(s.size()) - 1);
  out[0] = pa->algebra()->one();
  Series power = out;
  Rat fact(1);
  for (std::size_t k = 1; k < s.size(); ++k) {
    power = series_mul(pa, power, s);
    fact *= static_cast<long>(k);
    bool nonzero = false;
    for (auto& e : power)
      if (!e.is_zero()) nonzero = true;
    if (!nonzero) break;
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = out[j] + power[j] * (Rat(1) / fact);
  }
  return out;
}

}  // namespace

QmeReport qme_check(const RightDeRham& rd, const QuantisationElement& S) {
  S.validate(rd);
  const PolAlgebraPtr& pa = rd.carrier();
  int h = S.h_max;

  // route 1: sum_n [S,...,S]_{n,nabla} / n!
  Series route1 = series_zero(pa, h);
  {
    Element d1v = rd.differential(pa->algebra()->one());
    route1[0] = route1[0] + d1v;  // the n = 0 term D(1)
    // iterate over ordered tuples of hbar-orders (each >= 1)
    std::function<void(std::vector<int>&, int)> rec = [&](std::vector<int>& tuple, int used) {
      if (!tuple.empty()) {
        std::vector<Element> args;
        for (int p : tuple) args.push_back(S.coeff[p]);
        bool any_zero = false;
        for (auto& a : args)
          if (a.is_zero()) any_zero = true;
        if (!any_zero) {
          Rat fact(1);
          for (std::size_t k = 2; k <= tuple.size(); ++k) fact *= static_cast<long>(k);
          Element br = rd.linf_bracket(args);
          route1[used] = route1[used] + br * (Rat(1) / fact);
        }
      }
      if (used >= h) return;
      for (int p = 1; p + used <= h; ++p) {
        tuple.push_back(p);
        rec(tuple, used + p);
        tuple.pop_back();
      }
    };
    std::vector<int> tuple;
    rec(tuple, 0);
  }

  // route 2: e^{-S} D(e^S)
  Series route2 = series_zero(pa, h);
  {
    Series s = S.coeff;
    Series minus_s = s;
    for (auto& e : minus_s) e = -e;
    Series es = series_exp(pa, s);
    Series ems = series_exp(pa, minus_s);
    Series des = series_zero(pa, h);
    for (int p = 0; p <= h; ++p) des[p] = rd.differential(es[p]);
    route2 = series_mul(pa, ems, des);
  }

  for (int p = 0; p <= h; ++p)
    if (!(route1[p] == route2[p]))
      fail(Errc::InvalidArgument,
           "independent QME evaluations disagree at hbar^" + std::to_string(p));

  QmeReport rep;
  rep.residual = route1;
  rep.passes = true;
  for (auto& e : rep.residual)
    if (!e.is_zero()) rep.passes = false;
  return rep;
}

OperatorSeries self_dual_involution(const OperatorSeries& series) {
  OperatorSeries out;
  out.h_max = series.h_max;
  for (std::size_t p = 0; p < series.coeff.size(); ++p) {
    PolyDiffOperator i_op = involution_i(series.coeff[p]);
    if (p % 2 == 1) i_op.elem = -i_op.elem;  // hbar -> -hbar
    out.coeff.push_back(PolyDiffOperator::make(i_op.space, i_op.elem));
  }
  return out;
}

}  // namespace sps
