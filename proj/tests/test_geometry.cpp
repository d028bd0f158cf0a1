#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "sps/constructions.hpp"

using namespace sps;

namespace {

ManifoldModel dcrit_line(const char* fexpr) {
  ManifoldModel line = ManifoldModel::affine_space({"x"});
  Element x = line.algebra->var("x");
  Element f;
  if (std::string(fexpr) == "x^2/2")
    f = x * x * Rat(1, 2);
  else if (std::string(fexpr) == "x^3/3")
    f = x * x * x * Rat(1, 3);
  else
    f = line.algebra->zero();
  return derived_critical_locus(line, f);
}

ManifoldModel bg_so3() {
  ManifoldModel pt = ManifoldModel::point();
  return chevalley_eilenberg(LieAlgebraData::so3(), pt, {pt.algebra->q(), pt.algebra->q(), pt.algebra->q()});
}

}  // namespace

TEST_CASE("one-forms of the affine line: d(x^2) = 2x dx and pairing") {
  ManifoldModel line = ManifoldModel::affine_space({"x"});
  DeRham dr(line);
  Element x = dr.embed(line.algebra->var("x"));
  CHECK(dr.d(x * x) == Rat(2) * x * dr.dgen(0));
  // <D, da> = D(a) for randomized pairs
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> coeff(-3, 3);
  for (int it = 0; it < 100; ++it) {
    Element val = line.algebra->var("x").pow(it % 3) * Rat(coeff(rng));
    Derivation v(line.algebra, {0, 0, Flag::Equal}, 0, {val});
    Element a = line.algebra->var("x").pow(it % 4 + 1) * Rat(coeff(rng));
    CHECK(dr.contract(v, dr.d(dr.embed(a))) == dr.embed(v.apply(a)));
  }
}

TEST_CASE("one-forms of DCrit(line, x^2/2): induced differential") {
  ManifoldModel X = dcrit_line("x^2/2");
  DeRham dr(X);
  // module convention: delta(d xi) = d(delta xi) = dx
  std::size_t xi = *X.algebra->index_of("af_x");
  CHECK(dr.module_qdel(dr.dgen(xi)) == dr.dgen(*X.algebra->index_of("x")));
  // in the anticommuting total convention the sign flips
  CHECK(dr.qdel(dr.dgen(xi)) == -dr.dgen(*X.algebra->index_of("x")));
}

TEST_CASE("one-forms of Bg(so3): rank 3 in cochain degree 1") {
  ManifoldModel X = bg_so3();
  DeRham dr(X);
  int count = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    TriDegree d = dr.algebra()->gen(3 + i).degree;
    CHECK(d.cochain == 1);
    ++count;
  }
  CHECK(count == 3);
}

TEST_CASE("total de Rham differential squares to zero on random elements") {
  for (const char* fe : {"x^2/2", "x^3/3", "0"}) {
    ManifoldModel X = dcrit_line(fe);
    DeRham dr(X);
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<int> c(-2, 2);
    for (int it = 0; it < 60; ++it) {
      // random element of the DR algebra
      Terms t;
      for (int k = 0; k < 3; ++k) {
        Monomial m;
        m.exps.assign(dr.algebra()->size(), 0);
        for (std::size_t i = 0; i < dr.algebra()->size(); ++i)
          m.exps[i] = dr.algebra()->odd(i) ? (rng() & 1u) : (rng() % 3);
        t.emplace_back(m, Rat(c(rng)));
      }
      Element a(dr.algebra(), t);
      CHECK(dr.total(dr.total(a)).is_zero());
    }
  }
}

TEST_CASE("Fil multiplicativity on random pairs") {
  ManifoldModel X = dcrit_line("x^2/2");
  DeRham dr(X);
  std::mt19937_64 rng(37);
  for (int it = 0; it < 200; ++it) {
    Terms ta, tb;
    Monomial m;
    m.exps.assign(dr.algebra()->size(), 0);
    for (std::size_t i = 0; i < dr.algebra()->size(); ++i)
      m.exps[i] = dr.algebra()->odd(i) ? (rng() & 1u) : (rng() % 2);
    ta.emplace_back(m, Rat(1 + (int)(rng() % 3)));
    for (std::size_t i = 0; i < dr.algebra()->size(); ++i)
      m.exps[i] = dr.algebra()->odd(i) ? (rng() & 1u) : (rng() % 2);
    tb.emplace_back(m, Rat(1 + (int)(rng() % 3)));
    Element a(dr.algebra(), ta), b(dr.algebra(), tb);
    if ((a * b).is_zero()) continue;
    CHECK((a * b).min_weight() >= a.min_weight() + b.min_weight());
  }
}

TEST_CASE("de Rham cohomology of a point") {
  DeRham dr(ManifoldModel::point());
  DeRhamOptions opt;
  opt.degree_lo = -1;
  opt.degree_hi = 2;
  Complex c = de_rham_complex(dr, opt, 0);
  c.validate();
  CHECK(c.cohomology(0).dimension == 1);
  CHECK(c.cohomology(1).dimension == 0);
}

TEST_CASE("H^0 DR(DCrit(line, x^2/2)) = Q, matching DR(pi^0 X)") {
  ManifoldModel X = dcrit_line("x^2/2");
  DeRham dr(X);
  DeRhamOptions opt;
  opt.degree_lo = -2;
  opt.degree_hi = 2;
  opt.poly_bound = 8;
  std::set<int> lossy;
  Complex c = de_rham_complex(dr, opt, 0, &lossy);
  c.validate();
  CHECK(c.cohomology(0).dimension == 1);
  // truncation pi^0: ideal (x), H_0 of dimension 1
  TruncationReport tr = truncation_pi0(X);
  REQUIRE(tr.ideal_generators.size() == 1);
  CHECK(tr.ideal_generators[0] == X.algebra->var("x"));
  CHECK(tr.h0_dimension == 1);
}

TEST_CASE("truncation of DCrit(line, 0) and DCrit(line, x^3/3)") {
  ManifoldModel X0 = dcrit_line("0");
  TruncationReport t0 = truncation_pi0(X0);
  CHECK(t0.ideal_generators.empty());
  CHECK(t0.h0_dimension == 9);  // the full polynomial window: pi^0 X = line

  ManifoldModel X3 = dcrit_line("x^3/3");
  TruncationReport t3 = truncation_pi0(X3);
  REQUIRE(t3.ideal_generators.size() == 1);
  CHECK(t3.h0_dimension == 2);  // Q[x]/(x^2)
}

TEST_CASE("Fil^2 DR of Bg(so3) contains the Killing class in degree 4") {
  ManifoldModel X = bg_so3();
  DeRham dr(X);
  DeRhamOptions opt;
  opt.weight_cutoff = 3;
  opt.degree_lo = 2;
  opt.degree_hi = 5;
  Complex fil2 = de_rham_complex(dr, opt, 2);
  fil2.validate();
  auto h4 = fil2.cohomology(4);
  CHECK(h4.dimension >= 1);
  // the Killing representative sum_a d(eps_a)^2 is a cocycle
  Element killing = dr.algebra()->zero();
  for (std::size_t a = 0; a < 3; ++a) killing = killing + dr.dgen(a) * dr.dgen(a);
  CHECK(dr.total(killing).is_zero());
}

TEST_CASE("presymplectic closure residuals") {
  ManifoldModel plane = ManifoldModel::affine_space({"x", "y", "z"});
  DeRham dr(plane);
  Element x = dr.embed(plane.algebra->var("x"));
  Element y = dr.embed(plane.algebra->var("y"));
  auto dx = dr.dgen(0), dy = dr.dgen(1), dz = dr.dgen(2);

  PreSymplecticStructure closed;
  closed.shift_n = 0;
  closed.omega = x * dx * dy;  // d(x dx dy) = dx dx dy = 0
  CHECK(presymplectic_check(dr, closed).closed);

  PreSymplecticStructure open;
  open.shift_n = 0;
  open.omega = y * dx * dz;  // d = dy dx dz != 0
  auto rep = presymplectic_check(dr, open);
  CHECK_FALSE(rep.closed);
  CHECK_FALSE(rep.residuals[3].is_zero());

  PreSymplecticStructure zero;
  zero.shift_n = 0;
  zero.omega = dr.algebra()->zero();
  CHECK(presymplectic_check(dr, zero).closed);
}

TEST_CASE("canonical structure on T*line[1] is symplectic") {
  ManifoldModel line = ManifoldModel::affine_space({"x"});
  ShiftedCotangent tc = shifted_cotangent(line, 1);
  CHECK(tc.model.kind == ModelKind::Dg);
  DeRham dr(tc.model);
  auto rep = symplectic_check(dr, tc.canonical_omega);
  CHECK(rep.nondegenerate);

  // zero form on the same model is degenerate
  PreSymplecticStructure zero;
  zero.shift_n = -1;
  zero.omega = dr.algebra()->zero();
  auto bad = symplectic_check(dr, zero);
  CHECK_FALSE(bad.nondegenerate);
}

TEST_CASE("parity-reversed shifted cotangent carries the unequal flag") {
  ManifoldModel line = ManifoldModel::affine_space({"x"});
  ShiftedCotangent tc = shifted_cotangent(line, 1, true);
  auto idx = tc.model.algebra->index_of("p_x");
  REQUIRE(idx.has_value());
  CHECK(tc.model.algebra->gen(*idx).degree.flag == Flag::Unequal);
  DeRham dr(tc.model);
  CHECK(presymplectic_check(dr, tc.canonical_omega).closed);
  CHECK(symplectic_check(dr, tc.canonical_omega).nondegenerate);
}

TEST_CASE("T*point[n] is a point") {
  ManifoldModel pt = ManifoldModel::point();
  ShiftedCotangent tc = shifted_cotangent(pt, 3);
  CHECK(tc.model.algebra->size() == 0);
  DeRham dr(tc.model);
  CHECK(symplectic_check(dr, tc.canonical_omega).nondegenerate);
}

TEST_CASE("Killing form on Bg(so3) is 2-shifted symplectic") {
  ManifoldModel X = bg_so3();
  DeRham dr(X);
  PreSymplecticStructure om;
  om.shift_n = 2;
  om.parity_reversed = false;
  Element k = dr.algebra()->zero();
  for (std::size_t a = 0; a < 3; ++a) k = k + dr.dgen(a) * dr.dgen(a);
  om.omega = k;
  auto rep = symplectic_check(dr, om);
  CHECK(rep.nondegenerate);
  // a rank-deficient invariant candidate: zero form
  PreSymplecticStructure zero;
  zero.shift_n = 2;
  zero.omega = dr.algebra()->zero();
  CHECK_FALSE(symplectic_check(dr, zero).nondegenerate);
}

TEST_CASE("products of models") {
  ManifoldModel pt = ManifoldModel::point();
  ManifoldModel line = ManifoldModel::affine_space({"x"});
  ManifoldModel p1 = product(pt, line);
  CHECK(p1.algebra->size() == 1);

  ManifoldModel plane = product(line, line);
  CHECK(plane.algebra->size() == 2);
  CHECK(plane.base.size() == 2);
  DeRham dr(plane);
  CHECK(dr.algebra()->size() == 4);

  // DCrit(line, x^2/2) x Bg(abelian 1-dim): a dgNQ model
  ManifoldModel dc = dcrit_line("x^2/2");
  ManifoldModel pt2 = ManifoldModel::point();
  ManifoldModel bg1 = chevalley_eilenberg(LieAlgebraData::zero(1), pt2, {pt2.algebra->q()});
  ManifoldModel mixed = product(dc, bg1);
  CHECK(mixed.kind == ModelKind::DgNQ);
  int chain_gens = 0, cochain_gens = 0;
  for (std::size_t i = 0; i < mixed.algebra->size(); ++i) {
    if (mixed.algebra->gen(i).degree.chain > 0) ++chain_gens;
    if (mixed.algebra->gen(i).degree.cochain > 0) ++cochain_gens;
  }
  CHECK(chain_gens == 1);
  CHECK(cochain_gens == 1);
}

TEST_CASE("derived critical locus: f = 0 reproduces T*M[1]") {
  ManifoldModel line = ManifoldModel::affine_space({"x"});
  ManifoldModel d0 = dcrit_line("0");
  ShiftedCotangent tm1 = shifted_cotangent(line, 1);
  REQUIRE(d0.algebra->size() == tm1.model.algebra->size());
  for (std::size_t i = 0; i < d0.algebra->size(); ++i) {
    CHECK(d0.algebra->gen(i).degree == tm1.model.algebra->gen(i).degree);
    CHECK(d0.algebra->delta_of(i).is_zero());
  }
}

TEST_CASE("derived critical locus of an odd function") {
  // M = R^{1|1} with even x, odd y; f = x*y
  auto alg = make_cdga({{"x", {0, 0, Flag::Equal}}, {"y", {0, 0, Flag::Unequal}}}, {}, {});
  ManifoldModel M = ManifoldModel::make(ModelKind::Dg, alg);
  Element f = alg->var("x") * alg->var("y");
  ManifoldModel X = derived_critical_locus(M, f);
  // delta(af_x) = df/dx = y, delta(af_y) = df/dy = x (left derivative)
  CHECK(X.algebra->delta().apply(X.algebra->var("af_x")) == X.algebra->var("y"));
  CHECK(X.algebra->delta().apply(X.algebra->var("af_y")) == X.algebra->var("x"));
  // flags reversed relative to the coordinates
  CHECK(X.algebra->gen(*X.algebra->index_of("af_x")).degree.flag == Flag::Unequal);
  CHECK(X.algebra->gen(*X.algebra->index_of("af_y")).degree.flag == Flag::Equal);
}

TEST_CASE("chevalley_eilenberg validates actions and Jacobi") {
  ManifoldModel pt = ManifoldModel::point();
  // abelian, point: exterior algebra with Q = 0
  ManifoldModel ab = chevalley_eilenberg(LieAlgebraData::zero(2), pt, {pt.algebra->q(), pt.algebra->q()});
  CHECK_FALSE(ab.algebra->has_q());

  // so(3) at a point: CE cohomology dims (1,0,0,1) via the complex
  ManifoldModel so3 = bg_so3();
  DeRham dr(so3);
  DeRhamOptions opt;
  opt.weight_cutoff = 0;
  opt.degree_lo = 0;
  opt.degree_hi = 4;
  Complex c = de_rham_complex(dr, opt, 0);
  c.validate();
  CHECK(c.cohomology(0).dimension == oracle::ce_cohomology_dim(oracle::LieTable::so3(), 0));
  CHECK(c.cohomology(1).dimension == 0);
  CHECK(c.cohomology(2).dimension == 0);
  CHECK(c.cohomology(3).dimension == 1);

  // 1-dim g acting on the line by d/dx: Q(x) = eps, Q(eps) = 0
  ManifoldModel line = ManifoldModel::affine_space({"x"});
  Derivation ddx = line.algebra->partial(0);
  ManifoldModel quot = chevalley_eilenberg(LieAlgebraData::zero(1), line, {ddx});
  CHECK(quot.algebra->q().apply(quot.algebra->var("x")) == quot.algebra->var("eps1"));
  // H^0 = invariants = constants
  DeRham qdr(quot);
  DeRhamOptions qopt;
  qopt.weight_cutoff = 0;
  qopt.degree_lo = 0;
  qopt.degree_hi = 1;
  qopt.poly_bound = 6;
  std::set<int> lossy;
  Complex qc = de_rham_complex(qdr, qopt, 0, &lossy);
  CHECK(qc.cohomology(0).dimension == 1);

  // non-action: d/dx paired with multiplication by x for an abelian algebra
  Derivation xddx(line.algebra, {0, 0, Flag::Equal}, 0, {line.algebra->var("x")});
  CHECK_THROWS_AS(chevalley_eilenberg(LieAlgebraData::zero(2), line, {ddx, xddx}), EngineError);
}

TEST_CASE("strict (-2) constructor") {
  ManifoldModel line = ManifoldModel::affine_space({"x"});
  const Algebra& B = *line.algebra;

  // phi = 0, flat connection: delta = 0
  StrictMinus2Data d0;
  d0.base = line;
  d0.rank_e = 1;
  d0.inner = {{B.one()}};
  d0.phi = {B.zero()};
  ManifoldModel m0 = strict_minus2(d0);
  CHECK_FALSE(m0.algebra->has_delta());

  // hyperbolic pairing, phi = (x, 0): delta(e2) = x, delta(f) = -e1
  StrictMinus2Data d1;
  d1.base = line;
  d1.rank_e = 2;
  d1.inner = {{B.zero(), B.one()}, {B.one(), B.zero()}};
  d1.phi = {B.var("x"), B.zero()};
  ManifoldModel m1 = strict_minus2(d1);
  CHECK(m1.algebra->delta().apply(m1.algebra->var("e2")) == m1.algebra->var("x"));
  CHECK(m1.algebra->delta().apply(m1.algebra->var("f_x")) == -m1.algebra->var("e1"));
  CHECK(m1.algebra->delta().apply(m1.algebra->var("e1")).is_zero());

  // Q(phi,phi) = x has d Q(phi,phi) != 0
  StrictMinus2Data bad = d0;
  bad.inner = {{B.var("x")}};
  bad.phi = {B.one()};
  CHECK_THROWS_AS(strict_minus2(bad), EngineError);
  try {
    strict_minus2(bad);
  } catch (const EngineError& e) {
    CHECK(e.code() == Errc::MasterEquationFails);
  }
}

TEST_CASE("lie algebra data validation and nilpotency") {
  LieAlgebraData::so3().validate();
  LieAlgebraData::heisenberg().validate();
  LieAlgebraData::nonabelian2().validate();
  CHECK_FALSE(LieAlgebraData::so3().is_nilpotent());
  int cls = 0;
  CHECK(LieAlgebraData::heisenberg().is_nilpotent(&cls));
  CHECK(cls == 2);
  LieAlgebraData broken = LieAlgebraData::so3();
  broken.c[0][1][2] = 2;  // breaks antisymmetry pairing with c[0][2][1] = -1
  CHECK_THROWS_AS(broken.validate(), EngineError);
}
