#include "sps/constructions.hpp"

#include <algorithm>

namespace sps {

LieAlgebraData LieAlgebraData::zero(std::size_t n) {
  LieAlgebraData t;
  t.dimension = n;
  t.c.assign(n, std::vector<std::vector<Rat>>(n, std::vector<Rat>(n, Rat(0))));
  return t;
}

LieAlgebraData LieAlgebraData::so3() {
  LieAlgebraData t = zero(3);
  t.c[2][0][1] = 1; t.c[2][1][0] = -1;
  t.c[0][1][2] = 1; t.c[0][2][1] = -1;
  t.c[1][2][0] = 1; t.c[1][0][2] = -1;
  return t;
}

LieAlgebraData LieAlgebraData::heisenberg() {
  LieAlgebraData t = zero(3);
  t.c[2][0][1] = 1; t.c[2][1][0] = -1;
  return t;
}

LieAlgebraData LieAlgebraData::nonabelian2() {
  LieAlgebraData t = zero(2);
  t.c[1][0][1] = 1; t.c[1][1][0] = -1;
  return t;
}

std::vector<Rat> LieAlgebraData::bracket(const std::vector<Rat>& a, const std::vector<Rat>& b) const {
  std::vector<Rat> out(dimension, Rat(0));
  for (std::size_t i = 0; i < dimension; ++i)
    for (std::size_t j = 0; j < dimension; ++j) {
      if (a[i] == 0 || b[j] == 0) continue;
      for (std::size_t k = 0; k < dimension; ++k) out[k] += a[i] * b[j] * c[k][i][j];
    }
  return out;
}

void LieAlgebraData::validate() const {
  for (std::size_t k = 0; k < dimension; ++k)
    for (std::size_t i = 0; i < dimension; ++i)
      for (std::size_t j = 0; j < dimension; ++j)
        if (c[k][i][j] != -c[k][j][i])
          fail(Errc::InvalidArgument, "structure constants not antisymmetric");
  for (std::size_t i = 0; i < dimension; ++i)
    for (std::size_t j = 0; j < dimension; ++j)
      for (std::size_t k = 0; k < dimension; ++k) {
        // [[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j] = 0
        std::vector<Rat> ei(dimension, Rat(0)), ej(dimension, Rat(0)), ek(dimension, Rat(0));
        ei[i] = 1; ej[j] = 1; ek[k] = 1;
        auto t1 = bracket(bracket(ei, ej), ek);
        auto t2 = bracket(bracket(ej, ek), ei);
        auto t3 = bracket(bracket(ek, ei), ej);
        for (std::size_t m = 0; m < dimension; ++m)
          if (t1[m] + t2[m] + t3[m] != 0)
            fail(Errc::InvalidArgument, "Jacobi identity fails on basis triple (" +
                                            std::to_string(i) + "," + std::to_string(j) + "," +
                                            std::to_string(k) + ")");
      }
}

bool LieAlgebraData::is_nilpotent(int* class_out) const {
  // lower central series on spanning sets
  std::vector<std::vector<Rat>> layer;
  for (std::size_t i = 0; i < dimension; ++i) {
    std::vector<Rat> e(dimension, Rat(0));
    e[i] = 1;
    layer.push_back(e);
  }
  for (int depth = 1; depth <= static_cast<int>(dimension) + 1; ++depth) {
    std::vector<std::vector<Rat>> next;
    for (std::size_t i = 0; i < dimension; ++i) {
      std::vector<Rat> e(dimension, Rat(0));
      e[i] = 1;
      for (const auto& v : layer) {
        auto b = bracket(e, v);
        if (std::any_of(b.begin(), b.end(), [](const Rat& r) { return r != 0; }))
          next.push_back(b);
      }
    }
    if (next.empty()) {
      if (class_out) *class_out = depth;
      return true;
    }
    layer = std::move(next);
  }
  return false;
}

ShiftedCotangent shifted_cotangent(const ManifoldModel& M, int n, bool parity_reversed) {
  for (std::size_t i = 0; i < M.algebra->size(); ++i)
    if (!(M.algebra->gen(i).degree == TriDegree{0, 0, Flag::Equal}))
      fail(Errc::InvalidArgument, "shifted_cotangent expects a plain coordinate model");
  std::vector<Generator> gens = M.algebra->gens();
  std::vector<std::string> fiber;
  ModelKind kind = n >= 0 ? ModelKind::Dg : ModelKind::NQ;
  for (std::size_t i = 0; i < M.algebra->size(); ++i) {
    std::string name = "p_" + M.algebra->gen(i).name;
    Flag fl = parity_reversed ? Flag::Unequal : Flag::Equal;
    TriDegree deg = n >= 0 ? TriDegree{0, n, fl} : TriDegree{-n, 0, fl};
    gens.push_back({name, deg, 0});
    fiber.push_back(name);
  }
  ManifoldModel model = ManifoldModel::make(kind, make_cdga(gens, {}, {}));
  ShiftedCotangent out;
  out.model = model;
  out.fiber_names = fiber;
  DeRham dr(model);
  std::size_t m = M.algebra->size();
  Element omega = dr.algebra()->zero();
  for (std::size_t i = 0; i < m; ++i) omega = omega + dr.dgen(m + i) * dr.dgen(i);
  out.canonical_omega.shift_n = -n;
  out.canonical_omega.parity_reversed = parity_reversed;
  out.canonical_omega.omega = omega;
  out.canonical_omega.cutoff = 4;
  return out;
}

ManifoldModel derived_critical_locus(const ManifoldModel& M, const Element& f) {
  const Algebra& A = *M.algebra;
  TriDegree fdeg;
  if (!rebind(M.algebra, f).is_homogeneous(&fdeg) && !f.is_zero())
    fail(Errc::DegreeMismatch, "DCrit needs a homogeneous function");
  if (!f.is_zero() && (fdeg.cochain != 0 || fdeg.chain != 0))
    fail(Errc::DegreeMismatch, "DCrit function must have degree (0,0,.)");
  bool odd_f = !f.is_zero() && fdeg.flag == Flag::Unequal;
  if (odd_f) {
    bool has_odd = false;
    for (std::size_t i = 0; i < A.size(); ++i)
      if (A.gen(i).degree == TriDegree{0, 0, Flag::Unequal}) has_odd = true;
    if (!has_odd) fail(Errc::DegreeMismatch, "odd function on a model without odd coordinates");
  }
  for (std::size_t i = 0; i < A.size(); ++i)
    if (A.gen(i).degree.cochain != 0 || A.gen(i).degree.chain != 0)
      fail(Errc::InvalidArgument, "DCrit expects a degree-zero coordinate model");

  std::vector<Generator> gens = A.gens();
  std::size_t m = A.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Generator& g = A.gen(i);
    // antifield dual to g at chain degree 1; odd f reverses the fibre parity
    // so that the flag-preserving delta can carry af_g to df/dg
    Flag fl = odd_f ? flag_add(g.degree.flag, Flag::Unequal) : g.degree.flag;
    gens.push_back({"af_" + g.name, {0, 1, fl}, 0});
  }
  AlgebraPtr proto = Algebra::make(gens);
  std::vector<Element> im;
  for (std::size_t i = 0; i < m; ++i) im.push_back(proto->var(i));
  Element flift = f.substitute(proto, im);
  std::map<std::string, Element> dv;
  for (std::size_t i = 0; i < m; ++i) {
    Element df = proto->partial(i).apply(flift);
    if (!df.is_zero()) dv["af_" + A.gen(i).name] = df;
  }
  return ManifoldModel::make(ModelKind::Dg, make_cdga(std::move(gens), {}, std::move(dv)));
}

ManifoldModel chevalley_eilenberg(const LieAlgebraData& g, const ManifoldModel& M,
                                  const std::vector<Derivation>& action,
                                  const std::string& eps_prefix) {
  if (action.size() != g.dimension)
    fail(Errc::NotAnAction, "action table size does not match the Lie algebra dimension");
  const Algebra& A = *M.algebra;
  // verify the action is a homomorphism: [rho_a, rho_b] = rho_{[e_a, e_b]}
  for (std::size_t a = 0; a < g.dimension; ++a)
    for (std::size_t b = a + 1; b < g.dimension; ++b) {
      for (std::size_t i = 0; i < A.size(); ++i) {
        Element x = A.var(i);
        Element lhs = action[a].apply(action[b].apply(x)) - action[b].apply(action[a].apply(x));
        Element rhs = A.zero();
        for (std::size_t k = 0; k < g.dimension; ++k)
          if (g.c[k][a][b] != 0) rhs = rhs + action[k].apply(x) * g.c[k][a][b];
        if (!(lhs == rhs))
          fail(Errc::NotAnAction, "bracket pair (" + std::to_string(a + 1) + "," +
                                      std::to_string(b + 1) + ") is not respected on generator '" +
                                      A.gen(i).name + "'");
      }
    }

  std::vector<Generator> gens = A.gens();
  std::size_t m = A.size();
  for (std::size_t a = 0; a < g.dimension; ++a)
    gens.push_back({eps_prefix + std::to_string(a + 1), {1, 0, Flag::Equal}, 0});
  AlgebraPtr proto = Algebra::make(gens);
  std::vector<Element> im;
  for (std::size_t i = 0; i < m; ++i) im.push_back(proto->var(i));
  std::map<std::string, Element> qv, dv;
  // Q(x) = old Q(x) + sum_a eps^a rho_a(x); delta unchanged
  for (std::size_t i = 0; i < m; ++i) {
    Element q = A.q_of(i).substitute(proto, im);
    for (std::size_t a = 0; a < g.dimension; ++a)
      q = q + proto->var(m + a) * action[a].apply(A.var(i)).substitute(proto, im);
    if (!q.is_zero()) qv[A.gen(i).name] = q;
    Element d = A.delta_of(i).substitute(proto, im);
    if (!d.is_zero()) dv[A.gen(i).name] = d;
  }
  // Q(eps^c) = -1/2 c^c_{ab} eps^a eps^b
  for (std::size_t cidx = 0; cidx < g.dimension; ++cidx) {
    Element q = proto->zero();
    for (std::size_t a = 0; a < g.dimension; ++a)
      for (std::size_t b = 0; b < g.dimension; ++b)
        if (g.c[cidx][a][b] != 0)
          q = q + proto->var(m + a) * proto->var(m + b) * (g.c[cidx][a][b] * Rat(-1, 2));
    if (!q.is_zero()) qv[eps_prefix + std::to_string(cidx + 1)] = q;
  }
  bool has_chain = false;
  for (const auto& gen : gens)
    if (gen.degree.chain != 0) has_chain = true;
  ModelKind kind = has_chain ? ModelKind::DgNQ : ModelKind::NQ;
  return ManifoldModel::make(kind, make_cdga(std::move(gens), std::move(qv), std::move(dv)));
}

ManifoldModel strict_minus2(const StrictMinus2Data& data) {
  const Algebra& B = *data.base.algebra;
  std::size_t nb = B.size();
  std::size_t r = data.rank_e;
  if (data.inner.size() != r || data.phi.size() != r)
    fail(Errc::InvalidArgument, "inner product / section shape mismatch");
  // symmetry and nondegeneracy of the inner product
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < r; ++b)
      if (!(rebind(data.base.algebra, data.inner[a][b]) ==
            rebind(data.base.algebra, data.inner[b][a])))
        fail(Errc::InvalidArgument, "inner product not symmetric");
  {
    std::vector<std::vector<Element>> q(r, std::vector<Element>(r, B.zero()));
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t b = 0; b < r; ++b) q[a][b] = rebind(data.base.algebra, data.inner[a][b]);
    if (r > 0 && poly_matrix_rank(q) < r)
      fail(Errc::InvalidArgument, "inner product degenerate over the fraction field");
  }
  // master equation: d Q(phi, phi) = 0
  Element qpp = B.zero();
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < r; ++b)
      qpp = qpp + rebind(data.base.algebra, data.inner[a][b]) *
                      rebind(data.base.algebra, data.phi[a]) * rebind(data.base.algebra, data.phi[b]);
  for (std::size_t i = 0; i < nb; ++i)
    if (!B.partial(i).apply(qpp).is_zero())
      fail(Errc::MasterEquationFails, "d Q(phi,phi) != 0 in direction " + B.gen(i).name);

  // compatibility of the connection with the inner product:
  // d_i Q_{ab} = sum_c (Gamma^c_{a,i} Q_{cb} + Gamma^c_{b,i} Q_{ac})
  auto conn = [&](std::size_t a, std::size_t b, std::size_t i) {
    if (data.connection.empty()) return B.zero();
    return rebind(data.base.algebra, data.connection[a][b][i]);
  };
  for (std::size_t i = 0; i < nb; ++i)
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t b = 0; b < r; ++b) {
        Element lhs = B.partial(i).apply(rebind(data.base.algebra, data.inner[a][b]));
        Element rhs = B.zero();
        for (std::size_t cc = 0; cc < r; ++cc)
          rhs = rhs + conn(a, cc, i) * rebind(data.base.algebra, data.inner[cc][b]) +
                conn(b, cc, i) * rebind(data.base.algebra, data.inner[a][cc]);
        if (!(lhs == rhs))
          fail(Errc::InvalidArgument, "connection incompatible with the inner product");
      }
  std::vector<Generator> gens = B.gens();
  for (std::size_t a = 0; a < r; ++a) gens.push_back({"e" + std::to_string(a + 1), {0, 1, Flag::Equal}, 0});
  for (std::size_t i = 0; i < nb; ++i) gens.push_back({"f_" + B.gen(i).name, {0, 2, Flag::Equal}, 0});
  AlgebraPtr proto = Algebra::make(gens);
  std::vector<Element> im;
  for (std::size_t i = 0; i < nb; ++i) im.push_back(proto->var(i));
  auto lift = [&](const Element& e) { return rebind(data.base.algebra, e).substitute(proto, im); };
  std::map<std::string, Element> dv;
  // delta(e_a) = Q(phi, e_a) = sum_b Q_{ab} phi_b
  for (std::size_t a = 0; a < r; ++a) {
    Element d = proto->zero();
    for (std::size_t b = 0; b < r; ++b) d = d + lift(data.inner[a][b]) * lift(data.phi[b]);
    if (!d.is_zero()) dv["e" + std::to_string(a + 1)] = d;
  }
  // delta(f_i) = -nabla_{d/dx_i}(phi) = -(d phi_a/dx_i + Gamma^a_{b,i} phi_b) e_a
  for (std::size_t i = 0; i < nb; ++i) {
    Element d = proto->zero();
    for (std::size_t a = 0; a < r; ++a) {
      Element coeff = lift(B.partial(i).apply(rebind(data.base.algebra, data.phi[a])));
      for (std::size_t b = 0; b < r; ++b) {
        if (data.connection.empty()) break;
        coeff = coeff + lift(data.connection[b][a][i]) * lift(data.phi[b]);
      }
      d = d - coeff * proto->var(nb + a);
    }
    if (!d.is_zero()) dv["f_" + B.gen(i).name] = d;
  }
  return ManifoldModel::make(ModelKind::Dg, make_cdga(std::move(gens), {}, std::move(dv)));
}

}  // namespace sps
