// Named model builders: shifted cotangent bundles, derived critical loci,
// Chevalley-Eilenberg models of Lie algebra actions, and the strict
// (-2)-shifted Poisson constructor.
#pragma once

#include "sps/geometry.hpp"

namespace sps {

struct LieAlgebraData {
  std::size_t dimension = 0;
  // c[k][i][j] with [e_i, e_j] = sum_k c[k][i][j] e_k.
  std::vector<std::vector<std::vector<Rat>>> c;

  static LieAlgebraData zero(std::size_t n);
  static LieAlgebraData so3();
  static LieAlgebraData heisenberg();
  static LieAlgebraData nonabelian2();

  // Antisymmetry and the Jacobi identity, exactly.
  void validate() const;
  bool is_nilpotent(int* class_out = nullptr) const;
  std::vector<Rat> bracket(const std::vector<Rat>& a, const std::vector<Rat>& b) const;
};

// T*M[n]: duals of the coordinates at chain degree n for n >= 0 (dg kind), at
// cochain degree -n for n < 0 (NQ kind); parity reversed on request. The
// canonical two-form is returned alongside the model.
struct ShiftedCotangent {
  ManifoldModel model;
  PreSymplecticStructure canonical_omega;  // element of DeRham(model)
  std::vector<std::string> fiber_names;
};
ShiftedCotangent shifted_cotangent(const ManifoldModel& M, int n, bool parity_reversed = false);

// DCrit(M, f): antifields xi_i with delta xi_i = df/dx_i (Koszul signs for odd
// coordinates). f of degree (0,0,=) on even models; odd f needs a supermodel.
ManifoldModel derived_critical_locus(const ManifoldModel& M, const Element& f);

// [M/g] as an NQ (or dgNQ) model: CE generators eps^a in cochain degree 1 with
// Q(eps^c) = -1/2 c^c_{ab} eps^a eps^b and Q(x) = sum_a eps^a action_a(x).
// The action must be a Lie algebra homomorphism into derivations.
ManifoldModel chevalley_eilenberg(const LieAlgebraData& g, const ManifoldModel& M,
                                  const std::vector<Derivation>& action,
                                  const std::string& eps_prefix = "eps");

struct StrictMinus2Data {
  ManifoldModel base;                           // X^0, coordinates only
  std::size_t rank_e = 0;                       // rank of E (degree-1 module)
  std::vector<std::vector<Element>> inner;      // symmetric matrix Q over the base ring
  std::vector<std::vector<std::vector<Element>>> connection;
  // connection[alpha][beta][i]: coefficient of e_beta dx_i in nabla(e_alpha)
  std::vector<Element> phi;                     // section of E
};

// dg model with delta(e_alpha) = Q(phi, e_alpha) and
// delta(f_i) = -alpha(f_i) -| nabla_E(phi); fails with MasterEquationFails
// when d Q(phi, phi) != 0.
ManifoldModel strict_minus2(const StrictMinus2Data& data);

}  // namespace sps
