// Polyvector algebras, the Schouten-Nijenhuis bracket, Maurer-Cartan and
// gauge machinery, non-degeneracy, and the compatibility map between Poisson
// and symplectic structures.
#pragma once

#include "sps/geometry.hpp"

namespace sps {

class PolAlgebra;
using PolAlgebraPtr = std::shared_ptr<const PolAlgebra>;

// Sym(T[-n-1]) over a model: one dual generator xi_g per model generator, at
// the shifted degree (n+1-c, -h); parity reversal flips the dual flags. The
// bracket is the biderivation extension of the coordinate pairing
// [xi_g, g] = 1 with intrinsic parity kappa.
class PolAlgebra : public std::enable_shared_from_this<PolAlgebra> {
 public:
  static PolAlgebraPtr make(ManifoldModel model, int shift_n, bool parity_reversed = false);

  const ManifoldModel& model() const { return model_; }
  int shift() const { return shift_n_; }
  bool parity_reversed() const { return rev_; }
  int kappa() const { return kappa_; }
  const AlgebraPtr& algebra() const { return pol_; }
  std::size_t model_gen_count() const { return n_; }

  Element embed(const Element& a) const;  // model algebra -> polyvector algebra
  Element dual(std::size_t i) const;      // xi_{g_i}
  // The internal differential as a weight-1 element: [diff_element, -] extends
  // Q + delta from functions.
  const Element& diff_element() const { return d_hat_; }

  int pol_degree(const Monomial& m) const;       // cochain - chain (stored)
  int flag_coordinate(const Monomial& m) const;  // true Z/2 coordinate
  int weight(const Monomial& m) const;

 private:
  PolAlgebra() = default;
  ManifoldModel model_;
  int shift_n_ = 0;
  bool rev_ = false;
  int kappa_ = 0;
  std::size_t n_ = 0;
  AlgebraPtr pol_;
  Element d_hat_;
};

// Schouten-Nijenhuis bracket; both arguments must live in the same polyvector
// algebra (ShiftMismatch otherwise).
Element schouten(const PolAlgebraPtr& pa, const Element& a, const Element& b);

struct Polyvector {
  PolAlgebraPtr alg;
  Element value;
  int cutoff = 4;

  Element weight_component(int w) const { return value.weight_component(w); }
};

// Scale the weight-i component by (i-1).
Polyvector sigma(const Polyvector& pi);

struct PoissonStructure {
  Polyvector pv;
  // Validates Fil^2 membership, total degree n+2 and parity.
  static PoissonStructure make(Polyvector pv);
};

struct GaugeElement {
  Polyvector pv;
  static GaugeElement make(Polyvector pv);  // degree n+1, Fil^2
};

struct McReport {
  bool passes = false;
  std::map<int, Element> residuals;  // per weight, up to the certified cutoff
  int certified_cutoff = 0;
};

McReport mc_check(const PoissonStructure& pi);

// Gauge action pi -> e^{ad_lambda} pi + F(ad_lambda)([Q, lambda]) with
// F(x) = (e^x - 1)/x, evaluated exactly below the weight cutoff. The series
// terminates because the bracket with a Fil^2 element raises weight.
PoissonStructure gauge_apply(const GaugeElement& lambda, const PoissonStructure& pi);

bool nondegenerate(const PoissonStructure& pi, const SampleOptions& opt = {});

// mu(a df_1 ... df_p, pi) = a [pi, f_1] ... [pi, f_p]: the multiplicative
// filtered compatibility map from the de Rham algebra to polyvectors.
Element mu_compat(const DeRham& dr, const Element& form, const PoissonStructure& pi);

struct SolveOptions {
  std::uint32_t poly_bound = 4;
  int bidegree_cutoff = 10;
};

// Solve mu(omega, pi) = sigma(pi) weight by weight for omega.
PreSymplecticStructure poisson_to_symplectic(const DeRham& dr, const PoissonStructure& pi,
                                             const SolveOptions& opt = {});

// Invert omega_2 to the weight-2 bivector, then extend weight by weight so
// that the Maurer-Cartan equation and the compatibility equation hold.
PoissonStructure symplectic_to_poisson(const DeRham& dr, const PreSymplecticStructure& omega,
                                       int cutoff, const SolveOptions& opt = {});

struct CasimirReport {
  std::size_t dimension = 0;
  std::vector<Polyvector> basis;
};

// Exact solution space of [Q, pi] = 0 and [pi, a] = 0 for pi in weight 2 of
// the 2-shifted polyvectors of a CE model [M/g].
CasimirReport casimir_2shifted(const ManifoldModel& ce_model, const SolveOptions& opt = {});

struct QuasiLieReport {
  Element r_cocycle;     // {Q, varpi}
  Element r_curvature;   // 1/2 {varpi, varpi} + {Q, phi}
  Element r_compat;      // [varpi, phi]
  bool passes = false;
};

// Residual triple of the 1-shifted Poisson conditions for (varpi, phi).
QuasiLieReport quasi_lie_bialgebra_check(const PolAlgebraPtr& pa, const Element& varpi,
                                         const Element& phi);

}  // namespace sps
