// Manifold-model layer: NQ / dg / dg-NQ polynomial models, smooth one-forms
// and the de Rham complex with its weight filtration, pre-symplectic and
// symplectic checks, truncation, products.
#pragma once

#include <set>

#include "sps/algebra.hpp"
#include "sps/complex.hpp"

namespace sps {

enum class ModelKind { NQ, Dg, DgNQ };

const char* model_kind_name(ModelKind k);

// Affine polynomial model: the structure algebra plus the list of base
// coordinates (the degree-(0,0,=) generators).
struct ManifoldModel {
  ModelKind kind = ModelKind::Dg;
  AlgebraPtr algebra;
  std::vector<std::string> base;

  static ManifoldModel make(ModelKind kind, AlgebraPtr alg);  // validates kind constraints
  static ManifoldModel point();
  static ManifoldModel affine_space(const std::vector<std::string>& coords);
};

// The de Rham algebra of a model: one generator d(g) per generator g of the
// model, of the same internal bidegree, opposite flag, form weight 1. The
// three square-zero derivations d, Q, delta pairwise anticommute, so their
// sum is the total differential. In this convention Q(d g) = -d(Q g); the
// module-level induced differential (the one satisfying Q d = d Q) is
// recovered by the sign (-1)^weight, see module_qdel.
class DeRham {
 public:
  explicit DeRham(ManifoldModel model);

  const ManifoldModel& model() const { return model_; }
  const AlgebraPtr& algebra() const { return dr_; }
  std::size_t base_gen_count() const { return n_; }

  Element embed(const Element& a) const;                 // model algebra -> DR algebra
  Element dgen(std::size_t i) const;                     // the one-form d(g_i)
  Element d(const Element& a) const;                     // de Rham derivation
  Element qdel(const Element& a) const;                  // Q + delta, weight-preserving
  Element total(const Element& a) const;                 // d + Q + delta
  Element module_qdel(const Element& a) const;           // (-1)^w (Q + delta)
  Element contract(const Derivation& v, const Element& form) const;  // <v, -> pairing

  // True Z/2 coordinate of a homogeneous form monomial (flag + weight mod 2).
  int flag_coordinate(const Monomial& m) const;
  // DR degree of a monimial: weight + cochain - chain.
  int dr_degree(const Monomial& m) const;

 private:
  ManifoldModel model_;
  AlgebraPtr dr_;
  std::size_t n_ = 0;
  std::vector<Element> d_vals_, q_vals_, delta_vals_;
};

struct DeRhamOptions {
  int weight_cutoff = 4;
  int degree_lo = -2;
  int degree_hi = 6;
  std::uint32_t poly_bound = 8;  // total exponent bound on base coordinates
};

// Fil^fil_level de Rham complex assembled on a finite monomial window. Degrees
// whose differential lost terms to the polynomial bound are recorded in
// *lossy (their cohomology is not certified).
Complex de_rham_complex(const DeRham& dr, const DeRhamOptions& opt, int fil_level,
                        std::set<int>* lossy = nullptr);

struct PreSymplecticStructure {
  int shift_n = 0;
  bool parity_reversed = false;
  Element omega;   // element of the DR algebra, weights in [2, cutoff]
  int cutoff = 4;
};

struct ClosureReport {
  bool closed = false;
  std::map<int, Element> residuals;  // per weight
};

// Degree/parity validation plus the per-weight closure residuals of
// (d + Q + delta) omega.
ClosureReport presymplectic_check(const DeRham& dr, const PreSymplecticStructure& omega);

struct NondegeneracyReport {
  bool nondegenerate = false;
  std::string witness;
};

struct SampleOptions {
  std::vector<Rat> coords = {Rat(-1), Rat(0), Rat(1), Rat(2)};
  std::size_t max_points = 64;
};

// Rank of omega_2^sharp: T (x) O^0 -> Omega^1 (x) O^0 at rational sample
// points plus a generic-point minor check, together with the induced map on
// (co)tangent cohomology at each sample point.
NondegeneracyReport symplectic_check(const DeRham& dr, const PreSymplecticStructure& omega,
                                     const SampleOptions& opt = {});

struct TruncationReport {
  std::vector<Element> ideal_generators;  // delta of the chain-degree-1 generators
  std::size_t h0_dimension = 0;           // computed on the polynomial window
  std::uint32_t window = 0;
};

TruncationReport truncation_pi0(const ManifoldModel& X, std::uint32_t poly_window = 8);

ManifoldModel product(const ManifoldModel& X, const ManifoldModel& Y);

// Shared helpers (also used by the poisson module).

// Ring morphism to Q: base coordinates to point values, everything else to 0.
Rat evaluate_at_point(const ManifoldModel& X, const Element& a,
                      const std::map<std::string, Rat>& point);
// Kill all non-base generators in coefficients (tensor down to O^0).
Element reduce_to_base(const ManifoldModel& X, const Element& a);

// Rank of a matrix of base-ring elements over the fraction field, certified
// by minor expansion.
std::size_t poly_matrix_rank(const std::vector<std::vector<Element>>& m);

// Enumerate rational sample points for the model's base coordinates.
std::vector<std::map<std::string, Rat>> sample_points(const ManifoldModel& X,
                                                      const SampleOptions& opt);

// Monomials of an algebra with per-generator caps: odd generators at most 1,
// weighted generators bounded by weight_cutoff, graded generators bounded by
// bidegree_cutoff, and the first base_count degree-(0,0,=) generators bounded
// jointly by poly_bound.
std::vector<Monomial> enumerate_bounded(const AlgebraPtr& alg, std::size_t base_count,
                                        std::uint32_t poly_bound, int weight_cutoff,
                                        int bidegree_cutoff = 10);

// A finite Q-complex presented by graded pieces of labelled generators; used
// for tangent/cotangent complexes at a point.
struct PointComplex {
  std::map<int, std::vector<std::string>> bases;
  std::map<int, QMat> diffs;
  Complex to_complex() const;
};

// Mapping cone of f: A -> B (degreewise matrices f[d]: A^d -> B^d); acyclic
// iff f is a quasi-isomorphism.
bool cone_is_acyclic(const PointComplex& a, const PointComplex& b,
                     const std::map<int, QMat>& f);

}  // namespace sps
