// Polydifferential operators, the Hochschild differential and braces, the BV
// Laplacian, twisted de Rham quantisation, right de Rham complexes, BV-infinity
// brackets and the quantum master equation.
//
// An arity-n operator is an element of the free superalgebra on the model's
// generators together with slot symbols y_{g,s} (s = 1..n) of the same parity
// as g; the monomial c y^{K_1}...y^{K_n} acts as
//   (a_1,...,a_n) |-> (+-) c D^{K_1}(a_1) ... D^{K_n}(a_n),
// the sign being the Koszul sign of moving each block past the earlier
// arguments. Within a block, ascending generator order composes outermost
// first (the highest index acts first).
#pragma once

#include "sps/poisson.hpp"

namespace sps {

class OperatorSpace;
using OperatorSpacePtr = std::shared_ptr<const OperatorSpace>;

class OperatorSpace : public std::enable_shared_from_this<OperatorSpace> {
 public:
  static OperatorSpacePtr make(ManifoldModel model, std::size_t arity);

  const ManifoldModel& model() const { return model_; }
  std::size_t arity() const { return arity_; }
  const AlgebraPtr& algebra() const { return ops_; }
  std::size_t slot_index(std::size_t gen, std::size_t slot) const;  // slot in [1, arity]
  Element slot_var(std::size_t gen, std::size_t slot) const;
  Element embed(const Element& coefficient) const;

 private:
  OperatorSpace() = default;
  ManifoldModel model_;
  std::size_t arity_ = 0;
  AlgebraPtr ops_;
};

struct PolyDiffOperator {
  OperatorSpacePtr space;
  Element elem;
  int order_bound = 0;

  static PolyDiffOperator make(OperatorSpacePtr space, Element elem);
  std::size_t arity() const { return space->arity(); }
  int order() const;  // max slot-variable total over the terms
};

// Identity (arity 1) and multiplication (arity 2) operators.
PolyDiffOperator identity_op(const ManifoldModel& model);
PolyDiffOperator multiplication_op(const ManifoldModel& model);
// The operator of arity 0 given by an element.
PolyDiffOperator element_op(const ManifoldModel& model, const Element& a);

Element apply_op(const PolyDiffOperator& op, const std::vector<Element>& args);

// Hochschild differential: arity m -> m+1 via the alternating sum of the
// outer multiplications and the slot merges (Leibniz handled by substituting
// y_{g,i} -> y_{g,i} + y_{g,i+1}).
PolyDiffOperator hochschild_b(const PolyDiffOperator& f);

PolyDiffOperator cup(const PolyDiffOperator& f, const PolyDiffOperator& g);

// Operadic insertion of g into slot k (1-based) of f.
PolyDiffOperator insert_at(const PolyDiffOperator& f, std::size_t k, const PolyDiffOperator& g);

// First brace f{g} = sum_k (-1)^{(k-1) deg'(g)} f o_k g with
// deg'(g) = arity(g) - 1 + parity(g); requires parity-homogeneous g.
PolyDiffOperator brace1(const PolyDiffOperator& f, const PolyDiffOperator& g);

// Gerstenhaber-type bracket: the brace1 commutator.
PolyDiffOperator op_bracket(const PolyDiffOperator& f, const PolyDiffOperator& g);

// Sign data of an operator as a brace-algebra element.
int op_parity(const PolyDiffOperator& f);   // element parity (must be homogeneous)
int op_degree(const PolyDiffOperator& f);   // arity - 1 + parity, mod 2

// The involution i(f)(a_1,...,a_m) =
// -(-1)^{sum_{i<j} |a_i||a_j|} (-1)^{m(m+1)/2} f(a_m,...,a_1).
PolyDiffOperator involution_i(const PolyDiffOperator& f);

// Second-order BV operator sum_i d^2/dx_i dxi_i on a derived critical locus;
// the volume must be an invertible (constant) element.
PolyDiffOperator bv_laplacian(const ManifoldModel& dcrit, const Element& volume);

// ---------------------------------------------------------------------------
// Twisted de Rham

struct TwistedDeRham {
  ManifoldModel model;
  int h_max = 3;
  // flattened Q-complex graded by form weight; basis labels carry hbar powers
  Complex complex;
  std::set<int> extended;  // weights whose basis grew during saturation
};

TwistedDeRham twisted_de_rham(const ManifoldModel& M, const Element& f, int h_max,
                              std::uint32_t poly_window = 8);

// Exact acyclicity certificates for one-dimensional models: kernel vanishing
// on the window and explicit preimages per basis element.
struct TwistedAcyclicity {
  bool h0_trivial = false;   // no kernel in weight 0 on the window
  bool h1_solvable = false;  // every weight-1 window element has an exact preimage
};
TwistedAcyclicity twisted_acyclicity_line(const ManifoldModel& line, const Element& f, int h_max,
                                          std::uint32_t poly_window = 8);

// ---------------------------------------------------------------------------
// Right de Rham complex and the quantum master equation

// Flat right connection data on Lambda^bullet T (realized as the (-2)-shifted
// polyvector algebra): nabla_2 on the dual generators plus optional higher
// O-linear maps on pure dual monomials.
struct RightConnectionData {
  std::vector<Element> nabla2;            // value on each dual, in the model algebra
  std::map<Monomial, Element> higher;     // weight >= 2 pure-dual monomials -> model algebra
};

class RightDeRham {
 public:
  // Verifies (D^nabla)^2 = 0 on a monomial window; ConnectionNotFlat otherwise.
  RightDeRham(ManifoldModel model, RightConnectionData nabla, std::uint32_t check_window = 4);

  const PolAlgebraPtr& carrier() const { return pa_; }
  Element d1(const Element& a) const;  // [delta + Q, -]
  Element d2(const Element& a) const;  // connection part
  Element dk(const Element& a) const;  // higher parts
  Element differential(const Element& a) const;

  // L-infinity brackets [a_1,...,a_k]_nabla = [...[D, a_1.],...,a_k.](1).
  Element linf_bracket(const std::vector<Element>& args) const;

  // interior product of a polyvector against a form of the model's DeRham
  Element contract_form(const Element& polyvector, const Element& form, const DeRham& dr) const;

 private:
  ManifoldModel model_;
  PolAlgebraPtr pa_;
  RightConnectionData nabla_;
};

// hbar-truncated element of Q-polyvectors: coeff[p] is the hbar^p coefficient;
// the F-filtration requires weights <= p+1 in coeff[p].
struct QuantisationElement {
  int h_max = 3;
  std::vector<Element> coeff;

  static QuantisationElement zero(const RightDeRham& rd, int h_max);
  void validate(const RightDeRham& rd) const;
};

struct QmeReport {
  bool passes = false;
  std::vector<Element> residual;  // per hbar order
};

// Both routes computed independently (iterated brackets vs e^{-S} D e^{S});
// raises if they disagree.
QmeReport qme_check(const RightDeRham& rd, const QuantisationElement& S);

// Series of polydifferential operators with the self-dual involution
// Delta^*(hbar) = i(Delta)(-hbar).
struct OperatorSeries {
  int h_max = 3;
  std::vector<PolyDiffOperator> coeff;
};

OperatorSeries self_dual_involution(const OperatorSeries& series);

}  // namespace sps
