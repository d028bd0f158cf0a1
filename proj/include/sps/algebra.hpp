// Free graded-commutative superalgebras over Q on finitely many generators,
// with derivations and the (Q, delta) differential pair. Elements are kept in
// a canonical normal form: monomials ordered degree-lexicographically in
// generator-creation order, Koszul signs absorbed into coefficients, zero
// terms pruned.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sps/core.hpp"

namespace sps {

struct Generator {
  std::string name;
  TriDegree degree;
  // Auxiliary weight used by the de Rham / polyvector / operator layers
  // (form weight, symmetric-power weight, operator order). Zero for ordinary
  // coordinates; never contributes to parity.
  int weight = 0;
};

class Algebra;
using AlgebraPtr = std::shared_ptr<const Algebra>;

// Exponent vector over the algebra's generators. Odd-parity generators carry
// exponents <= 1.
struct Monomial {
  std::vector<std::uint32_t> exps;

  bool operator==(const Monomial&) const = default;
  std::uint32_t total() const;
  // Graded-lexicographic order.
  bool operator<(const Monomial& o) const;
};

class Element;
using Terms = std::vector<std::pair<Monomial, Rat>>;

class Derivation;

class Algebra : public std::enable_shared_from_this<Algebra> {
 public:
  // Bare algebra with no differentials; use make_cdga for validated models.
  static AlgebraPtr make(std::vector<Generator> gens);

  std::size_t size() const { return gens_.size(); }
  const Generator& gen(std::size_t i) const { return gens_[i]; }
  const std::vector<Generator>& gens() const { return gens_; }
  std::optional<std::size_t> index_of(const std::string& name) const;
  bool odd(std::size_t i) const { return odd_[i]; }

  bool has_q() const { return !q_.empty(); }
  bool has_delta() const { return !delta_.empty(); }
  Element q_of(std::size_t i) const;
  Element delta_of(std::size_t i) const;
  Derivation q() const;      // cochain +1, flag-preserving
  Derivation delta() const;  // chain -1, flag-preserving

  Element zero() const;
  Element one() const;
  Element constant(const Rat& c) const;
  Element var(std::size_t i) const;
  Element var(const std::string& name) const;
  Element monomial(Monomial m, Rat coeff = Rat(1)) const;

  TriDegree monomial_degree(const Monomial& m) const;
  int monomial_weight(const Monomial& m) const;
  int monomial_parity(const Monomial& m) const;

  // Partial derivative with respect to generator i (left derivative).
  Derivation partial(std::size_t i) const;

  // All monomials with total exponent <= degree_bound (odd exponents <= 1),
  // optionally filtered.
  std::vector<Monomial> monomials_up_to(std::uint32_t degree_bound,
                                        const std::function<bool(const Monomial&)>& keep = {}) const;

 private:
  friend AlgebraPtr make_cdga(std::vector<Generator>, std::map<std::string, Element>,
                              std::map<std::string, Element>);
  Algebra() = default;

  std::vector<Generator> gens_;
  std::map<std::string, std::size_t> index_;
  std::vector<bool> odd_;
  std::vector<Terms> q_, delta_;  // empty when the differential is zero
};

class Element {
 public:
  Element() = default;
  Element(AlgebraPtr alg, Terms terms);  // normalizes

  const AlgebraPtr& algebra() const { return alg_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Element operator+(const Element& o) const;
  Element operator-(const Element& o) const;
  Element operator-() const;
  Element operator*(const Element& o) const;
  Element operator*(const Rat& s) const;
  bool operator==(const Element& o) const;

  Element pow(std::uint32_t k) const;

  // Homogeneous pieces.
  bool is_homogeneous(TriDegree* deg_out = nullptr) const;
  std::map<int, Element> by_weight() const;
  Element weight_component(int w) const;
  int min_weight() const;  // 0 for the zero element

  // Substitution homomorphism: generator i maps to images[i], which must live
  // in the target algebra. Images of odd generators must square to zero.
  Element substitute(const AlgebraPtr& target, const std::vector<Element>& images) const;

  // Coefficient of a monomial (zero if absent).
  Rat coeff(const Monomial& m) const;

  std::string str() const;

 private:
  void normalize();
  AlgebraPtr alg_;
  Terms terms_;
};

Element operator*(const Rat& s, const Element& e);

// Graded derivation given by its values on generators; extends by the Leibniz
// rule D(ab) = D(a) b + (-1)^{|D||a|} a D(b).
class Derivation {
 public:
  Derivation(AlgebraPtr alg, TriDegree shift, int weight_shift, std::vector<Element> values);

  const AlgebraPtr& algebra() const { return alg_; }
  const TriDegree& shift() const { return shift_; }
  int weight_shift() const { return weight_shift_; }
  int parity() const { return shift_.parity(); }
  const Element& value(std::size_t i) const { return values_[i]; }

  Element apply(const Element& a) const;

 private:
  AlgebraPtr alg_;
  TriDegree shift_;
  int weight_shift_ = 0;
  std::vector<Element> values_;
};

// Validated super CDGA: checks degree bookkeeping of the assigned values,
// Q^2 = 0, delta^2 = 0 and Q delta + delta Q = 0 on every generator.
AlgebraPtr make_cdga(std::vector<Generator> gens, std::map<std::string, Element> q_values,
                     std::map<std::string, Element> delta_values);

// Rebinds elements built against a prototype algebra (same generators) to the
// finished one. Used internally by make_cdga callers.
Element rebind(const AlgebraPtr& target, const Element& e);

int koszul_sign_elements(const Algebra& alg, const Monomial& a, const Monomial& b);

}  // namespace sps
