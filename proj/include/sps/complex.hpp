// Finite complexes and bicomplexes of labelled bases with exact differentials,
// total complexes, cohomology by rank computation.
#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sps/matrix.hpp"

namespace sps {

struct CohomologyReport {
  bool in_range = false;
  std::size_t dimension = 0;
  // Representative cocycles as coordinate vectors in the degree's basis.
  std::vector<std::vector<Rat>> representatives;
  std::vector<std::string> basis;
};

// Cochain complex: finite labelled basis per degree, differential raising
// degree by one. Degrees may be negative. d∘d = 0 is checked at construction.
class Complex {
 public:
  Complex() = default;

  void set_basis(int degree, std::vector<std::string> labels);
  // Matrix of d: degree -> degree+1, shape (dim_{degree+1} x dim_degree).
  void set_differential(int degree, QMat d);

  void validate() const;  // shapes and d^2 = 0

  bool has_degree(int degree) const { return bases_.count(degree) > 0; }
  std::size_t dim(int degree) const;
  const std::vector<std::string>& basis(int degree) const;
  QMat differential(int degree) const;  // zero matrix when absent

  int min_degree() const;
  int max_degree() const;

  CohomologyReport cohomology(int degree) const;

 private:
  std::map<int, std::vector<std::string>> bases_;
  std::map<int, QMat> diffs_;
};

// Bicomplex: doubly indexed bases with horizontal Q (cochain +1) and vertical
// delta (chain -1). Stored Q and delta commute; the total differential is
// Q + (-1)^cochain * delta, which then squares to zero.
class Bicomplex {
 public:
  using Key = std::pair<int, int>;  // (cochain, chain)

  void set_basis(int cochain, int chain, std::vector<std::string> labels);
  void set_q(int cochain, int chain, QMat m);      // (c,h) -> (c+1,h)
  void set_delta(int cochain, int chain, QMat m);  // (c,h) -> (c,h-1)

  void validate() const;  // Q^2 = 0, delta^2 = 0, total differential squares to zero

  std::size_t dim(int cochain, int chain) const;
  const std::map<Key, std::vector<std::string>>& bases() const { return bases_; }
  QMat q(int cochain, int chain) const;
  QMat delta(int cochain, int chain) const;

  // Total complex in degree cochain - chain with differential Q + (-1)^c delta.
  // Every stored bidegree must satisfy |cochain| <= cutoff and |chain| <= cutoff;
  // inputs reaching beyond the cutoff are rejected.
  Complex hat_tot(int cutoff) const;

 private:
  std::map<Key, std::vector<std::string>> bases_;
  std::map<Key, QMat> q_, delta_;
};

}  // namespace sps
