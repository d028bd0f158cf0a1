// Dense exact-rational matrices: row reduction, rank, kernels, solving.
// Desk-scale linear algebra; no attempt at sparsity.
#pragma once

#include <optional>
#include <vector>

#include "sps/core.hpp"

namespace sps {

class QMat {
 public:
  QMat() = default;
  QMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, Rat(0)) {}

  static QMat identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rat& at(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
  const Rat& at(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

  bool is_zero() const;
  QMat operator*(const QMat& o) const;
  QMat operator+(const QMat& o) const;
  QMat operator-(const QMat& o) const;
  QMat scaled(const Rat& s) const;
  bool operator==(const QMat& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_; }

  // Reduced row echelon form; returns pivot column indices.
  std::vector<std::size_t> rref();
  std::size_t rank() const;

  // Basis of the right kernel, one column vector per basis element.
  std::vector<std::vector<Rat>> kernel_basis() const;

  // One solution of A x = b, if any.
  std::optional<std::vector<Rat>> solve(const std::vector<Rat>& b) const;

  // Inverse of a square matrix, if it exists.
  std::optional<QMat> inverse() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Rat> a_;
};

// dim of span(columns of A) within span(columns of B); requires the column
// space of A to be contained in that of B when used for quotients.
std::size_t column_space_dim(const std::vector<std::vector<Rat>>& vecs, std::size_t dim);

// Given vectors spanning V and vectors spanning W <= V-ambient, dimension of
// (span vecs + span sub) / span sub.
std::size_t quotient_dim(const std::vector<std::vector<Rat>>& vecs,
                         const std::vector<std::vector<Rat>>& sub, std::size_t dim);

}  // namespace sps
