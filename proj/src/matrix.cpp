#include "sps/matrix.hpp"

namespace sps {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::SquareNotZero: return "SquareNotZero";
    case Errc::DegreeMismatch: return "DegreeMismatch";
    case Errc::AlgebraMismatch: return "AlgebraMismatch";
    case Errc::ShiftMismatch: return "ShiftMismatch";
    case Errc::NotAnAction: return "NotAnAction";
    case Errc::MasterEquationFails: return "MasterEquationFails";
    case Errc::NonUnitVolume: return "NonUnitVolume";
    case Errc::ConnectionNotFlat: return "ConnectionNotFlat";
    case Errc::TruncationExceeded: return "TruncationExceeded";
    case Errc::SingularSystem: return "SingularSystem";
    case Errc::ObstructionNonzero: return "ObstructionNonzero";
    case Errc::NotNilpotent: return "NotNilpotent";
    case Errc::CosimplicialIdentityViolation: return "CosimplicialIdentityViolation";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UnknownGenerator: return "UnknownGenerator";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

std::string TriDegree::str() const {
  return "(" + std::to_string(cochain) + "," + std::to_string(chain) + "," +
         (flag == Flag::Equal ? "=" : "!=") + ")";
}

QMat QMat::identity(std::size_t n) {
  QMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

bool QMat::is_zero() const {
  for (const auto& x : a_)
    if (x != 0) return false;
  return true;
}

QMat QMat::operator*(const QMat& o) const {
  if (cols_ != o.rows_) fail(Errc::InvalidArgument, "matrix product shape mismatch");
  QMat r(rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const Rat& x = at(i, k);
      if (x == 0) continue;
      for (std::size_t j = 0; j < o.cols_; ++j) r.at(i, j) += x * o.at(k, j);
    }
  return r;
}

QMat QMat::operator+(const QMat& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) fail(Errc::InvalidArgument, "matrix sum shape mismatch");
  QMat r(rows_, cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] + o.a_[i];
  return r;
}

QMat QMat::operator-(const QMat& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) fail(Errc::InvalidArgument, "matrix diff shape mismatch");
  QMat r(rows_, cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - o.a_[i];
  return r;
}

QMat QMat::scaled(const Rat& s) const {
  QMat r(rows_, cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] * s;
  return r;
}

std::vector<std::size_t> QMat::rref() {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols_ && row < rows_; ++col) {
    std::size_t sel = row;
    while (sel < rows_ && at(sel, col) == 0) ++sel;
    if (sel == rows_) continue;
    if (sel != row)
      for (std::size_t j = 0; j < cols_; ++j) std::swap(at(sel, j), at(row, j));
    Rat inv = 1 / at(row, col);
    for (std::size_t j = col; j < cols_; ++j) at(row, j) *= inv;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == row || at(i, col) == 0) continue;
      Rat f = at(i, col);
      for (std::size_t j = col; j < cols_; ++j) at(i, j) -= f * at(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

std::size_t QMat::rank() const {
  QMat copy = *this;
  return copy.rref().size();
}

std::vector<std::vector<Rat>> QMat::kernel_basis() const {
  QMat m = *this;
  std::vector<std::size_t> pivots = m.rref();
  std::vector<bool> is_pivot(cols_, false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<std::vector<Rat>> basis;
  for (std::size_t free = 0; free < cols_; ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rat> v(cols_, Rat(0));
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m.at(r, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<std::vector<Rat>> QMat::solve(const std::vector<Rat>& b) const {
  if (b.size() != rows_) fail(Errc::InvalidArgument, "solve: rhs size mismatch");
  QMat aug(rows_, cols_ + 1);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) aug.at(i, j) = at(i, j);
    aug.at(i, cols_) = b[i];
  }
  std::vector<std::size_t> pivots = aug.rref();
  for (auto p : pivots)
    if (p == cols_) return std::nullopt;  // inconsistent
  std::vector<Rat> x(cols_, Rat(0));
  for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug.at(r, cols_);
  return x;
}

std::optional<QMat> QMat::inverse() const {
  if (rows_ != cols_) return std::nullopt;
  QMat aug(rows_, 2 * cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) aug.at(i, j) = at(i, j);
    aug.at(i, cols_ + i) = 1;
  }
  if (aug.rref().size() != rows_) return std::nullopt;
  QMat inv(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) inv.at(i, j) = aug.at(i, cols_ + j);
  return inv;
}

std::size_t column_space_dim(const std::vector<std::vector<Rat>>& vecs, std::size_t dim) {
  if (vecs.empty()) return 0;
  QMat m(dim, vecs.size());
  for (std::size_t j = 0; j < vecs.size(); ++j)
    for (std::size_t i = 0; i < dim; ++i) m.at(i, j) = vecs[j][i];
  return m.rank();
}

std::size_t quotient_dim(const std::vector<std::vector<Rat>>& vecs,
                         const std::vector<std::vector<Rat>>& sub, std::size_t dim) {
  QMat joint(dim, vecs.size() + sub.size());
  for (std::size_t j = 0; j < sub.size(); ++j)
    for (std::size_t i = 0; i < dim; ++i) joint.at(i, j) = sub[j][i];
  for (std::size_t j = 0; j < vecs.size(); ++j)
    for (std::size_t i = 0; i < dim; ++i) joint.at(i, sub.size() + j) = vecs[j][i];
  return joint.rank() - column_space_dim(sub, dim);
}

}  // namespace sps
