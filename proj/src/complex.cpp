#include "sps/complex.hpp"

#include <algorithm>

namespace sps {

void Complex::set_basis(int degree, std::vector<std::string> labels) {
  bases_[degree] = std::move(labels);
}

void Complex::set_differential(int degree, QMat d) { diffs_[degree] = std::move(d); }

std::size_t Complex::dim(int degree) const {
  auto it = bases_.find(degree);
  return it == bases_.end() ? 0 : it->second.size();
}

const std::vector<std::string>& Complex::basis(int degree) const {
  static const std::vector<std::string> empty;
  auto it = bases_.find(degree);
  return it == bases_.end() ? empty : it->second;
}

QMat Complex::differential(int degree) const {
  auto it = diffs_.find(degree);
  if (it != diffs_.end()) return it->second;
  return QMat(dim(degree + 1), dim(degree));
}

int Complex::min_degree() const { return bases_.empty() ? 0 : bases_.begin()->first; }
int Complex::max_degree() const { return bases_.empty() ? 0 : bases_.rbegin()->first; }

void Complex::validate() const {
  for (const auto& [deg, d] : diffs_) {
    if (d.cols() != dim(deg) || d.rows() != dim(deg + 1))
      fail(Errc::InvalidArgument, "differential shape mismatch at degree " + std::to_string(deg));
    QMat next = differential(deg + 1);
    if (!(next * d).is_zero())
      fail(Errc::SquareNotZero, "d^2 != 0 at degree " + std::to_string(deg));
  }
}

CohomologyReport Complex::cohomology(int degree) const {
  CohomologyReport rep;
  if (!has_degree(degree)) return rep;  // empty report with in_range = false
  rep.in_range = true;
  rep.basis = basis(degree);
  QMat out = differential(degree);
  QMat in = differential(degree - 1);
  std::vector<std::vector<Rat>> cocycles = out.kernel_basis();
  std::size_t rank_in = in.rank();
  rep.dimension = cocycles.size() - rank_in;
  // Representatives: kernel vectors independent modulo the image.
  std::vector<std::vector<Rat>> image;
  for (std::size_t j = 0; j < in.cols(); ++j) {
    std::vector<Rat> col(in.rows());
    for (std::size_t i = 0; i < in.rows(); ++i) col[i] = in.at(i, j);
    image.push_back(std::move(col));
  }
  std::size_t n = dim(degree);
  QMat accum(n, image.size() + cocycles.size());
  for (std::size_t j = 0; j < image.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) accum.at(i, j) = image[j][i];
  std::size_t base_rank = rank_in;
  std::size_t used = image.size();
  QMat probe = accum;
  for (const auto& v : cocycles) {
    if (rep.representatives.size() == rep.dimension) break;
    QMat trial(n, used + 1);
    for (std::size_t j = 0; j < used; ++j)
      for (std::size_t i = 0; i < n; ++i) trial.at(i, j) = probe.at(i, j);
    for (std::size_t i = 0; i < n; ++i) trial.at(i, used) = v[i];
    if (trial.rank() > base_rank) {
      rep.representatives.push_back(v);
      probe = trial;
      ++used;
      ++base_rank;
    }
  }
  return rep;
}

void Bicomplex::set_basis(int cochain, int chain, std::vector<std::string> labels) {
  bases_[{cochain, chain}] = std::move(labels);
}
void Bicomplex::set_q(int cochain, int chain, QMat m) { q_[{cochain, chain}] = std::move(m); }
void Bicomplex::set_delta(int cochain, int chain, QMat m) { delta_[{cochain, chain}] = std::move(m); }

std::size_t Bicomplex::dim(int cochain, int chain) const {
  auto it = bases_.find({cochain, chain});
  return it == bases_.end() ? 0 : it->second.size();
}

QMat Bicomplex::q(int cochain, int chain) const {
  auto it = q_.find({cochain, chain});
  if (it != q_.end()) return it->second;
  return QMat(dim(cochain + 1, chain), dim(cochain, chain));
}

QMat Bicomplex::delta(int cochain, int chain) const {
  auto it = delta_.find({cochain, chain});
  if (it != delta_.end()) return it->second;
  return QMat(dim(cochain, chain - 1), dim(cochain, chain));
}

void Bicomplex::validate() const {
  for (const auto& [key, labels] : bases_) {
    auto [c, h] = key;
    QMat qm = q(c, h), dm = delta(c, h);
    if (qm.cols() != labels.size() || qm.rows() != dim(c + 1, h))
      fail(Errc::InvalidArgument, "Q shape mismatch");
    if (dm.cols() != labels.size() || dm.rows() != dim(c, h - 1))
      fail(Errc::InvalidArgument, "delta shape mismatch");
    if (!(q(c + 1, h) * qm).is_zero()) fail(Errc::SquareNotZero, "Q^2 != 0");
    if (!(delta(c, h - 1) * dm).is_zero()) fail(Errc::SquareNotZero, "delta^2 != 0");
    // With the sign encoding T = Q + (-1)^c delta, T^2 = 0 iff Q delta = delta Q.
    QMat lhs = delta(c + 1, h) * qm;
    QMat rhs = q(c, h - 1) * dm;
    if (!(lhs - rhs).is_zero()) fail(Errc::SquareNotZero, "Q and delta do not commute");
  }
}

Complex Bicomplex::hat_tot(int cutoff) const {
  for (const auto& [key, labels] : bases_) {
    if (std::abs(key.first) > cutoff || std::abs(key.second) > cutoff)
      fail(Errc::InvalidArgument, "bicomplex entry beyond cutoff " + std::to_string(cutoff));
  }
  // Offsets of each bidegree within its total degree.
  std::map<int, std::vector<Key>> by_total;
  for (const auto& [key, labels] : bases_) by_total[key.first - key.second].push_back(key);
  Complex tot;
  std::map<Key, std::size_t> offset;
  for (const auto& [m, keys] : by_total) {
    std::vector<std::string> labels;
    for (const auto& k : keys) {
      offset[k] = labels.size();
      for (const auto& s : bases_.at(k)) labels.push_back(s);
    }
    tot.set_basis(m, std::move(labels));
  }
  for (const auto& [m, keys] : by_total) {
    QMat d(tot.dim(m + 1), tot.dim(m));
    for (const auto& k : keys) {
      auto [c, h] = k;
      QMat qm = q(c, h);
      if (dim(c + 1, h) > 0) {
        std::size_t ro = offset.at({c + 1, h});
        for (std::size_t i = 0; i < qm.rows(); ++i)
          for (std::size_t j = 0; j < qm.cols(); ++j) d.at(ro + i, offset.at(k) + j) = qm.at(i, j);
      }
      QMat dm = delta(c, h);
      if (dim(c, h - 1) > 0) {
        int sign = (((c % 2) + 2) % 2 == 0) ? 1 : -1;
        std::size_t ro = offset.at({c, h - 1});
        for (std::size_t i = 0; i < dm.rows(); ++i)
          for (std::size_t j = 0; j < dm.cols(); ++j)
            d.at(ro + i, offset.at(k) + j) = dm.at(i, j) * sign;
      }
    }
    tot.set_differential(m, std::move(d));
  }
  tot.validate();
  return tot;
}

}  // namespace sps
