#pragma once

// Brute-force reference computations. These use plain loops and full sorts
// over the complete similarity matrix and share no code with the library's
// blocked search.

#include "clwe/common.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

namespace clwe::oracle {

inline std::vector<std::vector<double>> cosine_matrix(const Matrix& a, const Matrix& b) {
  std::vector<std::vector<double>> s(static_cast<std::size_t>(a.rows()),
                                     std::vector<double>(static_cast<std::size_t>(b.rows())));
  for (Index i = 0; i < a.rows(); ++i) {
    double na = 0;
    for (Index k = 0; k < a.cols(); ++k) na += a(i, k) * a(i, k);
    for (Index j = 0; j < b.rows(); ++j) {
      double nb = 0, dot = 0;
      for (Index k = 0; k < b.cols(); ++k) {
        nb += b(j, k) * b(j, k);
        dot += a(i, k) * b(j, k);
      }
      s[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = dot / (std::sqrt(na) * std::sqrt(nb));
    }
  }
  return s;
}

// Every key ordered by (cosine desc, index asc).
inline std::vector<std::vector<std::pair<Index, double>>> full_ranking(const std::vector<std::vector<double>>& s) {
  std::vector<std::vector<std::pair<Index, double>>> out;
  for (const auto& row : s) {
    std::vector<std::pair<Index, double>> r;
    for (std::size_t j = 0; j < row.size(); ++j) r.emplace_back(static_cast<Index>(j), row[j]);
    std::sort(r.begin(), r.end(), [](const auto& x, const auto& y) {
      return x.second > y.second || (x.second == y.second && x.first < y.first);
    });
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<double> mean_topk(const std::vector<std::vector<double>>& s, int k) {
  std::vector<double> r;
  for (const auto& row : s) {
    std::vector<double> sorted = row;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double sum = 0;
    for (int t = 0; t < k; ++t) sum += sorted[static_cast<std::size_t>(t)];
    r.push_back(sum / k);
  }
  return r;
}

struct Csls {
  std::vector<std::vector<double>> cos;  // src x tgt
  std::vector<double> r_src;
  std::vector<double> r_tgt;
};

inline Csls csls(const Matrix& src, const Matrix& tgt, int k) {
  Csls c;
  c.cos = cosine_matrix(src, tgt);
  c.r_src = mean_topk(c.cos, k);
  c.r_tgt = mean_topk(cosine_matrix(tgt, src), k);
  return c;
}

inline Index forward_best(const Csls& c, Index i) {
  const auto& row = c.cos[static_cast<std::size_t>(i)];
  Index best = 0;
  double best_score = -1e300;
  for (std::size_t j = 0; j < row.size(); ++j) {
    const double s = 2.0 * row[j] - c.r_src[static_cast<std::size_t>(i)] - c.r_tgt[j];
    if (s > best_score) {
      best_score = s;
      best = static_cast<Index>(j);
    }
  }
  return best;
}

inline Index backward_best(const Csls& c, Index j) {
  Index best = 0;
  double best_score = -1e300;
  for (std::size_t i = 0; i < c.cos.size(); ++i) {
    const double s = 2.0 * c.cos[i][static_cast<std::size_t>(j)] - c.r_tgt[static_cast<std::size_t>(j)] - c.r_src[i];
    if (s > best_score) {
      best_score = s;
      best = static_cast<Index>(i);
    }
  }
  return best;
}

inline std::vector<std::pair<Index, Index>> mutual_pairs(const Csls& c) {
  std::vector<std::pair<Index, Index>> out;
  for (std::size_t i = 0; i < c.cos.size(); ++i) {
    const Index j = forward_best(c, static_cast<Index>(i));
    if (backward_best(c, j) == static_cast<Index>(i)) out.emplace_back(static_cast<Index>(i), j);
  }
  return out;
}

// Canonical correlations as square roots of the eigenvalues of
// Cxx⁻¹ Cxz Czz⁻¹ Czx, solved with a general (non-symmetric) eigensolver.
inline std::vector<double> canonical_correlations(const Eigen::MatrixXd& x, const Eigen::MatrixXd& z) {
  const Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
  const Eigen::MatrixXd zc = z.rowwise() - z.colwise().mean();
  const Eigen::MatrixXd cxx = xc.transpose() * xc;
  const Eigen::MatrixXd czz = zc.transpose() * zc;
  const Eigen::MatrixXd cxz = xc.transpose() * zc;
  const Eigen::MatrixXd m = cxx.inverse() * cxz * czz.inverse() * cxz.transpose();
  Eigen::EigenSolver<Eigen::MatrixXd> es(m);
  std::vector<double> out;
  for (Index k = 0; k < es.eigenvalues().size(); ++k) out.push_back(std::sqrt(std::max(0.0, es.eigenvalues()(k).real())));
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

inline double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::VectorXd ac = a.array() - a.mean();
  const Eigen::VectorXd bc = b.array() - b.mean();
  return ac.dot(bc) / std::sqrt(ac.squaredNorm() * bc.squaredNorm());
}

}  // namespace clwe::oracle
