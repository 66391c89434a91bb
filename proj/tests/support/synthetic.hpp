#pragma once

// Random instance generators shared by the unit and acceptance tests.

#include "clwe/dictionary.hpp"
#include "clwe/embeddings.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace clwe::testing {

inline Matrix gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

// Haar-ish random orthogonal matrix from the QR factorization of a Gaussian
// matrix, with the sign of R's diagonal folded into Q.
inline Eigen::MatrixXd random_orthogonal(Index d, std::mt19937_64& rng) {
  const Eigen::MatrixXd g = gaussian(d, d, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index c = 0; c < d; ++c) {
    if (r(c, c) < 0) q.col(c) *= -1.0;
  }
  return q;
}

inline Vocabulary numbered_vocab(Index n, const std::string& prefix) {
  std::vector<std::string> words;
  words.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) words.push_back(prefix + std::to_string(i));
  return Vocabulary(std::move(words));
}

inline EmbeddingMatrix make_embeddings(Matrix m, const std::string& prefix) {
  auto vocab = numbered_vocab(m.rows(), prefix);
  return {std::move(vocab), std::move(m)};
}

// Source/target spaces where target word i is the noisy rotation of source
// word i: z_i = R x_i + noise * eps.
struct Bilingual {
  EmbeddingMatrix src;
  EmbeddingMatrix tgt;
  Eigen::MatrixXd rotation;
};

inline Bilingual make_bilingual(Index n, Index d, double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Matrix x = gaussian(n, d, rng);
  Eigen::MatrixXd r = random_orthogonal(d, rng);
  Matrix z = x * r.transpose();
  z += noise * gaussian(n, d, rng);
  return {make_embeddings(std::move(x), "s"), make_embeddings(std::move(z), "t"), r};
}

inline IndexedDictionary identity_pairs(Index src_size, Index tgt_size, Index begin, Index end) {
  IndexedDictionary dict(src_size, tgt_size);
  for (Index i = begin; i < end; ++i) dict.insert({i, i});
  return dict;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("clwe-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace clwe::testing
