#include "clwe/projection.hpp"

#include "detail/rows.hpp"

namespace clwe {

namespace {

void check_inputs(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt, const IndexedDictionary& dict,
                  const char* method) {
  if (dict.empty()) throw ArgumentError(std::string(method) + " needs a non-empty dictionary");
  detail::check_dictionary_fits(dict, src.size(), tgt.size());
}

}  // namespace

LinearMap fit_procrustes(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt, const IndexedDictionary& dict) {
  check_inputs(src, tgt, dict, "Procrustes");
  if (src.dim() != tgt.dim()) {
    throw ArgumentError("Procrustes needs equal dimensions, got " + std::to_string(src.dim()) + " and " +
                        std::to_string(tgt.dim()));
  }
  auto rows = detail::gather_pairs(src.vectors(), tgt.vectors(), dict);
  // Cross-covariance Σ z_j x_iᵀ (d x d).
  const Eigen::MatrixXd cross = rows.tgt.transpose() * rows.src;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {svd.matrixU() * svd.matrixV().transpose(), Vector(), true};
}

LinearMap fit_least_squares(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt, const IndexedDictionary& dict) {
  check_inputs(src, tgt, dict, "least squares");
  auto rows = detail::gather_pairs(src.vectors(), tgt.vectors(), dict);
  // X_D Wᵀ ≈ Z_D; complete orthogonal decomposition yields the minimum-norm
  // solution for rank-deficient X_D.
  const Eigen::MatrixXd xs = rows.src;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(xs);
  const Eigen::MatrixXd wt = cod.solve(Eigen::MatrixXd(rows.tgt));
  return {wt.transpose(), Vector(), false};
}

}  // namespace clwe
