#include "clwe/log.hpp"
#include "clwe/projection.hpp"

#include "detail/rows.hpp"

#include <cmath>

namespace clwe {

namespace {

constexpr double kRidge = 1e-8;

struct InverseSqrt {
  Eigen::MatrixXd value;
  bool regularized = false;
};

// C^{-1/2} for a symmetric covariance, adding the ridge when C is singular.
InverseSqrt inverse_sqrt(Eigen::MatrixXd cov, const char* side) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const double largest = std::max(eig.eigenvalues().maxCoeff(), 0.0);
  bool regularized = false;
  if (eig.eigenvalues().minCoeff() <= 1e-12 * std::max(largest, 1.0)) {
    log::warn(std::string("CCA: ") + side + " covariance is singular, adding ridge 1e-8");
    cov.diagonal().array() += kRidge;
    eig.compute(cov);
    regularized = true;
  }
  const Eigen::VectorXd scale = eig.eigenvalues().cwiseMax(kRidge * 1e-4).cwiseSqrt().cwiseInverse();
  return {eig.eigenvectors() * scale.asDiagonal() * eig.eigenvectors().transpose(), regularized};
}

}  // namespace

CcaResult fit_cca(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt, const IndexedDictionary& dict,
                  double dim_ratio) {
  if (!(dim_ratio > 0.0 && dim_ratio <= 1.0)) throw ArgumentError("CCA dim_ratio must lie in (0, 1]");
  detail::check_dictionary_fits(dict, src.size(), tgt.size());
  const auto pairs = static_cast<Index>(dict.size());
  if (pairs <= std::max(src.dim(), tgt.dim())) {
    throw ArgumentError("CCA needs more dictionary pairs (" + std::to_string(pairs) + ") than dimensions (" +
                        std::to_string(std::max(src.dim(), tgt.dim())) + ")");
  }

  auto rows = detail::gather_pairs(src.vectors(), tgt.vectors(), dict);
  const Eigen::VectorXd mean_x = rows.src.colwise().mean().transpose();
  const Eigen::VectorXd mean_z = rows.tgt.colwise().mean().transpose();
  const Eigen::MatrixXd xc = rows.src.rowwise() - mean_x.transpose();
  const Eigen::MatrixXd zc = rows.tgt.rowwise() - mean_z.transpose();

  const double denom = static_cast<double>(pairs - 1);
  const Eigen::MatrixXd cxx = xc.transpose() * xc / denom;
  const Eigen::MatrixXd czz = zc.transpose() * zc / denom;
  const Eigen::MatrixXd cxz = xc.transpose() * zc / denom;

  const auto wx = inverse_sqrt(cxx, "source");
  const auto wz = inverse_sqrt(czz, "target");

  // Singular vectors of the whitened cross-covariance give the canonical
  // directions; singular values are the canonical correlations.
  const Eigen::MatrixXd whitened = wx.value * cxz * wz.value;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(whitened, Eigen::ComputeThinU | Eigen::ComputeThinV);

  const Index full = std::min(src.dim(), tgt.dim());
  const auto keep = std::clamp<Index>(static_cast<Index>(std::ceil(dim_ratio * static_cast<double>(full) - 1e-12)),
                                      1, full);

  const Eigen::MatrixXd a = wx.value * svd.matrixU().leftCols(keep);
  const Eigen::MatrixXd b = wz.value * svd.matrixV().leftCols(keep);

  CcaResult result;
  result.src_map = {a.transpose(), mean_x, false};
  result.tgt_map = {b.transpose(), mean_z, false};
  result.correlations = svd.singularValues().head(keep);
  result.regularized = wx.regularized || wz.regularized;
  return result;
}

}  // namespace clwe
