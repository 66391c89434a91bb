#pragma once

#include "clwe/common.hpp"
#include "clwe/dictionary.hpp"
#include "clwe/embeddings.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace clwe {

/// Affine map y = M (x - center). `center` is empty for purely linear maps
/// (Procrustes, least squares, RCSLS); CCA maps carry the dictionary mean of
/// their language.
struct LinearMap {
  Matrix matrix;
  Vector center;
  bool orthogonal = false;

  Index input_dim() const { return matrix.cols(); }
  Index output_dim() const { return matrix.rows(); }

  static LinearMap identity(Index d);

  /// max |MᵀM - I|.
  double orthogonality_error() const;
};

/// Text format: "<rows> <cols>" then one line of floats per row. A map with a
/// center adds a final "center v1 .. vcols" line.
void save_linear_map(const LinearMap& map, const std::filesystem::path& path);
LinearMap load_linear_map(const std::filesystem::path& path);

/// Projected source and target embeddings sharing one space.
struct AlignedEmbeddings {
  EmbeddingMatrix src;
  EmbeddingMatrix tgt;
};

/// Orthogonal W minimizing Σ ‖W x_i - z_j‖² over dictionary pairs: W = U Vᵀ
/// from the SVD U Σ Vᵀ of Σ z_j x_iᵀ.
LinearMap fit_procrustes(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt, const IndexedDictionary& dict);

/// Unconstrained least-squares W minimizing Σ ‖W x_i - z_j‖²; the
/// minimum-norm solution when the system is rank deficient.
LinearMap fit_least_squares(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt, const IndexedDictionary& dict);

struct CcaResult {
  LinearMap src_map;
  LinearMap tgt_map;
  Vector correlations;  // canonical correlations, descending
  bool regularized = false;
};

/// Canonical correlation analysis over dictionary pairs. Both sides are
/// centered on their dictionary-row means and projected onto the top
/// ceil(dim_ratio * min(d_src, d_tgt)) canonical directions, giving
/// unit-variance, mutually uncorrelated variates. A singular within-language
/// covariance gets a 1e-8 ridge and a warning.
CcaResult fit_cca(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt, const IndexedDictionary& dict,
                  double dim_ratio = 1.0);

struct RcslsConfig {
  int k_neighbors = 10;
  int epochs = 10;
  double learning_rate = 1.0;
  std::size_t batch_size = 0;  // 0 = full batch
  std::uint64_t seed = 0;
  Index max_neighbor_vocab = 0;  // 0 = search the full vocabularies
};

/// Frozen RCSLS neighbourhoods. For dictionary pair p, target_neighbors[p]
/// holds the k target rows closest to W x_i and source_neighbors[p] the k
/// source rows whose projections are closest to z_j.
struct RcslsNeighborhoods {
  std::vector<std::vector<Index>> target_neighbors;
  std::vector<std::vector<Index>> source_neighbors;
};

struct RcslsEvaluation {
  double loss = 0.0;
  Matrix gradient;  // same shape as W
};

/// Neighbourhoods of every dictionary pair under W. Rows are unit-normalized
/// internally. Throws ArgumentError when k is not below the searched
/// vocabulary size.
RcslsNeighborhoods rcsls_neighborhoods(const LinearMap& map, const EmbeddingMatrix& src, const EmbeddingMatrix& tgt,
                                       const IndexedDictionary& dict, const RcslsConfig& cfg);

/// RCSLS loss averaged over the given pair positions (all pairs when empty)
/// with neighbourhoods held fixed, and its exact gradient in W. Per pair:
///   -2 zᵀWx + mean_{t∈N(Wx)} z_tᵀWx + mean_{s∈N(z)} zᵀW x_s
/// on unit-normalized x and z.
RcslsEvaluation rcsls_loss_and_grad_frozen(const LinearMap& map, const EmbeddingMatrix& src,
                                           const EmbeddingMatrix& tgt, const IndexedDictionary& dict,
                                           const RcslsNeighborhoods& neighborhoods,
                                           const std::vector<std::size_t>& batch = {});

/// Neighbourhoods computed at W, then frozen evaluation over all pairs.
RcslsEvaluation rcsls_loss_and_grad(const LinearMap& map, const EmbeddingMatrix& src, const EmbeddingMatrix& tgt,
                                    const IndexedDictionary& dict, const RcslsConfig& cfg);

struct RcslsFit {
  LinearMap map;
  std::vector<double> loss_trace;  // loss of the accepted W, starting at init
  double final_learning_rate = 0.0;
};

/// Gradient descent on the RCSLS loss from `init`. Neighbourhoods are
/// recomputed every epoch; a step is kept only if it lowers the loss,
/// otherwise the learning rate is halved.
RcslsFit fit_rcsls(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt, const IndexedDictionary& dict,
                   const RcslsConfig& cfg, const LinearMap& init);

/// Replaces every row x by M (x - center). Vocabulary is unchanged.
EmbeddingMatrix apply_projection(const LinearMap& map, const EmbeddingMatrix& emb);

/// Σ ‖W x_i - z_j‖² over dictionary pairs.
double alignment_residual(const LinearMap& map, const EmbeddingMatrix& src, const EmbeddingMatrix& tgt,
                          const IndexedDictionary& dict);

}  // namespace clwe
