#pragma once

#include "clwe/common.hpp"
#include "clwe/dictionary.hpp"
#include "clwe/projection.hpp"

#include <filesystem>
#include <optional>
#include <vector>

namespace clwe {

enum class BetaScheme {
  // β_ij = (1/deg(i) + 1/deg(j)) / 2, where deg counts distinct partners.
  inverse_degree,
  uniform,  // β_ij = 1
};

struct RetrofitConfig {
  double alpha = 1.0;
  BetaScheme beta = BetaScheme::inverse_degree;
  int iterations = 10;
  // Stop once no row moves more than this in a sweep. Unset means
  // 1e-5 times the mean row norm of the inputs.
  std::optional<double> convergence_tol;
};

struct RetrofitObjective {
  double total = 0.0;   // L = L_a + L_b
  double anchor = 0.0;  // L_a = α‖X̂ - X'‖² + α‖Ẑ - Z'‖²
  double pairs = 0.0;   // L_b = Σ β_ij ‖x̂_i - ẑ_j‖²
};

struct RetrofitResult {
  EmbeddingMatrix src;
  EmbeddingMatrix tgt;
  // Entry 0 is the objective of the inputs, entry s the objective after sweep s.
  std::vector<RetrofitObjective> objective_trace;
  int sweeps_run = 0;
};

/// β_ij per dictionary pair, multiplied by pair_scale[p] when given.
std::vector<double> retrofit_pair_weights(const IndexedDictionary& dict, BetaScheme scheme,
                                          const std::vector<double>& pair_scale = {});

/// Block coordinate descent on L = L_a + L_b. Each sweep sets, in ascending
/// index order, every dictionary source row to
///   x̂_i = (α x'_i + Σ_j β_ij ẑ_j) / (α + Σ_j β_ij)
/// and then every dictionary target row symmetrically. Rows of words outside
/// the dictionary are returned untouched. An empty dictionary returns the
/// inputs unchanged with a warning.
RetrofitResult retrofit(const AlignedEmbeddings& aligned, const IndexedDictionary& dict, const RetrofitConfig& cfg,
                        const std::vector<double>& pair_scale = {});

RetrofitObjective retrofit_objective(const Matrix& src_hat, const Matrix& tgt_hat, const Matrix& src_orig,
                                     const Matrix& tgt_orig, const IndexedDictionary& dict,
                                     const RetrofitConfig& cfg, const std::vector<double>& pair_scale = {});

/// TSV with columns sweep, L, L_a, L_b.
void save_objective_trace(const std::vector<RetrofitObjective>& trace, const std::filesystem::path& path);

}  // namespace clwe
