#pragma once

#include "clwe/common.hpp"
#include "clwe/dictionary.hpp"
#include "clwe/embeddings.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace clwe {

struct Neighbor {
  Index index = 0;
  double score = 0.0;
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

using NeighborLists = std::vector<std::vector<Neighbor>>;

/// Exact top-k keys per query by raw dot product, sorted by descending
/// score; equal scores go to the lower key index. Only the first
/// `key_limit` keys are searched when key_limit > 0.
NeighborLists topk_dot(const Matrix& queries, const Matrix& keys, int k, Index key_limit = 0);

/// topk_dot on unit-normalized copies. Throws ArgumentError when k is not
/// in [1, key count] and DataError on a zero row.
NeighborLists topk_cosine(const EmbeddingMatrix& queries, const EmbeddingMatrix& keys, int k);

/// Mean top-k cross-space cosine for every word on both sides.
struct CslsIndex {
  int k = 10;
  Vector r_src;  // per source word, against the target space
  Vector r_tgt;  // per target word, against the source space
};

/// Throws ArgumentError unless 1 <= k < min(n_src, n_tgt).
CslsIndex build_csls_index(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt, int k = 10);

/// argmax_j 2 cos(x_i, z_j) - r_src[i] - r_tgt[j] for each query i; ties go
/// to the lower j. Candidates are limited to the first `max_rank` targets
/// when max_rank > 0.
std::vector<Index> csls_translate(const CslsIndex& index, const EmbeddingMatrix& src, const EmbeddingMatrix& tgt,
                                  const std::vector<Index>& queries, Index max_rank = 0);

/// Target-to-source direction: argmax_i 2 cos(z_j, x_i) - r_tgt[j] - r_src[i].
std::vector<Index> csls_translate_reverse(const CslsIndex& index, const EmbeddingMatrix& src,
                                          const EmbeddingMatrix& tgt, const std::vector<Index>& queries,
                                          Index max_rank = 0);

/// Plain cosine nearest neighbour, kept as a retrieval baseline.
std::vector<Index> cosine_translate(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt,
                                    const std::vector<Index>& queries);

/// Pairs (i, j) that are each other's CSLS translation, sorted by source
/// index. With max_rank > 0 both candidate sets are limited to the first
/// max_rank words.
IndexedDictionary induce_synthetic_dictionary(const CslsIndex& index, const EmbeddingMatrix& src,
                                              const EmbeddingMatrix& tgt, Index max_rank = 0);

struct BliEntry {
  std::string source;
  std::string prediction;
  std::vector<std::string> gold;
  bool correct = false;
  Index frequency_rank = 0;  // 1-based position in the source vocabulary
};

struct BliReport {
  double p_at_1 = 0.0;
  std::size_t evaluated_words = 0;
  std::size_t oov_words = 0;
  std::size_t correct_words = 0;
  std::vector<BliEntry> per_word;
};

/// Precision@1 of CSLS translation over the distinct source words of
/// `gold`; a prediction is correct if it is any gold target of that word.
/// `oov_words` is carried into the report (see count_oov_sources).
BliReport evaluate_bli(const CslsIndex& index, const EmbeddingMatrix& src, const EmbeddingMatrix& tgt,
                       const IndexedDictionary& gold, std::size_t oov_words = 0);

/// TSV: header, one row per source word (source, prediction, comma-joined
/// gold, correct 0/1, frequency rank), then a '#' summary line.
void save_bli_report(const BliReport& report, const std::filesystem::path& path);
std::string format_bli_report(const BliReport& report);

}  // namespace clwe
