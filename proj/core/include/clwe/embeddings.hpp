#pragma once

#include "clwe/common.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace clwe {

/// Ordered word list with a dense word -> row index map.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Throws ArgumentError on duplicate words.
  explicit Vocabulary(std::vector<std::string> words);

  /// Appends a word and returns its index. Throws ArgumentError if present.
  Index add(std::string word);

  std::optional<Index> find(std::string_view word) const;
  bool contains(std::string_view word) const { return find(word).has_value(); }

  const std::string& word(Index i) const { return words_.at(static_cast<std::size_t>(i)); }
  const std::vector<std::string>& words() const { return words_; }
  Index size() const { return static_cast<Index>(words_.size()); }
  bool empty() const { return words_.empty(); }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.words_ == b.words_; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };
  std::vector<std::string> words_;
  std::unordered_map<std::string, Index, Hash, std::equal_to<>> index_;
};

/// Vocabulary plus an n x d matrix; row i is the vector of word i.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;

  /// Throws DataError if row count != vocabulary size, d == 0 or any entry
  /// is non-finite.
  EmbeddingMatrix(Vocabulary vocab, Matrix vectors);

  const Vocabulary& vocab() const { return vocab_; }
  const Matrix& vectors() const { return vectors_; }
  Index size() const { return vectors_.rows(); }
  Index dim() const { return vectors_.cols(); }

  auto row(Index i) const { return vectors_.row(i); }

  /// Same vocabulary, new vectors (validated like the constructor).
  EmbeddingMatrix with_vectors(Matrix vectors) const;

 private:
  Vocabulary vocab_;
  Matrix vectors_;
};

struct LoadOptions {
  std::optional<Index> max_vocab;  // keep the first max_vocab distinct words
  bool lowercase = true;           // Unicode simple lowercase before dedup
};

/// Reads the word2vec text format ("<n> <d>" header, then "<word> v1 .. vd"
/// rows). File order is taken as frequency order: truncation keeps the first
/// rows and, after lowercasing, the first occurrence of a surface form wins.
/// Throws DataError (with the 1-based line number) on a malformed header,
/// wrong row width, unparseable or non-finite value, or I/O failure.
EmbeddingMatrix load_embeddings(const std::filesystem::path& path, const LoadOptions& options = {});

/// Writes the word2vec text format using shortest round-trip float text.
void save_embeddings(const EmbeddingMatrix& emb, const std::filesystem::path& path);

/// Per-round diagnostics of iterative normalization.
struct NormalizationRound {
  double max_norm_deviation = 0.0;  // max |‖row‖ - 1| of the round's input rows
  double mean_norm = 0.0;           // ‖mean row‖ after unit scaling, before centering
};

struct IterativeNormalization {
  EmbeddingMatrix result;
  std::vector<NormalizationRound> rounds;
};

/// Each round scales rows to unit length, then subtracts the mean row.
/// Throws DataError naming the word when a zero-norm row is met.
EmbeddingMatrix iterative_normalize(const EmbeddingMatrix& emb, int rounds = 5);
IterativeNormalization iterative_normalize_traced(const EmbeddingMatrix& emb, int rounds = 5);

/// Scales every row to unit Euclidean length. Throws DataError on a zero row.
EmbeddingMatrix unit_normalize(const EmbeddingMatrix& emb);

/// Unit-normalized copy of a bare matrix; `what` names the matrix in errors.
Matrix unit_rows(const Matrix& m, std::string_view what = "matrix");

}  // namespace clwe
