#pragma once

#include "clwe/common.hpp"
#include "clwe/embeddings.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace clwe {

struct WordPair {
  std::string source;
  std::string target;
  friend bool operator==(const WordPair&, const WordPair&) = default;
};

/// Surface-form dictionary as read from disk; duplicates allowed.
using WordPairList = std::vector<WordPair>;

struct IndexPair {
  Index source = 0;
  Index target = 0;
  friend auto operator<=>(const IndexPair&, const IndexPair&) = default;
};

/// Translation pairs resolved against a source/target vocabulary pair.
/// A source index may appear with several targets; (i, j) pairs are unique.
class IndexedDictionary {
 public:
  IndexedDictionary() = default;
  IndexedDictionary(Index source_vocab_size, Index target_vocab_size);

  /// Validated construction. Throws ArgumentError on out-of-range indices or
  /// a repeated pair.
  IndexedDictionary(Index source_vocab_size, Index target_vocab_size, std::vector<IndexPair> pairs);

  /// Adds the pair unless already present; returns whether it was added.
  bool insert(IndexPair pair);
  bool contains(IndexPair pair) const;

  const std::vector<IndexPair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  Index source_vocab_size() const { return src_size_; }
  Index target_vocab_size() const { return tgt_size_; }

  /// Distinct source indices in order of first appearance.
  std::vector<Index> source_words() const;

  friend bool operator==(const IndexedDictionary& a, const IndexedDictionary& b) {
    return a.src_size_ == b.src_size_ && a.tgt_size_ == b.tgt_size_ && a.pairs_ == b.pairs_;
  }

 private:
  static std::uint64_t key(IndexPair p) {
    return (static_cast<std::uint64_t>(p.source) << 32) ^ static_cast<std::uint64_t>(p.target);
  }
  Index src_size_ = 0;
  Index tgt_size_ = 0;
  std::vector<IndexPair> pairs_;
  std::unordered_set<std::uint64_t> keys_;
};

/// One pair per non-empty line, two tokens separated by any run of spaces or
/// tabs. Throws DataError with the line number on any other token count.
WordPairList parse_dictionary(const std::filesystem::path& path);
WordPairList parse_dictionary_text(std::string_view text, std::string_view origin = "<text>");

/// Writes "source\ttarget" lines.
void save_dictionary(const WordPairList& pairs, const std::filesystem::path& path);

/// Surface forms of an indexed dictionary.
WordPairList to_word_pairs(const IndexedDictionary& dict, const Vocabulary& src, const Vocabulary& tgt);

struct IndexingResult {
  IndexedDictionary dictionary;
  std::size_t dropped = 0;  // OOV pairs plus repeated pairs
};

/// Keeps pairs whose words are both in vocabulary, in order of first
/// occurrence, collapsing repeats. OOV pairs are counted, not fatal.
IndexingResult index_dictionary(const WordPairList& raw, const Vocabulary& src, const Vocabulary& tgt);

/// Distinct raw source words for which no pair survived indexing.
std::size_t count_oov_sources(const WordPairList& raw, const Vocabulary& src, const Vocabulary& tgt);

/// Set union: all of `a`, then the pairs of `b` not in `a`. Throws
/// ArgumentError if the vocabulary sizes differ.
IndexedDictionary merge_dictionaries(const IndexedDictionary& a, const IndexedDictionary& b);

}  // namespace clwe
