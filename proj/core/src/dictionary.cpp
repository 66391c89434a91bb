#include "clwe/dictionary.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace clwe {

IndexedDictionary::IndexedDictionary(Index source_vocab_size, Index target_vocab_size)
    : src_size_(source_vocab_size), tgt_size_(target_vocab_size) {
  if (src_size_ < 0 || tgt_size_ < 0) throw ArgumentError("negative vocabulary size");
}

IndexedDictionary::IndexedDictionary(Index source_vocab_size, Index target_vocab_size, std::vector<IndexPair> pairs)
    : IndexedDictionary(source_vocab_size, target_vocab_size) {
  pairs_.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (!insert(p)) {
      throw ArgumentError("duplicate dictionary pair (" + std::to_string(p.source) + ", " +
                          std::to_string(p.target) + ")");
    }
  }
}

bool IndexedDictionary::insert(IndexPair pair) {
  if (pair.source < 0 || pair.source >= src_size_ || pair.target < 0 || pair.target >= tgt_size_) {
    throw ArgumentError("dictionary pair (" + std::to_string(pair.source) + ", " + std::to_string(pair.target) +
                        ") out of range for vocabularies of size " + std::to_string(src_size_) + " and " +
                        std::to_string(tgt_size_));
  }
  if (!keys_.insert(key(pair)).second) return false;
  pairs_.push_back(pair);
  return true;
}

bool IndexedDictionary::contains(IndexPair pair) const {
  return keys_.count(key(pair)) > 0;
}

std::vector<Index> IndexedDictionary::source_words() const {
  std::vector<Index> out;
  std::unordered_set<Index> seen;
  for (const auto& p : pairs_) {
    if (seen.insert(p.source).second) out.push_back(p.source);
  }
  return out;
}

WordPairList parse_dictionary_text(std::string_view text, std::string_view origin) {
  WordPairList pairs;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;

    std::vector<std::string_view> tokens;
    std::size_t t = 0;
    auto is_ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; };
    while (t < line.size()) {
      while (t < line.size() && is_ws(line[t])) ++t;
      if (t >= line.size()) break;
      std::size_t e = t;
      while (e < line.size() && !is_ws(line[e])) ++e;
      tokens.push_back(line.substr(t, e - t));
      t = e;
    }
    if (tokens.empty()) continue;
    if (tokens.size() != 2) {
      throw DataError(std::string(origin) + ":" + std::to_string(line_no) + ": expected 2 tokens, found " +
                      std::to_string(tokens.size()));
    }
    pairs.push_back({std::string(tokens[0]), std::string(tokens[1])});
  }
  return pairs;
}

WordPairList parse_dictionary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dictionary file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw DataError("I/O error reading " + path.string());
  return parse_dictionary_text(ss.str(), path.string());
}

void save_dictionary(const WordPairList& pairs, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  for (const auto& p : pairs) out << p.source << '\t' << p.target << '\n';
  out.flush();
  if (!out) throw DataError("I/O error writing " + path.string());
}

WordPairList to_word_pairs(const IndexedDictionary& dict, const Vocabulary& src, const Vocabulary& tgt) {
  WordPairList out;
  out.reserve(dict.size());
  for (const auto& p : dict.pairs()) out.push_back({src.word(p.source), tgt.word(p.target)});
  return out;
}

IndexingResult index_dictionary(const WordPairList& raw, const Vocabulary& src, const Vocabulary& tgt) {
  IndexingResult result{IndexedDictionary(src.size(), tgt.size()), 0};
  for (const auto& pair : raw) {
    auto i = src.find(pair.source);
    auto j = tgt.find(pair.target);
    if (!i || !j || !result.dictionary.insert({*i, *j})) ++result.dropped;
  }
  return result;
}

std::size_t count_oov_sources(const WordPairList& raw, const Vocabulary& src, const Vocabulary& tgt) {
  std::unordered_set<std::string> all;
  std::unordered_set<std::string> covered;
  for (const auto& pair : raw) {
    all.insert(pair.source);
    if (src.contains(pair.source) && tgt.contains(pair.target)) covered.insert(pair.source);
  }
  return all.size() - covered.size();
}

IndexedDictionary merge_dictionaries(const IndexedDictionary& a, const IndexedDictionary& b) {
  if (a.source_vocab_size() != b.source_vocab_size() || a.target_vocab_size() != b.target_vocab_size()) {
    throw ArgumentError("cannot merge dictionaries indexed against different vocabulary sizes");
  }
  IndexedDictionary out = a;
  for (const auto& p : b.pairs()) out.insert(p);
  return out;
}

}  // namespace clwe
