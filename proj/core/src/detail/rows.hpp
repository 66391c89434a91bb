#pragma once

#include "clwe/common.hpp"
#include "clwe/dictionary.hpp"

namespace clwe::detail {

// Dictionary rows gathered into dense (pairs x d) matrices.
struct PairedRows {
  Matrix src;
  Matrix tgt;
};

inline PairedRows gather_pairs(const Matrix& src, const Matrix& tgt, const IndexedDictionary& dict) {
  const auto n = static_cast<Index>(dict.size());
  PairedRows out{Matrix(n, src.cols()), Matrix(n, tgt.cols())};
  for (Index p = 0; p < n; ++p) {
    const auto& pair = dict.pairs()[static_cast<std::size_t>(p)];
    out.src.row(p) = src.row(pair.source);
    out.tgt.row(p) = tgt.row(pair.target);
  }
  return out;
}

inline void check_dictionary_fits(const IndexedDictionary& dict, Index src_rows, Index tgt_rows) {
  if (dict.source_vocab_size() != src_rows || dict.target_vocab_size() != tgt_rows) {
    throw ArgumentError("dictionary is indexed against vocabularies of size " +
                        std::to_string(dict.source_vocab_size()) + "/" + std::to_string(dict.target_vocab_size()) +
                        " but embeddings have " + std::to_string(src_rows) + "/" + std::to_string(tgt_rows) +
                        " rows");
  }
}

}  // namespace clwe::detail
