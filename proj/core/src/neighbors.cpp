#include "clwe/neighbors.hpp"

#include "clwe/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <unordered_map>

namespace clwe {

namespace {

// Rows per similarity block, sized so one block of scores stays near 32 MB.
std::size_t block_rows(Index keys) {
  const auto per = static_cast<std::size_t>(std::max<Index>(1, keys));
  return std::clamp<std::size_t>((std::size_t{1} << 22) / per, 1, 256);
}

// Calls fn(query_row, scores_row) for every query against keys[0, limit),
// in fixed row blocks processed in parallel.
template <typename Fn>
void for_each_score_row(const Matrix& queries, const Matrix& keys, Index limit, Fn&& fn) {
  const auto n = static_cast<std::size_t>(queries.rows());
  const auto key_block = keys.topRows(limit);
  parallel_for_chunks(n, block_rows(limit), [&](std::size_t begin, std::size_t end) {
    const auto rows = static_cast<Index>(end - begin);
    const Matrix scores = queries.middleRows(static_cast<Index>(begin), rows) * key_block.transpose();
    for (Index r = 0; r < rows; ++r) fn(static_cast<Index>(begin) + r, scores.row(r));
  });
}

bool better(const Neighbor& a, const Neighbor& b) {
  return a.score > b.score || (a.score == b.score && a.index < b.index);
}

void check_k(int k, Index keys) {
  if (k < 1 || k > keys) {
    throw ArgumentError("k = " + std::to_string(k) + " out of range for " + std::to_string(keys) + " keys");
  }
}

Matrix unit_copy(const EmbeddingMatrix& emb, const char* side) {
  return unit_rows(emb.vectors(), std::string(side) + " embeddings");
}

Matrix unit_copy_rows(const EmbeddingMatrix& emb, const std::vector<Index>& rows, const char* side) {
  Matrix out(static_cast<Index>(rows.size()), emb.dim());
  for (std::size_t q = 0; q < rows.size(); ++q) {
    if (rows[q] < 0 || rows[q] >= emb.size()) {
      throw ArgumentError(std::string(side) + " query index " + std::to_string(rows[q]) + " out of range");
    }
    out.row(static_cast<Index>(q)) = emb.row(rows[q]);
  }
  return unit_rows(out, std::string(side) + " query rows");
}

Index effective_limit(Index max_rank, Index size) { return max_rank > 0 ? std::min(max_rank, size) : size; }

// argmax_j 2 s(q, j) - r_query[q] - r_key[j] over keys [0, limit).
std::vector<Index> csls_argmax(const Matrix& queries, const std::vector<Index>& query_ids, const Matrix& keys,
                               const Vector& r_query, const Vector& r_key, Index limit) {
  std::vector<Index> out(query_ids.size(), 0);
  for_each_score_row(queries, keys, limit, [&](Index q, const auto& scores) {
    const double rq = r_query(query_ids[static_cast<std::size_t>(q)]);
    Index best = 0;
    double best_score = 2.0 * scores(0) - rq - r_key(0);
    for (Index j = 1; j < limit; ++j) {
      const double s = 2.0 * scores(j) - rq - r_key(j);
      if (s > best_score) {
        best_score = s;
        best = j;
      }
    }
    out[static_cast<std::size_t>(q)] = best;
  });
  return out;
}

void check_index(const CslsIndex& index, const EmbeddingMatrix& src, const EmbeddingMatrix& tgt) {
  if (index.r_src.size() != src.size() || index.r_tgt.size() != tgt.size()) {
    throw ArgumentError("CSLS index was built for different vocabulary sizes");
  }
  if (src.dim() != tgt.dim()) throw ArgumentError("source and target dimensions differ");
}

}  // namespace

NeighborLists topk_dot(const Matrix& queries, const Matrix& keys, int k, Index key_limit) {
  const Index limit = effective_limit(key_limit, keys.rows());
  check_k(k, limit);
  if (queries.cols() != keys.cols()) throw ArgumentError("query and key dimensions differ");

  NeighborLists out(static_cast<std::size_t>(queries.rows()));
  for_each_score_row(queries, keys, limit, [&](Index q, const auto& scores) {
    auto& top = out[static_cast<std::size_t>(q)];
    top.reserve(static_cast<std::size_t>(k) + 1);
    for (Index j = 0; j < limit; ++j) {
      const Neighbor nb{j, scores(j)};
      if (static_cast<int>(top.size()) == k && !better(nb, top.back())) continue;
      top.insert(std::upper_bound(top.begin(), top.end(), nb, better), nb);
      if (static_cast<int>(top.size()) > k) top.pop_back();
    }
  });
  return out;
}

NeighborLists topk_cosine(const EmbeddingMatrix& queries, const EmbeddingMatrix& keys, int k) {
  check_k(k, keys.size());
  return topk_dot(unit_copy(queries, "query"), unit_copy(keys, "key"), k);
}

CslsIndex build_csls_index(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt, int k) {
  if (src.size() == 0 || tgt.size() == 0) throw ArgumentError("CSLS needs non-empty vocabularies");
  if (k < 1 || k >= std::min(src.size(), tgt.size())) {
    throw ArgumentError("CSLS k = " + std::to_string(k) + " must be below both vocabulary sizes (" +
                        std::to_string(src.size()) + ", " + std::to_string(tgt.size()) + ")");
  }
  if (src.dim() != tgt.dim()) throw ArgumentError("source and target dimensions differ");

  const Matrix xs = unit_copy(src, "source");
  const Matrix zs = unit_copy(tgt, "target");

  auto mean_topk = [k](const Matrix& queries, const Matrix& keys) {
    Vector r(queries.rows());
    const auto lists = topk_dot(queries, keys, k);
    for (std::size_t q = 0; q < lists.size(); ++q) {
      double sum = 0.0;
      for (const auto& nb : lists[q]) sum += nb.score;
      r(static_cast<Index>(q)) = sum / k;
    }
    return r;
  };
  return {k, mean_topk(xs, zs), mean_topk(zs, xs)};
}

std::vector<Index> csls_translate(const CslsIndex& index, const EmbeddingMatrix& src, const EmbeddingMatrix& tgt,
                                  const std::vector<Index>& queries, Index max_rank) {
  check_index(index, src, tgt);
  if (tgt.size() == 0) throw ArgumentError("empty target vocabulary");
  const Matrix q = unit_copy_rows(src, queries, "source");
  const Matrix keys = unit_copy(tgt, "target");
  return csls_argmax(q, queries, keys, index.r_src, index.r_tgt, effective_limit(max_rank, tgt.size()));
}

std::vector<Index> csls_translate_reverse(const CslsIndex& index, const EmbeddingMatrix& src,
                                          const EmbeddingMatrix& tgt, const std::vector<Index>& queries,
                                          Index max_rank) {
  check_index(index, src, tgt);
  if (src.size() == 0) throw ArgumentError("empty source vocabulary");
  const Matrix q = unit_copy_rows(tgt, queries, "target");
  const Matrix keys = unit_copy(src, "source");
  return csls_argmax(q, queries, keys, index.r_tgt, index.r_src, effective_limit(max_rank, src.size()));
}

std::vector<Index> cosine_translate(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt,
                                    const std::vector<Index>& queries) {
  const Matrix q = unit_copy_rows(src, queries, "source");
  std::vector<Index> out;
  out.reserve(queries.size());
  for (const auto& list : topk_dot(q, unit_copy(tgt, "target"), 1)) out.push_back(list.front().index);
  return out;
}

IndexedDictionary induce_synthetic_dictionary(const CslsIndex& index, const EmbeddingMatrix& src,
                                              const EmbeddingMatrix& tgt, Index max_rank) {
  check_index(index, src, tgt);
  const Index n = effective_limit(max_rank, src.size());
  const Index m = effective_limit(max_rank, tgt.size());
  IndexedDictionary out(src.size(), tgt.size());
  if (n == 0 || m == 0) return out;

  std::vector<Index> src_ids(static_cast<std::size_t>(n));
  std::vector<Index> tgt_ids(static_cast<std::size_t>(m));
  std::iota(src_ids.begin(), src_ids.end(), Index{0});
  std::iota(tgt_ids.begin(), tgt_ids.end(), Index{0});

  const auto forward = csls_translate(index, src, tgt, src_ids, m);
  const auto backward = csls_translate_reverse(index, src, tgt, tgt_ids, n);
  for (Index i = 0; i < n; ++i) {
    const Index j = forward[static_cast<std::size_t>(i)];
    if (backward[static_cast<std::size_t>(j)] == i) out.insert({i, j});
  }
  return out;
}

BliReport evaluate_bli(const CslsIndex& index, const EmbeddingMatrix& src, const EmbeddingMatrix& tgt,
                       const IndexedDictionary& gold, std::size_t oov_words) {
  BliReport report;
  report.oov_words = oov_words;
  const auto sources = gold.source_words();
  if (sources.empty()) return report;

  std::unordered_map<Index, std::vector<Index>> targets;
  for (const auto& p : gold.pairs()) targets[p.source].push_back(p.target);

  const auto predictions = csls_translate(index, src, tgt, sources);
  report.per_word.reserve(sources.size());
  for (std::size_t q = 0; q < sources.size(); ++q) {
    const Index i = sources[q];
    const auto& gold_targets = targets[i];
    BliEntry entry;
    entry.source = src.vocab().word(i);
    entry.prediction = tgt.vocab().word(predictions[q]);
    entry.correct = std::find(gold_targets.begin(), gold_targets.end(), predictions[q]) != gold_targets.end();
    entry.frequency_rank = i + 1;
    for (Index j : gold_targets) entry.gold.push_back(tgt.vocab().word(j));
    if (entry.correct) ++report.correct_words;
    report.per_word.push_back(std::move(entry));
  }
  report.evaluated_words = sources.size();
  report.p_at_1 = static_cast<double>(report.correct_words) / static_cast<double>(report.evaluated_words);
  return report;
}

std::string format_bli_report(const BliReport& report) {
  std::string out = "source\tprediction\tgold\tcorrect\tfrequency_rank\n";
  for (const auto& e : report.per_word) {
    out += e.source;
    out += '\t';
    out += e.prediction;
    out += '\t';
    for (std::size_t g = 0; g < e.gold.size(); ++g) {
      if (g) out += ',';
      out += e.gold[g];
    }
    out += e.correct ? "\t1\t" : "\t0\t";
    out += std::to_string(e.frequency_rank);
    out += '\n';
  }
  char summary[160];
  std::snprintf(summary, sizeof summary, "# p_at_1=%.6f correct=%zu evaluated=%zu oov=%zu\n", report.p_at_1,
                report.correct_words, report.evaluated_words, report.oov_words);
  out += summary;
  return out;
}

void save_bli_report(const BliReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << format_bli_report(report);
  out.flush();
  if (!out) throw DataError("I/O error writing " + path.string());
}

}  // namespace clwe
