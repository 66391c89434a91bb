#include "clwe/embeddings.hpp"

#include "clwe/unicode.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace clwe {

Vocabulary::Vocabulary(std::vector<std::string> words) {
  words_.reserve(words.size());
  index_.reserve(words.size());
  for (auto& w : words) add(std::move(w));
}

Index Vocabulary::add(std::string word) {
  const auto id = static_cast<Index>(words_.size());
  auto [it, inserted] = index_.emplace(word, id);
  if (!inserted) throw ArgumentError("duplicate vocabulary word '" + word + "'");
  words_.push_back(std::move(word));
  return id;
}

std::optional<Index> Vocabulary::find(std::string_view word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

EmbeddingMatrix::EmbeddingMatrix(Vocabulary vocab, Matrix vectors)
    : vocab_(std::move(vocab)), vectors_(std::move(vectors)) {
  if (vectors_.rows() != vocab_.size()) {
    throw DataError("embedding matrix has " + std::to_string(vectors_.rows()) + " rows but vocabulary has " +
                    std::to_string(vocab_.size()) + " words");
  }
  if (vectors_.cols() <= 0) throw DataError("embedding dimension must be positive");
  if (!vectors_.allFinite()) throw DataError("embedding matrix contains non-finite values");
}

EmbeddingMatrix EmbeddingMatrix::with_vectors(Matrix vectors) const { return {vocab_, std::move(vectors)}; }

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  auto is_ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f'; };
  while (pos < line.size()) {
    while (pos < line.size() && is_ws(line[pos])) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && !is_ws(line[end])) ++end;
    tokens.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return tokens;
}

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line, const std::string& what) {
  throw DataError(path.string() + ":" + std::to_string(line) + ": " + what);
}

template <typename T>
bool parse_number(std::string_view token, T& out) {
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

}  // namespace

EmbeddingMatrix load_embeddings(const std::filesystem::path& path, const LoadOptions& options) {
  if (options.max_vocab && *options.max_vocab < 1) throw ArgumentError("max_vocab must be >= 1");

  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding file " + path.string());

  std::string line;
  std::size_t line_no = 0;
  Index declared_rows = 0;
  Index dim = 0;

  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 2 || !parse_number(tokens[0], declared_rows) || !parse_number(tokens[1], dim) ||
        declared_rows < 0 || dim <= 0) {
      fail(path, line_no, "malformed header, expected \"<n> <d>\"");
    }
    break;
  }
  if (dim == 0) fail(path, line_no, "missing header");

  const Index limit = options.max_vocab ? std::min(*options.max_vocab, declared_rows) : declared_rows;
  Vocabulary vocab;
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(limit * dim));
  Index rows_seen = 0;

  while (vocab.size() < limit && std::getline(in, line)) {
    ++line_no;
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    ++rows_seen;
    if (rows_seen > declared_rows) fail(path, line_no, "more rows than the header declares");
    if (static_cast<Index>(tokens.size()) != dim + 1) {
      fail(path, line_no,
           "expected " + std::to_string(dim) + " values, found " + std::to_string(tokens.size() - 1));
    }
    const std::size_t start = values.size();
    for (Index k = 1; k <= dim; ++k) {
      double v = 0.0;
      if (!parse_number(tokens[static_cast<std::size_t>(k)], v)) {
        fail(path, line_no, "unparseable value '" + std::string(tokens[static_cast<std::size_t>(k)]) + "'");
      }
      if (!std::isfinite(v)) fail(path, line_no, "non-finite value");
      values.push_back(v);
    }
    std::string word = options.lowercase ? utf8_lowercase(tokens[0]) : std::string(tokens[0]);
    if (vocab.contains(word)) {
      values.resize(start);  // later (less frequent) duplicate
      continue;
    }
    vocab.add(std::move(word));
  }
  if (!options.max_vocab) {
    while (std::getline(in, line)) {
      ++line_no;
      if (!split_ws(line).empty()) fail(path, line_no, "more rows than the header declares");
    }
  }
  if (in.bad()) throw DataError("I/O error reading " + path.string());

  // Only a file that ran out before the declared count is short; truncation
  // by max_vocab or dedup is expected.
  if (vocab.size() < limit && rows_seen < declared_rows) {
    fail(path, line_no, "file ends after " + std::to_string(rows_seen) + " of " + std::to_string(declared_rows) +
                            " declared rows");
  }

  Matrix m(vocab.size(), dim);
  std::copy(values.begin(), values.end(), m.data());
  return {std::move(vocab), std::move(m)};
}

namespace {

void append_double(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

}  // namespace

void save_embeddings(const EmbeddingMatrix& emb, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");

  std::string buf;
  buf += std::to_string(emb.size()) + " " + std::to_string(emb.dim()) + "\n";
  for (Index i = 0; i < emb.size(); ++i) {
    buf += emb.vocab().word(i);
    for (Index k = 0; k < emb.dim(); ++k) {
      buf.push_back(' ');
      append_double(buf, emb.vectors()(i, k));
    }
    buf.push_back('\n');
    if (buf.size() > (1u << 20)) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  out.flush();
  if (!out) throw DataError("I/O error writing " + path.string());
}

namespace {

void scale_rows_to_unit(Matrix& m, const Vocabulary* vocab, std::string_view what) {
  for (Index i = 0; i < m.rows(); ++i) {
    const double norm = m.row(i).norm();
    if (norm == 0.0) {
      std::ostringstream msg;
      msg << "zero-norm row " << i;
      if (vocab) msg << " (word '" << vocab->word(i) << "')";
      msg << " in " << what;
      throw DataError(msg.str());
    }
    m.row(i) /= norm;
  }
}

}  // namespace

IterativeNormalization iterative_normalize_traced(const EmbeddingMatrix& emb, int rounds) {
  if (rounds < 1) throw ArgumentError("iterative normalization needs at least one round");
  Matrix m = emb.vectors();
  std::vector<NormalizationRound> trace;
  trace.reserve(static_cast<std::size_t>(rounds));
  for (int r = 0; r < rounds; ++r) {
    NormalizationRound stats;
    if (m.rows() > 0) stats.max_norm_deviation = (m.rowwise().norm().array() - 1.0).abs().maxCoeff();
    scale_rows_to_unit(m, &emb.vocab(), "iterative normalization round " + std::to_string(r + 1));
    if (m.rows() > 0) {
      const Eigen::RowVectorXd mean = m.colwise().mean();
      stats.mean_norm = mean.norm();
      m.rowwise() -= mean;
    }
    trace.push_back(stats);
  }
  return {emb.with_vectors(std::move(m)), std::move(trace)};
}

EmbeddingMatrix iterative_normalize(const EmbeddingMatrix& emb, int rounds) {
  return iterative_normalize_traced(emb, rounds).result;
}

EmbeddingMatrix unit_normalize(const EmbeddingMatrix& emb) {
  Matrix m = emb.vectors();
  scale_rows_to_unit(m, &emb.vocab(), "unit normalization");
  return emb.with_vectors(std::move(m));
}

Matrix unit_rows(const Matrix& m, std::string_view what) {
  Matrix out = m;
  scale_rows_to_unit(out, nullptr, what);
  return out;
}

}  // namespace clwe
