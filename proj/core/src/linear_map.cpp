#include "clwe/projection.hpp"

#include "detail/rows.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

namespace clwe {

LinearMap LinearMap::identity(Index d) { return {Matrix::Identity(d, d), Vector(), true}; }

double LinearMap::orthogonality_error() const {
  const Matrix gram = matrix.transpose() * matrix;
  return (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

namespace {

void append_row(std::string& out, const double* values, Index count) {
  char buf[32];
  for (Index k = 0; k < count; ++k) {
    if (k) out.push_back(' ');
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, values[k]);
    out.append(buf, ptr);
  }
  out.push_back('\n');
}

std::vector<std::string> tokens_of(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    pos = line.find_first_not_of(" \t\r", pos);
    if (pos == std::string::npos) break;
    auto end = line.find_first_of(" \t\r", pos);
    if (end == std::string::npos) end = line.size();
    out.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

double parse_value(const std::string& token, const std::filesystem::path& path, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(v)) {
    throw DataError(path.string() + ":" + std::to_string(line_no) + ": bad value '" + token + "'");
  }
  return v;
}

}  // namespace

void save_linear_map(const LinearMap& map, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  std::string buf = std::to_string(map.matrix.rows()) + " " + std::to_string(map.matrix.cols()) + "\n";
  for (Index r = 0; r < map.matrix.rows(); ++r) append_row(buf, map.matrix.row(r).data(), map.matrix.cols());
  if (map.center.size() > 0) {
    buf += "center ";
    append_row(buf, map.center.data(), map.center.size());
  }
  out << buf;
  out.flush();
  if (!out) throw DataError("I/O error writing " + path.string());
}

LinearMap load_linear_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open map file " + path.string());
  std::string line;
  std::size_t line_no = 0;
  auto next_tokens = [&]() -> std::vector<std::string> {
    while (std::getline(in, line)) {
      ++line_no;
      auto t = tokens_of(line);
      if (!t.empty()) return t;
    }
    return {};
  };

  auto header = next_tokens();
  Index rows = 0, cols = 0;
  if (header.size() != 2 || std::from_chars(header[0].data(), header[0].data() + header[0].size(), rows).ec !=
                                std::errc() ||
      std::from_chars(header[1].data(), header[1].data() + header[1].size(), cols).ec != std::errc() || rows <= 0 ||
      cols <= 0) {
    throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed map header");
  }
  LinearMap map;
  map.matrix.resize(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    auto t = next_tokens();
    if (static_cast<Index>(t.size()) != cols) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                      " values");
    }
    for (Index c = 0; c < cols; ++c) map.matrix(r, c) = parse_value(t[static_cast<std::size_t>(c)], path, line_no);
  }
  auto tail = next_tokens();
  if (!tail.empty()) {
    if (tail[0] != "center" || static_cast<Index>(tail.size()) != cols + 1) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": unexpected trailing content");
    }
    map.center.resize(cols);
    for (Index c = 0; c < cols; ++c) map.center(c) = parse_value(tail[static_cast<std::size_t>(c) + 1], path, line_no);
  }
  map.orthogonal = rows == cols && map.center.size() == 0 && map.orthogonality_error() <= 1e-8;
  return map;
}

EmbeddingMatrix apply_projection(const LinearMap& map, const EmbeddingMatrix& emb) {
  if (map.input_dim() != emb.dim()) {
    throw ArgumentError("map expects dimension " + std::to_string(map.input_dim()) + " but embeddings have " +
                        std::to_string(emb.dim()));
  }
  if (map.center.size() == 0) return emb.with_vectors(emb.vectors() * map.matrix.transpose());
  Matrix centered = emb.vectors().rowwise() - map.center.transpose();
  return emb.with_vectors(centered * map.matrix.transpose());
}

double alignment_residual(const LinearMap& map, const EmbeddingMatrix& src, const EmbeddingMatrix& tgt,
                          const IndexedDictionary& dict) {
  detail::check_dictionary_fits(dict, src.size(), tgt.size());
  auto rows = detail::gather_pairs(src.vectors(), tgt.vectors(), dict);
  Matrix projected = rows.src;
  if (map.center.size() > 0) projected.rowwise() -= map.center.transpose();
  projected = projected * map.matrix.transpose();
  return (projected - rows.tgt).squaredNorm();
}

}  // namespace clwe
