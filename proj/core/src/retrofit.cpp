#include "clwe/retrofit.hpp"

#include "clwe/log.hpp"

#include <charconv>
#include <fstream>
#include <unordered_map>

namespace clwe {

namespace {

struct Edge {
  Index other;
  double weight;
};

void check_shapes(const Matrix& src_hat, const Matrix& tgt_hat, const Matrix& src_orig, const Matrix& tgt_orig,
                  const IndexedDictionary& dict) {
  if (src_hat.rows() != src_orig.rows() || src_hat.cols() != src_orig.cols() || tgt_hat.rows() != tgt_orig.rows() ||
      tgt_hat.cols() != tgt_orig.cols()) {
    throw ArgumentError("retrofit objective: updated and original embeddings differ in shape");
  }
  if (src_hat.cols() != tgt_hat.cols()) throw ArgumentError("retrofit: source and target dimensions differ");
  if (dict.source_vocab_size() != src_hat.rows() || dict.target_vocab_size() != tgt_hat.rows()) {
    throw ArgumentError("retrofit: dictionary indexed against different vocabulary sizes");
  }
}

}  // namespace

std::vector<double> retrofit_pair_weights(const IndexedDictionary& dict, BetaScheme scheme,
                                          const std::vector<double>& pair_scale) {
  if (!pair_scale.empty() && pair_scale.size() != dict.size()) {
    throw ArgumentError("pair_scale must have one entry per dictionary pair");
  }
  std::vector<double> weights(dict.size(), 1.0);
  if (scheme == BetaScheme::inverse_degree) {
    std::unordered_map<Index, int> src_degree, tgt_degree;
    for (const auto& p : dict.pairs()) {
      ++src_degree[p.source];
      ++tgt_degree[p.target];
    }
    for (std::size_t k = 0; k < dict.size(); ++k) {
      const auto& p = dict.pairs()[k];
      weights[k] = 0.5 * (1.0 / src_degree[p.source] + 1.0 / tgt_degree[p.target]);
    }
  }
  for (std::size_t k = 0; k < pair_scale.size(); ++k) {
    if (!(pair_scale[k] > 0.0)) throw ArgumentError("pair_scale entries must be positive");
    weights[k] *= pair_scale[k];
  }
  return weights;
}

RetrofitObjective retrofit_objective(const Matrix& src_hat, const Matrix& tgt_hat, const Matrix& src_orig,
                                     const Matrix& tgt_orig, const IndexedDictionary& dict,
                                     const RetrofitConfig& cfg, const std::vector<double>& pair_scale) {
  check_shapes(src_hat, tgt_hat, src_orig, tgt_orig, dict);
  const auto weights = retrofit_pair_weights(dict, cfg.beta, pair_scale);
  RetrofitObjective obj;
  obj.anchor = cfg.alpha * (src_hat - src_orig).squaredNorm() + cfg.alpha * (tgt_hat - tgt_orig).squaredNorm();
  for (std::size_t k = 0; k < dict.size(); ++k) {
    const auto& p = dict.pairs()[k];
    obj.pairs += weights[k] * (src_hat.row(p.source) - tgt_hat.row(p.target)).squaredNorm();
  }
  obj.total = obj.anchor + obj.pairs;
  return obj;
}

RetrofitResult retrofit(const AlignedEmbeddings& aligned, const IndexedDictionary& dict, const RetrofitConfig& cfg,
                        const std::vector<double>& pair_scale) {
  if (!(cfg.alpha >= 0.0)) throw ArgumentError("retrofit alpha must be non-negative");
  if (cfg.iterations < 1) throw ArgumentError("retrofit needs at least one iteration");
  const Matrix& src_orig = aligned.src.vectors();
  const Matrix& tgt_orig = aligned.tgt.vectors();
  check_shapes(src_orig, tgt_orig, src_orig, tgt_orig, dict);

  RetrofitResult result{aligned.src, aligned.tgt, {}, 0};
  if (dict.empty()) {
    log::warn("retrofit: empty dictionary, embeddings returned unchanged");
    result.objective_trace.push_back(retrofit_objective(src_orig, tgt_orig, src_orig, tgt_orig, dict, cfg));
    return result;
  }

  double tol = 0.0;
  if (cfg.convergence_tol) {
    tol = *cfg.convergence_tol;
  } else {
    const double rows = static_cast<double>(src_orig.rows() + tgt_orig.rows());
    tol = 1e-5 * (src_orig.rowwise().norm().sum() + tgt_orig.rowwise().norm().sum()) / rows;
  }

  const auto weights = retrofit_pair_weights(dict, cfg.beta, pair_scale);
  std::vector<std::vector<Edge>> src_edges(static_cast<std::size_t>(src_orig.rows()));
  std::vector<std::vector<Edge>> tgt_edges(static_cast<std::size_t>(tgt_orig.rows()));
  for (std::size_t k = 0; k < dict.size(); ++k) {
    const auto& p = dict.pairs()[k];
    src_edges[static_cast<std::size_t>(p.source)].push_back({p.target, weights[k]});
    tgt_edges[static_cast<std::size_t>(p.target)].push_back({p.source, weights[k]});
  }

  Matrix src_hat = src_orig;
  Matrix tgt_hat = tgt_orig;
  result.objective_trace.push_back(retrofit_objective(src_hat, tgt_hat, src_orig, tgt_orig, dict, cfg, pair_scale));

  // x̂_i = (α x'_i + Σ β ŷ) / (α + Σ β), returning how far the row moved.
  const auto update_side = [&](Matrix& hat, const Matrix& orig, const Matrix& partners,
                               const std::vector<std::vector<Edge>>& edges) {
    double moved = 0.0;
    Eigen::RowVectorXd acc(hat.cols());
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (edges[i].empty()) continue;
      const auto row = static_cast<Index>(i);
      acc = cfg.alpha * orig.row(row);
      double denom = cfg.alpha;
      for (const auto& e : edges[i]) {
        acc += e.weight * partners.row(e.other);
        denom += e.weight;
      }
      acc /= denom;
      moved = std::max(moved, (acc - hat.row(row)).norm());
      hat.row(row) = acc;
    }
    return moved;
  };

  for (int sweep = 1; sweep <= cfg.iterations; ++sweep) {
    const double moved_src = update_side(src_hat, src_orig, tgt_hat, src_edges);
    const double moved_tgt = update_side(tgt_hat, tgt_orig, src_hat, tgt_edges);
    result.sweeps_run = sweep;
    result.objective_trace.push_back(
        retrofit_objective(src_hat, tgt_hat, src_orig, tgt_orig, dict, cfg, pair_scale));
    if (std::max(moved_src, moved_tgt) < tol) break;
  }

  result.src = aligned.src.with_vectors(std::move(src_hat));
  result.tgt = aligned.tgt.with_vectors(std::move(tgt_hat));
  return result;
}

void save_objective_trace(const std::vector<RetrofitObjective>& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  std::string buf = "sweep\tL\tL_a\tL_b\n";
  char num[32];
  auto put = [&](double v) {
    auto [ptr, ec] = std::to_chars(num, num + sizeof num, v);
    buf.append(num, ptr);
  };
  for (std::size_t s = 0; s < trace.size(); ++s) {
    buf += std::to_string(s);
    buf += '\t';
    put(trace[s].total);
    buf += '\t';
    put(trace[s].anchor);
    buf += '\t';
    put(trace[s].pairs);
    buf += '\n';
  }
  out << buf;
  out.flush();
  if (!out) throw DataError("I/O error writing " + path.string());
}

}  // namespace clwe
