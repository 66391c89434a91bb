#include "clwe/neighbors.hpp"
#include "clwe/projection.hpp"

#include "detail/rows.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace clwe {

namespace {

void check_rcsls(const LinearMap& map, const EmbeddingMatrix& src, const EmbeddingMatrix& tgt,
                 const IndexedDictionary& dict) {
  if (dict.empty()) throw ArgumentError("RCSLS needs a non-empty dictionary");
  detail::check_dictionary_fits(dict, src.size(), tgt.size());
  if (map.center.size() != 0) throw ArgumentError("RCSLS works on linear maps without a center");
  if (map.input_dim() != src.dim() || map.output_dim() != tgt.dim()) {
    throw ArgumentError("RCSLS map shape does not match the embedding dimensions");
  }
}

Index search_limit(Index cap, Index size) { return cap > 0 ? std::min(cap, size) : size; }

RcslsNeighborhoods neighborhoods_on_units(const LinearMap& map, const Matrix& xs, const Matrix& zs,
                                          const IndexedDictionary& dict, const RcslsConfig& cfg) {
  const Index src_limit = search_limit(cfg.max_neighbor_vocab, xs.rows());
  const Index tgt_limit = search_limit(cfg.max_neighbor_vocab, zs.rows());
  if (cfg.k_neighbors < 1 || cfg.k_neighbors >= std::min(src_limit, tgt_limit)) {
    throw ArgumentError("RCSLS k = " + std::to_string(cfg.k_neighbors) +
                        " must be positive and below the searched vocabulary sizes (" + std::to_string(src_limit) +
                        ", " + std::to_string(tgt_limit) + ")");
  }
  auto rows = detail::gather_pairs(xs, zs, dict);
  const Matrix projected_pairs = rows.src * map.matrix.transpose();
  const Matrix projected_src = xs.topRows(src_limit) * map.matrix.transpose();

  const auto to_ids = [](const NeighborLists& lists) {
    std::vector<std::vector<Index>> ids(lists.size());
    for (std::size_t p = 0; p < lists.size(); ++p) {
      for (const auto& nb : lists[p]) ids[p].push_back(nb.index);
    }
    return ids;
  };
  return {to_ids(topk_dot(projected_pairs, zs, cfg.k_neighbors, tgt_limit)),
          to_ids(topk_dot(rows.tgt, projected_src, cfg.k_neighbors))};
}

RcslsEvaluation evaluate_on_units(const LinearMap& map, const Matrix& xs, const Matrix& zs,
                                  const IndexedDictionary& dict, const RcslsNeighborhoods& nbhd,
                                  const std::vector<std::size_t>& batch) {
  std::vector<std::size_t> positions = batch;
  if (positions.empty()) {
    positions.resize(dict.size());
    std::iota(positions.begin(), positions.end(), std::size_t{0});
  }
  if (nbhd.target_neighbors.size() != dict.size() || nbhd.source_neighbors.size() != dict.size()) {
    throw ArgumentError("neighbourhoods do not match the dictionary");
  }

  const auto count = static_cast<Index>(positions.size());
  const Index d_src = xs.cols();
  const Index d_tgt = zs.cols();
  // Per pair p: loss_p = aᵀ W x_i + z_jᵀ W e with a = mean_{N(Wx_i)} z - 2 z_j
  // and e = mean_{N(z_j)} x; gradient a x_iᵀ + z_j eᵀ.
  Eigen::MatrixXd a(count, d_tgt), x(count, d_src), z(count, d_tgt), e(count, d_src);
  for (Index r = 0; r < count; ++r) {
    const auto p = positions[static_cast<std::size_t>(r)];
    const auto& pair = dict.pairs().at(p);
    const auto& tn = nbhd.target_neighbors[p];
    const auto& sn = nbhd.source_neighbors[p];
    Eigen::RowVectorXd mean_t = Eigen::RowVectorXd::Zero(d_tgt);
    for (Index t : tn) mean_t += zs.row(t);
    Eigen::RowVectorXd mean_s = Eigen::RowVectorXd::Zero(d_src);
    for (Index s : sn) mean_s += xs.row(s);
    a.row(r) = mean_t / static_cast<double>(tn.size()) - 2.0 * zs.row(pair.target);
    e.row(r) = mean_s / static_cast<double>(sn.size());
    x.row(r) = xs.row(pair.source);
    z.row(r) = zs.row(pair.target);
  }

  const Eigen::MatrixXd w = map.matrix;
  const double loss = (a.cwiseProduct(x * w.transpose())).sum() + (z.cwiseProduct(e * w.transpose())).sum();
  Eigen::MatrixXd grad = a.transpose() * x + z.transpose() * e;
  return {loss / static_cast<double>(count), grad / static_cast<double>(count)};
}

}  // namespace

RcslsNeighborhoods rcsls_neighborhoods(const LinearMap& map, const EmbeddingMatrix& src, const EmbeddingMatrix& tgt,
                                       const IndexedDictionary& dict, const RcslsConfig& cfg) {
  check_rcsls(map, src, tgt, dict);
  return neighborhoods_on_units(map, unit_rows(src.vectors(), "source embeddings"),
                                unit_rows(tgt.vectors(), "target embeddings"), dict, cfg);
}

RcslsEvaluation rcsls_loss_and_grad_frozen(const LinearMap& map, const EmbeddingMatrix& src,
                                           const EmbeddingMatrix& tgt, const IndexedDictionary& dict,
                                           const RcslsNeighborhoods& neighborhoods,
                                           const std::vector<std::size_t>& batch) {
  check_rcsls(map, src, tgt, dict);
  return evaluate_on_units(map, unit_rows(src.vectors(), "source embeddings"),
                           unit_rows(tgt.vectors(), "target embeddings"), dict, neighborhoods, batch);
}

RcslsEvaluation rcsls_loss_and_grad(const LinearMap& map, const EmbeddingMatrix& src, const EmbeddingMatrix& tgt,
                                    const IndexedDictionary& dict, const RcslsConfig& cfg) {
  check_rcsls(map, src, tgt, dict);
  const Matrix xs = unit_rows(src.vectors(), "source embeddings");
  const Matrix zs = unit_rows(tgt.vectors(), "target embeddings");
  return evaluate_on_units(map, xs, zs, dict, neighborhoods_on_units(map, xs, zs, dict, cfg), {});
}

RcslsFit fit_rcsls(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt, const IndexedDictionary& dict,
                   const RcslsConfig& cfg, const LinearMap& init) {
  check_rcsls(init, src, tgt, dict);
  if (cfg.epochs < 0) throw ArgumentError("RCSLS epochs must be non-negative");
  if (!(cfg.learning_rate > 0.0)) throw ArgumentError("RCSLS learning rate must be positive");

  RcslsFit fit{init, {}, cfg.learning_rate};
  fit.map.orthogonal = false;
  if (cfg.epochs == 0) {
    fit.map = init;
    return fit;
  }

  const Matrix xs = unit_rows(src.vectors(), "source embeddings");
  const Matrix zs = unit_rows(tgt.vectors(), "target embeddings");
  const bool minibatch = cfg.batch_size > 0 && cfg.batch_size < dict.size();
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(dict.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  auto nbhd = neighborhoods_on_units(fit.map, xs, zs, dict, cfg);
  auto current = evaluate_on_units(fit.map, xs, zs, dict, nbhd, {});
  fit.loss_trace.push_back(current.loss);

  double lr = cfg.learning_rate;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Matrix step = current.gradient;
    if (minibatch) {
      std::shuffle(order.begin(), order.end(), rng);
      std::vector<std::size_t> batch(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cfg.batch_size));
      step = evaluate_on_units(fit.map, xs, zs, dict, nbhd, batch).gradient;
    }
    LinearMap candidate{fit.map.matrix - lr * step, Vector(), false};
    auto candidate_nbhd = neighborhoods_on_units(candidate, xs, zs, dict, cfg);
    auto candidate_eval = evaluate_on_units(candidate, xs, zs, dict, candidate_nbhd, {});
    if (candidate_eval.loss < current.loss) {
      fit.map = std::move(candidate);
      nbhd = std::move(candidate_nbhd);
      current = std::move(candidate_eval);
    } else {
      lr *= 0.5;
    }
    fit.loss_trace.push_back(current.loss);
  }
  fit.final_learning_rate = lr;
  return fit;
}

}  // namespace clwe
