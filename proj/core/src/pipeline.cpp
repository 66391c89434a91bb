#include "clwe/pipeline.hpp"

#include "clwe/log.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_set>

namespace clwe {

namespace fs = std::filesystem;

std::string_view to_string(Method m) {
  switch (m) {
    case Method::procrustes: return "procrustes";
    case Method::lsq: return "lsq";
    case Method::cca: return "cca";
    case Method::rcsls: return "rcsls";
  }
  return "?";
}

std::string_view to_string(RetrofitMode m) {
  switch (m) {
    case RetrofitMode::none: return "none";
    case RetrofitMode::train: return "train";
    case RetrofitMode::train_synthetic: return "train+synthetic";
  }
  return "?";
}

std::string_view to_string(BetaScheme b) { return b == BetaScheme::uniform ? "uniform" : "inverse-degree"; }

std::optional<Method> parse_method(std::string_view text) {
  for (auto m : {Method::procrustes, Method::lsq, Method::cca, Method::rcsls}) {
    if (to_string(m) == text) return m;
  }
  return std::nullopt;
}

std::optional<RetrofitMode> parse_retrofit_mode(std::string_view text) {
  for (auto m : {RetrofitMode::none, RetrofitMode::train, RetrofitMode::train_synthetic}) {
    if (to_string(m) == text) return m;
  }
  return std::nullopt;
}

std::optional<BetaScheme> parse_beta_scheme(std::string_view text) {
  if (text == "inverse-degree") return BetaScheme::inverse_degree;
  if (text == "uniform") return BetaScheme::uniform;
  return std::nullopt;
}

namespace {

template <typename Fn>
auto stage(const std::string& name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(name, e.what());
  }
}

std::string shape(const EmbeddingMatrix& e) { return std::to_string(e.size()) + "x" + std::to_string(e.dim()); }

// Output files are written under out_dir/.staging and moved into out_dir by
// commit(); an uncommitted staging directory is removed on destruction.
class Staging {
 public:
  explicit Staging(fs::path out_dir) : out_(std::move(out_dir)), dir_(out_ / ".staging") {
    if (out_.empty()) throw PipelineError("setup", "no output directory given");
    std::error_code ec;
    fs::create_directories(out_, ec);
    if (ec) throw PipelineError("setup", "cannot create " + out_.string() + ": " + ec.message());
    fs::remove_all(dir_, ec);
    fs::create_directories(dir_, ec);
    if (ec) throw PipelineError("setup", "cannot create " + dir_.string() + ": " + ec.message());
  }
  Staging(const Staging&) = delete;
  Staging& operator=(const Staging&) = delete;
  ~Staging() {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }

  fs::path file(const fs::path& name) const {
    const auto p = dir_ / name;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    return p;
  }

  void commit() {
    stage("write outputs", [&] {
      for (const auto& entry : fs::recursive_directory_iterator(dir_)) {
        if (!entry.is_regular_file()) continue;
        const auto dest = out_ / fs::relative(entry.path(), dir_);
        fs::create_directories(dest.parent_path());
        fs::rename(entry.path(), dest);
      }
      return 0;
    });
  }

 private:
  fs::path out_;
  fs::path dir_;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.flush();
  if (!out) throw DataError("I/O error writing " + path.string());
}

LoadOptions load_options(const PipelineSpec& spec) { return {spec.max_vocab, spec.lowercase}; }

EmbeddingMatrix load_side(const fs::path& path, const PipelineSpec& spec, const char* side) {
  return stage(std::string("load ") + side + " embeddings", [&] {
    if (path.empty()) throw ArgumentError(std::string("no ") + side + " embedding file given");
    auto emb = load_embeddings(path, load_options(spec));
    log::info(std::string("loaded ") + side + " embeddings " + shape(emb) + " from " + path.string());
    return emb;
  });
}

struct LoadedDictionary {
  WordPairList raw;
  IndexingResult indexed;
  std::size_t oov_sources = 0;
};

LoadedDictionary load_dict(const fs::path& path, const EmbeddingMatrix& src, const EmbeddingMatrix& tgt,
                           const std::string& what) {
  return stage("index " + what + " dictionary", [&] {
    LoadedDictionary d;
    d.raw = parse_dictionary(path);
    d.indexed = index_dictionary(d.raw, src.vocab(), tgt.vocab());
    d.oov_sources = count_oov_sources(d.raw, src.vocab(), tgt.vocab());
    log::info(what + " dictionary: " + std::to_string(d.raw.size()) + " raw pairs, " +
              std::to_string(d.indexed.dictionary.size()) + " indexed, " + std::to_string(d.indexed.dropped) +
              " dropped");
    return d;
  });
}

struct Alignment {
  AlignedEmbeddings aligned;
  LinearMap src_map;
  LinearMap tgt_map;
};

Alignment align(const PipelineSpec& spec, const EmbeddingMatrix& src, const EmbeddingMatrix& tgt,
                const IndexedDictionary& train) {
  return stage(std::string("align (") + std::string(to_string(spec.method)) + ")", [&] {
    Alignment out;
    switch (spec.method) {
      case Method::procrustes:
        out.src_map = fit_procrustes(src, tgt, train);
        out.tgt_map = LinearMap::identity(tgt.dim());
        break;
      case Method::lsq:
        out.src_map = fit_least_squares(src, tgt, train);
        out.tgt_map = LinearMap::identity(tgt.dim());
        break;
      case Method::cca: {
        auto cca = fit_cca(src, tgt, train, spec.cca_dim_ratio);
        out.src_map = std::move(cca.src_map);
        out.tgt_map = std::move(cca.tgt_map);
        break;
      }
      case Method::rcsls: {
        auto cfg = spec.rcsls;
        cfg.seed = spec.seed;
        auto fit = fit_rcsls(src, tgt, train, cfg, fit_procrustes(src, tgt, train));
        out.src_map = std::move(fit.map);
        out.tgt_map = LinearMap::identity(tgt.dim());
        break;
      }
    }
    out.aligned = {apply_projection(out.src_map, src), apply_projection(out.tgt_map, tgt)};
    log::info("aligned spaces: source " + shape(out.aligned.src) + ", target " + shape(out.aligned.tgt));
    return out;
  });
}

struct Retrofitted {
  RetrofitResult result;
  IndexedDictionary synthetic;
};

Retrofitted retrofit_stage(const PipelineSpec& spec, const AlignedEmbeddings& aligned,
                           const IndexedDictionary& train) {
  Retrofitted out;
  IndexedDictionary combined = train;
  std::vector<double> scale;
  if (spec.retrofit_mode == RetrofitMode::train_synthetic) {
    out.synthetic = stage("induce synthetic dictionary", [&] {
      const auto index = build_csls_index(aligned.src, aligned.tgt, spec.csls_k);
      auto induced = induce_synthetic_dictionary(index, aligned.src, aligned.tgt, spec.induce_max_rank);
      if (spec.synthetic_excludes_train) {
        std::unordered_set<Index> train_sources;
        for (const auto& p : train.pairs()) train_sources.insert(p.source);
        IndexedDictionary kept(induced.source_vocab_size(), induced.target_vocab_size());
        for (const auto& p : induced.pairs()) {
          if (!train_sources.count(p.source)) kept.insert(p);
        }
        induced = std::move(kept);
      }
      log::info("synthetic dictionary: " + std::to_string(induced.size()) + " pairs");
      return induced;
    });
    combined = merge_dictionaries(train, out.synthetic);
    if (spec.synthetic_weight != 1.0) {
      scale.assign(combined.size(), 1.0);
      for (std::size_t k = train.size(); k < combined.size(); ++k) scale[k] = spec.synthetic_weight;
    }
  }
  out.result = stage("retrofit", [&] {
    auto r = retrofit(aligned, combined, spec.retrofit, scale);
    log::info("retrofit: " + std::to_string(r.sweeps_run) + " sweeps over " + std::to_string(combined.size()) +
              " pairs");
    return r;
  });
  return out;
}

BliReport evaluate_stage(const std::string& what, const EmbeddingMatrix& src, const EmbeddingMatrix& tgt,
                         const LoadedDictionary& dict, int k) {
  return stage("evaluate " + what, [&] {
    const auto index = build_csls_index(src, tgt, k);
    auto report = evaluate_bli(index, src, tgt, dict.indexed.dictionary, dict.oov_sources);
    log::info(what + " P@1 = " + std::to_string(report.p_at_1) + " over " + std::to_string(report.evaluated_words) +
              " words");
    return report;
  });
}

void save_aligned(const Staging& out, const Alignment& a) {
  stage("write aligned embeddings", [&] {
    save_embeddings(a.aligned.src, out.file("src.aligned.vec"));
    save_embeddings(a.aligned.tgt, out.file("tgt.aligned.vec"));
    save_linear_map(a.src_map, out.file("src_map.txt"));
    save_linear_map(a.tgt_map, out.file("tgt_map.txt"));
    return 0;
  });
}

void save_retrofit(const Staging& out, const Retrofitted& r, const AlignedEmbeddings& aligned, RetrofitMode mode) {
  stage("write retrofitted embeddings", [&] {
    save_embeddings(r.result.src, out.file("src.retrofit.vec"));
    save_embeddings(r.result.tgt, out.file("tgt.retrofit.vec"));
    save_objective_trace(r.result.objective_trace, out.file("retrofit_trace.tsv"));
    if (mode == RetrofitMode::train_synthetic) {
      save_dictionary(to_word_pairs(r.synthetic, aligned.src.vocab(), aligned.tgt.vocab()),
                      out.file("synthetic.dict.tsv"));
    }
    return 0;
  });
}

}  // namespace

std::string summary_header() {
  return "method\tmode\tseed\tsrc_vocab\ttgt_vocab\tdim\ttrain_pairs\ttrain_dropped\ttest_pairs\ttest_dropped\t"
         "synthetic_pairs\ttrain_p_at_1\ttest_p_at_1\ttrain_evaluated\ttest_evaluated\n";
}

std::string summary_row(const RunReport& r, std::uint64_t seed) {
  std::ostringstream row;
  char p_train[32], p_test[32];
  std::snprintf(p_train, sizeof p_train, "%.6f", r.train.p_at_1);
  std::snprintf(p_test, sizeof p_test, "%.6f", r.test.p_at_1);
  row << to_string(r.method) << '\t' << to_string(r.mode) << '\t' << seed << '\t' << r.src_vocab << '\t'
      << r.tgt_vocab << '\t' << r.dim << '\t' << r.train_pairs << '\t' << r.train_dropped << '\t' << r.test_pairs
      << '\t' << r.test_dropped << '\t' << r.synthetic_pairs << '\t' << p_train << '\t' << p_test << '\t'
      << r.train.evaluated_words << '\t' << r.test.evaluated_words << '\n';
  return row.str();
}

RunReport run_pipeline(const PipelineSpec& spec) {
  Staging out(spec.out_dir);
  RunReport report;
  report.method = spec.method;
  report.mode = spec.retrofit_mode;

  auto src = load_side(spec.src_emb, spec, "source");
  auto tgt = load_side(spec.tgt_emb, spec, "target");
  stage("normalize", [&] {
    src = iterative_normalize(src, spec.norm_rounds);
    tgt = iterative_normalize(tgt, spec.norm_rounds);
    return 0;
  });

  const auto train = load_dict(spec.train_dict, src, tgt, "train");
  const auto test = load_dict(spec.test_dict, src, tgt, "test");
  report.src_vocab = src.size();
  report.tgt_vocab = tgt.size();
  report.train_pairs = train.indexed.dictionary.size();
  report.train_dropped = train.indexed.dropped;
  report.test_pairs = test.indexed.dictionary.size();
  report.test_dropped = test.indexed.dropped;

  const auto alignment = align(spec, src, tgt, train.indexed.dictionary);
  report.dim = alignment.aligned.src.dim();
  save_aligned(out, alignment);
  stage("write dictionaries", [&] {
    save_dictionary(to_word_pairs(train.indexed.dictionary, src.vocab(), tgt.vocab()), out.file("train.dict.tsv"));
    save_dictionary(to_word_pairs(test.indexed.dictionary, src.vocab(), tgt.vocab()), out.file("test.dict.tsv"));
    return 0;
  });

  const AlignedEmbeddings* final_space = &alignment.aligned;
  std::optional<Retrofitted> retrofitted;
  if (spec.retrofit_mode != RetrofitMode::none) {
    report.train_before_retrofit =
        evaluate_stage("train (before retrofit)", alignment.aligned.src, alignment.aligned.tgt, train, spec.csls_k);
    report.test_before_retrofit =
        evaluate_stage("test (before retrofit)", alignment.aligned.src, alignment.aligned.tgt, test, spec.csls_k);
    stage("write reports", [&] {
      save_bli_report(*report.train_before_retrofit, out.file("pre_retrofit/bli_train.tsv"));
      save_bli_report(*report.test_before_retrofit, out.file("pre_retrofit/bli_test.tsv"));
      return 0;
    });

    retrofitted = retrofit_stage(spec, alignment.aligned, train.indexed.dictionary);
    report.synthetic_pairs = retrofitted->synthetic.size();
    report.retrofit_sweeps = retrofitted->result.sweeps_run;
    save_retrofit(out, *retrofitted, alignment.aligned, spec.retrofit_mode);
  }

  const auto& final_src = retrofitted ? retrofitted->result.src : final_space->src;
  const auto& final_tgt = retrofitted ? retrofitted->result.tgt : final_space->tgt;
  report.train = evaluate_stage("train", final_src, final_tgt, train, spec.csls_k);
  report.test = evaluate_stage("test", final_src, final_tgt, test, spec.csls_k);

  stage("write reports", [&] {
    save_bli_report(report.train, out.file("bli_train.tsv"));
    save_bli_report(report.test, out.file("bli_test.tsv"));
    write_text(out.file("summary.tsv"), summary_header() + summary_row(report, spec.seed));
    return 0;
  });
  out.commit();
  return report;
}

void cmd_normalize(const PipelineSpec& spec) {
  Staging out(spec.out_dir);
  auto normalize_one = [&](const fs::path& path, const char* side, const char* name) {
    auto emb = load_side(path, spec, side);
    auto normalized = stage("normalize", [&] { return iterative_normalize(emb, spec.norm_rounds); });
    stage("write normalized embeddings", [&] {
      save_embeddings(normalized, out.file(name));
      return 0;
    });
  };
  normalize_one(spec.src_emb, "source", "src.norm.vec");
  if (!spec.tgt_emb.empty()) normalize_one(spec.tgt_emb, "target", "tgt.norm.vec");
  out.commit();
}

void cmd_align(const PipelineSpec& spec) {
  Staging out(spec.out_dir);
  const auto src = load_side(spec.src_emb, spec, "source");
  const auto tgt = load_side(spec.tgt_emb, spec, "target");
  const auto train = load_dict(spec.train_dict, src, tgt, "train");
  save_aligned(out, align(spec, src, tgt, train.indexed.dictionary));
  out.commit();
}

RetrofitResult cmd_retrofit(const PipelineSpec& spec) {
  if (spec.retrofit_mode == RetrofitMode::none) throw PipelineError("retrofit", "retrofit mode 'none' does nothing");
  Staging out(spec.out_dir);
  AlignedEmbeddings aligned{load_side(spec.src_emb, spec, "source"), load_side(spec.tgt_emb, spec, "target")};
  const auto train = load_dict(spec.train_dict, aligned.src, aligned.tgt, "train");
  auto r = retrofit_stage(spec, aligned, train.indexed.dictionary);
  save_retrofit(out, r, aligned, spec.retrofit_mode);
  out.commit();
  return std::move(r.result);
}

InduceReport cmd_induce(const PipelineSpec& spec) {
  Staging out(spec.out_dir);
  const auto src = load_side(spec.src_emb, spec, "source");
  const auto tgt = load_side(spec.tgt_emb, spec, "target");
  const auto induced = stage("induce synthetic dictionary", [&] {
    const auto index = build_csls_index(src, tgt, spec.csls_k);
    return induce_synthetic_dictionary(index, src, tgt, spec.induce_max_rank);
  });
  InduceReport report{induced.size(), spec.out_dir / "synthetic.dict.tsv"};
  stage("write synthetic dictionary", [&] {
    save_dictionary(to_word_pairs(induced, src.vocab(), tgt.vocab()), out.file("synthetic.dict.tsv"));
    write_text(out.file("induce_summary.tsv"), "pairs\tsrc_vocab\ttgt_vocab\tcsls_k\n" +
                                                   std::to_string(induced.size()) + '\t' +
                                                   std::to_string(src.size()) + '\t' + std::to_string(tgt.size()) +
                                                   '\t' + std::to_string(spec.csls_k) + '\n');
    return 0;
  });
  out.commit();
  return report;
}

RunReport cmd_evaluate(const PipelineSpec& spec) {
  if (spec.train_dict.empty() && spec.test_dict.empty()) {
    throw PipelineError("evaluate", "no dictionary to evaluate against");
  }
  Staging out(spec.out_dir);
  const auto src = load_side(spec.src_emb, spec, "source");
  const auto tgt = load_side(spec.tgt_emb, spec, "target");
  RunReport report;
  report.src_vocab = src.size();
  report.tgt_vocab = tgt.size();
  report.dim = src.dim();
  if (!spec.train_dict.empty()) {
    const auto train = load_dict(spec.train_dict, src, tgt, "train");
    report.train_pairs = train.indexed.dictionary.size();
    report.train_dropped = train.indexed.dropped;
    report.train = evaluate_stage("train", src, tgt, train, spec.csls_k);
    stage("write reports", [&] {
      save_bli_report(report.train, out.file("bli_train.tsv"));
      return 0;
    });
  }
  if (!spec.test_dict.empty()) {
    const auto test = load_dict(spec.test_dict, src, tgt, "test");
    report.test_pairs = test.indexed.dictionary.size();
    report.test_dropped = test.indexed.dropped;
    report.test = evaluate_stage("test", src, tgt, test, spec.csls_k);
    stage("write reports", [&] {
      save_bli_report(report.test, out.file("bli_test.tsv"));
      return 0;
    });
  }
  out.commit();
  return report;
}

}  // namespace clwe
