// clwe: align, retrofit, induce and evaluate cross-lingual word embeddings.
//
// Exit codes: 0 success, 1 data error, 2 usage error.

#include "CLI11.hpp"

#include "clwe/log.hpp"
#include "clwe/pipeline.hpp"

#include <cstdio>
#include <iostream>
#include <map>

namespace {

using clwe::PipelineSpec;

struct Flags {
  PipelineSpec spec;
  std::string method = "procrustes";
  std::string retrofit = "none";
  std::string retrofit_stage = "train";
  std::string beta = "inverse-degree";
  long long max_vocab = 200000;
  bool no_lowercase = false;
  bool verbose = false;
};

void add_inputs(CLI::App* cmd, Flags& f, bool need_tgt) {
  cmd->add_option("--src-emb", f.spec.src_emb, "Source embeddings (word2vec text)")->required();
  auto* tgt = cmd->add_option("--tgt-emb", f.spec.tgt_emb, "Target embeddings (word2vec text)");
  if (need_tgt) tgt->required();
  cmd->add_option("--max-vocab", f.max_vocab, "Keep the N most frequent words (0 = all)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd->add_flag("--no-lowercase", f.no_lowercase, "Keep surface forms as they are");
  cmd->add_option("--out-dir", f.spec.out_dir, "Output directory")->required();
  cmd->add_flag("-v,--verbose", f.verbose, "Log stage progress");
}

void add_method(CLI::App* cmd, Flags& f) {
  cmd->add_option("--method", f.method, "Alignment method")
      ->capture_default_str()
      ->check(CLI::IsMember({"procrustes", "lsq", "cca", "rcsls"}));
  cmd->add_option("--seed", f.spec.seed, "Root random seed")->capture_default_str();
  cmd->add_option("--cca-dim-ratio", f.spec.cca_dim_ratio, "Fraction of canonical directions kept")
      ->capture_default_str()
      ->check(CLI::Range(1e-9, 1.0));
  cmd->add_option("--rcsls-k", f.spec.rcsls.k_neighbors, "RCSLS neighbourhood size")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--rcsls-epochs", f.spec.rcsls.epochs, "RCSLS epochs")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--rcsls-lr", f.spec.rcsls.learning_rate, "RCSLS initial learning rate")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--rcsls-batch", f.spec.rcsls.batch_size, "RCSLS minibatch size (0 = full batch)")
      ->capture_default_str();
  cmd->add_option("--rcsls-max-vocab", f.spec.rcsls.max_neighbor_vocab,
                  "Search RCSLS neighbours among the N most frequent words (0 = all)")
      ->capture_default_str();
}

void add_csls(CLI::App* cmd, Flags& f) {
  cmd->add_option("--csls-k", f.spec.csls_k, "CSLS neighbourhood size")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

void add_retrofit(CLI::App* cmd, Flags& f, std::string& mode, bool allow_none) {
  std::vector<std::string> modes{"train", "train+synthetic"};
  if (allow_none) modes.insert(modes.begin(), "none");
  cmd->add_option("--retrofit", mode, "Retrofitting mode")
      ->capture_default_str()
      ->check(CLI::IsMember(modes));
  cmd->add_option("--alpha", f.spec.retrofit.alpha, "Anchor weight")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--beta", f.beta, "Pair weighting")
      ->capture_default_str()
      ->check(CLI::IsMember({"inverse-degree", "uniform"}));
  cmd->add_option("--iterations", f.spec.retrofit.iterations, "Retrofitting sweeps")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-rank", f.spec.induce_max_rank,
                  "Synthetic dictionary candidates: N most frequent words per side (0 = all)")
      ->capture_default_str();
  cmd->add_flag("--exclude-train-sources", f.spec.synthetic_excludes_train,
                "Drop induced pairs whose source word is in the training dictionary");
  cmd->add_option("--synthetic-weight", f.spec.synthetic_weight, "Pair weight multiplier for synthetic pairs")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

void finalize(Flags& f) {
  f.spec.method = *clwe::parse_method(f.method);
  f.spec.retrofit_mode = *clwe::parse_retrofit_mode(f.retrofit);
  f.spec.retrofit.beta = *clwe::parse_beta_scheme(f.beta);
  f.spec.max_vocab = f.max_vocab > 0 ? std::optional<clwe::Index>(f.max_vocab) : std::nullopt;
  f.spec.lowercase = !f.no_lowercase;
  if (f.verbose) clwe::log::set_level(clwe::log::Level::info);
}

void print_bli(const char* label, const clwe::BliReport& r) {
  std::printf("%s P@1 = %.4f (%zu/%zu words, %zu OOV)\n", label, r.p_at_1, r.correct_words, r.evaluated_words,
              r.oov_words);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-lingual word embedding alignment, retrofitting and lexicon induction"};
  app.require_subcommand(1);
  Flags f;

  auto* normalize = app.add_subcommand("normalize", "Lowercase, truncate and iteratively normalize embeddings");
  add_inputs(normalize, f, false);
  normalize->add_option("--norm-rounds", f.spec.norm_rounds, "Iterative normalization rounds")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  auto* align = app.add_subcommand("align", "Fit a map on the training dictionary and project both spaces");
  add_inputs(align, f, true);
  align->add_option("--train-dict", f.spec.train_dict, "Training dictionary")->required();
  add_method(align, f);

  auto* retrofit = app.add_subcommand("retrofit", "Retrofit aligned embeddings to a dictionary");
  add_inputs(retrofit, f, true);
  retrofit->add_option("--train-dict", f.spec.train_dict, "Training dictionary")->required();
  add_csls(retrofit, f);
  add_retrofit(retrofit, f, f.retrofit_stage, false);

  auto* induce = app.add_subcommand("induce", "Write mutual CSLS nearest neighbours as a dictionary");
  add_inputs(induce, f, true);
  add_csls(induce, f);
  induce->add_option("--max-rank", f.spec.induce_max_rank, "Candidates: N most frequent words per side (0 = all)")
      ->capture_default_str();

  auto* evaluate = app.add_subcommand("evaluate", "CSLS precision@1 on train and/or test dictionaries");
  add_inputs(evaluate, f, true);
  evaluate->add_option("--train-dict", f.spec.train_dict, "Training dictionary");
  evaluate->add_option("--test-dict", f.spec.test_dict, "Test dictionary");
  add_csls(evaluate, f);

  auto* pipeline = app.add_subcommand("pipeline", "Normalize, align, retrofit and evaluate in one run");
  add_inputs(pipeline, f, true);
  pipeline->add_option("--train-dict", f.spec.train_dict, "Training dictionary")->required();
  pipeline->add_option("--test-dict", f.spec.test_dict, "Test dictionary")->required();
  pipeline->add_option("--norm-rounds", f.spec.norm_rounds, "Iterative normalization rounds")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  add_method(pipeline, f);
  add_csls(pipeline, f);
  add_retrofit(pipeline, f, f.retrofit, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (retrofit->parsed()) f.retrofit = f.retrofit_stage;
  finalize(f);

  try {
    if (normalize->parsed()) {
      clwe::cmd_normalize(f.spec);
    } else if (align->parsed()) {
      clwe::cmd_align(f.spec);
    } else if (retrofit->parsed()) {
      const auto r = clwe::cmd_retrofit(f.spec);
      const auto& last = r.objective_trace.back();
      std::printf("retrofit: %d sweeps, L = %.6g (L_a = %.6g, L_b = %.6g)\n", r.sweeps_run, last.total, last.anchor,
                  last.pairs);
    } else if (induce->parsed()) {
      const auto r = clwe::cmd_induce(f.spec);
      std::printf("induced %zu pairs -> %s\n", r.pairs, r.dictionary_path.string().c_str());
    } else if (evaluate->parsed()) {
      const auto r = clwe::cmd_evaluate(f.spec);
      if (!f.spec.train_dict.empty()) print_bli("train", r.train);
      if (!f.spec.test_dict.empty()) print_bli("test", r.test);
    } else if (pipeline->parsed()) {
      const auto r = clwe::run_pipeline(f.spec);
      std::cout << clwe::summary_header() << clwe::summary_row(r, f.spec.seed);
    }
  } catch (const clwe::DataError& e) {
    std::cerr << "clwe: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "clwe: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "clwe: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
