#pragma once

#include "clwe/common.hpp"
#include "clwe/neighbors.hpp"
#include "clwe/projection.hpp"
#include "clwe/retrofit.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace clwe {

enum class Method { procrustes, lsq, cca, rcsls };
enum class RetrofitMode { none, train, train_synthetic };

std::string_view to_string(Method m);
std::string_view to_string(RetrofitMode m);
std::string_view to_string(BetaScheme b);
std::optional<Method> parse_method(std::string_view text);
std::optional<RetrofitMode> parse_retrofit_mode(std::string_view text);
std::optional<BetaScheme> parse_beta_scheme(std::string_view text);

/// A stage failure; what() reads "<stage>: <cause>".
class PipelineError : public DataError {
 public:
  PipelineError(std::string stage, const std::string& cause)
      : DataError(stage + ": " + cause), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// Inputs and knobs shared by the pipeline and the individual stage
/// commands; each command reads the fields it needs.
struct PipelineSpec {
  std::filesystem::path src_emb;
  std::filesystem::path tgt_emb;
  std::filesystem::path train_dict;
  std::filesystem::path test_dict;
  std::filesystem::path out_dir;

  Method method = Method::procrustes;
  RetrofitMode retrofit_mode = RetrofitMode::none;
  std::optional<Index> max_vocab = 200000;
  bool lowercase = true;
  int norm_rounds = 5;
  int csls_k = 10;
  std::uint64_t seed = 0;

  double cca_dim_ratio = 1.0;
  RcslsConfig rcsls;
  RetrofitConfig retrofit;

  Index induce_max_rank = 0;             // 0 = whole vocabulary
  bool synthetic_excludes_train = false;  // drop induced pairs whose source is in the training dictionary
  double synthetic_weight = 1.0;          // β multiplier for synthetic-only pairs
};

struct RunReport {
  Method method = Method::procrustes;
  RetrofitMode mode = RetrofitMode::none;
  Index src_vocab = 0;
  Index tgt_vocab = 0;
  Index dim = 0;
  std::size_t train_pairs = 0;
  std::size_t train_dropped = 0;
  std::size_t test_pairs = 0;
  std::size_t test_dropped = 0;
  std::size_t synthetic_pairs = 0;
  BliReport train;
  BliReport test;
  std::optional<BliReport> train_before_retrofit;
  std::optional<BliReport> test_before_retrofit;
  int retrofit_sweeps = 0;
};

/// Header and row of summary.tsv; the schema does not depend on the method.
std::string summary_header();
std::string summary_row(const RunReport& report, std::uint64_t seed);

/// load -> lowercase/truncate -> iterative normalization -> dictionary
/// indexing -> fit and apply the map -> optional retrofitting -> CSLS P@1 on
/// the train and test dictionaries. Artefacts are staged and moved into
/// out_dir only when every stage succeeds. Throws PipelineError.
RunReport run_pipeline(const PipelineSpec& spec);

// Single-stage commands with file handoffs, all writing into spec.out_dir.

/// src.norm.vec (and tgt.norm.vec when tgt_emb is set).
void cmd_normalize(const PipelineSpec& spec);

/// src.aligned.vec, tgt.aligned.vec, src_map.txt, tgt_map.txt.
void cmd_align(const PipelineSpec& spec);

/// src.retrofit.vec, tgt.retrofit.vec, retrofit_trace.tsv and, in
/// train+synthetic mode, synthetic.dict.tsv. Inputs are aligned embeddings.
RetrofitResult cmd_retrofit(const PipelineSpec& spec);

struct InduceReport {
  std::size_t pairs = 0;
  std::filesystem::path dictionary_path;
};

/// synthetic.dict.tsv (mutual CSLS neighbours of aligned embeddings) plus
/// induce_summary.tsv.
InduceReport cmd_induce(const PipelineSpec& spec);

/// bli_train.tsv and/or bli_test.tsv for whichever dictionaries are set.
RunReport cmd_evaluate(const PipelineSpec& spec);

}  // namespace clwe
