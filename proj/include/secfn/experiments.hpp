#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "secfn/artifact.hpp"
#include "secfn/config.hpp"
#include "secfn/metrics.hpp"
#include "secfn/split.hpp"
#include "secfn/train.hpp"

namespace secfn {

// Optional restriction of a grid experiment to one cell (CLI flags).
struct GridFilter {
  std::optional<int> window;
  std::optional<Direction> direction;
  std::optional<FusionEncoder> fusion_encoder;
  bool keep_artifacts = false;  // DL rows: keep the trained models
};

struct ExperimentRow {
  std::string experiment;
  std::string variant;
  std::string protocol;  // "5-fold-cv" or "holdout-8:1:1"
  std::vector<MetricsReport> folds;
  MetricsReport pooled;  // confusion matrices pooled over folds
  double mean_macro_f1 = 0.0;
  double var_macro_f1 = 0.0;

  void finalize(const std::vector<Label>& macro_classes);
};

struct ExperimentResult {
  std::string experiment;
  std::vector<ExperimentRow> rows;
  std::vector<ModelArtifact> artifacts;  // parallel to rows when requested
};

const std::vector<std::string>& experiment_ids();
bool is_ml_experiment(const std::string& id);

// Runs one named experiment of the grid: classical ids evaluate with k-fold
// cross-validation, deep ids with the 8:1:1 holdout.
ExperimentResult run_experiment(const std::string& id, const Corpus& corpus, const RunConfig& cfg,
                                const GridFilter& filter = {});

// Article-unit k-fold cross-validation for one family (nb|lr|svm|knn|crf).
ExperimentResult run_family_cv(const std::string& family, FeaturePipeline::Input input,
                               const EnabledCharacteristics& enabled, const Corpus& corpus,
                               const RunConfig& cfg);

// Chapter-order ablation for a context-fusion spec: article order, current
// first with ordered context, current first with shuffled context.
ExperimentResult order_ablation(const ModelSpec& base_spec, const Corpus& corpus,
                                const RunConfig& cfg);

// Trains a model on the whole corpus. family is nb|lr|svm|knn|crf or an
// architecture name; classic families use `input` + `enabled`.
ModelArtifact train_family(const std::string& family, const Corpus& corpus, const RunConfig& cfg,
                           FeaturePipeline::Input input, const EnabledCharacteristics& enabled);

// Evaluation with frozen statistics; refuses corpora overlapping training ids
// and artifacts whose config digest differs from the active configuration.
MetricsReport open_test(const ModelArtifact& art, const Corpus& corpus, const RunConfig& cfg);
MetricsReport evaluate_artifact(const ModelArtifact& art, const Corpus& corpus,
                                const RunConfig& cfg);
std::vector<Label> predict_with_artifact(const ModelArtifact& art, const Corpus& corpus,
                                         const RunConfig& cfg);

void write_report_csv(const ExperimentResult& res, std::ostream& out, uint64_t seed,
                      uint64_t digest);
std::string report_text(const ExperimentResult& res);

}  // namespace secfn
