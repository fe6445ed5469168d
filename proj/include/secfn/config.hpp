#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "secfn/corpus.hpp"
#include "secfn/features.hpp"
#include "secfn/fusion.hpp"
#include "secfn/metrics.hpp"

namespace secfn {

// Config file: INI-style sections [corpus] [features] [model] [train] [eval]
// [analysis] plus a top-level (or [run]) seed. Command-line flags override.
struct RunConfig {
  uint64_t seed = 42;
  int jobs = 0;
  bool strict = true;
  std::string out_dir = ".";
  CorpusFormat corpus_format = CorpusFormat::Jsonl;

  FeatureConfig features;
  Hyper hyper;
  SeqCaps caps;

  int cv_folds = 5;
  bool macro_include_other = false;
  double crf_lambda = 0.1;
  int knn_k = 7;
  double linear_c = 1.0;
  int linear_max_iters = 1000;

  std::vector<Label> macro_classes() const;
  // Digest over every field that affects numeric results.
  uint64_t digest() const;
};

void apply_config_stream(RunConfig& cfg, std::istream& in, const std::string& origin);
RunConfig load_run_config(const std::string& path);
// Applies one "section.key=value" override (flag syntax).
void apply_config_override(RunConfig& cfg, const std::string& assignment);

}  // namespace secfn
