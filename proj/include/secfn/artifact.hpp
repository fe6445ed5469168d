#pragma once

#include <string>
#include <vector>

#include "secfn/classic.hpp"
#include "secfn/crf.hpp"
#include "secfn/fusion.hpp"
#include "secfn/pipeline.hpp"

namespace secfn {

// Self-describing model container. Classic families serialize as text with
// exact round-trip doubles; neural artifacts carry a plain-text header and a
// little-endian 64-bit float body in parameter declaration order.
struct ModelArtifact {
  std::string family;  // nb | lr | svm | knn | crf | neural
  uint64_t config_digest = 0;
  uint64_t seed = 0;
  std::vector<std::string> train_ids;

  // classic families
  FeaturePipeline pipeline;
  NbModel nb;
  PairwiseLinearModel linear;
  KnnModel knn;

  // crf
  CrfFeatureDict crf_dict;
  CrfModel crf;

  // neural
  std::string neural_spec;  // ModelSpec::to_string form
  Hyper neural_hyper;
  NeuralVocab neural_vocab;
  std::vector<std::string> neural_param_names;
  std::vector<Mat> neural_params;
};

void save_artifact(const ModelArtifact& art, const std::string& path);
ModelArtifact load_artifact(const std::string& path);

// Builds a ready NeuralModel from a neural artifact (shape manifest checked).
NeuralModel restore_neural(const ModelArtifact& art);
// Extracts weights from a trained model into the artifact fields.
void store_neural(ModelArtifact& art, NeuralModel& model);

}  // namespace secfn
