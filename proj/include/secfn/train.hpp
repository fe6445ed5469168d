#pragma once

#include <vector>

#include "secfn/fusion.hpp"
#include "secfn/metrics.hpp"

namespace secfn {

struct TrainHistory {
  std::vector<double> train_loss;     // per epoch
  std::vector<double> valid_macro_f1; // per epoch
  int best_epoch = -1;                // 0-based
  double best_f1 = -1.0;
};

// Mini-batch SGD with cross-entropy, dropout on the readout, early stopping
// on validation macro-F1. Parameters end at the best validation epoch.
TrainHistory train_neural(NeuralModel& model, const EncodedCorpus& data,
                          std::vector<TrainExample> train, const std::vector<TrainExample>& valid,
                          const std::vector<Label>& macro_classes);

}  // namespace secfn
