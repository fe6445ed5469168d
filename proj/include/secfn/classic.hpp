#pragma once

#include <array>
#include <vector>

#include "secfn/features.hpp"
#include "secfn/label.hpp"

namespace secfn {

using LabeledVector = std::pair<SparseVector, Label>;

// Multinomial NB over (possibly fractional) feature weights, additive
// smoothing alpha = 1. Likelihoods are computed from per-class mean feature
// mass, which keeps posteriors invariant under dataset duplication.
struct NbModel {
  int dim = 0;
  std::array<double, kNumLabels> log_prior{};  // -inf for absent classes
  std::vector<std::array<double, kNumLabels>> log_likelihood;  // [feature][class]
  std::array<bool, kNumLabels> class_present{};
};

NbModel train_nb(const std::vector<LabeledVector>& data, double alpha = 1.0);
std::array<double, kNumLabels> nb_scores(const NbModel& m, const SparseVector& x);
Label nb_predict(const NbModel& m, const SparseVector& x);

enum class PairLoss { Logistic, Hinge };

// One binary model per unordered class pair (a < b); a is the +1 class.
struct PairwiseLinearModel {
  struct Pair {
    int class_a = 0, class_b = 0;
    std::vector<double> w;
    double bias = 0.0;
  };
  int dim = 0;
  PairLoss loss = PairLoss::Logistic;
  double c = 1.0;
  std::vector<Pair> pairs;
};

struct PairTrainOptions {
  double c = 1.0;
  int max_iters = 1000;
  double tol = 1e-6;  // relative objective decrease
  // when set, receives the per-iteration objective of the first trained pair
  std::vector<double>* objective_trace = nullptr;
};

PairwiseLinearModel train_pairwise(const std::vector<LabeledVector>& data, PairLoss loss,
                                   const PairTrainOptions& opts = {});

// 0.5*||w||^2 + C * sum loss_i for one binary problem; used by tests.
double pair_objective(const std::vector<double>& w, double bias,
                      const std::vector<std::pair<SparseVector, int>>& examples, PairLoss loss,
                      double c);

struct OvoPrediction {
  Label label = Label::Introduction;
  std::array<int, kNumLabels> votes{};
  std::array<double, kNumLabels> margin_sums{};
};

// Majority vote; ties by larger summed |margin|, then smaller class id.
// A pair whose score is exactly 0 abstains.
OvoPrediction predict_ovo(const PairwiseLinearModel& m, const SparseVector& x);

struct KnnModel {
  int dim = 0;
  int k = 7;
  std::vector<SparseVector> vectors;  // stored L2-normalized
  std::vector<Label> labels;
};

KnnModel train_knn(const std::vector<LabeledVector>& data, int k = 7);
// Cosine similarity; similarity ties broken by lower training index, vote
// ties by the tied class with the nearest representative.
Label knn_predict(const KnnModel& m, const SparseVector& x);

}  // namespace secfn
