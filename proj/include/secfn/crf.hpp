#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "secfn/corpus.hpp"
#include "secfn/features.hpp"
#include "secfn/label.hpp"

namespace secfn {

// Frozen indicator-feature dictionary, fitted on training articles only.
// Unseen test features map to no-ops.
struct CrfFeatureDict {
  std::map<std::string, int> ids;
  std::string fit_tag;

  int size() const { return static_cast<int>(ids.size()); }
  int id_of(const std::string& f) const {
    auto it = ids.find(f);
    return it == ids.end() ? -1 : it->second;
  }
  void add(const std::string& f) { ids.emplace(f, static_cast<int>(ids.size())); }
};

struct CrfFeatureSet {
  std::vector<int> features;  // active indicator ids, strictly increasing
};

using CrfSequence = std::vector<CrfFeatureSet>;

// Title feature template: binned absolute position, binned relative position,
// first two and last two title tokens, whole normalized title.
std::vector<std::string> crf_feature_strings(const Article& a, int chapter_index,
                                             const StopwordSet& stopwords);

CrfFeatureDict build_crf_dict(const Corpus& corpus, const std::vector<int>& article_indices,
                              const StopwordSet& stopwords, const std::string& fit_tag);

CrfSequence crf_featurize(const Article& a, const CrfFeatureDict& dict,
                          const StopwordSet& stopwords);

struct CrfModel {
  int n_features = 0;
  double lambda = 0.1;
  std::vector<std::array<double, kNumLabels>> unary;          // [feature][label]
  std::array<std::array<double, kNumLabels>, kNumLabels> trans{};  // [prev][next]

  double unary_score(const CrfFeatureSet& fs, int label) const;
};

double crf_log_partition(const CrfModel& m, const CrfSequence& seq);
// Ties at each backtrack step resolve to the smaller label id.
std::vector<Label> crf_viterbi(const CrfModel& m, const CrfSequence& seq);
std::vector<std::array<double, kNumLabels>> crf_marginals(const CrfModel& m,
                                                          const CrfSequence& seq);
double crf_log_likelihood(const CrfModel& m, const CrfSequence& seq,
                          const std::vector<Label>& labels);

struct CrfTrainOptions {
  double lambda = 0.1;
  int max_iters = 500;
  double tol = 1e-7;  // relative objective change
};

using CrfTrainItem = std::pair<CrfSequence, std::vector<Label>>;

// Full-batch gradient ascent on sum log p(y|x) - lambda * ||theta||^2 with
// backtracking; the objective is concave and never decreases per step.
CrfModel crf_train(const std::vector<CrfTrainItem>& data, int n_features,
                   const CrfTrainOptions& opts = {});

// Objective and flat gradient at the current model; exposed for the
// finite-difference oracle.
double crf_objective(const CrfModel& m, const std::vector<CrfTrainItem>& data);
std::vector<double> crf_objective_gradient(const CrfModel& m,
                                           const std::vector<CrfTrainItem>& data);
std::vector<double> crf_flatten(const CrfModel& m);
void crf_unflatten(CrfModel& m, const std::vector<double>& theta);

}  // namespace secfn
