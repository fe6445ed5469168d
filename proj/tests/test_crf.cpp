#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "secfn/crf.hpp"
#include "secfn/rng.hpp"

using namespace secfn;

namespace {

CrfModel random_model(Rng& rng, int n_features, double scale = 1.0) {
  CrfModel m;
  m.n_features = n_features;
  m.unary.assign(static_cast<size_t>(n_features), {});
  for (auto& row : m.unary)
    for (double& v : row) v = rng.uniform(-scale, scale);
  for (auto& row : m.trans)
    for (double& v : row) v = rng.uniform(-scale, scale);
  return m;
}

CrfSequence random_sequence(Rng& rng, int len, int n_features) {
  CrfSequence seq;
  for (int t = 0; t < len; ++t) {
    CrfFeatureSet fs;
    for (int f = 0; f < n_features; ++f)
      if (rng.uniform() < 0.4) fs.features.push_back(f);
    seq.push_back(fs);
  }
  return seq;
}

double path_score(const CrfModel& m, const CrfSequence& seq, const std::vector<int>& path) {
  double s = 0.0;
  for (size_t t = 0; t < seq.size(); ++t) {
    s += m.unary_score(seq[t], path[t]);
    if (t > 0)
      s += m.trans[static_cast<size_t>(path[t - 1])][static_cast<size_t>(path[t])];
  }
  return s;
}

// enumerate all label sequences of the given length
void enumerate(int len, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> path(static_cast<size_t>(len), 0);
  while (true) {
    fn(path);
    int p = len - 1;
    while (p >= 0 && path[static_cast<size_t>(p)] == kNumLabels - 1) {
      path[static_cast<size_t>(p)] = 0;
      --p;
    }
    if (p < 0) break;
    ++path[static_cast<size_t>(p)];
  }
}

}  // namespace

TEST_CASE("log partition limits") {
  Rng rng(2);
  CrfModel zero;
  zero.n_features = 3;
  zero.unary.assign(3, {});
  for (int len : {1, 2, 5}) {
    const CrfSequence seq = random_sequence(rng, len, 3);
    CHECK(crf_log_partition(zero, seq) ==
          doctest::Approx(len * std::log(6.0)).epsilon(1e-12));
  }
  // length-1 sequence: log-sum-exp of the unary scores
  CrfModel m = random_model(rng, 3);
  const CrfSequence one = random_sequence(rng, 1, 3);
  double mx = -1e300, z = 0.0;
  for (int y = 0; y < kNumLabels; ++y) mx = std::max(mx, m.unary_score(one[0], y));
  for (int y = 0; y < kNumLabels; ++y) z += std::exp(m.unary_score(one[0], y) - mx);
  CHECK(crf_log_partition(m, one) == doctest::Approx(mx + std::log(z)).epsilon(1e-12));
  CHECK_THROWS_AS(crf_log_partition(m, {}), DataError);
}

TEST_CASE("forward, marginals and viterbi match exhaustive enumeration") {
  Rng rng(7);
  for (int rep = 0; rep < 25; ++rep) {
    const int len = static_cast<int>(rng.range(1, 4));
    const int n_features = static_cast<int>(rng.range(2, 5));
    const CrfModel m = random_model(rng, n_features);
    const CrfSequence seq = random_sequence(rng, len, n_features);

    double z = 0.0;
    std::vector<std::array<double, kNumLabels>> marg(static_cast<size_t>(len));
    for (auto& row : marg) row.fill(0.0);
    double best_score = -1e300;
    std::vector<int> best_path;
    enumerate(len, [&](const std::vector<int>& path) {
      const double s = path_score(m, seq, path);
      z += std::exp(s);
      for (int t = 0; t < len; ++t)
        marg[static_cast<size_t>(t)][static_cast<size_t>(path[static_cast<size_t>(t)])] +=
            std::exp(s);
      if (s > best_score) {
        best_score = s;
        best_path = path;
      }
    });

    CHECK(crf_log_partition(m, seq) == doctest::Approx(std::log(z)).epsilon(1e-8));
    const auto got_marg = crf_marginals(m, seq);
    for (int t = 0; t < len; ++t) {
      double sum = 0.0;
      for (int y = 0; y < kNumLabels; ++y) {
        CHECK(got_marg[static_cast<size_t>(t)][static_cast<size_t>(y)] ==
              doctest::Approx(marg[static_cast<size_t>(t)][static_cast<size_t>(y)] / z)
                  .epsilon(1e-8));
        sum += got_marg[static_cast<size_t>(t)][static_cast<size_t>(y)];
      }
      CHECK(std::fabs(sum - 1.0) < 1e-9);
    }
    const std::vector<Label> vit = crf_viterbi(m, seq);
    std::vector<int> vit_ids;
    for (Label l : vit) vit_ids.push_back(label_id(l));
    CHECK(path_score(m, seq, vit_ids) == doctest::Approx(best_score).epsilon(1e-9));
  }
}

TEST_CASE("viterbi tie-break keeps the smallest label ids") {
  CrfModel zero;
  zero.n_features = 2;
  zero.unary.assign(2, {});
  const CrfSequence seq = {{{0}}, {{1}}, {{0, 1}}};
  const std::vector<Label> path = crf_viterbi(zero, seq);
  for (Label l : path) CHECK(l == Label::Introduction);
}

TEST_CASE("uniform model yields uniform marginals") {
  CrfModel zero;
  zero.n_features = 1;
  zero.unary.assign(1, {});
  const auto marg = crf_marginals(zero, {{{0}}, {{0}}});
  for (const auto& row : marg)
    for (double p : row) CHECK(p == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("adding a constant to one position's unary scores changes nothing") {
  Rng rng(11);
  const int n_features = 4;
  CrfModel m = random_model(rng, n_features);
  // one extra feature active only at position 1 with a constant score per label
  CrfModel shifted = m;
  shifted.n_features = n_features + 1;
  shifted.unary.push_back({3.7, 3.7, 3.7, 3.7, 3.7, 3.7});
  CrfSequence seq = random_sequence(rng, 3, n_features);
  CrfSequence seq_shifted = seq;
  seq_shifted[1].features.push_back(n_features);

  const double lz = crf_log_partition(m, seq);
  const double lz2 = crf_log_partition(shifted, seq_shifted);
  CHECK(lz2 == doctest::Approx(lz + 3.7).epsilon(1e-9));
  const auto m1 = crf_marginals(m, seq);
  const auto m2 = crf_marginals(shifted, seq_shifted);
  for (size_t t = 0; t < m1.size(); ++t)
    for (int y = 0; y < kNumLabels; ++y)
      CHECK(m1[t][static_cast<size_t>(y)] ==
            doctest::Approx(m2[t][static_cast<size_t>(y)]).epsilon(1e-9));
  CHECK(crf_viterbi(m, seq) == crf_viterbi(shifted, seq_shifted));
}

TEST_CASE("training gradient matches finite differences") {
  Rng rng(13);
  const int n_features = 3;
  std::vector<CrfTrainItem> data;
  for (int s = 0; s < 3; ++s) {
    const int len = static_cast<int>(rng.range(1, 4));
    CrfSequence seq = random_sequence(rng, len, n_features);
    std::vector<Label> labels;
    for (int t = 0; t < len; ++t)
      labels.push_back(label_from_id(static_cast<int>(rng.below(kNumLabels))));
    data.emplace_back(seq, labels);
  }
  CrfModel m = random_model(rng, n_features, 0.5);
  m.lambda = 0.1;
  const std::vector<double> grad = crf_objective_gradient(m, data);
  std::vector<double> theta = crf_flatten(m);
  const double eps = 1e-5;
  for (size_t i = 0; i < theta.size(); ++i) {
    CrfModel probe = m;
    std::vector<double> up = theta, dn = theta;
    up[i] += eps;
    dn[i] -= eps;
    crf_unflatten(probe, up);
    const double fu = crf_objective(probe, data);
    crf_unflatten(probe, dn);
    const double fd_obj = crf_objective(probe, data);
    const double fd = (fu - fd_obj) / (2.0 * eps);
    const double rel =
        std::fabs(fd - grad[i]) / std::max({std::fabs(fd), std::fabs(grad[i]), 1e-4});
    CHECK(rel < 1e-4);
  }
}

TEST_CASE("training overfits a single sequence and ascent is monotone") {
  // features identify positions; gold path is recoverable
  CrfSequence seq = {{{0}}, {{1}}, {{2}}, {{3}}};
  const std::vector<Label> gold = {Label::Introduction, Label::Method, Label::EvalResult,
                                   Label::Conclusion};
  std::vector<CrfTrainItem> data = {{seq, gold}};
  const CrfModel m = crf_train(data, 4, {0.001, 500, 1e-9});
  CHECK(crf_viterbi(m, seq) == gold);

  // objective concavity: ascent with backtracking never decreases it; verify
  // the trained objective beats the zero model
  CrfModel zero;
  zero.n_features = 4;
  zero.lambda = 0.001;
  zero.unary.assign(4, {});
  CHECK(crf_objective(m, data) >= crf_objective(zero, data));
}

TEST_CASE("weights shrink monotonically with growing lambda") {
  Rng rng(17);
  std::vector<CrfTrainItem> data;
  for (int s = 0; s < 4; ++s) {
    CrfSequence seq = random_sequence(rng, 3, 5);
    std::vector<Label> labels;
    for (int t = 0; t < 3; ++t)
      labels.push_back(label_from_id(static_cast<int>(rng.below(3))));
    data.emplace_back(seq, labels);
  }
  double prev_norm = 1e300;
  for (double lambda : {0.01, 0.1, 1.0, 10.0}) {
    const CrfModel m = crf_train(data, 5, {lambda, 300, 1e-9});
    double norm = 0.0;
    for (double v : crf_flatten(m)) norm += v * v;
    CHECK(norm <= prev_norm + 1e-9);
    prev_norm = norm;
  }
}

TEST_CASE("position-wise marginal argmax can differ from the viterbi path") {
  // two effective labels; transition strongly penalizes 0 -> 0
  CrfModel m;
  m.n_features = 2;
  m.unary.assign(2, {});
  m.unary[0] = {1.2, 0.9, -50, -50, -50, -50};  // position 1 features
  m.unary[1] = {1.0, 0.9, -50, -50, -50, -50};  // position 2 features
  m.trans[0][0] = -5.0;
  const CrfSequence seq = {{{0}}, {{1}}};
  const std::vector<Label> vit = crf_viterbi(m, seq);
  const auto marg = crf_marginals(m, seq);
  std::vector<Label> marg_path;
  for (const auto& row : marg) {
    int best = 0;
    for (int y = 1; y < kNumLabels; ++y)
      if (row[static_cast<size_t>(y)] > row[static_cast<size_t>(best)]) best = y;
    marg_path.push_back(label_from_id(best));
  }
  CHECK(vit == std::vector<Label>{Label::Introduction, Label::RelatedWork});
  CHECK(marg_path == std::vector<Label>{Label::RelatedWork, Label::RelatedWork});
  CHECK(vit != marg_path);
}

TEST_CASE("crf feature template produces the documented indicators") {
  Article a;
  a.id = "a";
  const std::vector<std::pair<std::string, Label>> plan = {
      {"1 Introduction", Label::Introduction},
      {"2.1 Proposed Method Details", Label::Method},
      {"3 Conclusion", Label::Conclusion}};
  for (size_t i = 0; i < plan.size(); ++i) {
    Chapter c;
    c.ordinal = static_cast<int>(i) + 1;
    c.title = plan[i].first;
    c.content = "x";
    c.label = plan[i].second;
    a.chapters.push_back(c);
  }
  const auto feats = crf_feature_strings(a, 1, {});
  // abs bin, rel bin, first two tokens, last two tokens, whole title
  CHECK(std::find(feats.begin(), feats.end(), "abs=2") != feats.end());
  CHECK(std::find(feats.begin(), feats.end(), "rel=6") != feats.end());  // 2/3 -> bin 6
  CHECK(std::find(feats.begin(), feats.end(), "w0=propos") != feats.end());
  CHECK(std::find(feats.begin(), feats.end(), "w1=method") != feats.end());
  CHECK(std::find(feats.begin(), feats.end(), "wm1=detail") != feats.end());
  CHECK(std::find(feats.begin(), feats.end(), "wm2=method") != feats.end());
  CHECK(std::find(feats.begin(), feats.end(), "title=proposed method details") != feats.end());

  // unseen features map to no-ops under a frozen dictionary
  CrfFeatureDict dict = build_crf_dict({a}, {0}, {}, "train");
  Article other = a;
  other.chapters[1].title = "2.1 Wholly Unseen Words";
  const CrfSequence seq = crf_featurize(other, dict, {});
  for (int f : seq[1].features) CHECK(f < dict.size());
}
