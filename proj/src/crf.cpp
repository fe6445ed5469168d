#include "secfn/crf.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace secfn {

namespace {

double logsumexp6(const std::array<double, kNumLabels>& v) {
  double mx = v[0];
  for (int i = 1; i < kNumLabels; ++i) mx = std::max(mx, v[static_cast<size_t>(i)]);
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

std::string normalized_title(const Article& a, int chapter_index) {
  std::string t = strip_index_numbers(a.chapters[static_cast<size_t>(chapter_index)].title);
  std::string out;
  out.reserve(t.size());
  for (unsigned char c : t) out.push_back(static_cast<char>(std::tolower(c)));
  // collapse whitespace runs
  std::string res;
  bool in_space = true;
  for (char c : out) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!in_space) res.push_back(' ');
      in_space = true;
    } else {
      res.push_back(c);
      in_space = false;
    }
  }
  while (!res.empty() && res.back() == ' ') res.pop_back();
  return res;
}

}  // namespace

std::vector<std::string> crf_feature_strings(const Article& a, int chapter_index,
                                             const StopwordSet& stopwords) {
  const Chapter& c = a.chapters[static_cast<size_t>(chapter_index)];
  std::vector<std::string> out;
  out.push_back("abs=" + std::to_string(std::min(c.ordinal, 10)));
  const double rel = relative_position(a, chapter_index);
  int bin = static_cast<int>(rel * 10.0);
  bin = std::clamp(bin, 0, 9);
  out.push_back("rel=" + std::to_string(bin));
  const auto toks = tokenize_normalize(strip_index_numbers(c.title), stopwords);
  if (!toks.empty()) {
    out.push_back("w0=" + toks.front());
    if (toks.size() > 1) out.push_back("w1=" + toks[1]);
    out.push_back("wm1=" + toks.back());
    if (toks.size() > 1) out.push_back("wm2=" + toks[toks.size() - 2]);
  }
  out.push_back("title=" + normalized_title(a, chapter_index));
  return out;
}

CrfFeatureDict build_crf_dict(const Corpus& corpus, const std::vector<int>& article_indices,
                              const StopwordSet& stopwords, const std::string& fit_tag) {
  CrfFeatureDict dict;
  dict.fit_tag = fit_tag;
  for (int ai : article_indices) {
    const Article& a = corpus[static_cast<size_t>(ai)];
    for (int ci = 0; ci < static_cast<int>(a.chapters.size()); ++ci)
      for (const std::string& f : crf_feature_strings(a, ci, stopwords))
        if (dict.id_of(f) < 0) dict.add(f);
  }
  return dict;
}

CrfSequence crf_featurize(const Article& a, const CrfFeatureDict& dict,
                          const StopwordSet& stopwords) {
  CrfSequence seq;
  seq.reserve(a.chapters.size());
  for (int ci = 0; ci < static_cast<int>(a.chapters.size()); ++ci) {
    CrfFeatureSet fs;
    for (const std::string& f : crf_feature_strings(a, ci, stopwords)) {
      const int id = dict.id_of(f);
      if (id >= 0) fs.features.push_back(id);
    }
    std::sort(fs.features.begin(), fs.features.end());
    seq.push_back(std::move(fs));
  }
  return seq;
}

double CrfModel::unary_score(const CrfFeatureSet& fs, int label) const {
  double s = 0.0;
  for (int f : fs.features) s += unary[static_cast<size_t>(f)][static_cast<size_t>(label)];
  return s;
}

namespace {

struct ForwardBackward {
  std::vector<std::array<double, kNumLabels>> alpha, beta, u;
  double log_z = 0.0;
};

ForwardBackward run_forward_backward(const CrfModel& m, const CrfSequence& seq) {
  if (seq.empty()) throw DataError("crf: empty sequence");
  const size_t n = seq.size();
  ForwardBackward fb;
  fb.u.resize(n);
  fb.alpha.resize(n);
  fb.beta.resize(n);
  for (size_t t = 0; t < n; ++t)
    for (int y = 0; y < kNumLabels; ++y)
      fb.u[t][static_cast<size_t>(y)] = m.unary_score(seq[t], y);
  fb.alpha[0] = fb.u[0];
  for (size_t t = 1; t < n; ++t) {
    for (int y = 0; y < kNumLabels; ++y) {
      std::array<double, kNumLabels> acc;
      for (int yp = 0; yp < kNumLabels; ++yp)
        acc[static_cast<size_t>(yp)] =
            fb.alpha[t - 1][static_cast<size_t>(yp)] + m.trans[static_cast<size_t>(yp)][static_cast<size_t>(y)];
      fb.alpha[t][static_cast<size_t>(y)] = logsumexp6(acc) + fb.u[t][static_cast<size_t>(y)];
    }
  }
  for (int y = 0; y < kNumLabels; ++y) fb.beta[n - 1][static_cast<size_t>(y)] = 0.0;
  for (size_t t = n - 1; t-- > 0;) {
    for (int y = 0; y < kNumLabels; ++y) {
      std::array<double, kNumLabels> acc;
      for (int yn = 0; yn < kNumLabels; ++yn)
        acc[static_cast<size_t>(yn)] = m.trans[static_cast<size_t>(y)][static_cast<size_t>(yn)] +
                                       fb.u[t + 1][static_cast<size_t>(yn)] +
                                       fb.beta[t + 1][static_cast<size_t>(yn)];
      fb.beta[t][static_cast<size_t>(y)] = logsumexp6(acc);
    }
  }
  fb.log_z = logsumexp6(fb.alpha[n - 1]);
  return fb;
}

}  // namespace

double crf_log_partition(const CrfModel& m, const CrfSequence& seq) {
  return run_forward_backward(m, seq).log_z;
}

std::vector<Label> crf_viterbi(const CrfModel& m, const CrfSequence& seq) {
  if (seq.empty()) throw DataError("crf_viterbi: empty sequence");
  const size_t n = seq.size();
  std::vector<std::array<double, kNumLabels>> delta(n);
  std::vector<std::array<int, kNumLabels>> back(n);
  for (int y = 0; y < kNumLabels; ++y) delta[0][static_cast<size_t>(y)] = m.unary_score(seq[0], y);
  for (size_t t = 1; t < n; ++t) {
    for (int y = 0; y < kNumLabels; ++y) {
      double best = -1e308;
      int arg = 0;
      for (int yp = 0; yp < kNumLabels; ++yp) {
        const double s = delta[t - 1][static_cast<size_t>(yp)] +
                         m.trans[static_cast<size_t>(yp)][static_cast<size_t>(y)];
        if (s > best) {  // strict: ties keep the smaller label id
          best = s;
          arg = yp;
        }
      }
      delta[t][static_cast<size_t>(y)] = best + m.unary_score(seq[t], y);
      back[t][static_cast<size_t>(y)] = arg;
    }
  }
  int y_best = 0;
  for (int y = 1; y < kNumLabels; ++y)
    if (delta[n - 1][static_cast<size_t>(y)] > delta[n - 1][static_cast<size_t>(y_best)]) y_best = y;
  std::vector<Label> out(n, Label::Introduction);
  for (size_t t = n; t-- > 0;) {
    out[t] = label_from_id(y_best);
    if (t > 0) y_best = back[t][static_cast<size_t>(y_best)];
  }
  return out;
}

std::vector<std::array<double, kNumLabels>> crf_marginals(const CrfModel& m,
                                                          const CrfSequence& seq) {
  const ForwardBackward fb = run_forward_backward(m, seq);
  std::vector<std::array<double, kNumLabels>> out(seq.size());
  for (size_t t = 0; t < seq.size(); ++t)
    for (int y = 0; y < kNumLabels; ++y)
      out[t][static_cast<size_t>(y)] = std::exp(fb.alpha[t][static_cast<size_t>(y)] +
                                                fb.beta[t][static_cast<size_t>(y)] - fb.log_z);
  return out;
}

double crf_log_likelihood(const CrfModel& m, const CrfSequence& seq,
                          const std::vector<Label>& labels) {
  if (labels.size() != seq.size()) throw DataError("crf_log_likelihood: label count mismatch");
  double score = 0.0;
  for (size_t t = 0; t < seq.size(); ++t) {
    score += m.unary_score(seq[t], label_id(labels[t]));
    if (t > 0)
      score += m.trans[static_cast<size_t>(label_id(labels[t - 1]))]
                      [static_cast<size_t>(label_id(labels[t]))];
  }
  return score - crf_log_partition(m, seq);
}

std::vector<double> crf_flatten(const CrfModel& m) {
  std::vector<double> theta;
  theta.reserve(static_cast<size_t>(m.n_features) * kNumLabels + kNumLabels * kNumLabels);
  for (const auto& row : m.unary)
    for (double v : row) theta.push_back(v);
  for (const auto& row : m.trans)
    for (double v : row) theta.push_back(v);
  return theta;
}

void crf_unflatten(CrfModel& m, const std::vector<double>& theta) {
  size_t p = 0;
  m.unary.assign(static_cast<size_t>(m.n_features), {});
  for (auto& row : m.unary)
    for (double& v : row) v = theta[p++];
  for (auto& row : m.trans)
    for (double& v : row) v = theta[p++];
  if (p != theta.size()) throw InternalError("crf_unflatten: size mismatch");
}

double crf_objective(const CrfModel& m, const std::vector<CrfTrainItem>& data) {
  double obj = 0.0;
  for (const auto& [seq, labels] : data) obj += crf_log_likelihood(m, seq, labels);
  double reg = 0.0;
  for (const auto& row : m.unary)
    for (double v : row) reg += v * v;
  for (const auto& row : m.trans)
    for (double v : row) reg += v * v;
  return obj - m.lambda * reg;
}

std::vector<double> crf_objective_gradient(const CrfModel& m,
                                           const std::vector<CrfTrainItem>& data) {
  const size_t unary_n = static_cast<size_t>(m.n_features) * kNumLabels;
  std::vector<double> grad(unary_n + kNumLabels * kNumLabels, 0.0);
  auto unary_at = [&](int f, int y) -> double& {
    return grad[static_cast<size_t>(f) * kNumLabels + static_cast<size_t>(y)];
  };
  auto trans_at = [&](int a, int b) -> double& {
    return grad[unary_n + static_cast<size_t>(a) * kNumLabels + static_cast<size_t>(b)];
  };
  // Per-sequence contributions are independent; compute them in parallel and
  // reduce in sequence order to keep results thread-count independent.
  std::vector<std::vector<std::pair<size_t, double>>> contrib(data.size());
#pragma omp parallel for schedule(static)
  for (long di = 0; di < static_cast<long>(data.size()); ++di) {
    const auto& [seq, labels] = data[static_cast<size_t>(di)];
    const ForwardBackward fb = run_forward_backward(m, seq);
    std::vector<std::pair<size_t, double>> local;
    const size_t n = seq.size();
    for (size_t t = 0; t < n; ++t) {
      std::array<double, kNumLabels> marg;
      for (int y = 0; y < kNumLabels; ++y)
        marg[static_cast<size_t>(y)] = std::exp(fb.alpha[t][static_cast<size_t>(y)] +
                                                fb.beta[t][static_cast<size_t>(y)] - fb.log_z);
      for (int f : seq[t].features)
        for (int y = 0; y < kNumLabels; ++y) {
          const double emp = (y == label_id(labels[t])) ? 1.0 : 0.0;
          const double delta = emp - marg[static_cast<size_t>(y)];
          if (delta != 0.0)
            local.emplace_back(static_cast<size_t>(f) * kNumLabels + static_cast<size_t>(y), delta);
        }
      if (t + 1 < n) {
        for (int a = 0; a < kNumLabels; ++a)
          for (int b = 0; b < kNumLabels; ++b) {
            const double pair_marg =
                std::exp(fb.alpha[t][static_cast<size_t>(a)] +
                         m.trans[static_cast<size_t>(a)][static_cast<size_t>(b)] +
                         fb.u[t + 1][static_cast<size_t>(b)] +
                         fb.beta[t + 1][static_cast<size_t>(b)] - fb.log_z);
            const double emp = (a == label_id(labels[t]) && b == label_id(labels[t + 1])) ? 1.0 : 0.0;
            const double delta = emp - pair_marg;
            if (delta != 0.0)
              local.emplace_back(unary_n + static_cast<size_t>(a) * kNumLabels + static_cast<size_t>(b),
                                 delta);
          }
      }
    }
    contrib[static_cast<size_t>(di)] = std::move(local);
  }
  for (const auto& local : contrib)
    for (const auto& [idx, delta] : local) grad[idx] += delta;
  // L2 term
  for (int f = 0; f < m.n_features; ++f)
    for (int y = 0; y < kNumLabels; ++y)
      unary_at(f, y) -= 2.0 * m.lambda * m.unary[static_cast<size_t>(f)][static_cast<size_t>(y)];
  for (int a = 0; a < kNumLabels; ++a)
    for (int b = 0; b < kNumLabels; ++b)
      trans_at(a, b) -= 2.0 * m.lambda * m.trans[static_cast<size_t>(a)][static_cast<size_t>(b)];
  return grad;
}

CrfModel crf_train(const std::vector<CrfTrainItem>& data, int n_features,
                   const CrfTrainOptions& opts) {
  if (data.empty()) throw DataError("crf_train: no training sequences");
  for (const auto& [seq, labels] : data) {
    if (seq.empty()) throw DataError("crf_train: empty sequence");
    if (seq.size() != labels.size()) throw DataError("crf_train: label count mismatch");
  }
  CrfModel m;
  m.n_features = n_features;
  m.lambda = opts.lambda;
  m.unary.assign(static_cast<size_t>(n_features), {});

  double obj = crf_objective(m, data);
  if (!std::isfinite(obj)) throw InternalError("crf_train: non-finite objective at start");
  std::vector<double> theta = crf_flatten(m);
  std::vector<double> theta_try(theta.size());
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    const std::vector<double> grad = crf_objective_gradient(m, data);
    double g2 = 0.0;
    for (double g : grad) g2 += g * g;
    if (g2 < 1e-18) break;
    double step = 1.0;
    bool accepted = false;
    double new_obj = obj;
    CrfModel m_try = m;
    for (int bt = 0; bt < 60; ++bt) {
      for (size_t i = 0; i < theta.size(); ++i) theta_try[i] = theta[i] + step * grad[i];
      crf_unflatten(m_try, theta_try);
      new_obj = crf_objective(m_try, data);
      if (std::isfinite(new_obj) && new_obj >= obj + 1e-4 * step * g2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    theta = theta_try;
    crf_unflatten(m, theta);
    const double increase = new_obj - obj;
    obj = new_obj;
    if (!std::isfinite(obj))
      throw InternalError("crf_train: non-finite objective at iteration " + std::to_string(iter));
    if (increase < opts.tol * std::max(1.0, std::abs(obj))) break;
  }
  return m;
}

}  // namespace secfn
