#include "secfn/classic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace secfn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_dims(const std::vector<LabeledVector>& data) {
  if (data.empty()) throw DataError("training data is empty");
  const int dim = data.front().first.dim;
  for (const auto& [x, y] : data) {
    if (x.dim != dim) throw DataError("training vectors have inconsistent dimensions");
    for (const auto& [idx, w] : x.entries)
      if (!std::isfinite(w)) throw DataError("non-finite feature weight in training data");
  }
}

}  // namespace

NbModel train_nb(const std::vector<LabeledVector>& data, double alpha) {
  check_dims(data);
  NbModel m;
  m.dim = data.front().first.dim;
  std::array<int64_t, kNumLabels> n_per_class{};
  std::vector<std::array<double, kNumLabels>> mass(static_cast<size_t>(m.dim));
  for (auto& row : mass) row.fill(0.0);
  for (const auto& [x, y] : data) {
    ++n_per_class[label_id(y)];
    for (const auto& [idx, w] : x.entries) mass[static_cast<size_t>(idx)][label_id(y)] += w;
  }
  const double n = static_cast<double>(data.size());
  const double v_mass = static_cast<double>(m.dim);
  // class term distribution q = mass/class_mass is invariant under dataset
  // duplication; scaling it to a fixed total V keeps multinomial ratios
  std::array<double, kNumLabels> class_mass{};
  for (int t = 0; t < m.dim; ++t)
    for (int c = 0; c < kNumLabels; ++c)
      class_mass[static_cast<size_t>(c)] += mass[static_cast<size_t>(t)][static_cast<size_t>(c)];
  for (int c = 0; c < kNumLabels; ++c) {
    m.class_present[static_cast<size_t>(c)] = n_per_class[static_cast<size_t>(c)] > 0;
    m.log_prior[static_cast<size_t>(c)] =
        m.class_present[static_cast<size_t>(c)]
            ? std::log(static_cast<double>(n_per_class[static_cast<size_t>(c)]) / n)
            : kNegInf;
  }
  m.log_likelihood.resize(static_cast<size_t>(m.dim));
  for (int t = 0; t < m.dim; ++t) {
    for (int c = 0; c < kNumLabels; ++c) {
      if (!m.class_present[static_cast<size_t>(c)]) {
        m.log_likelihood[static_cast<size_t>(t)][static_cast<size_t>(c)] = 0.0;
        continue;
      }
      const double q = class_mass[static_cast<size_t>(c)] > 0.0
                           ? mass[static_cast<size_t>(t)][static_cast<size_t>(c)] /
                                 class_mass[static_cast<size_t>(c)]
                           : 0.0;
      const double scaled_total = class_mass[static_cast<size_t>(c)] > 0.0 ? v_mass : 0.0;
      m.log_likelihood[static_cast<size_t>(t)][static_cast<size_t>(c)] =
          std::log((alpha + v_mass * q) / (alpha * v_mass + scaled_total));
    }
  }
  return m;
}

std::array<double, kNumLabels> nb_scores(const NbModel& m, const SparseVector& x) {
  if (x.dim != m.dim) throw DataError("nb_scores: dimension mismatch");
  std::array<double, kNumLabels> s = m.log_prior;
  for (const auto& [idx, w] : x.entries)
    for (int c = 0; c < kNumLabels; ++c)
      if (m.class_present[static_cast<size_t>(c)])
        s[static_cast<size_t>(c)] += w * m.log_likelihood[static_cast<size_t>(idx)][static_cast<size_t>(c)];
  return s;
}

Label nb_predict(const NbModel& m, const SparseVector& x) {
  const auto s = nb_scores(m, x);
  int best = -1;
  for (int c = 0; c < kNumLabels; ++c) {
    if (!m.class_present[static_cast<size_t>(c)]) continue;
    if (best < 0 || s[static_cast<size_t>(c)] > s[static_cast<size_t>(best)]) best = c;
  }
  if (best < 0) throw InternalError("nb_predict: no classes present");
  return label_from_id(best);
}

namespace {

double sparse_dot_dense(const SparseVector& x, const std::vector<double>& w) {
  double s = 0.0;
  for (const auto& [idx, v] : x.entries) s += v * w[static_cast<size_t>(idx)];
  return s;
}

struct BinaryProblem {
  std::vector<std::pair<const SparseVector*, int>> examples;  // (x, +1/-1)
};

double binary_objective(const std::vector<double>& w, double bias, const BinaryProblem& prob,
                        PairLoss loss, double c) {
  double obj = 0.0;
  for (double v : w) obj += v * v;
  obj *= 0.5;
  for (const auto& [x, y] : prob.examples) {
    const double s = sparse_dot_dense(*x, w) + bias;
    const double m = static_cast<double>(y) * s;
    if (loss == PairLoss::Logistic) {
      // log(1 + exp(-m)) computed stably
      obj += c * (m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m)));
    } else {
      obj += c * std::max(0.0, 1.0 - m);
    }
  }
  return obj;
}

void train_logistic(BinaryProblem& prob, int dim, double c, int max_iters, double tol,
                    std::vector<double>& w, double& bias,
                    std::vector<double>* trace = nullptr) {
  w.assign(static_cast<size_t>(dim), 0.0);
  bias = 0.0;
  double obj = binary_objective(w, bias, prob, PairLoss::Logistic, c);
  if (trace) trace->push_back(obj);
  std::vector<double> gw(static_cast<size_t>(dim));
  std::vector<double> w_try(static_cast<size_t>(dim));
  for (int iter = 0; iter < max_iters; ++iter) {
    std::copy(w.begin(), w.end(), gw.begin());
    double gb = 0.0;
    for (const auto& [x, y] : prob.examples) {
      const double s = sparse_dot_dense(*x, w) + bias;
      const double m = static_cast<double>(y) * s;
      const double sig = 1.0 / (1.0 + std::exp(m));  // sigmoid(-m)
      const double coef = -c * static_cast<double>(y) * sig;
      for (const auto& [idx, v] : x->entries) gw[static_cast<size_t>(idx)] += coef * v;
      gb += coef;
    }
    double g2 = gb * gb;
    for (double g : gw) g2 += g * g;
    if (g2 < 1e-18) break;
    // backtracking line search, Armijo condition
    double step = 1.0;
    double new_obj = obj;
    double b_try = bias;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      for (size_t i = 0; i < w.size(); ++i) w_try[i] = w[i] - step * gw[i];
      b_try = bias - step * gb;
      new_obj = binary_objective(w_try, b_try, prob, PairLoss::Logistic, c);
      if (new_obj <= obj - 1e-4 * step * g2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    w.swap(w_try);
    bias = b_try;
    const double decrease = obj - new_obj;
    obj = new_obj;
    if (trace) trace->push_back(obj);
    if (decrease < tol * std::max(1.0, std::abs(obj))) break;
  }
}

void train_hinge(BinaryProblem& prob, int dim, double c, int max_iters, double tol,
                 std::vector<double>& w, double& bias) {
  // Deterministic epoch-ordered subgradient sweep with decaying steps and
  // iterate averaging. Per-example subgradient of the objective split over n
  // examples: w/n - C*y*x on margin violations.
  const double n = static_cast<double>(prob.examples.size());
  std::vector<double> cur(static_cast<size_t>(dim), 0.0);
  std::vector<double> avg(static_cast<size_t>(dim), 0.0);
  double cur_b = 0.0, avg_b = 0.0;
  int64_t t = 0;
  double prev_obj = binary_objective(avg, avg_b, prob, PairLoss::Hinge, c);
  for (int epoch = 0; epoch < max_iters; ++epoch) {
    for (const auto& [x, y] : prob.examples) {
      ++t;
      const double eta = 1.0 / std::sqrt(static_cast<double>(t));
      const double m = static_cast<double>(y) * (sparse_dot_dense(*x, cur) + cur_b);
      const double keep = 1.0 - eta / n;
      for (double& v : cur) v *= keep;
      if (m < 1.0) {
        for (const auto& [idx, v] : x->entries)
          cur[static_cast<size_t>(idx)] += eta * c * static_cast<double>(y) * v;
        cur_b += eta * c * static_cast<double>(y);
      }
      const double blend = 1.0 / static_cast<double>(t);
      for (size_t i = 0; i < cur.size(); ++i) avg[i] += blend * (cur[i] - avg[i]);
      avg_b += blend * (cur_b - avg_b);
    }
    const double obj = binary_objective(avg, avg_b, prob, PairLoss::Hinge, c);
    if (epoch > 0 && prev_obj - obj < tol * std::max(1.0, std::abs(obj)) && prev_obj >= obj)
      break;
    prev_obj = std::min(prev_obj, obj);
  }
  w = avg;
  bias = avg_b;
}

}  // namespace

PairwiseLinearModel train_pairwise(const std::vector<LabeledVector>& data, PairLoss loss,
                                   const PairTrainOptions& opts) {
  check_dims(data);
  std::set<int> present;
  for (const auto& [x, y] : data) present.insert(label_id(y));
  if (present.size() < 2) throw DataError("train_pairwise: need at least 2 classes");
  PairwiseLinearModel m;
  m.dim = data.front().first.dim;
  m.loss = loss;
  m.c = opts.c;
  for (auto ita = present.begin(); ita != present.end(); ++ita) {
    for (auto itb = std::next(ita); itb != present.end(); ++itb) {
      BinaryProblem prob;
      for (const auto& [x, y] : data) {
        if (label_id(y) == *ita)
          prob.examples.emplace_back(&x, +1);
        else if (label_id(y) == *itb)
          prob.examples.emplace_back(&x, -1);
      }
      PairwiseLinearModel::Pair pair;
      pair.class_a = *ita;
      pair.class_b = *itb;
      if (loss == PairLoss::Logistic)
        train_logistic(prob, m.dim, opts.c, opts.max_iters, opts.tol, pair.w, pair.bias,
                       m.pairs.empty() ? opts.objective_trace : nullptr);
      else
        train_hinge(prob, m.dim, opts.c, opts.max_iters, opts.tol, pair.w, pair.bias);
      m.pairs.push_back(std::move(pair));
    }
  }
  return m;
}

double pair_objective(const std::vector<double>& w, double bias,
                      const std::vector<std::pair<SparseVector, int>>& examples, PairLoss loss,
                      double c) {
  BinaryProblem prob;
  for (const auto& [x, y] : examples) prob.examples.emplace_back(&x, y);
  return binary_objective(w, bias, prob, loss, c);
}

OvoPrediction predict_ovo(const PairwiseLinearModel& m, const SparseVector& x) {
  if (x.dim != m.dim) throw DataError("predict_ovo: dimension mismatch");
  if (m.pairs.empty()) throw DataError("predict_ovo: model has no pairs");
  OvoPrediction out;
  std::set<int> present;
  for (const auto& pair : m.pairs) {
    present.insert(pair.class_a);
    present.insert(pair.class_b);
    const double s = sparse_dot_dense(x, pair.w) + pair.bias;
    if (s > 0.0) {
      ++out.votes[static_cast<size_t>(pair.class_a)];
      out.margin_sums[static_cast<size_t>(pair.class_a)] += s;
    } else if (s < 0.0) {
      ++out.votes[static_cast<size_t>(pair.class_b)];
      out.margin_sums[static_cast<size_t>(pair.class_b)] += -s;
    }
    // exactly zero: the pair abstains
  }
  int best = -1;
  for (int c : present) {
    if (best < 0) {
      best = c;
      continue;
    }
    if (out.votes[static_cast<size_t>(c)] > out.votes[static_cast<size_t>(best)] ||
        (out.votes[static_cast<size_t>(c)] == out.votes[static_cast<size_t>(best)] &&
         out.margin_sums[static_cast<size_t>(c)] > out.margin_sums[static_cast<size_t>(best)]))
      best = c;
    // equal votes and margins keep the smaller class id (set iteration order)
  }
  out.label = label_from_id(best);
  return out;
}

KnnModel train_knn(const std::vector<LabeledVector>& data, int k) {
  check_dims(data);
  if (k < 1) throw ConfigError("train_knn: k must be >= 1");
  KnnModel m;
  m.dim = data.front().first.dim;
  m.k = k;
  for (const auto& [x, y] : data) {
    SparseVector v = x;
    const double nrm = v.norm();
    if (nrm > 0.0)
      for (auto& [idx, w] : v.entries) w /= nrm;
    m.vectors.push_back(std::move(v));
    m.labels.push_back(y);
  }
  return m;
}

Label knn_predict(const KnnModel& m, const SparseVector& x) {
  if (m.vectors.empty()) throw DataError("knn_predict: empty model");
  if (x.dim != m.dim) throw DataError("knn_predict: dimension mismatch");
  SparseVector q = x;
  const double nrm = q.norm();
  if (nrm > 0.0)
    for (auto& [idx, w] : q.entries) w /= nrm;
  const size_t n = m.vectors.size();
  std::vector<std::pair<double, size_t>> sims(n);
  for (size_t i = 0; i < n; ++i) sims[i] = {q.dot(m.vectors[i]), i};
  const size_t k = std::min<size_t>(static_cast<size_t>(m.k), n);
  // similarity ties resolved toward the lower training index
  std::partial_sort(sims.begin(), sims.begin() + static_cast<long>(k), sims.end(),
                    [](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first > b.first;
                      return a.second < b.second;
                    });
  std::array<int, kNumLabels> votes{};
  std::array<size_t, kNumLabels> first_rank{};
  first_rank.fill(n + 1);
  for (size_t r = 0; r < k; ++r) {
    const int lid = label_id(m.labels[sims[r].second]);
    ++votes[static_cast<size_t>(lid)];
    first_rank[static_cast<size_t>(lid)] = std::min(first_rank[static_cast<size_t>(lid)], r);
  }
  int best = -1;
  for (int c = 0; c < kNumLabels; ++c) {
    if (votes[static_cast<size_t>(c)] == 0) continue;
    if (best < 0 || votes[static_cast<size_t>(c)] > votes[static_cast<size_t>(best)] ||
        (votes[static_cast<size_t>(c)] == votes[static_cast<size_t>(best)] &&
         first_rank[static_cast<size_t>(c)] < first_rank[static_cast<size_t>(best)]))
      best = c;
  }
  return label_from_id(best);
}

}  // namespace secfn
