#include "secfn/metrics.hpp"

#include <cstdio>
#include <sstream>

#include "secfn/common.hpp"

namespace secfn {

int64_t ConfusionMatrix::total() const {
  int64_t t = 0;
  for (const auto& row : counts)
    for (int64_t c : row) t += c;
  return t;
}

int64_t ConfusionMatrix::trace() const {
  int64_t t = 0;
  for (int i = 0; i < kNumLabels; ++i) t += counts[static_cast<size_t>(i)][static_cast<size_t>(i)];
  return t;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
  for (int i = 0; i < kNumLabels; ++i)
    for (int j = 0; j < kNumLabels; ++j)
      counts[static_cast<size_t>(i)][static_cast<size_t>(j)] +=
          o.counts[static_cast<size_t>(i)][static_cast<size_t>(j)];
  return *this;
}

PerClassMetrics per_class_prf(const ConfusionMatrix& cm, Label c) {
  int64_t tp = cm.at(c, c);
  int64_t fp = 0, fn = 0;
  for (Label g : all_labels()) {
    if (g != c) fp += cm.at(g, c);
  }
  for (Label p : all_labels()) {
    if (p != c) fn += cm.at(c, p);
  }
  PerClassMetrics m;
  if (tp + fp == 0) {
    m.precision = 0.0;
    m.precision_undefined = true;
  } else {
    m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  }
  if (tp + fn == 0) {
    m.recall = 0.0;
    m.recall_undefined = true;
  } else {
    m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  }
  m.f1 = (m.precision + m.recall) > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

MacroMetrics macro_metrics(const ConfusionMatrix& cm, const std::vector<Label>& classes) {
  if (classes.empty()) throw ConfigError("macro_metrics: empty class set");
  MacroMetrics mm;
  for (Label c : classes) {
    const PerClassMetrics m = per_class_prf(cm, c);
    mm.precision += m.precision;
    mm.recall += m.recall;
  }
  mm.precision /= static_cast<double>(classes.size());
  mm.recall /= static_cast<double>(classes.size());
  mm.f1 = (mm.precision + mm.recall) > 0.0
              ? 2.0 * mm.precision * mm.recall / (mm.precision + mm.recall)
              : 0.0;
  return mm;
}

std::vector<Label> default_macro_classes() {
  const auto s = substantive_labels();
  return {s.begin(), s.end()};
}

MetricsReport evaluate_predictions(const std::vector<Label>& gold,
                                   const std::vector<Label>& predicted,
                                   const std::vector<Label>& macro_classes) {
  if (gold.size() != predicted.size())
    throw InternalError("evaluate_predictions: gold/predicted size mismatch");
  MetricsReport r;
  r.macro_classes = macro_classes;
  r.n_evaluated = static_cast<int64_t>(gold.size());
  for (size_t i = 0; i < gold.size(); ++i) r.cm.add(gold[i], predicted[i]);
  return r;
}

std::string MetricsReport::to_text(const std::string& title) const {
  std::ostringstream os;
  char buf[256];
  os << title << " (" << n_evaluated << " chapters)\n";
  std::snprintf(buf, sizeof(buf), "%-14s %10s %10s %10s\n", "class", "precision", "recall", "f1");
  os << buf;
  for (Label c : all_labels()) {
    const PerClassMetrics m = per_class(c);
    std::snprintf(buf, sizeof(buf), "%-14s %10.4f %10.4f %10.4f%s\n", label_name(c).c_str(),
                  m.precision, m.recall, m.f1,
                  (m.precision_undefined || m.recall_undefined) ? "  (0/0 -> 0)" : "");
    os << buf;
  }
  const MacroMetrics mm = macro();
  std::string cls;
  for (Label c : macro_classes) cls += (cls.empty() ? "" : ",") + label_name(c);
  std::snprintf(buf, sizeof(buf), "%-14s %10.4f %10.4f %10.4f  over {%s}\n", "macro",
                mm.precision, mm.recall, mm.f1, cls.c_str());
  os << buf;
  return os.str();
}

}  // namespace secfn
