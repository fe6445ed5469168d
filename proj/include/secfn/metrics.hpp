#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "secfn/label.hpp"

namespace secfn {

struct ConfusionMatrix {
  std::array<std::array<int64_t, kNumLabels>, kNumLabels> counts{};  // [gold][pred]

  void add(Label gold, Label pred, int64_t n = 1) {
    counts[static_cast<size_t>(label_id(gold))][static_cast<size_t>(label_id(pred))] += n;
  }
  int64_t at(Label gold, Label pred) const {
    return counts[static_cast<size_t>(label_id(gold))][static_cast<size_t>(label_id(pred))];
  }
  int64_t total() const;
  int64_t trace() const;
  ConfusionMatrix& operator+=(const ConfusionMatrix& o);
};

struct PerClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_undefined = false;  // 0/0 reported as 0, flagged
  bool recall_undefined = false;
};

PerClassMetrics per_class_prf(const ConfusionMatrix& cm, Label c);

struct MacroMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;  // 2PR/(P+R) of the macro values, not a mean of per-class F1
};

MacroMetrics macro_metrics(const ConfusionMatrix& cm, const std::vector<Label>& classes);

struct MetricsReport {
  ConfusionMatrix cm;
  std::vector<Label> macro_classes;  // class set used for macro averaging
  int64_t n_evaluated = 0;

  PerClassMetrics per_class(Label c) const { return per_class_prf(cm, c); }
  MacroMetrics macro() const { return macro_metrics(cm, macro_classes); }
  std::string to_text(const std::string& title) const;
};

std::vector<Label> default_macro_classes();  // the five substantive classes

MetricsReport evaluate_predictions(const std::vector<Label>& gold,
                                   const std::vector<Label>& predicted,
                                   const std::vector<Label>& macro_classes);

}  // namespace secfn
