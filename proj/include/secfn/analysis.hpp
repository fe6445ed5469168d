#pragma once

#include <string>
#include <vector>

#include "secfn/corpus.hpp"

namespace secfn {

struct YearlyTable {
  enum class Kind { Proportion, AvgFrequency } kind = Kind::Proportion;
  struct Row {
    int year = 0;
    Label label = Label::Introduction;
    double value = 0.0;
  };
  std::vector<Row> rows;  // ordered by (year, label id)
};

// Per (year, class): class chapter count / total chapter count that year.
YearlyTable yearly_proportion(const Corpus& corpus);

// Per (year, class): class chapter count / paper count that year.
YearlyTable yearly_avg_frequency(const Corpus& corpus);

struct ParetoRow {
  int rank = 0;
  std::string term;
  double score = 0.0;
  double cumulative_share = 0.0;
};

// Sort scores descending, drop the drop_top largest outliers, keep top_k;
// cumulative share is over the kept scores and ends at exactly 1.
std::vector<ParetoRow> pareto_data(const std::vector<std::pair<std::string, double>>& scores,
                                   int top_k = 100, int drop_top = 0);

}  // namespace secfn
