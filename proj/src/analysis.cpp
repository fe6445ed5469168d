#include "secfn/analysis.hpp"

#include <algorithm>
#include <map>

namespace secfn {

namespace {

struct YearAgg {
  std::array<int64_t, kNumLabels> per_class{};
  int64_t chapters = 0;
  int64_t papers = 0;
};

std::map<int, YearAgg> aggregate(const Corpus& corpus) {
  std::vector<std::string> missing;
  std::map<int, YearAgg> by_year;
  for (const Article& a : corpus) {
    bool bad = !a.year.has_value();
    for (const Chapter& c : a.chapters) bad = bad || !c.label.has_value();
    if (bad) {
      missing.push_back(a.id);
      continue;
    }
    YearAgg& agg = by_year[*a.year];
    ++agg.papers;
    for (const Chapter& c : a.chapters) {
      ++agg.chapters;
      ++agg.per_class[static_cast<size_t>(label_id(*c.label))];
    }
  }
  if (!missing.empty()) {
    std::string msg = "time-series analysis needs year and labels; offending articles:";
    for (const auto& id : missing) msg += " " + id;
    throw DataError(msg);
  }
  return by_year;
}

}  // namespace

YearlyTable yearly_proportion(const Corpus& corpus) {
  YearlyTable t;
  t.kind = YearlyTable::Kind::Proportion;
  for (const auto& [year, agg] : aggregate(corpus)) {
    for (Label l : all_labels())
      t.rows.push_back({year, l,
                        static_cast<double>(agg.per_class[static_cast<size_t>(label_id(l))]) /
                            static_cast<double>(agg.chapters)});
  }
  return t;
}

YearlyTable yearly_avg_frequency(const Corpus& corpus) {
  YearlyTable t;
  t.kind = YearlyTable::Kind::AvgFrequency;
  for (const auto& [year, agg] : aggregate(corpus)) {
    for (Label l : all_labels())
      t.rows.push_back({year, l,
                        static_cast<double>(agg.per_class[static_cast<size_t>(label_id(l))]) /
                            static_cast<double>(agg.papers)});
  }
  return t;
}

std::vector<ParetoRow> pareto_data(const std::vector<std::pair<std::string, double>>& scores,
                                   int top_k, int drop_top) {
  if (top_k <= 0) throw ConfigError("pareto_data: top_k must be positive");
  if (drop_top < 0) throw ConfigError("pareto_data: drop_top must be nonnegative");
  if (scores.empty()) throw DataError("pareto_data: no scores");
  std::vector<std::pair<std::string, double>> sorted = scores;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (drop_top >= static_cast<int>(sorted.size()))
    throw DataError("pareto_data: drop_top removes every score");
  sorted.erase(sorted.begin(), sorted.begin() + drop_top);
  if (static_cast<int>(sorted.size()) > top_k) sorted.resize(static_cast<size_t>(top_k));
  double total = 0.0;
  for (const auto& [term, s] : sorted) total += s;
  std::vector<ParetoRow> out;
  out.reserve(sorted.size());
  double running = 0.0;
  for (size_t i = 0; i < sorted.size(); ++i) {
    running += sorted[i].second;
    ParetoRow row;
    row.rank = static_cast<int>(i) + 1;
    row.term = sorted[i].first;
    row.score = sorted[i].second;
    row.cumulative_share = total > 0.0 ? running / total : 0.0;
    out.push_back(std::move(row));
  }
  if (!out.empty()) out.back().cumulative_share = 1.0;  // forced exact endpoint
  return out;
}

}  // namespace secfn
