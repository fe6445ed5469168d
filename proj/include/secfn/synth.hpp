#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "secfn/corpus.hpp"

namespace secfn {

// Synthetic corpus generator: canonical chapter ordering, strong title
// keywords with a configurable ambiguity rate, diluted content keywords, and
// year-dependent composition. Ships with a ground-truth sidecar so corpus
// statistics can be checked against the generator's own bookkeeping.
struct SynthConfig {
  int n_articles = 500;
  uint64_t seed = 42;
  int year_min = 1989;
  int year_max = 2020;
  double title_ambiguity = 0.25;   // chance a title keyword is a generic term
  double content_signal = 0.25;    // chance a sentence carries a class keyword
  double content_leak = 0.70;      // chance a sentence carries a wrong-class keyword
  double p_other = 0.15;           // chance an Other chapter is inserted
};

struct SynthBookkeeping {
  uint64_t seed = 0;
  int n_articles = 0;
  std::array<int64_t, kNumLabels> class_counts{};
  struct YearRow {
    int64_t papers = 0;
    std::array<int64_t, kNumLabels> class_counts{};
  };
  std::map<int, YearRow> per_year;
};

struct SynthResult {
  Corpus corpus;
  SynthBookkeeping bookkeeping;
};

SynthResult generate_synth(const SynthConfig& cfg);

void write_bookkeeping(const SynthBookkeeping& bk, const std::string& path);
SynthBookkeeping read_bookkeeping(const std::string& path);

}  // namespace secfn
