#pragma once

#include <cstdint>
#include <vector>

#include "secfn/common.hpp"

namespace secfn {

// Splits are always by article so that no article's chapters straddle a
// boundary (context windows and fitted statistics would otherwise leak).
struct SplitPlan {
  enum class Kind { KFold, Holdout } kind = Kind::KFold;
  int k = 5;           // KFold only
  uint64_t seed = 42;  // shuffle seed
};

struct FoldAssignment {
  // KFold: fold_of[i] in 0..k-1. Holdout: 0 = train, 1 = valid, 2 = test.
  std::vector<int> fold_of;
  int n_folds = 0;
};

FoldAssignment make_split(int n_articles, const SplitPlan& plan);

}  // namespace secfn
