#include "secfn/split.hpp"

#include <algorithm>
#include <numeric>

#include "secfn/rng.hpp"

namespace secfn {

FoldAssignment make_split(int n_articles, const SplitPlan& plan) {
  if (n_articles < 1) throw DataError("make_split: empty corpus");
  std::vector<int> order(static_cast<size_t>(n_articles));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(plan.seed);
  rng.shuffle(order);

  FoldAssignment out;
  out.fold_of.assign(static_cast<size_t>(n_articles), 0);
  if (plan.kind == SplitPlan::Kind::KFold) {
    if (plan.k < 2) throw ConfigError("make_split: k must be >= 2");
    if (n_articles < plan.k)
      throw DataError("make_split: fewer articles (" + std::to_string(n_articles) +
                      ") than folds (" + std::to_string(plan.k) + ")");
    out.n_folds = plan.k;
    for (int pos = 0; pos < n_articles; ++pos)
      out.fold_of[static_cast<size_t>(order[static_cast<size_t>(pos)])] = pos % plan.k;
  } else {
    if (n_articles < 3) throw DataError("make_split: holdout needs at least 3 articles");
    out.n_folds = 3;
    // 8:1:1 with every part nonempty
    int n_valid = std::max(1, n_articles / 10);
    int n_test = std::max(1, n_articles - (n_articles * 8) / 10 - n_valid);
    const int n_train = n_articles - n_valid - n_test;
    for (int pos = 0; pos < n_articles; ++pos) {
      int part = 0;
      if (pos >= n_train) part = pos < n_train + n_valid ? 1 : 2;
      out.fold_of[static_cast<size_t>(order[static_cast<size_t>(pos)])] = part;
    }
  }
  return out;
}

}  // namespace secfn
