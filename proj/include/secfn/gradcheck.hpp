#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace secfn {

struct GradCheckResult {
  std::string block;
  double max_rel_err = 0.0;
  int trials = 0;
  bool pass = false;
};

// Central finite-difference checks for every differentiable building block
// and all three fusion architectures end-to-end, on randomized small shapes.
std::vector<GradCheckResult> run_gradient_checks(int trials_per_block = 20, uint64_t seed = 42,
                                                 double eps = 1e-5, double tol = 1e-4);

}  // namespace secfn
