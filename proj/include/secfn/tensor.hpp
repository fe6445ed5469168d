#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "secfn/kernels.hpp"

namespace secfn {

// A named trainable matrix with its accumulated gradient.
struct Param {
  std::string name;
  Mat w;
  Mat g;
  bool pad_row0 = false;  // row 0 is a padding row: kept zero, never updated

  Param() = default;
  Param(std::string n, int r, int c) : name(std::move(n)), w(r, c), g(r, c) {}

  void zero_grad() { std::fill(g.a.begin(), g.a.end(), 0.0); }
};

// One node of the reverse-mode graph. Values are matrices; the graph is a
// tape of nodes in construction order.
struct Var {
  Mat val;
  Mat grad;
  bool needs_grad = false;

  int rows() const { return val.rows; }
  int cols() const { return val.cols; }
};

// Single-use computation graph. Build a forward pass, call backward once,
// then flush parameter gradients. All op backward passes accumulate in a
// fixed order, so results do not depend on thread count.
class Tape {
 public:
  Var* input(const Mat& m, bool needs_grad = false);
  Var* zeros(int r, int c);
  Var* param(Param& p);  // leaf linked to p; flush_param_grads adds into p.g

  Var* matmul(Var* a, Var* b);
  Var* add(Var* a, Var* b);          // same shape
  Var* add_rowvec(Var* a, Var* b);   // b is 1 x cols, broadcast over rows
  Var* mul(Var* a, Var* b);          // elementwise
  Var* scale(Var* a, double s);
  Var* sigmoid(Var* a);
  Var* tanh(Var* a);
  Var* relu(Var* a);
  Var* slice_cols(Var* a, int c0, int c1);
  Var* concat_cols(const std::vector<Var*>& xs);
  // Row gather; index -1 yields a zero row. Backward scatter-adds.
  Var* gather_rows(Var* a, std::vector<int> idx);
  // a is (groups*len) x c; output row (g, p) is the concatenation of rows
  // g*len+p .. g*len+p+h-1. Output is groups*(len-h+1) x h*c.
  Var* im2col_rows(Var* a, int groups, int len, int h);
  // a is (groups*period) x c; columnwise max over each group of rows.
  Var* rows_max_pool(Var* a, int groups);
  Var* colwise_mul(Var* a, Var* col);  // col is rows x 1
  // h = m .* a + (1-m) .* b with a constant 0/1 column mask.
  Var* mask_mix(const Mat& mask_col, Var* a, Var* b);
  Var* softmax_rows(Var* a);
  // Entries where mask == 0 get probability 0; fully masked rows stay zero.
  Var* masked_softmax_rows(Var* a, const Mat& mask);
  Var* dropout(Var* a, const Mat& keep_mask, double keep_prob);
  // Mean cross-entropy of logits rows against integer labels; result is 1x1.
  Var* cross_entropy_mean(Var* logits, const std::vector<int>& labels);
  Var* sum_all(Var* a);  // 1x1

  // Seeds d(loss)/d(loss) = seed and runs the reverse sweep.
  void backward(Var* loss, double seed = 1.0);
  // Adds scale * leaf-grad into each linked Param's g.
  void flush_param_grads(double scale = 1.0);

  size_t size() const { return nodes_.size(); }

 private:
  Var* make(int r, int c, bool needs_grad);
  void record(std::function<void()> fn) { backs_.push_back(std::move(fn)); }

  std::vector<std::unique_ptr<Var>> nodes_;
  std::vector<std::function<void()>> backs_;  // one per node, parallel to nodes_
  std::vector<std::pair<Param*, Var*>> param_links_;
  bool ran_backward_ = false;
};

}  // namespace secfn
