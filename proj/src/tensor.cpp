#include "secfn/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace secfn {

namespace {

void check_finite(const Mat& m, const char* op) {
  for (double x : m.a)
    if (!std::isfinite(x)) throw InternalError(std::string("non-finite value after ") + op);
  (void)m;
  (void)op;
}

}  // namespace

Var* Tape::make(int r, int c, bool needs_grad) {
  auto v = std::make_unique<Var>();
  v->val = Mat(r, c);
  if (needs_grad) v->grad = Mat(r, c);
  v->needs_grad = needs_grad;
  nodes_.push_back(std::move(v));
  backs_.emplace_back();
  return nodes_.back().get();
}

Var* Tape::input(const Mat& m, bool needs_grad) {
  Var* v = make(m.rows, m.cols, needs_grad);
  v->val = m;
  return v;
}

Var* Tape::zeros(int r, int c) { return make(r, c, false); }

Var* Tape::param(Param& p) {
  Var* v = input(p.w, true);
  param_links_.emplace_back(&p, v);
  return v;
}

Var* Tape::matmul(Var* a, Var* b) {
  if (a->cols() != b->rows()) throw InternalError("tape matmul: inner dims differ");
  Var* out = make(a->rows(), b->cols(), a->needs_grad || b->needs_grad);
  kernels::matmul(a->val, b->val, out->val);
  if (out->needs_grad) {
    backs_.back() = [a, b, out] {
      if (a->needs_grad) kernels::matmul_nt(out->grad, b->val, a->grad);
      if (b->needs_grad) kernels::matmul_tn(a->val, out->grad, b->grad);
    };
  }
  return out;
}

Var* Tape::add(Var* a, Var* b) {
  if (!a->val.same_shape(b->val)) throw InternalError("tape add: shape mismatch");
  Var* out = make(a->rows(), a->cols(), a->needs_grad || b->needs_grad);
  for (size_t i = 0; i < out->val.size(); ++i) out->val.a[i] = a->val.a[i] + b->val.a[i];
  if (out->needs_grad) {
    backs_.back() = [a, b, out] {
      if (a->needs_grad)
        for (size_t i = 0; i < out->grad.size(); ++i) a->grad.a[i] += out->grad.a[i];
      if (b->needs_grad)
        for (size_t i = 0; i < out->grad.size(); ++i) b->grad.a[i] += out->grad.a[i];
    };
  }
  return out;
}

Var* Tape::add_rowvec(Var* a, Var* b) {
  if (b->rows() != 1 || b->cols() != a->cols())
    throw InternalError("tape add_rowvec: bias must be 1 x cols");
  Var* out = make(a->rows(), a->cols(), a->needs_grad || b->needs_grad);
  for (int i = 0; i < a->rows(); ++i) {
    const double* ai = a->val.row(i);
    double* oi = out->val.row(i);
    for (int j = 0; j < a->cols(); ++j) oi[j] = ai[j] + b->val.a[static_cast<size_t>(j)];
  }
  if (out->needs_grad) {
    backs_.back() = [a, b, out] {
      if (a->needs_grad)
        for (size_t i = 0; i < out->grad.size(); ++i) a->grad.a[i] += out->grad.a[i];
      if (b->needs_grad)
        for (int i = 0; i < out->grad.rows; ++i) {
          const double* gi = out->grad.row(i);
          for (int j = 0; j < out->grad.cols; ++j) b->grad.a[static_cast<size_t>(j)] += gi[j];
        }
    };
  }
  return out;
}

Var* Tape::mul(Var* a, Var* b) {
  if (!a->val.same_shape(b->val)) throw InternalError("tape mul: shape mismatch");
  Var* out = make(a->rows(), a->cols(), a->needs_grad || b->needs_grad);
  for (size_t i = 0; i < out->val.size(); ++i) out->val.a[i] = a->val.a[i] * b->val.a[i];
  if (out->needs_grad) {
    backs_.back() = [a, b, out] {
      if (a->needs_grad)
        for (size_t i = 0; i < out->grad.size(); ++i) a->grad.a[i] += out->grad.a[i] * b->val.a[i];
      if (b->needs_grad)
        for (size_t i = 0; i < out->grad.size(); ++i) b->grad.a[i] += out->grad.a[i] * a->val.a[i];
    };
  }
  return out;
}

Var* Tape::scale(Var* a, double s) {
  Var* out = make(a->rows(), a->cols(), a->needs_grad);
  for (size_t i = 0; i < out->val.size(); ++i) out->val.a[i] = a->val.a[i] * s;
  if (out->needs_grad) {
    backs_.back() = [a, out, s] {
      for (size_t i = 0; i < out->grad.size(); ++i) a->grad.a[i] += out->grad.a[i] * s;
    };
  }
  return out;
}

Var* Tape::sigmoid(Var* a) {
  Var* out = make(a->rows(), a->cols(), a->needs_grad);
  for (size_t i = 0; i < out->val.size(); ++i) out->val.a[i] = 1.0 / (1.0 + std::exp(-a->val.a[i]));
  if (out->needs_grad) {
    backs_.back() = [a, out] {
      for (size_t i = 0; i < out->grad.size(); ++i) {
        const double y = out->val.a[i];
        a->grad.a[i] += out->grad.a[i] * y * (1.0 - y);
      }
    };
  }
  return out;
}

Var* Tape::tanh(Var* a) {
  Var* out = make(a->rows(), a->cols(), a->needs_grad);
  for (size_t i = 0; i < out->val.size(); ++i) out->val.a[i] = std::tanh(a->val.a[i]);
  if (out->needs_grad) {
    backs_.back() = [a, out] {
      for (size_t i = 0; i < out->grad.size(); ++i) {
        const double y = out->val.a[i];
        a->grad.a[i] += out->grad.a[i] * (1.0 - y * y);
      }
    };
  }
  return out;
}

Var* Tape::relu(Var* a) {
  Var* out = make(a->rows(), a->cols(), a->needs_grad);
  for (size_t i = 0; i < out->val.size(); ++i) out->val.a[i] = a->val.a[i] > 0.0 ? a->val.a[i] : 0.0;
  if (out->needs_grad) {
    backs_.back() = [a, out] {
      for (size_t i = 0; i < out->grad.size(); ++i)
        if (a->val.a[i] > 0.0) a->grad.a[i] += out->grad.a[i];
    };
  }
  return out;
}

Var* Tape::slice_cols(Var* a, int c0, int c1) {
  if (c0 < 0 || c1 > a->cols() || c0 >= c1) throw InternalError("tape slice_cols: bad range");
  Var* out = make(a->rows(), c1 - c0, a->needs_grad);
  for (int i = 0; i < a->rows(); ++i)
    std::copy(a->val.row(i) + c0, a->val.row(i) + c1, out->val.row(i));
  if (out->needs_grad) {
    backs_.back() = [a, out, c0] {
      for (int i = 0; i < out->grad.rows; ++i) {
        const double* gi = out->grad.row(i);
        double* ai = a->grad.row(i) + c0;
        for (int j = 0; j < out->grad.cols; ++j) ai[j] += gi[j];
      }
    };
  }
  return out;
}

Var* Tape::concat_cols(const std::vector<Var*>& xs) {
  if (xs.empty()) throw InternalError("tape concat_cols: empty list");
  const int r = xs[0]->rows();
  int c = 0;
  bool ng = false;
  for (Var* x : xs) {
    if (x->rows() != r) throw InternalError("tape concat_cols: row mismatch");
    c += x->cols();
    ng = ng || x->needs_grad;
  }
  Var* out = make(r, c, ng);
  int off = 0;
  for (Var* x : xs) {
    for (int i = 0; i < r; ++i)
      std::copy(x->val.row(i), x->val.row(i) + x->cols(), out->val.row(i) + off);
    off += x->cols();
  }
  if (ng) {
    std::vector<Var*> parts = xs;
    backs_.back() = [parts, out] {
      int o = 0;
      for (Var* x : parts) {
        if (x->needs_grad)
          for (int i = 0; i < x->grad.rows; ++i) {
            const double* gi = out->grad.row(i) + o;
            double* xi = x->grad.row(i);
            for (int j = 0; j < x->cols(); ++j) xi[j] += gi[j];
          }
        o += x->cols();
      }
    };
  }
  return out;
}

Var* Tape::gather_rows(Var* a, std::vector<int> idx) {
  Var* out = make(static_cast<int>(idx.size()), a->cols(), a->needs_grad);
  for (size_t i = 0; i < idx.size(); ++i) {
    const int r = idx[i];
    if (r < 0) continue;  // zero row
    if (r >= a->rows()) throw InternalError("tape gather_rows: index out of range");
    std::copy(a->val.row(r), a->val.row(r) + a->cols(), out->val.row(static_cast<int>(i)));
  }
  if (out->needs_grad) {
    backs_.back() = [a, out, idx = std::move(idx)] {
      for (size_t i = 0; i < idx.size(); ++i) {
        const int r = idx[i];
        if (r < 0) continue;
        const double* gi = out->grad.row(static_cast<int>(i));
        double* ar = a->grad.row(r);
        for (int j = 0; j < a->grad.cols; ++j) ar[j] += gi[j];
      }
    };
  }
  return out;
}

Var* Tape::im2col_rows(Var* a, int groups, int len, int h) {
  if (a->rows() != groups * len) throw InternalError("tape im2col_rows: row count mismatch");
  if (h < 1 || h > len) throw InternalError("tape im2col_rows: bad filter height");
  const int c = a->cols();
  const int p = len - h + 1;
  Var* out = make(groups * p, h * c, a->needs_grad);
  for (int g = 0; g < groups; ++g)
    for (int q = 0; q < p; ++q) {
      double* orow = out->val.row(g * p + q);
      for (int j = 0; j < h; ++j)
        std::copy(a->val.row(g * len + q + j), a->val.row(g * len + q + j) + c, orow + j * c);
    }
  if (out->needs_grad) {
    backs_.back() = [a, out, groups, len, h, c, p] {
      for (int g = 0; g < groups; ++g)
        for (int q = 0; q < p; ++q) {
          const double* orow = out->grad.row(g * p + q);
          for (int j = 0; j < h; ++j) {
            double* ar = a->grad.row(g * len + q + j);
            for (int k = 0; k < c; ++k) ar[k] += orow[j * c + k];
          }
        }
    };
  }
  return out;
}

Var* Tape::rows_max_pool(Var* a, int groups) {
  if (groups < 1 || a->rows() % groups != 0) throw InternalError("tape rows_max_pool: bad groups");
  const int period = a->rows() / groups;
  const int c = a->cols();
  Var* out = make(groups, c, a->needs_grad);
  // argmax kept for the backward pass; first maximum wins on ties.
  auto arg = std::make_shared<std::vector<int>>(static_cast<size_t>(groups) * static_cast<size_t>(c));
  for (int g = 0; g < groups; ++g) {
    double* orow = out->val.row(g);
    int* arow = arg->data() + static_cast<size_t>(g) * static_cast<size_t>(c);
    for (int j = 0; j < c; ++j) {
      double best = a->val.at(g * period, j);
      int bi = 0;
      for (int p = 1; p < period; ++p) {
        const double v = a->val.at(g * period + p, j);
        if (v > best) {
          best = v;
          bi = p;
        }
      }
      orow[j] = best;
      arow[j] = bi;
    }
  }
  if (out->needs_grad) {
    backs_.back() = [a, out, groups, period, c, arg] {
      for (int g = 0; g < groups; ++g) {
        const double* grow = out->grad.row(g);
        const int* arow = arg->data() + static_cast<size_t>(g) * static_cast<size_t>(c);
        for (int j = 0; j < c; ++j) a->grad.at(g * period + arow[j], j) += grow[j];
      }
    };
  }
  return out;
}

Var* Tape::colwise_mul(Var* a, Var* col) {
  if (col->rows() != a->rows() || col->cols() != 1)
    throw InternalError("tape colwise_mul: column shape mismatch");
  Var* out = make(a->rows(), a->cols(), a->needs_grad || col->needs_grad);
  for (int i = 0; i < a->rows(); ++i) {
    const double m = col->val.at(i, 0);
    const double* ai = a->val.row(i);
    double* oi = out->val.row(i);
    for (int j = 0; j < a->cols(); ++j) oi[j] = ai[j] * m;
  }
  if (out->needs_grad) {
    backs_.back() = [a, col, out] {
      for (int i = 0; i < out->grad.rows; ++i) {
        const double* gi = out->grad.row(i);
        if (a->needs_grad) {
          const double m = col->val.at(i, 0);
          double* ai = a->grad.row(i);
          for (int j = 0; j < out->grad.cols; ++j) ai[j] += gi[j] * m;
        }
        if (col->needs_grad) {
          const double* ai = a->val.row(i);
          double s = 0.0;
          for (int j = 0; j < out->grad.cols; ++j) s += gi[j] * ai[j];
          col->grad.at(i, 0) += s;
        }
      }
    };
  }
  return out;
}

Var* Tape::mask_mix(const Mat& mask_col, Var* a, Var* b) {
  if (!a->val.same_shape(b->val) || mask_col.rows != a->rows() || mask_col.cols != 1)
    throw InternalError("tape mask_mix: shape mismatch");
  Var* out = make(a->rows(), a->cols(), a->needs_grad || b->needs_grad);
  for (int i = 0; i < a->rows(); ++i) {
    const double m = mask_col.at(i, 0);
    const double* ai = a->val.row(i);
    const double* bi = b->val.row(i);
    double* oi = out->val.row(i);
    for (int j = 0; j < a->cols(); ++j) oi[j] = m * ai[j] + (1.0 - m) * bi[j];
  }
  if (out->needs_grad) {
    backs_.back() = [a, b, out, mask = mask_col] {
      for (int i = 0; i < out->grad.rows; ++i) {
        const double m = mask.at(i, 0);
        const double* gi = out->grad.row(i);
        if (a->needs_grad && m != 0.0) {
          double* ai = a->grad.row(i);
          for (int j = 0; j < out->grad.cols; ++j) ai[j] += gi[j] * m;
        }
        if (b->needs_grad && m != 1.0) {
          double* bi = b->grad.row(i);
          for (int j = 0; j < out->grad.cols; ++j) bi[j] += gi[j] * (1.0 - m);
        }
      }
    };
  }
  return out;
}

Var* Tape::softmax_rows(Var* a) {
  Var* out = make(a->rows(), a->cols(), a->needs_grad);
  for (int i = 0; i < a->rows(); ++i) {
    const double* ai = a->val.row(i);
    double* oi = out->val.row(i);
    double mx = ai[0];
    for (int j = 1; j < a->cols(); ++j) mx = std::max(mx, ai[j]);
    double z = 0.0;
    for (int j = 0; j < a->cols(); ++j) {
      oi[j] = std::exp(ai[j] - mx);
      z += oi[j];
    }
    for (int j = 0; j < a->cols(); ++j) oi[j] /= z;
  }
  if (out->needs_grad) {
    backs_.back() = [a, out] {
      for (int i = 0; i < out->grad.rows; ++i) {
        const double* y = out->val.row(i);
        const double* g = out->grad.row(i);
        double dot = 0.0;
        for (int j = 0; j < out->grad.cols; ++j) dot += y[j] * g[j];
        double* ai = a->grad.row(i);
        for (int j = 0; j < out->grad.cols; ++j) ai[j] += y[j] * (g[j] - dot);
      }
    };
  }
  return out;
}

Var* Tape::masked_softmax_rows(Var* a, const Mat& mask) {
  if (!a->val.same_shape(mask)) throw InternalError("tape masked_softmax: shape mismatch");
  Var* out = make(a->rows(), a->cols(), a->needs_grad);
  for (int i = 0; i < a->rows(); ++i) {
    const double* ai = a->val.row(i);
    const double* mi = mask.row(i);
    double* oi = out->val.row(i);
    double mx = -1e300;
    for (int j = 0; j < a->cols(); ++j)
      if (mi[j] != 0.0) mx = std::max(mx, ai[j]);
    if (mx == -1e300) continue;  // fully masked row stays zero
    double z = 0.0;
    for (int j = 0; j < a->cols(); ++j) {
      oi[j] = mi[j] != 0.0 ? std::exp(ai[j] - mx) : 0.0;
      z += oi[j];
    }
    for (int j = 0; j < a->cols(); ++j) oi[j] /= z;
  }
  if (out->needs_grad) {
    backs_.back() = [a, out] {
      for (int i = 0; i < out->grad.rows; ++i) {
        const double* y = out->val.row(i);
        const double* g = out->grad.row(i);
        double dot = 0.0;
        for (int j = 0; j < out->grad.cols; ++j) dot += y[j] * g[j];
        double* ai = a->grad.row(i);
        for (int j = 0; j < out->grad.cols; ++j) ai[j] += y[j] * (g[j] - dot);
      }
    };
  }
  return out;
}

Var* Tape::dropout(Var* a, const Mat& keep_mask, double keep_prob) {
  if (!a->val.same_shape(keep_mask)) throw InternalError("tape dropout: mask shape mismatch");
  if (keep_prob <= 0.0 || keep_prob > 1.0) throw InternalError("tape dropout: bad keep prob");
  const double inv = 1.0 / keep_prob;
  Var* out = make(a->rows(), a->cols(), a->needs_grad);
  for (size_t i = 0; i < out->val.size(); ++i) out->val.a[i] = a->val.a[i] * keep_mask.a[i] * inv;
  if (out->needs_grad) {
    backs_.back() = [a, out, mask = keep_mask, inv] {
      for (size_t i = 0; i < out->grad.size(); ++i) a->grad.a[i] += out->grad.a[i] * mask.a[i] * inv;
    };
  }
  return out;
}

Var* Tape::cross_entropy_mean(Var* logits, const std::vector<int>& labels) {
  if (static_cast<int>(labels.size()) != logits->rows())
    throw InternalError("tape cross_entropy: label count mismatch");
  Var* out = make(1, 1, logits->needs_grad);
  // softmax rows cached for the backward pass
  auto probs = std::make_shared<Mat>(logits->rows(), logits->cols());
  double total = 0.0;
  for (int i = 0; i < logits->rows(); ++i) {
    const double* xi = logits->val.row(i);
    double mx = xi[0];
    for (int j = 1; j < logits->cols(); ++j) mx = std::max(mx, xi[j]);
    double z = 0.0;
    double* pi = probs->row(i);
    for (int j = 0; j < logits->cols(); ++j) {
      pi[j] = std::exp(xi[j] - mx);
      z += pi[j];
    }
    for (int j = 0; j < logits->cols(); ++j) pi[j] /= z;
    const int y = labels[static_cast<size_t>(i)];
    if (y < 0 || y >= logits->cols()) throw InternalError("tape cross_entropy: bad label");
    total += std::log(z) + mx - xi[y];
  }
  out->val.a[0] = total / static_cast<double>(logits->rows());
  if (out->needs_grad) {
    backs_.back() = [logits, out, probs, labels] {
      const double s = out->grad.a[0] / static_cast<double>(logits->rows());
      for (int i = 0; i < logits->rows(); ++i) {
        const double* pi = probs->row(i);
        double* gi = logits->grad.row(i);
        for (int j = 0; j < logits->cols(); ++j) gi[j] += s * pi[j];
        gi[labels[static_cast<size_t>(i)]] -= s;
      }
    };
  }
  return out;
}

Var* Tape::sum_all(Var* a) {
  Var* out = make(1, 1, a->needs_grad);
  double s = 0.0;
  for (double x : a->val.a) s += x;
  out->val.a[0] = s;
  if (out->needs_grad) {
    backs_.back() = [a, out] {
      for (size_t i = 0; i < a->grad.size(); ++i) a->grad.a[i] += out->grad.a[0];
    };
  }
  return out;
}

void Tape::backward(Var* loss, double seed) {
  if (ran_backward_) throw InternalError("tape backward called twice");
  ran_backward_ = true;
  if (loss->rows() != 1 || loss->cols() != 1) throw InternalError("backward target must be 1x1");
  if (!loss->needs_grad) throw InternalError("backward target does not require grad");
  check_finite(loss->val, "forward pass");
  loss->grad.a[0] = seed;
  for (size_t i = backs_.size(); i-- > 0;)
    if (backs_[i]) backs_[i]();
}

void Tape::flush_param_grads(double scale) {
  for (auto& [p, v] : param_links_) {
    for (size_t i = 0; i < p->g.size(); ++i) p->g.a[i] += scale * v->grad.a[i];
  }
}

}  // namespace secfn
