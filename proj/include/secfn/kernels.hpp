#pragma once

#include <cstddef>
#include <vector>

#include "secfn/common.hpp"

namespace secfn {

// Row-major dense matrix of doubles. The numeric substrate for the encoders.
struct Mat {
  int rows = 0, cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * static_cast<size_t>(c), 0.0) {}

  double& at(int r, int c) { return a[static_cast<size_t>(r) * static_cast<size_t>(cols) + static_cast<size_t>(c)]; }
  double at(int r, int c) const { return a[static_cast<size_t>(r) * static_cast<size_t>(cols) + static_cast<size_t>(c)]; }
  double* row(int r) { return a.data() + static_cast<size_t>(r) * static_cast<size_t>(cols); }
  const double* row(int r) const { return a.data() + static_cast<size_t>(r) * static_cast<size_t>(cols); }
  size_t size() const { return a.size(); }
  bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }
};

namespace kernels {

// Each kernel has a serial reference and an OpenMP version. The parallel
// versions partition output rows, so every output element is accumulated in
// the same order as the serial code and the two are bitwise identical for any
// thread count.

// C += A * B
void matmul_serial(const Mat& a, const Mat& b, Mat& c);
void matmul_omp(const Mat& a, const Mat& b, Mat& c);

// C += A^T * B
void matmul_tn_serial(const Mat& a, const Mat& b, Mat& c);
void matmul_tn_omp(const Mat& a, const Mat& b, Mat& c);

// C += A * B^T
void matmul_nt_serial(const Mat& a, const Mat& b, Mat& c);
void matmul_nt_omp(const Mat& a, const Mat& b, Mat& c);

// Dispatchers: OpenMP above a size threshold, serial below.
void matmul(const Mat& a, const Mat& b, Mat& c);
void matmul_tn(const Mat& a, const Mat& b, Mat& c);
void matmul_nt(const Mat& a, const Mat& b, Mat& c);

void set_threads(int n);  // 0 = library default

}  // namespace kernels

}  // namespace secfn
