#include "secfn/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace secfn::kernels {

namespace {

void check_mm(const Mat& a, const Mat& b, const Mat& c, int am, int ak, int bk, int bn) {
  if (ak != bk || c.rows != am || c.cols != bn)
    throw InternalError("matmul: shape mismatch");
}

// i-k-j loop order: the k loop is outermost per row so each C element is
// accumulated in a fixed order, and the j loop vectorizes without
// reassociation.
inline void mm_rows(const Mat& a, const Mat& b, Mat& c, int r0, int r1) {
  const int k_dim = a.cols, n = b.cols;
  for (int i = r0; i < r1; ++i) {
    double* ci = c.row(i);
    const double* ai = a.row(i);
    for (int k = 0; k < k_dim; ++k) {
      const double aik = ai[k];
      if (aik == 0.0) continue;
      const double* bk = b.row(k);
      for (int j = 0; j < n; ++j) ci[j] += aik * bk[j];
    }
  }
}

inline void mm_tn_rows(const Mat& a, const Mat& b, Mat& c, int r0, int r1) {
  // C (a.cols x b.cols) += A^T B ; row i of C reads column i of A.
  const int m = a.rows, n = b.cols;
  for (int i = r0; i < r1; ++i) {
    double* ci = c.row(i);
    for (int k = 0; k < m; ++k) {
      const double aki = a.at(k, i);
      if (aki == 0.0) continue;
      const double* bk = b.row(k);
      for (int j = 0; j < n; ++j) ci[j] += aki * bk[j];
    }
  }
}

inline void mm_nt_rows(const Mat& a, const Mat& b, Mat& c, int r0, int r1) {
  // C (a.rows x b.rows) += A B^T ; element (i,j) is a dot of two rows.
  const int k_dim = a.cols, n = b.rows;
  for (int i = r0; i < r1; ++i) {
    double* ci = c.row(i);
    const double* ai = a.row(i);
    for (int j = 0; j < n; ++j) {
      const double* bj = b.row(j);
      double s = 0.0;
      for (int k = 0; k < k_dim; ++k) s += ai[k] * bj[k];
      ci[j] += s;
    }
  }
}

// Work below this many multiply-adds is not worth a parallel region.
constexpr size_t kParallelThreshold = 1 << 15;

size_t work_of(const Mat& a, int n) {
  return a.size() * static_cast<size_t>(n);
}

}  // namespace

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

void matmul_serial(const Mat& a, const Mat& b, Mat& c) {
  check_mm(a, b, c, a.rows, a.cols, b.rows, b.cols);
  mm_rows(a, b, c, 0, c.rows);
}

void matmul_omp(const Mat& a, const Mat& b, Mat& c) {
  check_mm(a, b, c, a.rows, a.cols, b.rows, b.cols);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < c.rows; ++i) mm_rows(a, b, c, i, i + 1);
}

void matmul_tn_serial(const Mat& a, const Mat& b, Mat& c) {
  check_mm(a, b, c, a.cols, a.rows, b.rows, b.cols);
  mm_tn_rows(a, b, c, 0, c.rows);
}

void matmul_tn_omp(const Mat& a, const Mat& b, Mat& c) {
  check_mm(a, b, c, a.cols, a.rows, b.rows, b.cols);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < c.rows; ++i) mm_tn_rows(a, b, c, i, i + 1);
}

void matmul_nt_serial(const Mat& a, const Mat& b, Mat& c) {
  check_mm(a, b, c, a.rows, a.cols, b.cols, b.rows);
  mm_nt_rows(a, b, c, 0, c.rows);
}

void matmul_nt_omp(const Mat& a, const Mat& b, Mat& c) {
  check_mm(a, b, c, a.rows, a.cols, b.cols, b.rows);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < c.rows; ++i) mm_nt_rows(a, b, c, i, i + 1);
}

void matmul(const Mat& a, const Mat& b, Mat& c) {
  if (work_of(a, b.cols) >= kParallelThreshold)
    matmul_omp(a, b, c);
  else
    matmul_serial(a, b, c);
}

void matmul_tn(const Mat& a, const Mat& b, Mat& c) {
  if (work_of(a, b.cols) >= kParallelThreshold)
    matmul_tn_omp(a, b, c);
  else
    matmul_tn_serial(a, b, c);
}

void matmul_nt(const Mat& a, const Mat& b, Mat& c) {
  if (work_of(a, b.rows) >= kParallelThreshold)
    matmul_nt_omp(a, b, c);
  else
    matmul_nt_serial(a, b, c);
}

}  // namespace secfn::kernels
