// Benchmark comparing the serial reference kernels against the OpenMP
// versions. The two must agree bitwise; this target reports throughput only.
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "secfn/kernels.hpp"
#include "secfn/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using secfn::Mat;

Mat random_mat(secfn::Rng& rng, int r, int c) {
  Mat m(r, c);
  for (double& x : m.a) x = rng.uniform(-1.0, 1.0);
  return m;
}

using KernelFn = void (*)(const Mat&, const Mat&, Mat&);

double time_kernel(KernelFn fn, const Mat& a, const Mat& b, Mat& c, int reps) {
  // warmup
  std::fill(c.a.begin(), c.a.end(), 0.0);
  fn(a, b, c);
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) {
    std::fill(c.a.begin(), c.a.end(), 0.0);
    fn(a, b, c);
  }
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(stop - start).count() / reps;
}

void bench_size(int m, int k, int n, int reps) {
  secfn::Rng rng(7);
  const Mat a = random_mat(rng, m, k);
  const Mat b = random_mat(rng, k, n);
  Mat c_serial(m, n), c_omp(m, n);
  const double flops = 2.0 * m * k * n;

  const double t_serial = time_kernel(secfn::kernels::matmul_serial, a, b, c_serial, reps);
  const double t_omp = time_kernel(secfn::kernels::matmul_omp, a, b, c_omp, reps);
  const bool equal = c_serial.a == c_omp.a;
  std::printf("matmul %4dx%4dx%4d  serial %8.3f ms (%6.2f GF/s)  omp %8.3f ms (%6.2f GF/s)  speedup %5.2fx  bitwise %s\n",
              m, k, n, t_serial * 1e3, flops / t_serial * 1e-9, t_omp * 1e3,
              flops / t_omp * 1e-9, t_serial / t_omp, equal ? "equal" : "DIFFERENT");
}

}  // namespace

int main(int argc, char** argv) {
  int threads = 0;
  if (argc > 1) threads = std::atoi(argv[1]);
  if (threads > 0) secfn::kernels::set_threads(threads);
#ifdef _OPENMP
  std::printf("openmp enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("openmp not available, serial build\n");
#endif
  bench_size(64, 128, 64, 50);
  bench_size(256, 256, 256, 20);
  bench_size(512, 300, 150, 10);
  bench_size(1024, 400, 200, 5);
  return 0;
}
