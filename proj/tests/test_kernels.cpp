#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "secfn/kernels.hpp"
#include "secfn/rng.hpp"

using namespace secfn;

namespace {

Mat random_mat(Rng& rng, int r, int c) {
  Mat m(r, c);
  for (double& x : m.a) x = rng.uniform(-1.0, 1.0);
  return m;
}

}  // namespace

TEST_CASE("omp kernels are bitwise identical to the serial references") {
  Rng rng(3);
  const std::vector<std::tuple<int, int, int>> shapes = {
      {1, 1, 1}, {3, 5, 2}, {17, 31, 13}, {64, 64, 64}, {100, 257, 33}};
  for (const auto& [m, k, n] : shapes) {
    const Mat a = random_mat(rng, m, k);
    const Mat b = random_mat(rng, k, n);
    Mat c1(m, n), c2(m, n);
    kernels::matmul_serial(a, b, c1);
    kernels::matmul_omp(a, b, c2);
    CHECK(c1.a == c2.a);

    const Mat at = random_mat(rng, k, m);
    Mat d1(m, n), d2(m, n);
    kernels::matmul_tn_serial(at, b, d1);
    kernels::matmul_tn_omp(at, b, d2);
    CHECK(d1.a == d2.a);

    const Mat bt = random_mat(rng, n, k);
    Mat e1(m, n), e2(m, n);
    kernels::matmul_nt_serial(a, bt, e1);
    kernels::matmul_nt_omp(a, bt, e2);
    CHECK(e1.a == e2.a);
  }
}

TEST_CASE("matmul accumulates into the output") {
  Mat a(2, 2), b(2, 2), c(2, 2);
  a.at(0, 0) = 1;
  a.at(1, 1) = 2;
  b.at(0, 0) = 3;
  b.at(1, 1) = 4;
  c.at(0, 0) = 10;
  kernels::matmul(a, b, c);
  CHECK(c.at(0, 0) == 13.0);
  CHECK(c.at(1, 1) == 8.0);
  CHECK(c.at(0, 1) == 0.0);
}

TEST_CASE("transpose variants agree with explicit transposes") {
  Rng rng(4);
  const Mat a = random_mat(rng, 7, 5);
  const Mat b = random_mat(rng, 7, 4);
  // C = A^T B via tn, against manual transpose + plain matmul
  Mat at(5, 7);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 5; ++j) at.at(j, i) = a.at(i, j);
  Mat c1(5, 4), c2(5, 4);
  kernels::matmul_tn(a, b, c1);
  kernels::matmul(at, b, c2);
  for (size_t i = 0; i < c1.size(); ++i) CHECK(c1.a[i] == doctest::Approx(c2.a[i]).epsilon(1e-12));

  const Mat x = random_mat(rng, 6, 5);
  const Mat y = random_mat(rng, 3, 5);
  Mat yt(5, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 5; ++j) yt.at(j, i) = y.at(i, j);
  Mat d1(6, 3), d2(6, 3);
  kernels::matmul_nt(x, y, d1);
  kernels::matmul(x, yt, d2);
  for (size_t i = 0; i < d1.size(); ++i) CHECK(d1.a[i] == doctest::Approx(d2.a[i]).epsilon(1e-12));
}

TEST_CASE("shape mismatches are rejected") {
  Mat a(2, 3), b(2, 3), c(2, 3);
  CHECK_THROWS_AS(kernels::matmul(a, b, c), InternalError);
}
