#include "doctest.h"

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "cxshrink/accum.hpp"
#include "cxshrink/cmatrix.hpp"
#include "cxshrink/eigen.hpp"
#include "cxshrink/errors.hpp"
#include "cxshrink/rng.hpp"
#include "cxshrink/sampling.hpp"
#include "test_util.hpp"

using namespace cxshrink;

TEST_CASE("counter generator is a pure function of stream and counter") {
  CounterRng a({123, 5});
  CounterRng b({123, 5});
  for (int i = 0; i < 64; ++i) CHECK(a.next_u64() == b.next_u64());

  CounterRng c({123, 6});
  CounterRng d({124, 5});
  CounterRng base({123, 5});
  bool differs_c = false;
  bool differs_d = false;
  for (int i = 0; i < 8; ++i) {
    const std::uint64_t r = base.next_u64();
    differs_c = differs_c || (c.next_u64() != r);
    differs_d = differs_d || (d.next_u64() != r);
  }
  CHECK(differs_c);
  CHECK(differs_d);
}

TEST_CASE("uniform draws live in the open unit interval") {
  CounterRng rng({7, 0});
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.next_uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("complex normal moments") {
  CounterRng rng({2024, 0});
  const int reps = 100000;
  NeumaierSum re_sum, im_sum, re2, im2, cross;
  for (int i = 0; i < reps; ++i) {
    const cxd z = rng.next_cnormal();
    re_sum.add(z.real());
    im_sum.add(z.imag());
    re2.add(z.real() * z.real());
    im2.add(z.imag() * z.imag());
    cross.add(z.real() * z.imag());
  }
  const double inv = 1.0 / reps;
  // Means are O(1/sqrt(reps)); 0.02 is a wide multiple of the standard error.
  CHECK(std::abs(re_sum.get() * inv) < 0.02);
  CHECK(std::abs(im_sum.get() * inv) < 0.02);
  CHECK(re2.get() * inv == doctest::Approx(0.5).epsilon(0.03));
  CHECK(im2.get() * inv == doctest::Approx(0.5).epsilon(0.03));
  CHECK(std::abs(cross.get() * inv) < 0.02);
}

TEST_CASE("standard matrix draw has unit second moment per entry") {
  CounterRng rng({55, 3});
  const int reps = 20000;
  CMatrix mom(2, 3);
  for (int i = 0; i < reps; ++i) {
    CMatrix z = sample_std_cnormal(2, 3, rng);
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t c = 0; c < 3; ++c)
        mom(r, c) += cxd{std::norm(z(r, c)), 0.0};
  }
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 3; ++c)
      CHECK(mom(r, c).real() / reps == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("matrix normal mean and row covariance") {
  // For Z = xi + K^{1/2} E Sigma^{1/2}: E[(Z-xi)(Z-xi)^*] = tr(Sigma) K.
  CounterRng setup({77, 0});
  ModelParams params;
  params.m = 2;
  params.p = 2;
  params.n = 5;
  params.xi = testutil::random_matrix(2, 2, setup);
  params.sigma = testutil::random_hpd(2, setup);
  params.k = testutil::random_hpd(2, setup);
  params.validate();

  const int reps = 50000;
  CounterRng rng({78, 0});
  CMatrix mean(2, 2);
  CMatrix rowcov(2, 2);
  for (int i = 0; i < reps; ++i) {
    CMatrix z = sample_cn_matrix(params, rng);
    mean += z;
    CMatrix d = z - params.xi;
    rowcov += d * d.adjoint();
  }
  const cxd inv{1.0 / reps, 0.0};
  mean *= inv;
  rowcov *= inv;
  CHECK(max_abs_diff(mean, params.xi) < 0.05);

  CMatrix expected = trace(params.sigma) * params.k;
  CHECK(max_abs_diff(rowcov, expected) < 0.12);
}

TEST_CASE("wishart first moment and frozen inverse moment") {
  const std::size_t p = 2;
  const std::size_t n = 8;
  CMatrix sigma = CMatrix::identity(p);
  const int reps = 100000;
  CounterRng rng({99, 0});
  CMatrix mean(p, p);
  CMatrix mean_inv(p, p);
  for (int i = 0; i < reps; ++i) {
    CMatrix s = sample_cwishart(sigma, n, rng);
    mean += s;
    mean_inv += herm_pd_inverse(s);
  }
  const cxd inv{1.0 / reps, 0.0};
  mean *= inv;
  mean_inv *= inv;

  // E[S] = n Sigma.
  CHECK(max_abs_diff(mean, 8.0 * CMatrix::identity(p)) < 0.1);
  // E[S^{-1}] = Sigma^{-1} / (n - p) = I / 6.
  CMatrix expected_inv = cxd{1.0 / 6.0, 0.0} * CMatrix::identity(p);
  CHECK(max_abs_diff(mean_inv, expected_inv) < 0.01);
}

TEST_CASE("wishart respects a non-identity shape matrix") {
  CounterRng setup({101, 0});
  CMatrix sigma = testutil::random_hpd(3, setup);
  const std::size_t n = 6;
  const int reps = 40000;
  CounterRng rng({102, 0});
  CMatrix mean(3, 3);
  for (int i = 0; i < reps; ++i) {
    CMatrix s = sample_cwishart(sigma, n, rng);
    CHECK(s.is_hermitian(0.0));
    mean += s;
  }
  mean *= cxd{1.0 / reps, 0.0};
  CMatrix expected = cxd{static_cast<double>(n), 0.0} * sigma;
  CHECK(max_abs_diff(mean, expected) < 0.25);
}

TEST_CASE("model validation rejects malformed inputs") {
  ModelParams params;
  params.m = 3;
  params.p = 2;
  params.n = 5;
  params.xi = CMatrix(3, 2);
  params.sigma = CMatrix::identity(2);
  params.k = CMatrix::identity(3);
  CHECK_NOTHROW(params.validate());

  ModelParams bad = params;
  bad.n = 2;  // needs n > p
  CHECK_THROWS_AS(bad.validate(), ConfigInvalid);

  bad = params;
  bad.xi = CMatrix(2, 2);
  CHECK_THROWS_AS(bad.validate(), ConfigInvalid);

  bad = params;
  bad.sigma = CMatrix::diag({1.0, -1.0});
  CHECK_THROWS_AS(bad.validate(), ConfigInvalid);

  bad = params;
  bad.k = CMatrix(3, 2);
  CHECK_THROWS_AS(bad.validate(), ConfigInvalid);
}

TEST_CASE("per-replicate streams make draw order irrelevant") {
  // Drawing replicate 7 directly matches drawing it after replicate 3.
  CounterRng direct({500, 7});
  CMatrix z_direct = sample_std_cnormal(2, 2, direct);

  CounterRng other({500, 3});
  (void)sample_std_cnormal(2, 2, other);
  CounterRng redo({500, 7});
  CMatrix z_redo = sample_std_cnormal(2, 2, redo);
  CHECK(max_abs_diff(z_direct, z_redo) == 0.0);
}
