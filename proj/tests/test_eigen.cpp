#include "doctest.h"

#include <cmath>
#include <vector>

#include "cxshrink/cmatrix.hpp"
#include "cxshrink/eigen.hpp"
#include "cxshrink/errors.hpp"
#include "cxshrink/rng.hpp"
#include "test_util.hpp"

using namespace cxshrink;
using testutil::close;

namespace {

CMatrix reconstruct(const HermEigen& e) {
  return e.u * CMatrix::diag(e.lambda) * e.u.adjoint();
}

}  // namespace

TEST_CASE("eigendecomposition of a frozen 2x2 Hermitian matrix") {
  CMatrix h(2, 2);
  h(0, 0) = {2.0, 0.0};
  h(0, 1) = {0.0, 1.0};
  h(1, 0) = {0.0, -1.0};
  h(1, 1) = {2.0, 0.0};

  HermEigen e = herm_eigen(h);
  REQUIRE(e.lambda.size() == 2);
  CHECK(e.lambda[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(e.lambda[1] == doctest::Approx(1.0).epsilon(1e-12));

  // Phase convention pins the eigenvectors completely.
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(close(e.u(0, 0), cxd{r, 0.0}));
  CHECK(close(e.u(1, 0), cxd{0.0, -r}));
  CHECK(close(e.u(0, 1), cxd{r, 0.0}));
  CHECK(close(e.u(1, 1), cxd{0.0, r}));

  CHECK(e.u.is_unitary(1e-12));
  CHECK(max_abs_diff(reconstruct(e), h) < 1e-12);
}

TEST_CASE("eigendecomposition of random Hermitian matrices") {
  CounterRng rng({911, 0});
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t dim = 1 + static_cast<std::size_t>(
                                    rng.next_uniform() * 6.0);
    CMatrix h = testutil::random_matrix(dim, dim, rng).hermitized();
    HermEigen e = herm_eigen(h);
    CHECK(e.u.is_unitary(1e-10));
    CHECK(max_abs_diff(reconstruct(e), h) < 1e-10);
    for (std::size_t k = 0; k + 1 < dim; ++k)
      CHECK(e.lambda[k] >= e.lambda[k + 1]);
  }
}

TEST_CASE("eigendecomposition rejects non-Hermitian input") {
  CMatrix a(2, 2);
  a(0, 1) = {1.0, 0.0};
  CHECK_THROWS_AS(herm_eigen(a), NotHermitian);
  CHECK_THROWS_AS(herm_eigen(CMatrix(2, 3)), DimensionMismatch);
}

TEST_CASE("cholesky factor of a frozen diagonal matrix") {
  CMatrix l = cholesky(CMatrix::diag({4.0, 9.0}));
  CHECK(close(l(0, 0), cxd{2.0, 0.0}));
  CHECK(close(l(1, 1), cxd{3.0, 0.0}));
  CHECK(close(l(0, 1), cxd{0.0, 0.0}));
  CHECK(close(l(1, 0), cxd{0.0, 0.0}));
}

TEST_CASE("cholesky reconstructs and rejects indefinite input") {
  CounterRng rng({912, 0});
  CMatrix s = testutil::random_hpd(4, rng);
  CMatrix l = cholesky(s);
  CHECK(max_abs_diff(l * l.adjoint(), s) < 1e-12);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(l(i, i).imag() == 0.0);
    CHECK(l(i, i).real() > 0.0);
    for (std::size_t j = i + 1; j < 4; ++j) CHECK(l(i, j) == cxd{0.0, 0.0});
  }

  CHECK_THROWS_AS(cholesky(CMatrix::diag({1.0, -1.0})), NotPositiveDefinite);
}

TEST_CASE("joint reduction of a frozen diagonal pair") {
  // w = diag(8, 3), s = diag(4, 1): ratios are 2 and 3, so f = (3, 2) after
  // the descending sort, with normalization a^* s a = I.
  SimDiag sd = sim_diag(CMatrix::diag({8.0, 3.0}), CMatrix::diag({4.0, 1.0}));
  REQUIRE(sd.f.size() == 2);
  CHECK(sd.f[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(sd.f[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(close(sd.a(0, 0), cxd{0.0, 0.0}));
  CHECK(close(sd.a(1, 0), cxd{1.0, 0.0}));
  CHECK(close(sd.a(0, 1), cxd{0.5, 0.0}));
  CHECK(close(sd.a(1, 1), cxd{0.0, 0.0}));
  CHECK(close(sd.a_inv(0, 0), cxd{0.0, 0.0}));
  CHECK(close(sd.a_inv(0, 1), cxd{1.0, 0.0}));
  CHECK(close(sd.a_inv(1, 0), cxd{2.0, 0.0}));
  CHECK(close(sd.a_inv(1, 1), cxd{0.0, 0.0}));
}

TEST_CASE("joint reduction invariants on random pairs") {
  CounterRng rng({913, 0});
  for (int trial = 0; trial < 10; ++trial) {
    CMatrix s = testutil::random_hpd(3, rng);
    CMatrix b = testutil::random_matrix(3, 3, rng);
    CMatrix w = (b * b.adjoint()).hermitized();
    SimDiag sd;
    try {
      sd = sim_diag(w, s);
    } catch (const DegenerateSpectrum&) {
      continue;  // random spectrum collision, admissible to skip
    }
    CHECK(max_abs_diff(sd.a.adjoint() * s * sd.a, CMatrix::identity(3)) <
          1e-10);
    CHECK(max_abs_diff(sd.a.adjoint() * w * sd.a, CMatrix::diag(sd.f)) <
          1e-10);
    CHECK(max_abs_diff(sd.a_inv * sd.a, CMatrix::identity(3)) < 1e-10);
    CHECK(max_abs_diff(sd.a_inv, sd.a.adjoint() * s) < 1e-10);
    for (std::size_t k = 0; k + 1 < 3; ++k) CHECK(sd.f[k] > sd.f[k + 1]);
  }
}

TEST_CASE("joint reduction rejects tied or collapsed spectra") {
  CMatrix s = CMatrix::identity(2);
  CHECK_THROWS_AS(sim_diag(CMatrix::identity(2), s), DegenerateSpectrum);
  CHECK_THROWS_AS(sim_diag(CMatrix::diag({1.0, 0.0}), s), DegenerateSpectrum);
}

TEST_CASE("matrix square roots") {
  CounterRng rng({914, 0});
  CMatrix k = testutil::random_hpd(3, rng);
  CMatrix r = sqrt_herm(k);
  CHECK(max_abs_diff(r * r.adjoint(), k) < 1e-12);
  CHECK(r.is_hermitian(1e-12));
  CMatrix ri = inv_sqrt_herm(k);
  CHECK(max_abs_diff(ri * k * ri, CMatrix::identity(3)) < 1e-11);
  CHECK_THROWS_AS(inv_sqrt_herm(CMatrix::diag({1.0, -2.0})),
                  NotPositiveDefinite);
}

TEST_CASE("triangular and positive definite solves") {
  CounterRng rng({915, 0});
  CMatrix s = testutil::random_hpd(4, rng);
  CMatrix b = testutil::random_matrix(4, 2, rng);
  CMatrix x = herm_pd_solve(s, b);
  CHECK(max_abs_diff(s * x, b) < 1e-11);

  CMatrix inv = herm_pd_inverse(s);
  CHECK(max_abs_diff(s * inv, CMatrix::identity(4)) < 1e-11);

  CMatrix l = cholesky(s);
  CMatrix y = solve_lower(l, b);
  CHECK(max_abs_diff(l * y, b) < 1e-12);
  CMatrix z = solve_lower_adjoint(l, b);
  CHECK(max_abs_diff(l.adjoint() * z, b) < 1e-12);
}

TEST_CASE("relative gap measurement and spectrum guard") {
  CHECK(min_relative_gap({10.0, 6.0, 5.0}) == doctest::Approx(0.1));
  CHECK(std::isinf(min_relative_gap({3.0})));

  CHECK_NOTHROW(guard_spectrum({10.0, 6.0, 5.0}, 1e-2, "test"));
  CHECK_THROWS_AS(guard_spectrum({10.0, 6.0, 5.999}, 1e-2, "test"),
                  DegenerateSpectrum);
  CHECK_THROWS_AS(guard_spectrum({10.0, -1.0}, 1e-2, "test"),
                  DegenerateSpectrum);
}
