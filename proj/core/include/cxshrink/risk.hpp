#pragma once

#include <functional>

#include "cxshrink/cmatrix.hpp"
#include "cxshrink/profile.hpp"
#include "cxshrink/rng.hpp"

namespace cxshrink {

// Unbiased risk estimate at one observation. value = baseline + delta where
// baseline is m*p; min_gap is the smallest relative eigengap met while
// evaluating. When degenerate is set the value is still returned but must
// not be aggregated.
struct UreValue {
  double value = 0.0;
  double delta = 0.0;
  double min_gap = 0.0;
  bool degenerate = false;
};

// Squared Frobenius distance.
double loss_known(const CMatrix& xi_hat, const CMatrix& xi);

// Tr{sigma^{-1} (xi_hat - xi)^* k^{-1} (xi_hat - xi)}.
double loss_invariant(const CMatrix& xi_hat, const CMatrix& xi,
                      const CMatrix& sigma, const CMatrix& k);

// Identity-covariance unbiased risk estimate for z (I + u H(L) u^*).
UreValue ure_known(const CMatrix& z, const ShrinkageProfile& profile,
                   double gap_threshold = 1e-8);

// Closed-form risk increment of the unknown-covariance class evaluated on an
// explicit strictly descending positive spectrum f of length p.
double delta_hat(std::size_t n, std::size_t m, std::size_t p,
                 const std::vector<double>& f,
                 const ShrinkageProfile& profile);

// Unbiased risk estimate for the unknown-covariance class; m > p evaluates
// delta_hat(n, m, p) on the joint-reduction spectrum, p > m evaluates
// delta_hat(n + m - p, p, m) on the spectrum of z s^{-1} z^*.
UreValue ure_unknown(const CMatrix& z, const CMatrix& s, std::size_t n,
                     const ShrinkageProfile& profile,
                     double gap_threshold = 1e-8);

// Finite-difference reference for the unbiased risk estimate of an arbitrary
// correction g(z, s): m*p + 2 sum_jk Re dg_jk/dz_jk + Re Tr(D_s g^* g) +
// (n-p) Re Tr(g^* g s^{-1}). Steps scale as fd_step * max(1, |coordinate|).
double ure_general(const CMatrix& z, const CMatrix& s, std::size_t n,
                   const std::function<CMatrix(const CMatrix&,
                                               const CMatrix&)>& g,
                   double fd_step = 1e-6);

// Vector field on C^p with an optional analytic coordinate divergence
// sum_i {dRe g_i/dRe z_i + dIm g_i/dIm z_i}; absent, it is probed by
// finite differences.
struct VectorField {
  std::function<CMatrix(const CMatrix&)> eval;  // p x 1 -> p x 1
  std::function<double(const CMatrix&)> divergence;
};

// Matrix field on Hermitian matrices with an optional analytic Tr(D_s g).
struct MatrixField {
  std::function<CMatrix(const CMatrix&)> eval;  // p x p -> p x p
  std::function<double(const CMatrix&)> trace_ds;
};

// Paired Monte Carlo check of an expectation identity: lhs and rhs means
// plus the standard error of the per-replicate difference.
struct McIdentity {
  double lhs = 0.0;
  double rhs = 0.0;
  double se = 0.0;
  std::size_t reps = 0;
};

// E[(z-theta)^* sigma^{-1} g + g^* sigma^{-1} (z-theta)] against the
// coordinate divergence, z ~ CN_p(theta, sigma).
McIdentity stein_identity_check(const CMatrix& theta, const CMatrix& sigma,
                                const VectorField& g, std::size_t reps,
                                RngStream stream);

// E[Tr(G sigma^{-1})] against E[(n-p) Tr(G s^{-1}) + Tr(D_s G)] for
// s ~ CW_p(sigma, n).
McIdentity stein_haff_check(const CMatrix& sigma, std::size_t n,
                            const MatrixField& g, std::size_t reps,
                            RngStream stream);

}  // namespace cxshrink
