#pragma once

#include <optional>
#include <string>

#include "cxshrink/cmatrix.hpp"
#include "cxshrink/profile.hpp"

namespace cxshrink {

enum class EstimatorKind {
  Mle,           // no correction
  KnownCrudeEm,  // h_k = -(m-p)/l_k
  KnownGamma,    // h_k = -gamma_k(L)/l_k, constraint-audited
  KnownOrdered,  // h_k = -(m+p-2k)/l_k
  UnknownEm,     // h_k = -gamma/f_k with the branch-dependent constant
  UnknownAs,     // h_k = -c_k/f_k, c_k = (m+p-2k)/(n-p+2k)
  UnknownGamma,  // h_k = -gamma_k(F)/f_k, constraint-audited
  CustomH,       // caller-supplied profile
};

enum class CovarianceMode { Known, Unknown };

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::Mle;
  CovarianceMode covariance = CovarianceMode::Known;
  // Required for KnownGamma / UnknownGamma / CustomH; ignored otherwise.
  std::optional<ShrinkageProfile> profile;
};

// Names used in configuration files and CSV rows.
std::string estimator_kind_name(EstimatorKind kind);
EstimatorSpec estimator_spec_from_name(const std::string& name);

// Built-in profile for one of the closed-form kinds. n participates only in
// the unknown-covariance coefficients.
ShrinkageProfile make_profile(EstimatorKind kind, std::size_t m, std::size_t p,
                              std::size_t n);

// Per-coordinate coefficient callbacks gamma(L) and their diagonal partials,
// wrapped with runtime admissibility audits: 0 <= gamma_k <= bound,
// d gamma_k / d l_k >= 0, gamma nonincreasing in k. Violations throw
// ConstraintViolation at evaluation time.
using CoefficientFn =
    std::function<std::vector<double>(const std::vector<double>&)>;
ShrinkageProfile make_known_gamma_profile(CoefficientFn gamma,
                                          CoefficientFn gamma_deriv,
                                          std::size_t m, std::size_t p);
ShrinkageProfile make_unknown_gamma_profile(CoefficientFn gamma,
                                            CoefficientFn gamma_deriv,
                                            std::size_t m, std::size_t p,
                                            std::size_t n);

// Upper bound of constraint (i) for the two classes.
double known_gamma_bound(std::size_t m, std::size_t p);
double unknown_gamma_bound(std::size_t m, std::size_t p, std::size_t n);

// z (I + u H(L) u^*) on the eigensystem of z^* z; requires m >= p and a
// gap-guarded positive spectrum.
CMatrix apply_h_known(const CMatrix& z, const ShrinkageProfile& profile,
                      double gap_tol = 1e-8);

// Unknown-covariance correction. m > p: z (I + a H(F) a^{-1}) on the joint
// reduction of (z^* z, s); p > m: (I + u H(F) u^*) z on the eigensystem of
// z s^{-1} z^*. m == p is rejected.
CMatrix apply_h_unknown(const CMatrix& z, const CMatrix& s,
                        const ShrinkageProfile& profile, double gap_tol = 1e-8);

// k^{-1/2} z and k^{1/2} z for Hermitian positive definite k.
CMatrix whiten(const CMatrix& z, const CMatrix& k);
CMatrix unwhiten(const CMatrix& z, const CMatrix& k);

// Dispatcher. s is required for unknown-covariance kinds, sigma triggers the
// known-correlated transform, k triggers row whitening, and n is required to
// build the built-in unknown-covariance profiles.
CMatrix estimate(const EstimatorSpec& spec, const CMatrix& z,
                 const CMatrix* s = nullptr, const CMatrix* sigma = nullptr,
                 const CMatrix* k = nullptr, std::size_t n = 0,
                 double gap_tol = 1e-8);

}  // namespace cxshrink
