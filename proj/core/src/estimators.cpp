#include "cxshrink/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "cxshrink/eigen.hpp"

namespace cxshrink {

ShrinkageProfile zero_profile(std::size_t q) {
  ShrinkageProfile prof;
  prof.q = q;
  auto zeros = [q](const std::vector<double>&) {
    return std::vector<double>(q, 0.0);
  };
  prof.h = zeros;
  prof.h_deriv = zeros;
  return prof;
}

std::string estimator_kind_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Mle: return "mle";
    case EstimatorKind::KnownCrudeEm: return "known_crude_em";
    case EstimatorKind::KnownGamma: return "known_gamma";
    case EstimatorKind::KnownOrdered: return "known_ordered";
    case EstimatorKind::UnknownEm: return "unknown_em";
    case EstimatorKind::UnknownAs: return "unknown_as";
    case EstimatorKind::UnknownGamma: return "unknown_gamma";
    case EstimatorKind::CustomH: return "custom_h";
  }
  return "unknown";
}

EstimatorSpec estimator_spec_from_name(const std::string& name) {
  EstimatorSpec spec;
  if (name == "mle") {
    spec.kind = EstimatorKind::Mle;
    spec.covariance = CovarianceMode::Known;
  } else if (name == "known_crude_em") {
    spec.kind = EstimatorKind::KnownCrudeEm;
    spec.covariance = CovarianceMode::Known;
  } else if (name == "known_ordered") {
    spec.kind = EstimatorKind::KnownOrdered;
    spec.covariance = CovarianceMode::Known;
  } else if (name == "unknown_em") {
    spec.kind = EstimatorKind::UnknownEm;
    spec.covariance = CovarianceMode::Unknown;
  } else if (name == "unknown_as") {
    spec.kind = EstimatorKind::UnknownAs;
    spec.covariance = CovarianceMode::Unknown;
  } else {
    throw ConfigParseError("estimator: unrecognized kind '" + name + "'");
  }
  return spec;
}

double known_gamma_bound(std::size_t m, std::size_t p) {
  return 2.0 * (static_cast<double>(m) - static_cast<double>(p));
}

double unknown_gamma_bound(std::size_t m, std::size_t p, std::size_t n) {
  const double md = static_cast<double>(m);
  const double pd = static_cast<double>(p);
  const double nd = static_cast<double>(n);
  return std::max(2.0 * (md - pd) / (nd + pd),
                  2.0 * (pd - md) / (nd + 2.0 * md - pd));
}

namespace {

std::vector<double> eval_coeff(const CoefficientFn& fn,
                               const std::vector<double>& x, std::size_t q,
                               const char* who) {
  if (!fn) throw MissingArgument(std::string(who) + ": callback unset");
  std::vector<double> out = fn(x);
  if (out.size() != q)
    throw DimensionMismatch(std::string(who) + ": coefficient length mismatch");
  return out;
}

ShrinkageProfile gamma_profile(CoefficientFn gamma, CoefficientFn gamma_deriv,
                               std::size_t q, double bound) {
  ShrinkageProfile prof;
  prof.q = q;
  prof.h = [gamma, q, bound](const std::vector<double>& f) {
    const std::vector<double> g = eval_coeff(gamma, f, q, "gamma profile");
    std::vector<double> h(q);
    for (std::size_t k = 0; k < q; ++k) {
      if (g[k] < 0.0 || g[k] > bound)
        throw ConstraintViolation("gamma profile: coefficient outside [0, " +
                                  std::to_string(bound) + "]");
      if (k > 0 && g[k] > g[k - 1])
        throw ConstraintViolation("gamma profile: coefficients must be "
                                  "nonincreasing");
      h[k] = -g[k] / f[k];
    }
    return h;
  };
  prof.h_deriv = [gamma, gamma_deriv, q](const std::vector<double>& f) {
    const std::vector<double> g = eval_coeff(gamma, f, q, "gamma profile");
    const std::vector<double> gd =
        eval_coeff(gamma_deriv, f, q, "gamma profile");
    std::vector<double> hd(q);
    for (std::size_t k = 0; k < q; ++k) {
      if (gd[k] < 0.0)
        throw ConstraintViolation(
            "gamma profile: coefficient must be nondecreasing in its own "
            "eigenvalue");
      hd[k] = -gd[k] / f[k] + g[k] / (f[k] * f[k]);
    }
    return hd;
  };
  return prof;
}

// h_k = -c_k / f_k for fixed constants c_k.
ShrinkageProfile constant_over_f_profile(std::vector<double> c) {
  ShrinkageProfile prof;
  prof.q = c.size();
  prof.h = [c](const std::vector<double>& f) {
    std::vector<double> h(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) h[k] = -c[k] / f[k];
    return h;
  };
  prof.h_deriv = [c](const std::vector<double>& f) {
    std::vector<double> hd(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) hd[k] = c[k] / (f[k] * f[k]);
    return hd;
  };
  return prof;
}

}  // namespace

ShrinkageProfile make_known_gamma_profile(CoefficientFn gamma,
                                          CoefficientFn gamma_deriv,
                                          std::size_t m, std::size_t p) {
  if (m <= p)
    throw BranchMismatch("make_known_gamma_profile: requires m > p");
  return gamma_profile(std::move(gamma), std::move(gamma_deriv), p,
                       known_gamma_bound(m, p));
}

ShrinkageProfile make_unknown_gamma_profile(CoefficientFn gamma,
                                            CoefficientFn gamma_deriv,
                                            std::size_t m, std::size_t p,
                                            std::size_t n) {
  if (m == p)
    throw BranchMismatch("make_unknown_gamma_profile: requires m != p");
  if (n <= p) throw MissingArgument("make_unknown_gamma_profile: needs n > p");
  return gamma_profile(std::move(gamma), std::move(gamma_deriv),
                       std::min(m, p), unknown_gamma_bound(m, p, n));
}

ShrinkageProfile make_profile(EstimatorKind kind, std::size_t m, std::size_t p,
                              std::size_t n) {
  const double md = static_cast<double>(m);
  const double pd = static_cast<double>(p);
  const double nd = static_cast<double>(n);
  const std::size_t q = std::min(m, p);

  switch (kind) {
    case EstimatorKind::Mle:
      return zero_profile(q);
    case EstimatorKind::KnownCrudeEm: {
      if (m <= p) throw BranchMismatch("make_profile: known kinds need m > p");
      return constant_over_f_profile(std::vector<double>(p, md - pd));
    }
    case EstimatorKind::KnownOrdered: {
      if (m <= p) throw BranchMismatch("make_profile: known kinds need m > p");
      std::vector<double> c(p);
      for (std::size_t k = 0; k < p; ++k)
        c[k] = md + pd - 2.0 * static_cast<double>(k + 1);
      return constant_over_f_profile(std::move(c));
    }
    case EstimatorKind::UnknownEm: {
      if (m == p)
        throw BranchMismatch("make_profile: unknown kinds need m != p");
      if (n == 0) throw MissingArgument("make_profile: unknown kinds need n");
      const double gamma = (m > p) ? (md - pd) / (nd + pd)
                                   : (pd - md) / (nd + 2.0 * md - pd);
      return constant_over_f_profile(std::vector<double>(q, gamma));
    }
    case EstimatorKind::UnknownAs: {
      if (m == p)
        throw BranchMismatch("make_profile: unknown kinds need m != p");
      if (n == 0) throw MissingArgument("make_profile: unknown kinds need n");
      std::vector<double> c(q);
      for (std::size_t k = 0; k < q; ++k) {
        const double kk = static_cast<double>(k + 1);
        c[k] = (md + pd - 2.0 * kk) / (nd - pd + 2.0 * kk);
      }
      return constant_over_f_profile(std::move(c));
    }
    case EstimatorKind::KnownGamma:
    case EstimatorKind::UnknownGamma:
    case EstimatorKind::CustomH:
      throw MissingArgument(
          "make_profile: this kind carries a caller-supplied profile");
  }
  throw ConfigInvalid("make_profile: unhandled kind");
}

CMatrix apply_h_known(const CMatrix& z, const ShrinkageProfile& profile,
                      double gap_tol) {
  const std::size_t m = z.rows();
  const std::size_t p = z.cols();
  if (m < p) throw BranchMismatch("apply_h_known: requires m >= p");
  if (profile.q != p)
    throw DimensionMismatch("apply_h_known: profile length must equal p");

  const CMatrix w = (z.adjoint() * z).hermitized();
  const HermEigen eig = herm_eigen(w);
  guard_spectrum(eig.lambda, gap_tol, "apply_h_known");

  const std::vector<double> h = profile.h(eig.lambda);
  return z + (z * eig.u) * CMatrix::diag(h) * eig.u.adjoint();
}

CMatrix apply_h_unknown(const CMatrix& z, const CMatrix& s,
                        const ShrinkageProfile& profile, double gap_tol) {
  const std::size_t m = z.rows();
  const std::size_t p = z.cols();
  if (m == p)
    throw BranchMismatch("apply_h_unknown: m == p has no defined branch");
  if (s.rows() != p || s.cols() != p)
    throw DimensionMismatch("apply_h_unknown: s must be p x p");
  if (profile.q != std::min(m, p))
    throw DimensionMismatch("apply_h_unknown: profile length must be min(m,p)");

  if (m > p) {
    const CMatrix w = (z.adjoint() * z).hermitized();
    const SimDiag sd = sim_diag(w, s, 0.0);
    guard_spectrum(sd.f, gap_tol, "apply_h_unknown");
    const std::vector<double> h = profile.h(sd.f);
    return z + (z * sd.a) * CMatrix::diag(h) * sd.a_inv;
  }

  const CMatrix t = (z * herm_pd_solve(s, z.adjoint())).hermitized();
  const HermEigen eig = herm_eigen(t);
  guard_spectrum(eig.lambda, gap_tol, "apply_h_unknown");
  const std::vector<double> h = profile.h(eig.lambda);
  return z + eig.u * CMatrix::diag(h) * (eig.u.adjoint() * z);
}

CMatrix whiten(const CMatrix& z, const CMatrix& k) {
  if (k.rows() != z.rows())
    throw DimensionMismatch("whiten: k must match the row dimension");
  return inv_sqrt_herm(k) * z;
}

CMatrix unwhiten(const CMatrix& z, const CMatrix& k) {
  if (k.rows() != z.rows())
    throw DimensionMismatch("unwhiten: k must match the row dimension");
  return sqrt_herm(k) * z;
}

CMatrix estimate(const EstimatorSpec& spec, const CMatrix& z, const CMatrix* s,
                 const CMatrix* sigma, const CMatrix* k, std::size_t n,
                 double gap_tol) {
  if (spec.kind == EstimatorKind::Mle) return z;

  const bool known_kind = spec.kind == EstimatorKind::KnownCrudeEm ||
                          spec.kind == EstimatorKind::KnownGamma ||
                          spec.kind == EstimatorKind::KnownOrdered;
  const bool unknown_kind = spec.kind == EstimatorKind::UnknownEm ||
                            spec.kind == EstimatorKind::UnknownAs ||
                            spec.kind == EstimatorKind::UnknownGamma;
  if (known_kind && spec.covariance != CovarianceMode::Known)
    throw ConfigInvalid("estimate: kind and covariance mode disagree");
  if (unknown_kind && spec.covariance != CovarianceMode::Unknown)
    throw ConfigInvalid("estimate: kind and covariance mode disagree");

  const ShrinkageProfile profile =
      spec.profile ? *spec.profile
                   : make_profile(spec.kind, z.rows(), z.cols(), n);

  const CMatrix zw = k ? whiten(z, *k) : z;
  CMatrix est;
  if (spec.covariance == CovarianceMode::Known) {
    if (sigma) {
      est = apply_h_known(zw * inv_sqrt_herm(*sigma), profile, gap_tol) *
            sqrt_herm(*sigma);
    } else {
      est = apply_h_known(zw, profile, gap_tol);
    }
  } else {
    if (!s)
      throw MissingArgument("estimate: unknown-covariance kinds require s");
    est = apply_h_unknown(zw, *s, profile, gap_tol);
  }
  return k ? unwhiten(est, *k) : est;
}

}  // namespace cxshrink
