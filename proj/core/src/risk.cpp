#include "cxshrink/risk.hpp"

#include <cmath>
#include <limits>

#include "cxshrink/accum.hpp"
#include "cxshrink/calculus.hpp"
#include "cxshrink/eigen.hpp"
#include "cxshrink/sampling.hpp"

namespace cxshrink {

double loss_known(const CMatrix& xi_hat, const CMatrix& xi) {
  if (xi_hat.rows() != xi.rows() || xi_hat.cols() != xi.cols())
    throw DimensionMismatch("loss_known: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < xi.data().size(); ++i)
    s += std::norm(xi_hat.data()[i] - xi.data()[i]);
  return s;
}

double loss_invariant(const CMatrix& xi_hat, const CMatrix& xi,
                      const CMatrix& sigma, const CMatrix& k) {
  if (xi_hat.rows() != xi.rows() || xi_hat.cols() != xi.cols())
    throw DimensionMismatch("loss_invariant: shape mismatch");
  const CMatrix d = xi_hat - xi;
  const CMatrix kinv_d = herm_pd_solve(k, d);
  const CMatrix m = (d.adjoint() * kinv_d).hermitized();
  return std::real(trace(herm_pd_solve(sigma, m)));
}

UreValue ure_known(const CMatrix& z, const ShrinkageProfile& profile,
                   double gap_threshold) {
  const std::size_t m = z.rows();
  const std::size_t p = z.cols();
  if (m < p) throw BranchMismatch("ure_known: requires m >= p");
  if (profile.q != p)
    throw DimensionMismatch("ure_known: profile length must equal p");

  const CMatrix w = (z.adjoint() * z).hermitized();
  const HermEigen eig = herm_eigen(w);
  const std::vector<double>& l = eig.lambda;

  UreValue out;
  out.min_gap = min_relative_gap(l);
  out.degenerate = out.min_gap < gap_threshold || l[p - 1] <= 0.0 ||
                   l[p - 1] < 1e-12 * l[0];

  const double mp = static_cast<double>(m) * static_cast<double>(p);
  const std::vector<double> h = profile.h(l);
  const std::vector<double> hd = profile.h_deriv(l);
  const double coef = 2.0 * (static_cast<double>(m) - static_cast<double>(p) +
                             1.0);
  double delta = 0.0;
  for (std::size_t k = 0; k < p; ++k) {
    double term = coef * h[k] + 2.0 * l[k] * hd[k] + l[k] * h[k] * h[k];
    for (std::size_t b = k + 1; b < p; ++b)
      term += 4.0 * (l[k] * h[k] - l[b] * h[b]) / (l[k] - l[b]);
    delta += term;
  }
  out.delta = delta;
  out.value = mp + delta;
  return out;
}

double delta_hat(std::size_t n, std::size_t m, std::size_t p,
                 const std::vector<double>& f,
                 const ShrinkageProfile& profile) {
  if (f.size() != p)
    throw DimensionMismatch("delta_hat: f length must equal p");
  if (profile.q != p)
    throw DimensionMismatch("delta_hat: profile length must equal p");
  for (std::size_t k = 0; k < p; ++k) {
    if (!(f[k] > 0.0))
      throw DegenerateSpectrum("delta_hat: spectrum must be positive");
    if (k + 1 < p && !(f[k] > f[k + 1]))
      throw DegenerateSpectrum("delta_hat: spectrum must be strictly "
                               "descending");
  }

  const std::vector<double> h = profile.h(f);
  const std::vector<double> hd = profile.h_deriv(f);
  const double md = static_cast<double>(m);
  const double pd = static_cast<double>(p);
  const double nd = static_cast<double>(n);

  double total = 0.0;
  for (std::size_t k = 0; k < p; ++k) {
    double term = 2.0 * (md - pd + 1.0) * h[k] + 2.0 * f[k] * hd[k] +
                  (nd + pd - 2.0) * f[k] * h[k] * h[k] -
                  2.0 * f[k] * f[k] * hd[k] * h[k];
    for (std::size_t b = k + 1; b < p; ++b) {
      const double gap = f[k] - f[b];
      term += 4.0 * (f[k] * h[k] - f[b] * h[b]) / gap;
      term -= 2.0 *
              (f[k] * f[k] * h[k] * h[k] - f[b] * f[b] * h[b] * h[b]) / gap;
    }
    total += term;
  }
  return total;
}

UreValue ure_unknown(const CMatrix& z, const CMatrix& s, std::size_t n,
                     const ShrinkageProfile& profile, double gap_threshold) {
  const std::size_t m = z.rows();
  const std::size_t p = z.cols();
  if (m == p) throw BranchMismatch("ure_unknown: m == p has no defined branch");
  if (s.rows() != p || s.cols() != p)
    throw DimensionMismatch("ure_unknown: s must be p x p");
  if (n <= p) throw ConfigInvalid("ure_unknown: requires n > p");

  UreValue out;
  const double mp = static_cast<double>(m) * static_cast<double>(p);
  std::vector<double> f;
  try {
    if (m > p) {
      const CMatrix w = (z.adjoint() * z).hermitized();
      f = sim_diag(w, s, 0.0).f;
    } else {
      const CMatrix t = (z * herm_pd_solve(s, z.adjoint())).hermitized();
      f = herm_eigen(t).lambda;
    }
  } catch (const Error&) {
    out.min_gap = 0.0;
    out.degenerate = true;
    out.delta = std::numeric_limits<double>::quiet_NaN();
    out.value = std::numeric_limits<double>::quiet_NaN();
    return out;
  }

  out.min_gap = min_relative_gap(f);
  out.degenerate = out.min_gap < gap_threshold || f.back() <= 0.0 ||
                   f.back() < 1e-12 * f.front();
  try {
    out.delta = (m > p) ? delta_hat(n, m, p, f, profile)
                        : delta_hat(n + m - p, p, m, f, profile);
    out.value = mp + out.delta;
  } catch (const Error&) {
    out.degenerate = true;
    out.delta = std::numeric_limits<double>::quiet_NaN();
    out.value = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

double ure_general(const CMatrix& z, const CMatrix& s, std::size_t n,
                   const std::function<CMatrix(const CMatrix&,
                                               const CMatrix&)>& g,
                   double fd_step) {
  const std::size_t m = z.rows();
  const std::size_t p = z.cols();
  if (s.rows() != p || s.cols() != p)
    throw DimensionMismatch("ure_general: s must be p x p");
  if (n <= p) throw ConfigInvalid("ure_general: requires n > p");

  const CMatrix g0 = g(z, s);
  if (g0.rows() != m || g0.cols() != p)
    throw DimensionMismatch("ure_general: g must return an m x p matrix");

  double div_z = 0.0;
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < p; ++k) {
      const double step = fd_step * std::max(1.0, std::abs(z(j, k)));
      const cxd d = fd_wirtinger(
          [&](const CMatrix& zp) { return g(zp, s)(j, k); }, z, j, k, step);
      div_z += d.real();
    }

  cxd tr_ds = 0.0;
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t l = 0; l < p; ++l) {
      const double step = fd_step * std::max(1.0, std::abs(s(j, l)));
      tr_ds += fd_hermitian(
          [&](const CMatrix& sp) {
            const CMatrix gs = g(z, sp);
            return (gs.adjoint() * gs)(l, j);
          },
          s, j, l, step);
    }

  const CMatrix gram = (g0.adjoint() * g0).hermitized();
  const double tr_inv =
      std::real(trace(herm_pd_solve(s, gram)));

  return static_cast<double>(m) * static_cast<double>(p) + 2.0 * div_z +
         tr_ds.real() + (static_cast<double>(n) - static_cast<double>(p)) *
                            tr_inv;
}

McIdentity stein_identity_check(const CMatrix& theta, const CMatrix& sigma,
                                const VectorField& g, std::size_t reps,
                                RngStream stream) {
  const std::size_t p = sigma.rows();
  if (theta.rows() != p || theta.cols() != 1)
    throw DimensionMismatch("stein_identity_check: theta must be p x 1");
  if (!g.eval) throw MissingArgument("stein_identity_check: field unset");

  const CMatrix sig_sqrt = sqrt_herm(sigma);
  const CMatrix chol = cholesky(sigma);

  MeanSe lhs_acc, rhs_acc, diff_acc;
  for (std::size_t r = 0; r < reps; ++r) {
    CounterRng rng({stream.seed, stream.stream_index + r});
    const CMatrix zs =
        sample_cn_matrix(theta, sig_sqrt, CMatrix::identity(1), rng);
    const CMatrix gz = g.eval(zs);
    if (gz.rows() != p || gz.cols() != 1)
      throw DimensionMismatch("stein_identity_check: field must return p x 1");

    const CMatrix a = zs - theta;
    const CMatrix w = solve_lower_adjoint(chol, solve_lower(chol, gz));
    cxd alpha = 0.0;
    for (std::size_t i = 0; i < p; ++i) alpha += std::conj(a(i, 0)) * w(i, 0);
    const double lhs = 2.0 * alpha.real();

    double rhs;
    if (g.divergence) {
      rhs = g.divergence(zs);
    } else {
      rhs = 0.0;
      for (std::size_t i = 0; i < p; ++i) {
        const double step = 1e-6 * std::max(1.0, std::abs(zs(i, 0)));
        rhs += 2.0 * fd_wirtinger(
                         [&](const CMatrix& zp) { return g.eval(zp)(i, 0); },
                         zs, i, 0, step)
                         .real();
      }
    }

    lhs_acc.add(lhs);
    rhs_acc.add(rhs);
    diff_acc.add(lhs - rhs);
  }
  return {lhs_acc.mean(), rhs_acc.mean(), diff_acc.se(), reps};
}

McIdentity stein_haff_check(const CMatrix& sigma, std::size_t n,
                            const MatrixField& g, std::size_t reps,
                            RngStream stream) {
  const std::size_t p = sigma.rows();
  if (n <= p) throw DimensionMismatch("stein_haff_check: need n > p");
  if (!g.eval) throw MissingArgument("stein_haff_check: field unset");

  const CMatrix sig_sqrt = sqrt_herm(sigma);
  const CMatrix sig_inv = herm_pd_inverse(sigma);

  MeanSe lhs_acc, rhs_acc, diff_acc;
  for (std::size_t r = 0; r < reps; ++r) {
    CounterRng rng({stream.seed, stream.stream_index + r});
    const CMatrix s = sample_cwishart_root(sig_sqrt, n, rng);
    const CMatrix gs = g.eval(s);
    if (gs.rows() != p || gs.cols() != p)
      throw DimensionMismatch("stein_haff_check: field must return p x p");

    const double lhs = std::real(trace(gs * sig_inv));

    double tr_ds;
    if (g.trace_ds) {
      tr_ds = g.trace_ds(s);
    } else {
      cxd acc = 0.0;
      for (std::size_t j = 0; j < p; ++j)
        for (std::size_t l = 0; l < p; ++l) {
          const double step = 1e-6 * std::max(1.0, std::abs(s(j, l)));
          acc += fd_hermitian(
              [&](const CMatrix& sp) { return g.eval(sp)(l, j); }, s, j, l,
              step);
        }
      tr_ds = acc.real();
    }
    const double rhs =
        (static_cast<double>(n) - static_cast<double>(p)) *
            std::real(trace(herm_pd_solve(s, gs))) +
        tr_ds;

    lhs_acc.add(lhs);
    rhs_acc.add(rhs);
    diff_acc.add(lhs - rhs);
  }
  return {lhs_acc.mean(), rhs_acc.mean(), diff_acc.se(), reps};
}

}  // namespace cxshrink
