#include "cxshrink/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cxshrink {

namespace {

constexpr int kMaxSweeps = 100;

double max_off_diag(const CMatrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      m = std::max(m, std::abs(a(i, j)));
  return m;
}

}  // namespace

HermEigen herm_eigen(const CMatrix& h, double tol) {
  if (h.rows() != h.cols() || h.rows() == 0)
    throw DimensionMismatch("herm_eigen: matrix must be square and non-empty");
  if (!h.is_hermitian(tol))
    throw NotHermitian("herm_eigen: input is not Hermitian within tolerance");

  const std::size_t n = h.rows();
  CMatrix a = h.hermitized();
  CMatrix u = CMatrix::identity(n);
  const double scale = std::max(a.max_abs(), 1e-300);
  // Sweeps aim well below the caller tolerance; quadratic convergence makes
  // the extra digits cheap.
  const double target = 1e-14 * scale;

  if (n > 1) {
    int sweep = 0;
    for (; sweep < kMaxSweeps; ++sweep) {
      if (max_off_diag(a) <= target) break;
      for (std::size_t p = 0; p < n - 1; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
          const cxd apq = a(p, q);
          const double ab = std::abs(apq);
          if (ab == 0.0) continue;
          const double app = std::real(a(p, p));
          const double aqq = std::real(a(q, q));
          const cxd phase = apq / ab;

          const double tau = (aqq - app) / (2.0 * ab);
          double t;
          if (tau >= 0.0)
            t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
          else
            t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
          const double c = 1.0 / std::sqrt(1.0 + t * t);
          const double s = t * c;

          // Unitary pivot V: V(p,p)=c, V(p,q)=s, V(q,p)=-s*conj(phase),
          // V(q,q)=c*conj(phase); A <- V^* A V, U <- U V.
          const cxd vqp = -s * std::conj(phase);
          const cxd vqq = c * std::conj(phase);
          for (std::size_t r = 0; r < n; ++r) {
            const cxd arp = a(r, p);
            const cxd arq = a(r, q);
            a(r, p) = c * arp + vqp * arq;
            a(r, q) = s * arp + vqq * arq;
          }
          for (std::size_t col = 0; col < n; ++col) {
            const cxd apc = a(p, col);
            const cxd aqc = a(q, col);
            a(p, col) = c * apc + std::conj(vqp) * aqc;
            a(q, col) = s * apc + std::conj(vqq) * aqc;
          }
          a(p, p) = app - t * ab;
          a(q, q) = aqq + t * ab;
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          for (std::size_t r = 0; r < n; ++r) {
            const cxd urp = u(r, p);
            const cxd urq = u(r, q);
            u(r, p) = c * urp + vqp * urq;
            u(r, q) = s * urp + vqq * urq;
          }
        }
      }
    }
    if (sweep == kMaxSweeps && max_off_diag(a) > tol * scale)
      throw NoConvergence("herm_eigen: sweep cap reached before tolerance");
  }

  std::vector<double> lambda(n);
  for (std::size_t i = 0; i < n; ++i) lambda[i] = std::real(a(i, i));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) {
                     return lambda[x] > lambda[y];
                   });

  HermEigen out;
  out.lambda.resize(n);
  out.u = CMatrix(n, n);
  for (std::size_t l = 0; l < n; ++l) {
    const std::size_t src = order[l];
    out.lambda[l] = lambda[src];
    for (std::size_t r = 0; r < n; ++r) out.u(r, l) = u(r, src);
  }

  // Phase convention: largest-modulus entry of each column real positive;
  // first index wins ties so repeated runs agree bit for bit.
  for (std::size_t l = 0; l < n; ++l) {
    std::size_t rmax = 0;
    double best = -1.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double m = std::abs(out.u(r, l));
      if (m > best) {
        best = m;
        rmax = r;
      }
    }
    if (best > 0.0) {
      const cxd ph = std::conj(out.u(rmax, l)) / best;
      for (std::size_t r = 0; r < n; ++r) out.u(r, l) *= ph;
      out.u(rmax, l) = std::abs(out.u(rmax, l));
    }
  }
  return out;
}

CMatrix cholesky(const CMatrix& h, double tol) {
  if (h.rows() != h.cols() || h.rows() == 0)
    throw DimensionMismatch("cholesky: matrix must be square and non-empty");
  if (!h.is_hermitian(tol))
    throw NotHermitian("cholesky: input is not Hermitian within tolerance");

  const std::size_t n = h.rows();
  CMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = std::real(h(j, j));
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > 0.0))
      throw NotPositiveDefinite("cholesky: nonpositive pivot at index " +
                                std::to_string(j));
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      cxd v = h(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * std::conj(l(j, k));
      l(i, j) = v / ljj;
    }
  }
  return l;
}

SimDiag sim_diag(const CMatrix& w, const CMatrix& s, double gap_tol) {
  if (w.rows() != w.cols() || s.rows() != s.cols() || w.rows() != s.rows())
    throw DimensionMismatch("sim_diag: w and s must be square of equal size");

  const CMatrix l = cholesky(s);
  const CMatrix b = solve_lower(l, w);                  // l^{-1} w
  const CMatrix m = solve_lower(l, b.adjoint()).hermitized();  // l^{-1} w l^{-*}
  const HermEigen eig = herm_eigen(m);

  SimDiag out;
  out.f = eig.lambda;
  out.a = solve_lower_adjoint(l, eig.u);  // l^{-*} v
  out.a_inv = eig.u.adjoint() * l.adjoint();

  const std::size_t p = out.f.size();
  if (out.f[p - 1] <= 0.0)
    throw DegenerateSpectrum("sim_diag: nonpositive eigenvalue");
  if (p > 1) {
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < p; ++k)
      min_gap = std::min(min_gap, out.f[k] - out.f[k + 1]);
    if (min_gap < gap_tol * out.f[0])
      throw DegenerateSpectrum("sim_diag: eigenvalue gap below tolerance");
  }
  return out;
}

CMatrix inv_sqrt_herm(const CMatrix& k, double tol) {
  const HermEigen eig = herm_eigen(k, tol);
  const std::size_t n = k.rows();
  if (eig.lambda[n - 1] <= 0.0)
    throw NotPositiveDefinite("inv_sqrt_herm: matrix is not positive definite");
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = 1.0 / std::sqrt(eig.lambda[i]);
  return (eig.u * CMatrix::diag(d) * eig.u.adjoint()).hermitized();
}

CMatrix sqrt_herm(const CMatrix& k, double tol) {
  const HermEigen eig = herm_eigen(k, tol);
  const std::size_t n = k.rows();
  const double scale = std::max(std::abs(eig.lambda[0]), 1.0);
  if (eig.lambda[n - 1] < -tol * scale)
    throw NotPositiveDefinite("sqrt_herm: matrix has a negative eigenvalue");
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i)
    d[i] = std::sqrt(std::max(eig.lambda[i], 0.0));
  return (eig.u * CMatrix::diag(d) * eig.u.adjoint()).hermitized();
}

CMatrix solve_lower(const CMatrix& l, const CMatrix& b) {
  if (l.rows() != l.cols() || l.rows() != b.rows())
    throw DimensionMismatch("solve_lower: shape mismatch");
  CMatrix x = b;
  const std::size_t n = l.rows();
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      cxd v = x(i, j);
      for (std::size_t k = 0; k < i; ++k) v -= l(i, k) * x(k, j);
      x(i, j) = v / l(i, i);
    }
  }
  return x;
}

CMatrix solve_lower_adjoint(const CMatrix& l, const CMatrix& b) {
  if (l.rows() != l.cols() || l.rows() != b.rows())
    throw DimensionMismatch("solve_lower_adjoint: shape mismatch");
  CMatrix x = b;
  const std::size_t n = l.rows();
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t ii = n; ii-- > 0;) {
      cxd v = x(ii, j);
      for (std::size_t k = ii + 1; k < n; ++k)
        v -= std::conj(l(k, ii)) * x(k, j);
      x(ii, j) = v / std::conj(l(ii, ii));
    }
  }
  return x;
}

CMatrix herm_pd_solve(const CMatrix& h, const CMatrix& b) {
  const CMatrix l = cholesky(h);
  return solve_lower_adjoint(l, solve_lower(l, b));
}

CMatrix herm_pd_inverse(const CMatrix& h) {
  return herm_pd_solve(h, CMatrix::identity(h.rows())).hermitized();
}

void guard_spectrum(const std::vector<double>& descending, double gap_tol,
                    const char* who) {
  if (descending.empty())
    throw DegenerateSpectrum(std::string(who) + ": empty spectrum");
  if (descending.back() <= 0.0)
    throw DegenerateSpectrum(std::string(who) + ": nonpositive eigenvalue");
  if (descending.back() < 1e-12 * descending.front())
    throw DegenerateSpectrum(std::string(who) + ": near-singular spectrum");
  if (min_relative_gap(descending) < gap_tol)
    throw DegenerateSpectrum(std::string(who) + ": eigenvalue gap below guard");
}

double min_relative_gap(const std::vector<double>& descending) {
  if (descending.size() < 2)
    return std::numeric_limits<double>::infinity();
  const double denom =
      std::max(std::abs(descending[0]), std::numeric_limits<double>::min());
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < descending.size(); ++k)
    min_gap = std::min(min_gap, (descending[k] - descending[k + 1]) / denom);
  return min_gap;
}

}  // namespace cxshrink
