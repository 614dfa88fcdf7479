#include "cxshrink/calculus.hpp"

#include <cmath>

namespace cxshrink {

namespace {

bool finite(cxd v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

void require_finite(cxd v, const char* who) {
  if (!finite(v)) throw NonFiniteResult(std::string(who) + ": probe not finite");
}

void check_gaps(const std::vector<double>& f, double gap_tol, const char* who) {
  guard_spectrum(f, gap_tol, who);
}

std::vector<double> eval_profile(const ShrinkageProfile& phi,
                                 const std::vector<double>& f,
                                 bool deriv, const char* who) {
  const auto& fn = deriv ? phi.h_deriv : phi.h;
  if (!fn) throw MissingArgument(std::string(who) + ": profile callback unset");
  std::vector<double> out = fn(f);
  if (out.size() != f.size())
    throw DimensionMismatch(std::string(who) + ": profile length mismatch");
  return out;
}

}  // namespace

WirtingerDeriv fd_wirtinger(const std::function<cxd(const CMatrix&)>& func,
                            const CMatrix& z, std::size_t j, std::size_t k,
                            double step) {
  if (j >= z.rows() || k >= z.cols())
    throw DimensionMismatch("fd_wirtinger: coordinate out of range");
  if (!(step > 0.0)) throw NonFiniteResult("fd_wirtinger: step must be positive");

  CMatrix probe = z;
  const cxd base = z(j, k);

  probe(j, k) = base + step;
  const cxd fp = func(probe);
  probe(j, k) = base - step;
  const cxd fm = func(probe);
  probe(j, k) = base + cxd{0.0, step};
  const cxd gp = func(probe);
  probe(j, k) = base - cxd{0.0, step};
  const cxd gm = func(probe);
  require_finite(fp, "fd_wirtinger");
  require_finite(fm, "fd_wirtinger");
  require_finite(gp, "fd_wirtinger");
  require_finite(gm, "fd_wirtinger");

  const cxd d_re = (fp - fm) / (2.0 * step);
  const cxd d_im = (gp - gm) / (2.0 * step);
  return 0.5 * (d_re - cxd{0.0, 1.0} * d_im);
}

HermDeriv fd_hermitian(const std::function<cxd(const CMatrix&)>& func,
                       const CMatrix& s, std::size_t j, std::size_t k,
                       double step) {
  if (s.rows() != s.cols())
    throw DimensionMismatch("fd_hermitian: matrix must be square");
  if (j >= s.rows() || k >= s.cols())
    throw DimensionMismatch("fd_hermitian: coordinate out of range");
  if (!(step > 0.0)) throw NonFiniteResult("fd_hermitian: step must be positive");

  CMatrix probe = s;
  if (j == k) {
    const cxd base = s(j, j);
    probe(j, j) = base + step;
    const cxd fp = func(probe);
    probe(j, j) = base - step;
    const cxd fm = func(probe);
    require_finite(fp, "fd_hermitian");
    require_finite(fm, "fd_hermitian");
    return (fp - fm) / (2.0 * step);
  }

  const cxd bjk = s(j, k);
  const cxd bkj = s(k, j);

  // Re-direction: ds_jk = ds_kj = step keeps the probe Hermitian.
  probe(j, k) = bjk + step;
  probe(k, j) = bkj + step;
  const cxd fp = func(probe);
  probe(j, k) = bjk - step;
  probe(k, j) = bkj - step;
  const cxd fm = func(probe);
  // Im-direction: ds_jk = i step, ds_kj = -i step.
  probe(j, k) = bjk + cxd{0.0, step};
  probe(k, j) = bkj - cxd{0.0, step};
  const cxd gp = func(probe);
  probe(j, k) = bjk - cxd{0.0, step};
  probe(k, j) = bkj + cxd{0.0, step};
  const cxd gm = func(probe);
  require_finite(fp, "fd_hermitian");
  require_finite(fm, "fd_hermitian");
  require_finite(gp, "fd_hermitian");
  require_finite(gm, "fd_hermitian");

  const cxd d_re = (fp - fm) / (2.0 * step);
  const cxd d_im = (gp - gm) / (2.0 * step);
  return 0.5 * (d_re + cxd{0.0, 1.0} * d_im);
}

EigDerivsKnown eig_derivs_known(const CMatrix& z, double gap_tol) {
  const std::size_t m = z.rows();
  const std::size_t p = z.cols();
  if (m < p)
    throw BranchMismatch("eig_derivs_known: needs rows >= cols for full rank");

  EigDerivsKnown out;
  const CMatrix w = (z.adjoint() * z).hermitized();
  out.eig = herm_eigen(w);
  check_gaps(out.eig.lambda, gap_tol, "eig_derivs_known");

  const CMatrix& u = out.eig.u;
  const std::vector<double>& l = out.eig.lambda;
  const CMatrix zu = z * u;

  out.du = CxTensor4(p, p, m, p);
  out.dubar = CxTensor4(p, p, m, p);
  out.dl = CxTensor3(p, m, p);

  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t lt = 0; lt < p; ++lt)
      for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < p; ++k) {
          cxd acc_u = 0.0;
          cxd acc_ub = 0.0;
          for (std::size_t c = 0; c < p; ++c) {
            if (c == lt) continue;
            const double gap = l[lt] - l[c];
            acc_u += u(i, c) * std::conj(zu(j, c)) / gap;
            acc_ub += std::conj(u(i, c)) * u(k, c) / gap;
          }
          out.du.at(i, lt, j, k) = u(k, lt) * acc_u;
          out.dubar.at(i, lt, j, k) = std::conj(zu(j, lt)) * acc_ub;
        }

  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < p; ++k)
        out.dl.at(i, j, k) = u(k, i) * std::conj(zu(j, i));

  return out;
}

EigDerivsUnknownMgtp eig_derivs_unknown_mgtp(const CMatrix& z,
                                             const CMatrix& s,
                                             double gap_tol) {
  const std::size_t m = z.rows();
  const std::size_t p = z.cols();
  if (m <= p)
    throw BranchMismatch("eig_derivs_unknown_mgtp: requires m > p");
  if (s.rows() != p || s.cols() != p)
    throw DimensionMismatch("eig_derivs_unknown_mgtp: s must be p x p");

  EigDerivsUnknownMgtp out;
  const CMatrix w = (z.adjoint() * z).hermitized();
  out.sd = sim_diag(w, s, 0.0);
  check_gaps(out.sd.f, gap_tol, "eig_derivs_unknown_mgtp");

  const CMatrix& a = out.sd.a;
  const CMatrix& ainv = out.sd.a_inv;
  const std::vector<double>& f = out.sd.f;
  const CMatrix za = z * a;

  out.da = CxTensor4(p, p, m, p);
  out.da_inv = CxTensor4(p, p, m, p);
  out.df_dz = CxTensor3(p, m, p);

  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t lt = 0; lt < p; ++lt)
      for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < p; ++k) {
          cxd acc_a = 0.0;
          for (std::size_t c = 0; c < p; ++c) {
            if (c == lt) continue;
            acc_a += a(i, c) * std::conj(za(j, c)) / (f[lt] - f[c]);
          }
          out.da.at(i, lt, j, k) = a(k, lt) * acc_a;
        }

  // d(a^{-1})_{l,kp} / dz_jk = conj((za)_{jl}) sum_{c != l} a_kc a^{-1}_{c,kp}
  //                            / (f_l - f_c).
  for (std::size_t lt = 0; lt < p; ++lt)
    for (std::size_t kp = 0; kp < p; ++kp)
      for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < p; ++k) {
          cxd acc = 0.0;
          for (std::size_t c = 0; c < p; ++c) {
            if (c == lt) continue;
            acc += a(k, c) * ainv(c, kp) / (f[lt] - f[c]);
          }
          out.da_inv.at(lt, kp, j, k) = std::conj(za(j, lt)) * acc;
        }

  for (std::size_t kp = 0; kp < p; ++kp)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < p; ++k)
        out.df_dz.at(kp, j, k) = a(k, kp) * std::conj(za(j, kp));

  out.dpair_ds = CxTensor3(p, p, p);
  for (std::size_t k = 0; k < p; ++k)
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j) {
        cxd val = ainv(k, i) * std::conj(ainv(k, j)) * std::conj(a(j, k)) *
                  a(i, k);
        for (std::size_t b = 0; b < p; ++b) {
          if (b == k) continue;
          const double r = f[b] / (f[b] - f[k]);
          val += ainv(k, i) * a(i, k) * std::conj(a(j, b)) *
                 std::conj(ainv(b, j)) * r;
          val += std::conj(ainv(k, j)) * std::conj(a(j, k)) * a(i, b) *
                 ainv(b, i) * r;
        }
        out.dpair_ds.at(k, i, j) = val;
      }

  out.df_ds = CxTensor3(p, p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t k = 0; k < p; ++k)
      for (std::size_t kp = 0; kp < p; ++kp)
        out.df_ds.at(i, k, kp) = -std::conj(a(kp, i)) * a(k, i) * f[i];

  return out;
}

EigDerivsUnknownPgtm eig_derivs_unknown_pgtm(const CMatrix& z,
                                             const CMatrix& s,
                                             double gap_tol) {
  const std::size_t m = z.rows();
  const std::size_t p = z.cols();
  if (p <= m)
    throw BranchMismatch("eig_derivs_unknown_pgtm: requires p > m");
  if (s.rows() != p || s.cols() != p)
    throw DimensionMismatch("eig_derivs_unknown_pgtm: s must be p x p");

  EigDerivsUnknownPgtm out;
  const CMatrix sinv = herm_pd_inverse(s);
  const CMatrix t = (z * sinv * z.adjoint()).hermitized();
  out.eig = herm_eigen(t);
  check_gaps(out.eig.lambda, gap_tol, "eig_derivs_unknown_pgtm");

  const CMatrix& u = out.eig.u;
  const std::vector<double>& f = out.eig.lambda;
  const CMatrix q = sinv * z.adjoint() * u;  // p x m
  const CMatrix r = q.adjoint();             // m x p, equals u^* z s^{-1}

  out.du = CxTensor4(m, m, m, p);
  out.dubar = CxTensor4(m, m, m, p);
  out.df_dz = CxTensor3(m, m, p);

  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t lt = 0; lt < m; ++lt)
      for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < p; ++k) {
          cxd acc_u = 0.0;
          cxd acc_ub = 0.0;
          for (std::size_t b1 = 0; b1 < m; ++b1) {
            if (b1 == lt) continue;
            const double gap = f[lt] - f[b1];
            acc_u += u(i, b1) * std::conj(u(j, b1)) / gap;
            acc_ub += std::conj(u(i, b1)) * q(k, b1) / gap;
          }
          out.du.at(i, lt, j, k) = q(k, lt) * acc_u;
          out.dubar.at(i, lt, j, k) = std::conj(u(j, lt)) * acc_ub;
        }

  for (std::size_t b1 = 0; b1 < m; ++b1)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < p; ++k)
        out.df_dz.at(b1, j, k) = std::conj(u(j, b1)) * q(k, b1);

  out.du_ds = CxTensor4(m, m, p, p);
  out.dubar_ds = CxTensor4(m, m, p, p);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t lt = 0; lt < m; ++lt)
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) {
          cxd acc_u = 0.0;
          cxd acc_ub = 0.0;
          for (std::size_t b1 = 0; b1 < m; ++b1) {
            if (b1 == lt) continue;
            const double gap = f[lt] - f[b1];
            acc_u += u(k, b1) * r(b1, j) / gap;
            acc_ub += std::conj(u(k, b1)) * q(i, b1) / gap;
          }
          out.du_ds.at(k, lt, i, j) = -q(i, lt) * acc_u;
          out.dubar_ds.at(k, lt, i, j) = -r(lt, j) * acc_ub;
        }

  out.df_ds = CxTensor3(m, p, p);
  for (std::size_t lt = 0; lt < m; ++lt)
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j)
        out.df_ds.at(lt, i, j) = -r(lt, j) * q(i, lt);

  return out;
}

double divergence_known(const CMatrix& z, const ShrinkageProfile& phi,
                        double gap_tol) {
  const std::size_t m = z.rows();
  const std::size_t p = z.cols();
  if (m < p) throw BranchMismatch("divergence_known: requires m >= p");
  if (phi.q != p)
    throw DimensionMismatch("divergence_known: profile length must equal p");

  const CMatrix w = (z.adjoint() * z).hermitized();
  const HermEigen eig = herm_eigen(w);
  check_gaps(eig.lambda, gap_tol, "divergence_known");
  const std::vector<double>& l = eig.lambda;
  const std::vector<double> ph = eval_profile(phi, l, false, "divergence_known");
  const std::vector<double> phd =
      eval_profile(phi, l, true, "divergence_known");

  const double coef = static_cast<double>(m) - static_cast<double>(p) + 1.0;
  double total = 0.0;
  for (std::size_t k = 0; k < p; ++k) {
    double term = coef * ph[k] + l[k] * phd[k];
    for (std::size_t c = k + 1; c < p; ++c)
      term += 2.0 * (l[k] * ph[k] - l[c] * ph[c]) / (l[k] - l[c]);
    total += term;
  }
  return total;
}

namespace {

// Shared F-eigenvalue extraction for the unknown-case divergences.
std::vector<double> unknown_spectrum(const CMatrix& z, const CMatrix& s,
                                     Branch branch, double gap_tol,
                                     const char* who) {
  const std::size_t m = z.rows();
  const std::size_t p = z.cols();
  if (branch == Branch::MGreaterP) {
    if (m <= p) throw BranchMismatch(std::string(who) + ": branch needs m > p");
    const CMatrix w = (z.adjoint() * z).hermitized();
    const SimDiag sd = sim_diag(w, s, 0.0);
    check_gaps(sd.f, gap_tol, who);
    return sd.f;
  }
  if (p <= m) throw BranchMismatch(std::string(who) + ": branch needs p > m");
  const CMatrix t = (z * herm_pd_inverse(s) * z.adjoint()).hermitized();
  const HermEigen eig = herm_eigen(t);
  check_gaps(eig.lambda, gap_tol, who);
  return eig.lambda;
}

}  // namespace

double divergence_unknown_z(const CMatrix& z, const CMatrix& s,
                            const ShrinkageProfile& phi, Branch branch,
                            double gap_tol) {
  const std::vector<double> f =
      unknown_spectrum(z, s, branch, gap_tol, "divergence_unknown_z");
  const std::size_t q = f.size();
  if (phi.q != q)
    throw DimensionMismatch("divergence_unknown_z: profile length mismatch");
  const std::vector<double> ph =
      eval_profile(phi, f, false, "divergence_unknown_z");
  const std::vector<double> phd =
      eval_profile(phi, f, true, "divergence_unknown_z");

  const double md = static_cast<double>(z.rows());
  const double pd = static_cast<double>(z.cols());
  const double coef =
      (branch == Branch::MGreaterP) ? md - pd + 1.0 : pd - md + 1.0;

  double total = 0.0;
  for (std::size_t k = 0; k < q; ++k) {
    double term = f[k] * phd[k] + coef * ph[k];
    for (std::size_t b = k + 1; b < q; ++b)
      term += 2.0 * (f[k] * ph[k] - f[b] * ph[b]) / (f[k] - f[b]);
    total += term;
  }
  return total;
}

double divergence_unknown_s(const CMatrix& z, const CMatrix& s,
                            const ShrinkageProfile& phi, Branch branch,
                            double gap_tol) {
  const std::vector<double> f =
      unknown_spectrum(z, s, branch, gap_tol, "divergence_unknown_s");
  const std::size_t q = f.size();
  if (phi.q != q)
    throw DimensionMismatch("divergence_unknown_s: profile length mismatch");
  const std::vector<double> ph =
      eval_profile(phi, f, false, "divergence_unknown_s");
  const std::vector<double> phd =
      eval_profile(phi, f, true, "divergence_unknown_s");

  double total = 0.0;
  if (branch == Branch::MGreaterP) {
    const double pd = static_cast<double>(z.cols());
    for (std::size_t k = 0; k < q; ++k) {
      double term = (2.0 * pd - 1.0) * ph[k] - f[k] * phd[k];
      for (std::size_t b = k + 1; b < q; ++b)
        term -= 2.0 * (f[k] * ph[k] - f[b] * ph[b]) / (f[k] - f[b]);
      total += term;
    }
    return total;
  }
  const double md = static_cast<double>(z.rows());
  for (std::size_t k = 0; k < q; ++k) {
    double term = f[k] * f[k] * phd[k] - 2.0 * (md - 1.0) * f[k] * ph[k];
    for (std::size_t b = k + 1; b < q; ++b)
      term += 2.0 * (f[k] * f[k] * ph[k] - f[b] * f[b] * ph[b]) /
              (f[k] - f[b]);
    total += term;
  }
  return -total;
}

}  // namespace cxshrink
