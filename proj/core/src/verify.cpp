#include "cxshrink/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "cxshrink/calculus.hpp"
#include "cxshrink/cmatrix.hpp"
#include "cxshrink/eigen.hpp"
#include "cxshrink/errors.hpp"
#include "cxshrink/profile.hpp"
#include "cxshrink/risk.hpp"
#include "cxshrink/rng.hpp"
#include "cxshrink/sampling.hpp"

namespace cxshrink {

namespace {

// Suite design constants. Admission is far stricter than the library's own
// gap guard so the finite-difference truncation error, which grows like
// (step * scale / gap)^2, stays well under the pass threshold.
constexpr double kAdmitGap = 1e-2;       // min relative eigenvalue gap
constexpr double kAdmitTail = 1e-2;      // min f_min / f_max
constexpr double kFdThreshold = 1e-5;    // relative, with 1e-8 absolute floor
constexpr std::uint64_t kSuiteStride = std::uint64_t{1} << 32;

// Dividing by max(|a|,|b|,1e-3) and comparing against 1e-5 enforces
// |a - b| <= max(1e-5 max(|a|,|b|), 1e-8).
double rel_err(cxd a, cxd b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-3});
  return std::abs(a - b) / scale;
}

struct MaxErr {
  double v = 0.0;
  void take(double e) { v = std::max(v, e); }
  void take(cxd a, cxd b) { take(rel_err(a, b)); }
};

bool spectrum_admissible(const std::vector<double>& f) {
  if (f.empty() || !(f.back() > 0.0)) return false;
  if (f.back() < kAdmitTail * f.front()) return false;
  return min_relative_gap(f) >= kAdmitGap;
}

// Smooth coordinatewise multiplier phi_k = -c_k / f_k with distinct c_k,
// so both the value and the derivative terms of the closed forms are
// exercised.
ShrinkageProfile inverse_multiplier(std::size_t q) {
  std::vector<double> c(q);
  for (std::size_t k = 0; k < q; ++k)
    c[k] = 0.7 + 0.3 * static_cast<double>(k);
  ShrinkageProfile ph;
  ph.q = q;
  ph.h = [c](const std::vector<double>& f) {
    std::vector<double> out(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) out[k] = -c[k] / f[k];
    return out;
  };
  ph.h_deriv = [c](const std::vector<double>& f) {
    std::vector<double> out(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) out[k] = c[k] / (f[k] * f[k]);
    return out;
  };
  return ph;
}

// Re-phases each column of a unitary probe basis onto the base basis. As the
// probe approaches the base this converges to the gauge with diag(u^* du)
// = 0, the convention of the analytic tensors.
CMatrix align_unitary(const CMatrix& base, CMatrix probe) {
  for (std::size_t l = 0; l < probe.cols(); ++l) {
    cxd d = 0.0;
    for (std::size_t i = 0; i < probe.rows(); ++i)
      d += std::conj(base(i, l)) * probe(i, l);
    const double mag = std::abs(d);
    if (mag == 0.0) continue;
    const cxd ph = std::conj(d) / mag;
    for (std::size_t i = 0; i < probe.rows(); ++i) probe(i, l) *= ph;
  }
  return probe;
}

// Same for a joint-reduction basis, whose columns are orthonormal in the
// s-weighted inner product: the overlap is (a_base^{-1} a_probe)_ll, and the
// inverse rows carry the conjugate phase.
void align_sim_diag(const SimDiag& base, SimDiag& probe) {
  const std::size_t p = probe.a.cols();
  for (std::size_t l = 0; l < p; ++l) {
    cxd d = 0.0;
    for (std::size_t i = 0; i < p; ++i)
      d += base.a_inv(l, i) * probe.a(i, l);
    const double mag = std::abs(d);
    if (mag == 0.0) continue;
    const cxd ph = std::conj(d) / mag;
    for (std::size_t i = 0; i < p; ++i) {
      probe.a(i, l) *= ph;
      probe.a_inv(l, i) *= std::conj(ph);
    }
  }
}

// Wirtinger combination of four probe values: 0.5 (d_re - i d_im).
cxd wirtinger_combine(cxd f_rp, cxd f_rm, cxd f_ip, cxd f_im, double step) {
  const cxd d_re = (f_rp - f_rm) / (2.0 * step);
  const cxd d_im = (f_ip - f_im) / (2.0 * step);
  return 0.5 * (d_re - cxd{0.0, 1.0} * d_im);
}

// Spectral suite: derivatives and divergence of the eigensystem of z^* z on
// a tall instance.
struct KnownSuiteErr {
  MaxErr dl, du, dubar, div;
};

void run_known_instance(const CMatrix& z, double fd_step,
                        const ShrinkageProfile& phi, KnownSuiteErr& err) {
  const std::size_t m = z.rows();
  const std::size_t p = z.cols();
  const EigDerivsKnown base = eig_derivs_known(z);

  const auto decomp = [](const CMatrix& zz) {
    return herm_eigen((zz.adjoint() * zz).hermitized());
  };

  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < p; ++k) {
      const double step = fd_step * std::max(1.0, std::abs(z(j, k)));
      CMatrix zp = z;
      zp(j, k) = z(j, k) + step;
      const HermEigen e_rp = decomp(zp);
      zp(j, k) = z(j, k) - step;
      const HermEigen e_rm = decomp(zp);
      zp(j, k) = z(j, k) + cxd{0.0, step};
      const HermEigen e_ip = decomp(zp);
      zp(j, k) = z(j, k) - cxd{0.0, step};
      const HermEigen e_im = decomp(zp);

      const CMatrix u_rp = align_unitary(base.eig.u, e_rp.u);
      const CMatrix u_rm = align_unitary(base.eig.u, e_rm.u);
      const CMatrix u_ip = align_unitary(base.eig.u, e_ip.u);
      const CMatrix u_im = align_unitary(base.eig.u, e_im.u);

      for (std::size_t l = 0; l < p; ++l) {
        const cxd fd_l = wirtinger_combine(e_rp.lambda[l], e_rm.lambda[l],
                                           e_ip.lambda[l], e_im.lambda[l],
                                           step);
        err.dl.take(base.dl.at(l, j, k), fd_l);
        for (std::size_t i = 0; i < p; ++i) {
          const cxd fd_u = wirtinger_combine(u_rp(i, l), u_rm(i, l),
                                             u_ip(i, l), u_im(i, l), step);
          err.du.take(base.du.at(i, l, j, k), fd_u);
          const cxd fd_ubar = wirtinger_combine(
              std::conj(u_rp(i, l)), std::conj(u_rm(i, l)),
              std::conj(u_ip(i, l)), std::conj(u_im(i, l)), step);
          err.dubar.take(base.dubar.at(i, l, j, k), fd_ubar);
        }
      }
    }

  // Divergence: the multiplier term z u Phi u^* is gauge-free, so plain
  // scalar probes suffice.
  const auto term = [&phi](const CMatrix& zz) {
    const HermEigen e = herm_eigen((zz.adjoint() * zz).hermitized());
    const std::vector<double> ph = phi.h(e.lambda);
    return (zz * e.u) * CMatrix::diag(ph) * e.u.adjoint();
  };
  double fd_div = 0.0;
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < p; ++k) {
      const double step = fd_step * std::max(1.0, std::abs(z(j, k)));
      fd_div += fd_wirtinger(
                    [&](const CMatrix& zz) { return term(zz)(j, k); }, z, j,
                    k, step)
                    .real();
    }
  err.div.take(divergence_known(z, phi), fd_div);
}

// Joint-reduction suite for m > p: derivatives of a, a^{-1}, f and the two
// divergence closed forms.
struct MgtpSuiteErr {
  MaxErr da, da_inv, df_dz, dpair_ds, df_ds, div_z, div_s;
};

void run_mgtp_instance(const CMatrix& z, const CMatrix& s, double fd_step,
                       const ShrinkageProfile& phi, MgtpSuiteErr& err) {
  const std::size_t m = z.rows();
  const std::size_t p = z.cols();
  const EigDerivsUnknownMgtp base = eig_derivs_unknown_mgtp(z, s);

  const auto reduce = [&s](const CMatrix& zz) {
    return sim_diag((zz.adjoint() * zz).hermitized(), s, 0.0);
  };

  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < p; ++k) {
      const double step = fd_step * std::max(1.0, std::abs(z(j, k)));
      CMatrix zp = z;
      zp(j, k) = z(j, k) + step;
      SimDiag d_rp = reduce(zp);
      zp(j, k) = z(j, k) - step;
      SimDiag d_rm = reduce(zp);
      zp(j, k) = z(j, k) + cxd{0.0, step};
      SimDiag d_ip = reduce(zp);
      zp(j, k) = z(j, k) - cxd{0.0, step};
      SimDiag d_im = reduce(zp);
      align_sim_diag(base.sd, d_rp);
      align_sim_diag(base.sd, d_rm);
      align_sim_diag(base.sd, d_ip);
      align_sim_diag(base.sd, d_im);

      for (std::size_t l = 0; l < p; ++l) {
        const cxd fd_f = wirtinger_combine(d_rp.f[l], d_rm.f[l], d_ip.f[l],
                                           d_im.f[l], step);
        err.df_dz.take(base.df_dz.at(l, j, k), fd_f);
        for (std::size_t i = 0; i < p; ++i) {
          const cxd fd_a = wirtinger_combine(d_rp.a(i, l), d_rm.a(i, l),
                                             d_ip.a(i, l), d_im.a(i, l),
                                             step);
          err.da.take(base.da.at(i, l, j, k), fd_a);
          const cxd fd_ai = wirtinger_combine(
              d_rp.a_inv(l, i), d_rm.a_inv(l, i), d_ip.a_inv(l, i),
              d_im.a_inv(l, i), step);
          err.da_inv.take(base.da_inv.at(l, i, j, k), fd_ai);
        }
      }
    }

  // s-side targets are gauge-free, so each probe may keep its own phases.
  const CMatrix w = (z.adjoint() * z).hermitized();
  for (std::size_t i0 = 0; i0 < p; ++i0)
    for (std::size_t j0 = 0; j0 < p; ++j0) {
      const double step = fd_step * std::max(1.0, std::abs(s(i0, j0)));
      for (std::size_t l = 0; l < p; ++l) {
        const cxd fd_f = fd_hermitian(
            [&](const CMatrix& sp) {
              return cxd{sim_diag(w, sp, 0.0).f[l], 0.0};
            },
            s, i0, j0, step);
        err.df_ds.take(base.df_ds.at(l, i0, j0), fd_f);
      }
      for (std::size_t kk = 0; kk < p; ++kk) {
        const cxd fd_pair = fd_hermitian(
            [&](const CMatrix& sp) {
              const SimDiag sd = sim_diag(w, sp, 0.0);
              return sd.a_inv(kk, i0) * std::conj(sd.a_inv(kk, j0));
            },
            s, i0, j0, step);
        err.dpair_ds.take(base.dpair_ds.at(kk, i0, j0), fd_pair);
      }
    }

  // Divergences of the correction direction z a Phi a^{-1} (z side) and of
  // the matrix (a^*)^{-1} Phi a^{-1} = (s a) Phi a^{-1} (s side).
  const auto direction = [&phi](const CMatrix& zz, const CMatrix& ss) {
    const SimDiag sd = sim_diag((zz.adjoint() * zz).hermitized(), ss, 0.0);
    const std::vector<double> ph = phi.h(sd.f);
    return (zz * sd.a) * CMatrix::diag(ph) * sd.a_inv;
  };
  double fd_div_z = 0.0;
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < p; ++k) {
      const double step = fd_step * std::max(1.0, std::abs(z(j, k)));
      fd_div_z += fd_wirtinger(
                      [&](const CMatrix& zz) { return direction(zz, s)(j, k); },
                      z, j, k, step)
                      .real();
    }
  err.div_z.take(
      divergence_unknown_z(z, s, phi, Branch::MGreaterP), fd_div_z);

  const auto sandwich = [&phi, &w](const CMatrix& ss) {
    const SimDiag sd = sim_diag(w, ss, 0.0);
    const std::vector<double> ph = phi.h(sd.f);
    return ((ss * sd.a) * CMatrix::diag(ph)) * sd.a_inv;
  };
  cxd fd_div_s = 0.0;
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t l = 0; l < p; ++l) {
      const double step = fd_step * std::max(1.0, std::abs(s(j, l)));
      fd_div_s += fd_hermitian(
          [&](const CMatrix& sp) { return sandwich(sp)(l, j); }, s, j, l,
          step);
    }
  err.div_s.take(
      cxd{divergence_unknown_s(z, s, phi, Branch::MGreaterP), 0.0}, fd_div_s);
}

// Ratio suite for p > m: derivatives of the eigensystem of z s^{-1} z^* in
// both arguments, plus the two divergence closed forms.
struct PgtmSuiteErr {
  MaxErr du, dubar, df_dz, du_ds, dubar_ds, df_ds, div_z, div_s;
};

void run_pgtm_instance(const CMatrix& z, const CMatrix& s, double fd_step,
                       const ShrinkageProfile& phi, PgtmSuiteErr& err) {
  const std::size_t m = z.rows();
  const std::size_t p = z.cols();
  const EigDerivsUnknownPgtm base = eig_derivs_unknown_pgtm(z, s);

  const auto ratio_eig = [](const CMatrix& zz, const CMatrix& ss) {
    return herm_eigen(
        (zz * herm_pd_solve(ss, zz.adjoint())).hermitized());
  };

  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < p; ++k) {
      const double step = fd_step * std::max(1.0, std::abs(z(j, k)));
      CMatrix zp = z;
      zp(j, k) = z(j, k) + step;
      const HermEigen e_rp = ratio_eig(zp, s);
      zp(j, k) = z(j, k) - step;
      const HermEigen e_rm = ratio_eig(zp, s);
      zp(j, k) = z(j, k) + cxd{0.0, step};
      const HermEigen e_ip = ratio_eig(zp, s);
      zp(j, k) = z(j, k) - cxd{0.0, step};
      const HermEigen e_im = ratio_eig(zp, s);

      const CMatrix u_rp = align_unitary(base.eig.u, e_rp.u);
      const CMatrix u_rm = align_unitary(base.eig.u, e_rm.u);
      const CMatrix u_ip = align_unitary(base.eig.u, e_ip.u);
      const CMatrix u_im = align_unitary(base.eig.u, e_im.u);

      for (std::size_t l = 0; l < m; ++l) {
        const cxd fd_f = wirtinger_combine(e_rp.lambda[l], e_rm.lambda[l],
                                           e_ip.lambda[l], e_im.lambda[l],
                                           step);
        err.df_dz.take(base.df_dz.at(l, j, k), fd_f);
        for (std::size_t i = 0; i < m; ++i) {
          const cxd fd_u = wirtinger_combine(u_rp(i, l), u_rm(i, l),
                                             u_ip(i, l), u_im(i, l), step);
          err.du.take(base.du.at(i, l, j, k), fd_u);
          const cxd fd_ubar = wirtinger_combine(
              std::conj(u_rp(i, l)), std::conj(u_rm(i, l)),
              std::conj(u_ip(i, l)), std::conj(u_im(i, l)), step);
          err.dubar.take(base.dubar.at(i, l, j, k), fd_ubar);
        }
      }
    }

  // s-derivatives: probe along Hermitian directions mirroring the operator
  // convention, align phases, then combine. Diagonal coordinates use a plain
  // real central difference.
  for (std::size_t i0 = 0; i0 < p; ++i0)
    for (std::size_t j0 = 0; j0 < p; ++j0) {
      const double step = fd_step * std::max(1.0, std::abs(s(i0, j0)));
      if (i0 == j0) {
        CMatrix sp = s;
        sp(i0, i0) = s(i0, i0) + step;
        const HermEigen e_p = ratio_eig(z, sp);
        sp(i0, i0) = s(i0, i0) - step;
        const HermEigen e_m = ratio_eig(z, sp);
        const CMatrix u_p = align_unitary(base.eig.u, e_p.u);
        const CMatrix u_m = align_unitary(base.eig.u, e_m.u);
        for (std::size_t l = 0; l < m; ++l) {
          const cxd fd_f =
              (e_p.lambda[l] - e_m.lambda[l]) / (2.0 * step);
          err.df_ds.take(base.df_ds.at(l, i0, j0), fd_f);
          for (std::size_t i = 0; i < m; ++i) {
            const cxd fd_u = (u_p(i, l) - u_m(i, l)) / (2.0 * step);
            err.du_ds.take(base.du_ds.at(i, l, i0, j0), fd_u);
            const cxd fd_ubar =
                (std::conj(u_p(i, l)) - std::conj(u_m(i, l))) / (2.0 * step);
            err.dubar_ds.take(base.dubar_ds.at(i, l, i0, j0), fd_ubar);
          }
        }
        continue;
      }
      CMatrix sp = s;
      sp(i0, j0) = s(i0, j0) + step;
      sp(j0, i0) = s(j0, i0) + step;
      const HermEigen e_rp = ratio_eig(z, sp);
      sp(i0, j0) = s(i0, j0) - step;
      sp(j0, i0) = s(j0, i0) - step;
      const HermEigen e_rm = ratio_eig(z, sp);
      sp(i0, j0) = s(i0, j0) + cxd{0.0, step};
      sp(j0, i0) = s(j0, i0) - cxd{0.0, step};
      const HermEigen e_ip = ratio_eig(z, sp);
      sp(i0, j0) = s(i0, j0) - cxd{0.0, step};
      sp(j0, i0) = s(j0, i0) + cxd{0.0, step};
      const HermEigen e_im = ratio_eig(z, sp);

      const CMatrix u_rp = align_unitary(base.eig.u, e_rp.u);
      const CMatrix u_rm = align_unitary(base.eig.u, e_rm.u);
      const CMatrix u_ip = align_unitary(base.eig.u, e_ip.u);
      const CMatrix u_im = align_unitary(base.eig.u, e_im.u);

      for (std::size_t l = 0; l < m; ++l) {
        const cxd d_re = (e_rp.lambda[l] - e_rm.lambda[l]) / (2.0 * step);
        const cxd d_im = (e_ip.lambda[l] - e_im.lambda[l]) / (2.0 * step);
        const cxd fd_f = 0.5 * (d_re + cxd{0.0, 1.0} * d_im);
        err.df_ds.take(base.df_ds.at(l, i0, j0), fd_f);
        for (std::size_t i = 0; i < m; ++i) {
          const cxd u_re = (u_rp(i, l) - u_rm(i, l)) / (2.0 * step);
          const cxd u_im_d = (u_ip(i, l) - u_im(i, l)) / (2.0 * step);
          err.du_ds.take(base.du_ds.at(i, l, i0, j0),
                         0.5 * (u_re + cxd{0.0, 1.0} * u_im_d));
          const cxd ub_re = (std::conj(u_rp(i, l)) - std::conj(u_rm(i, l))) /
                            (2.0 * step);
          const cxd ub_im = (std::conj(u_ip(i, l)) - std::conj(u_im(i, l))) /
                            (2.0 * step);
          err.dubar_ds.take(base.dubar_ds.at(i, l, i0, j0),
                            0.5 * (ub_re + cxd{0.0, 1.0} * ub_im));
        }
      }
    }

  // Divergences of u Phi u^* z (z side) and z^* u Phi u^* z (s side); both
  // targets are gauge-free.
  const auto direction = [&phi, &ratio_eig](const CMatrix& zz,
                                            const CMatrix& ss) {
    const HermEigen e = ratio_eig(zz, ss);
    const std::vector<double> ph = phi.h(e.lambda);
    return (e.u * CMatrix::diag(ph)) * (e.u.adjoint() * zz);
  };
  double fd_div_z = 0.0;
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < p; ++k) {
      const double step = fd_step * std::max(1.0, std::abs(z(j, k)));
      fd_div_z += fd_wirtinger(
                      [&](const CMatrix& zz) { return direction(zz, s)(j, k); },
                      z, j, k, step)
                      .real();
    }
  err.div_z.take(
      divergence_unknown_z(z, s, phi, Branch::PGreaterM), fd_div_z);

  const auto sandwich = [&phi, &ratio_eig, &z](const CMatrix& ss) {
    const HermEigen e = ratio_eig(z, ss);
    const std::vector<double> ph = phi.h(e.lambda);
    return ((z.adjoint() * e.u) * CMatrix::diag(ph)) * (e.u.adjoint() * z);
  };
  cxd fd_div_s = 0.0;
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t l = 0; l < p; ++l) {
      const double step = fd_step * std::max(1.0, std::abs(s(j, l)));
      fd_div_s += fd_hermitian(
          [&](const CMatrix& sp) { return sandwich(sp)(l, j); }, s, j, l,
          step);
    }
  err.div_s.take(
      cxd{divergence_unknown_s(z, s, phi, Branch::PGreaterM), 0.0}, fd_div_s);
}

VerifyRow fd_row(std::string name, const MaxErr& err) {
  VerifyRow row;
  row.name = std::move(name);
  row.stat = err.v;
  row.threshold = kFdThreshold;
  row.pass = err.v <= kFdThreshold;
  return row;
}

VerifyRow mc_row(std::string name, double stat, double threshold) {
  VerifyRow row;
  row.name = std::move(name);
  row.stat = stat;
  row.threshold = threshold;
  row.pass = stat <= threshold;
  return row;
}

}  // namespace

std::vector<VerifyRow> verify_calculus(std::size_t m, std::size_t p,
                                       std::uint64_t seed, double fd_step,
                                       std::size_t instances) {
  if (m == 0 || p == 0)
    throw ConfigInvalid("verify_calculus: m and p must be positive");
  if (!(fd_step > 0.0))
    throw ConfigInvalid("verify_calculus: fd_step must be positive");
  if (instances == 0)
    throw ConfigInvalid("verify_calculus: instances must be positive");

  const std::size_t mt = std::max(m, p);
  const std::size_t pt = std::min(m, p);
  const std::size_t max_attempts = 100 * instances;

  // Spectral suite on the tall orientation.
  KnownSuiteErr known_err;
  {
    const ShrinkageProfile phi = inverse_multiplier(pt);
    std::size_t done = 0;
    for (std::size_t attempt = 0; attempt < max_attempts && done < instances;
         ++attempt) {
      CounterRng rng({seed, attempt});
      const CMatrix z = sample_std_cnormal(mt, pt, rng);
      const HermEigen eig = herm_eigen((z.adjoint() * z).hermitized());
      if (!spectrum_admissible(eig.lambda)) continue;
      run_known_instance(z, fd_step, phi, known_err);
      ++done;
    }
    if (done < instances)
      throw NoConvergence("verify_calculus: too few admissible instances");
  }

  std::vector<VerifyRow> rows;
  rows.push_back(fd_row("spectrum z-derivative", known_err.dl));
  rows.push_back(fd_row("eigenbasis z-derivative", known_err.du));
  rows.push_back(
      fd_row("conjugate eigenbasis z-derivative", known_err.dubar));
  rows.push_back(fd_row("spectral divergence", known_err.div));

  // The s draws only need to be a generic positive definite matrix; degrees
  // of freedom are an instance-generation choice, not part of the contract.
  const std::size_t n0 = m + p + 3;

  if (m > p) {
    MgtpSuiteErr err;
    const ShrinkageProfile phi = inverse_multiplier(p);
    std::size_t done = 0;
    for (std::size_t attempt = 0; attempt < max_attempts && done < instances;
         ++attempt) {
      CounterRng rng({seed, kSuiteStride + attempt});
      const CMatrix z = sample_std_cnormal(m, p, rng);
      const CMatrix s = sample_cwishart(CMatrix::identity(p), n0, rng);
      std::vector<double> f;
      try {
        f = sim_diag((z.adjoint() * z).hermitized(), s, 0.0).f;
      } catch (const Error&) {
        continue;
      }
      if (!spectrum_admissible(f)) continue;
      run_mgtp_instance(z, s, fd_step, phi, err);
      ++done;
    }
    if (done < instances)
      throw NoConvergence("verify_calculus: too few admissible instances");
    rows.push_back(fd_row("joint eigenvalue z-derivative", err.df_dz));
    rows.push_back(fd_row("joint basis z-derivative", err.da));
    rows.push_back(fd_row("joint inverse-basis z-derivative", err.da_inv));
    rows.push_back(fd_row("joint eigenvalue s-derivative", err.df_ds));
    rows.push_back(fd_row("joint row-product s-derivative", err.dpair_ds));
    rows.push_back(fd_row("joint divergence in z", err.div_z));
    rows.push_back(fd_row("joint divergence in s", err.div_s));
  } else if (p > m) {
    PgtmSuiteErr err;
    const ShrinkageProfile phi = inverse_multiplier(m);
    std::size_t done = 0;
    for (std::size_t attempt = 0; attempt < max_attempts && done < instances;
         ++attempt) {
      CounterRng rng({seed, 2 * kSuiteStride + attempt});
      const CMatrix z = sample_std_cnormal(m, p, rng);
      const CMatrix s = sample_cwishart(CMatrix::identity(p), n0, rng);
      std::vector<double> f;
      try {
        f = herm_eigen((z * herm_pd_solve(s, z.adjoint())).hermitized())
                .lambda;
      } catch (const Error&) {
        continue;
      }
      if (!spectrum_admissible(f)) continue;
      run_pgtm_instance(z, s, fd_step, phi, err);
      ++done;
    }
    if (done < instances)
      throw NoConvergence("verify_calculus: too few admissible instances");
    rows.push_back(fd_row("ratio eigenvalue z-derivative", err.df_dz));
    rows.push_back(fd_row("ratio eigenbasis z-derivative", err.du));
    rows.push_back(
        fd_row("conjugate ratio eigenbasis z-derivative", err.dubar));
    rows.push_back(fd_row("ratio eigenvalue s-derivative", err.df_ds));
    rows.push_back(fd_row("ratio eigenbasis s-derivative", err.du_ds));
    rows.push_back(
        fd_row("conjugate ratio eigenbasis s-derivative", err.dubar_ds));
    rows.push_back(fd_row("ratio divergence in z", err.div_z));
    rows.push_back(fd_row("ratio divergence in s", err.div_s));
  }

  return rows;
}

std::vector<VerifyRow> verify_stein(std::size_t p, std::size_t reps,
                                    std::uint64_t seed) {
  if (p == 0) throw ConfigInvalid("verify_stein: p must be positive");
  if (reps < 2) throw ConfigInvalid("verify_stein: reps must be at least 2");

  // Generic well-conditioned setup drawn once.
  CounterRng setup({seed, ~std::uint64_t{0}});
  const CMatrix b = sample_std_cnormal(p, p, setup);
  const CMatrix sigma =
      (CMatrix::identity(p) +
       (0.5 / static_cast<double>(p)) * (b * b.adjoint()))
          .hermitized();
  const CMatrix theta = sample_std_cnormal(p, 1, setup);
  const CMatrix cvec = sample_std_cnormal(p, 1, setup);

  std::vector<VerifyRow> rows;

  {
    VectorField g;
    g.eval = [](const CMatrix& z) { return z; };
    g.divergence = [p](const CMatrix&) {
      return 2.0 * static_cast<double>(p);
    };
    const McIdentity r =
        stein_identity_check(theta, sigma, g, reps, {seed, reps});
    rows.push_back(
        mc_row("identity field", std::abs(r.lhs - r.rhs), 3.0 * r.se));
  }
  {
    VectorField g;
    g.eval = [cvec](const CMatrix&) { return cvec; };
    g.divergence = [](const CMatrix&) { return 0.0; };
    const McIdentity r =
        stein_identity_check(theta, sigma, g, reps, {seed, 2 * reps});
    rows.push_back(
        mc_row("constant field", std::abs(r.lhs - r.rhs), 3.0 * r.se));
  }
  {
    VectorField g;
    g.eval = [sigma](const CMatrix& z) { return sigma * z; };
    g.divergence = [&sigma](const CMatrix&) {
      return 2.0 * std::real(trace(sigma));
    };
    const McIdentity r =
        stein_identity_check(theta, sigma, g, reps, {seed, 3 * reps});
    rows.push_back(mc_row("covariance-linear field", std::abs(r.lhs - r.rhs),
                          3.0 * r.se));
  }
  {
    // Pinned two-dimensional case: identity field, zero mean, identity
    // covariance; both sides must sit at 4.
    VectorField g;
    g.eval = [](const CMatrix& z) { return z; };
    g.divergence = [](const CMatrix&) { return 4.0; };
    const McIdentity r = stein_identity_check(
        CMatrix(2, 1), CMatrix::identity(2), g, reps, {seed, 4 * reps});
    rows.push_back(mc_row("pinned identity value",
                          std::abs(r.lhs - 4.0), 3.0 * r.se));
  }
  return rows;
}

std::vector<VerifyRow> verify_stein_haff(std::size_t p, std::size_t n,
                                         std::size_t reps,
                                         std::uint64_t seed) {
  if (p == 0) throw ConfigInvalid("verify_stein_haff: p must be positive");
  if (n <= p) throw ConfigInvalid("verify_stein_haff: requires n > p");
  if (reps < 2)
    throw ConfigInvalid("verify_stein_haff: reps must be at least 2");

  CounterRng setup({seed, ~std::uint64_t{0}});
  const CMatrix b = sample_std_cnormal(p, p, setup);
  const CMatrix sigma =
      (CMatrix::identity(p) +
       (0.5 / static_cast<double>(p)) * (b * b.adjoint()))
          .hermitized();
  const double pd = static_cast<double>(p);
  const double np = static_cast<double>(n) * pd;

  std::vector<VerifyRow> rows;

  {
    MatrixField g;
    g.eval = [](const CMatrix& s) { return s; };
    g.trace_ds = [pd](const CMatrix&) { return pd * pd; };
    const McIdentity r = stein_haff_check(sigma, n, g, reps, {seed, reps});
    rows.push_back(
        mc_row("linear field", std::abs(r.lhs - r.rhs), 3.0 * r.se));
    // For this field the right side is np replicate by replicate, up to
    // solver roundoff.
    rows.push_back(
        mc_row("linear field pinned value", std::abs(r.rhs - np), 1e-9));
  }
  {
    MatrixField g;
    g.eval = [p](const CMatrix&) { return CMatrix::identity(p); };
    g.trace_ds = [](const CMatrix&) { return 0.0; };
    const McIdentity r =
        stein_haff_check(sigma, n, g, reps, {seed, 2 * reps});
    rows.push_back(
        mc_row("constant field", std::abs(r.lhs - r.rhs), 3.0 * r.se));
  }
  {
    MatrixField g;
    g.eval = [](const CMatrix& s) { return 2.5 * s; };
    g.trace_ds = [pd](const CMatrix&) { return 2.5 * pd * pd; };
    const McIdentity r =
        stein_haff_check(sigma, n, g, reps, {seed, 3 * reps});
    rows.push_back(
        mc_row("scaled linear field", std::abs(r.lhs - r.rhs), 3.0 * r.se));
  }
  return rows;
}

}  // namespace cxshrink
