#pragma once

#include <functional>

#include "cxshrink/cmatrix.hpp"
#include "cxshrink/eigen.hpp"
#include "cxshrink/profile.hpp"

namespace cxshrink {

// Value of a complex-linear derivative d/dz_jk = (d/dRe - i d/dIm)/2, and of
// the Hermitian-matrix derivative d/ds_jk respectively.
using WirtingerDeriv = cxd;
using HermDeriv = cxd;

// Central finite difference realizing d/dz_jk on a scalar function of a
// complex matrix. Truncation error is O(step^2).
WirtingerDeriv fd_wirtinger(const std::function<cxd(const CMatrix&)>& func,
                            const CMatrix& z, std::size_t j, std::size_t k,
                            double step);

// Central finite difference realizing d/ds_jk on a scalar function of a
// Hermitian matrix: (1/2)(1+delta_jk)(d/dRe + (1-delta_jk) i d/dIm), probed
// along Hermitian-preserving directions.
HermDeriv fd_hermitian(const std::function<cxd(const CMatrix&)>& func,
                       const CMatrix& s, std::size_t j, std::size_t k,
                       double step);

// Flat complex tensors with explicit extents.
struct CxTensor3 {
  std::size_t d0 = 0, d1 = 0, d2 = 0;
  std::vector<cxd> v;
  CxTensor3() = default;
  CxTensor3(std::size_t a, std::size_t b, std::size_t c)
      : d0(a), d1(b), d2(c), v(a * b * c) {}
  cxd& at(std::size_t a, std::size_t b, std::size_t c) {
    return v[(a * d1 + b) * d2 + c];
  }
  const cxd& at(std::size_t a, std::size_t b, std::size_t c) const {
    return v[(a * d1 + b) * d2 + c];
  }
};

struct CxTensor4 {
  std::size_t d0 = 0, d1 = 0, d2 = 0, d3 = 0;
  std::vector<cxd> v;
  CxTensor4() = default;
  CxTensor4(std::size_t a, std::size_t b, std::size_t c, std::size_t d)
      : d0(a), d1(b), d2(c), d3(d), v(a * b * c * d) {}
  cxd& at(std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
    return v[((a * d1 + b) * d2 + c) * d3 + d];
  }
  const cxd& at(std::size_t a, std::size_t b, std::size_t c,
                std::size_t d) const {
    return v[((a * d1 + b) * d2 + c) * d3 + d];
  }
};

// Analytic derivatives of the spectral system of w = z^* z = u Diag(l) u^*.
// du.at(i,l,j,k) = du_il / dz_jk, dubar likewise for conj(u), and
// dl.at(i,j,k) = dl_i / dz_jk. Requires full column rank and gap-guarded
// distinct eigenvalues.
struct EigDerivsKnown {
  HermEigen eig;
  CxTensor4 du;     // p x p x m x p
  CxTensor4 dubar;  // p x p x m x p
  CxTensor3 dl;     // p x m x p
};
EigDerivsKnown eig_derivs_known(const CMatrix& z, double gap_tol = 1e-8);

// Analytic derivatives of the joint reduction a^* s a = I, a^* (z^* z) a =
// Diag(f) for m > p. Index conventions: da.at(i,l,j,k) = da_il / dz_jk;
// da_inv.at(l,kp,j,k) = d(a^{-1})_{l,kp} / dz_jk; df_dz.at(kp,j,k) =
// df_kp / dz_jk; dpair_ds.at(k,i,j) is the s_ij-derivative of the product
// (a^{-1})_{ki} conj((a^{-1})_{kj}); df_ds.at(i,k,kp) = df_i / ds_{k,kp}.
struct EigDerivsUnknownMgtp {
  SimDiag sd;
  CxTensor4 da;        // p x p x m x p
  CxTensor4 da_inv;    // p x p x m x p
  CxTensor3 df_dz;     // p x m x p
  CxTensor3 dpair_ds;  // p x p x p
  CxTensor3 df_ds;     // p x p x p
};
EigDerivsUnknownMgtp eig_derivs_unknown_mgtp(const CMatrix& z,
                                             const CMatrix& s,
                                             double gap_tol = 1e-8);

// Analytic derivatives of the spectral system of t = z s^{-1} z^* =
// u Diag(f) u^* for p > m. du.at(i,l,j,k) = du_il / dz_jk; du_ds.at(k,l,i,j)
// = du_kl / ds_ij; df_dz.at(l,j,k) = df_l / dz_jk; df_ds.at(l,i,j) =
// df_l / ds_ij.
struct EigDerivsUnknownPgtm {
  HermEigen eig;
  CxTensor4 du;        // m x m x m x p
  CxTensor4 dubar;     // m x m x m x p
  CxTensor3 df_dz;     // m x m x p
  CxTensor4 du_ds;     // m x m x p x p
  CxTensor4 dubar_ds;  // m x m x p x p
  CxTensor3 df_ds;     // m x p x p
};
EigDerivsUnknownPgtm eig_derivs_unknown_pgtm(const CMatrix& z,
                                             const CMatrix& s,
                                             double gap_tol = 1e-8);

enum class Branch { MGreaterP, PGreaterM };

// Closed form of sum_jk Re d(z u Phi u^*)_jk / dz_jk for a diagonal spectral
// multiplier Phi(l) on the eigenbasis of z^* z. Requires m >= p.
double divergence_known(const CMatrix& z, const ShrinkageProfile& phi,
                        double gap_tol = 1e-8);

// Closed forms of the z- and s-divergences of the unknown-covariance
// correction terms; branch selects which side of m vs p the formulas serve.
double divergence_unknown_z(const CMatrix& z, const CMatrix& s,
                            const ShrinkageProfile& phi, Branch branch,
                            double gap_tol = 1e-8);
double divergence_unknown_s(const CMatrix& z, const CMatrix& s,
                            const ShrinkageProfile& phi, Branch branch,
                            double gap_tol = 1e-8);

}  // namespace cxshrink
