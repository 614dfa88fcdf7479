#pragma once

#include <vector>

#include "cxshrink/cmatrix.hpp"

namespace cxshrink {

// Eigendecomposition of a Hermitian matrix: h = u * Diag(lambda) * u^*.
// Eigenvalues are sorted descending (ties keep sweep order); each eigenvector
// column is phased so its largest-modulus entry is real positive.
struct HermEigen {
  CMatrix u;
  std::vector<double> lambda;
};

// Joint reduction of a Hermitian w against a Hermitian positive definite s:
// a^* s a = I and a^* w a = Diag(f), f sorted descending. a_inv is the exact
// companion inverse produced by the construction, kept to avoid re-inversion.
struct SimDiag {
  CMatrix a;
  CMatrix a_inv;
  std::vector<double> f;
};

// Two-sided complex Jacobi sweeps, deterministic cyclic pivot order, capped at
// 100 sweeps. tol bounds both the Hermitian pre-check and the residual
// off-diagonal mass accepted at the cap.
HermEigen herm_eigen(const CMatrix& h, double tol = 1e-10);

// Lower-triangular l with l * l^* = h and real positive diagonal.
CMatrix cholesky(const CMatrix& h, double tol = 1e-10);

// Simultaneous diagonalization via l = cholesky(s), the eigensystem of
// l^{-1} w l^{-*}, and a = l^{-*} v. Throws DegenerateSpectrum when
// min_k(f_k - f_{k+1}) < gap_tol * max(f) or when f_min <= 0.
SimDiag sim_diag(const CMatrix& w, const CMatrix& s, double gap_tol = 1e-8);

// u * Diag(lambda^{-1/2}) * u^* for Hermitian positive definite k.
CMatrix inv_sqrt_herm(const CMatrix& k, double tol = 1e-10);

// u * Diag(lambda^{1/2}) * u^* for Hermitian positive semidefinite k.
CMatrix sqrt_herm(const CMatrix& k, double tol = 1e-10);

// Solve l * x = b (lower triangular) and l^* * x = b.
CMatrix solve_lower(const CMatrix& l, const CMatrix& b);
CMatrix solve_lower_adjoint(const CMatrix& l, const CMatrix& b);

// h^{-1} * b through the Cholesky factorization of Hermitian PD h.
CMatrix herm_pd_solve(const CMatrix& h, const CMatrix& b);
CMatrix herm_pd_inverse(const CMatrix& h);

// Smallest consecutive gap of a descending sequence, relative to its largest
// magnitude. +inf for sequences shorter than 2.
double min_relative_gap(const std::vector<double>& descending);

// Common admission check for spectra feeding gap-dividing formulas: all
// entries positive, smallest at least 1e-12 of the largest, and relative
// gaps at least gap_tol. Throws DegenerateSpectrum naming `who`.
void guard_spectrum(const std::vector<double>& descending, double gap_tol,
                    const char* who);

}  // namespace cxshrink
