#pragma once

#include <cstddef>

#include "cxshrink/cmatrix.hpp"
#include "cxshrink/rng.hpp"

namespace cxshrink {

// Observation model: Z (m x p) has mean xi with row covariance k and column
// covariance sigma; S (p x p) accumulates n independent sigma-covariance
// outer products, n > p.
struct ModelParams {
  std::size_t m = 0;
  std::size_t p = 0;
  std::size_t n = 0;
  CMatrix xi;     // m x p
  CMatrix sigma;  // p x p, Hermitian positive definite
  CMatrix k;      // m x m, Hermitian positive definite

  // Throws ConfigInvalid on shape mismatch, n <= p, or a covariance that is
  // not Hermitian positive definite.
  void validate() const;
};

// m x p matrix of iid standard complex normals, drawn row-major.
CMatrix sample_std_cnormal(std::size_t m, std::size_t p, CounterRng& rng);

// Z = xi + k^{1/2} E sigma^{1/2}.
CMatrix sample_cn_matrix(const ModelParams& params, CounterRng& rng);
CMatrix sample_cn_matrix(const CMatrix& xi, const CMatrix& k_sqrt,
                         const CMatrix& sigma_sqrt, CounterRng& rng);

// Sum of n outer products x_i x_i^* with x_i iid CN_p(0, sigma); exact
// Hermitian by construction.
CMatrix sample_cwishart(const CMatrix& sigma, std::size_t n, CounterRng& rng);
CMatrix sample_cwishart_root(const CMatrix& sigma_sqrt, std::size_t n,
                             CounterRng& rng);

}  // namespace cxshrink
