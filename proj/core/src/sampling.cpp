#include "cxshrink/sampling.hpp"

#include "cxshrink/eigen.hpp"

namespace cxshrink {

void ModelParams::validate() const {
  if (m == 0 || p == 0)
    throw ConfigInvalid("model: m and p must be positive");
  if (n <= p) throw ConfigInvalid("model: n must exceed p");
  if (xi.rows() != m || xi.cols() != p)
    throw ConfigInvalid("model: xi must be m x p");
  if (sigma.rows() != p || sigma.cols() != p)
    throw ConfigInvalid("model: sigma must be p x p");
  if (k.rows() != m || k.cols() != m)
    throw ConfigInvalid("model: k must be m x m");
  try {
    cholesky(sigma);
  } catch (const Error&) {
    throw ConfigInvalid("model: sigma is not Hermitian positive definite");
  }
  try {
    cholesky(k);
  } catch (const Error&) {
    throw ConfigInvalid("model: k is not Hermitian positive definite");
  }
}

CMatrix sample_std_cnormal(std::size_t m, std::size_t p, CounterRng& rng) {
  CMatrix e(m, p);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < p; ++j) e(i, j) = rng.next_cnormal();
  return e;
}

CMatrix sample_cn_matrix(const ModelParams& params, CounterRng& rng) {
  return sample_cn_matrix(params.xi, sqrt_herm(params.k),
                          sqrt_herm(params.sigma), rng);
}

CMatrix sample_cn_matrix(const CMatrix& xi, const CMatrix& k_sqrt,
                         const CMatrix& sigma_sqrt, CounterRng& rng) {
  if (k_sqrt.rows() != xi.rows() || sigma_sqrt.rows() != xi.cols())
    throw DimensionMismatch("sample_cn_matrix: covariance shapes disagree");
  const CMatrix e = sample_std_cnormal(xi.rows(), xi.cols(), rng);
  return xi + k_sqrt * e * sigma_sqrt;
}

CMatrix sample_cwishart(const CMatrix& sigma, std::size_t n, CounterRng& rng) {
  if (n <= sigma.rows())
    throw DimensionMismatch("sample_cwishart: need n > p");
  return sample_cwishart_root(sqrt_herm(sigma), n, rng);
}

CMatrix sample_cwishart_root(const CMatrix& sigma_sqrt, std::size_t n,
                             CounterRng& rng) {
  const std::size_t p = sigma_sqrt.rows();
  CMatrix s0(p, p);
  std::vector<cxd> x(p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < p; ++a) x[a] = rng.next_cnormal();
    for (std::size_t a = 0; a < p; ++a) {
      s0(a, a) += std::norm(x[a]);
      for (std::size_t b = a + 1; b < p; ++b) {
        const cxd v = x[a] * std::conj(x[b]);
        s0(a, b) += v;
        s0(b, a) += std::conj(v);
      }
    }
  }
  return (sigma_sqrt * s0 * sigma_sqrt).hermitized();
}

}  // namespace cxshrink
