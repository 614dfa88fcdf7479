#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cxshrink {

// One row of a verification table: pass iff stat <= threshold. For finite
// difference rows stat is the worst relative error seen; for Monte Carlo
// rows it is |lhs - rhs| against a 3-standard-error threshold.
struct VerifyRow {
  std::string name;
  double stat = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

// Cross-checks every analytic derivative tensor and divergence closed form
// against finite differences on gap-guarded random instances. m > p runs the
// joint-reduction suite, p > m the ratio suite; the spectral suite always
// runs, on the tall orientation of the shape.
std::vector<VerifyRow> verify_calculus(std::size_t m, std::size_t p,
                                       std::uint64_t seed, double fd_step,
                                       std::size_t instances);

// Monte Carlo check of the integration-by-parts identity for the complex
// normal on identity, constant, and covariance-linear fields, plus the
// pinned dimension-two value of the identity field.
std::vector<VerifyRow> verify_stein(std::size_t p, std::size_t reps,
                                    std::uint64_t seed);

// Monte Carlo check of the integration-by-parts identity for the complex
// Wishart; the linear field closes deterministically, the rest within Monte
// Carlo error.
std::vector<VerifyRow> verify_stein_haff(std::size_t p, std::size_t n,
                                         std::size_t reps,
                                         std::uint64_t seed);

}  // namespace cxshrink
