#pragma once

// Monte Carlo experiment runner. Each replicate draws a (z, s) pair, runs a
// suite of estimators, and contributes one loss sample and one unbiased risk
// estimate sample per estimator. Configs arrive as JSON, reports leave as CSV.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cxshrink/cmatrix.hpp"
#include "cxshrink/errors.hpp"
#include "cxshrink/estimators.hpp"

namespace cxshrink {

enum class XiMode { Zero, Literal, ScaledRandom };
enum class LossKind { Known, Invariant };

const char* xi_mode_name(XiMode mode);
const char* loss_kind_name(LossKind kind);

// Mean specification. ScaledRandom draws the mean once, from its own seed on
// a stream index no replicate uses, then holds it fixed: the report estimates
// risk at that mean, not an average over means.
struct XiSpec {
  XiMode mode = XiMode::Zero;
  double scale = 0.0;          // ScaledRandom only
  std::uint64_t sub_seed = 0;  // ScaledRandom only
  CMatrix matrix;              // Literal only, m x p
};

struct ExperimentConfig {
  std::size_t m = 0;
  std::size_t p = 0;
  std::size_t n = 0;
  XiSpec xi;
  CMatrix sigma;  // p x p Hermitian positive definite
  CMatrix k;      // m x m Hermitian positive definite
  std::vector<EstimatorSpec> estimators;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  LossKind loss = LossKind::Known;
  double gap_threshold = 1e-8;

  // ConfigInvalid unless dimensions are positive, n > p, sigma and k are
  // Hermitian positive definite with matching shapes, a literal mean is
  // m x p, reps >= 100, and every listed estimator can live at this (m, p).
  void validate() const;

  // Resolves the mean spec to a concrete m x p matrix.
  CMatrix build_xi() const;
};

struct RiskReport {
  std::string estimator_id;
  std::size_t m = 0;
  std::size_t p = 0;
  std::size_t n = 0;
  XiMode xi_mode = XiMode::Zero;
  double xi_scale = 0.0;
  std::size_t reps_used = 0;  // reps_used + discarded == reps
  std::size_t discarded = 0;
  double empirical_risk = 0.0;
  double risk_se = 0.0;
  double ure_mean = 0.0;
  double ure_se = 0.0;
  double baseline = 0.0;  // m * p
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

// Replicate r draws z then s from stream (seed, r). Losses are measured in
// the original coordinates; the risk estimate is evaluated on whitened ones,
// where its unbiasedness holds. A replicate whose spectrum trips the gap
// threshold is discarded for that estimator only. Deterministic for a fixed
// config.
std::vector<RiskReport> run_experiment(const ExperimentConfig& config,
                                       const ProgressFn& progress = {});

// Columns exactly: estimator_id,m,p,n,xi_mode,xi_scale,reps_used,discarded,
// empirical_risk,risk_se,ure_mean,ure_se,baseline. Reals printed with %.17g
// so equal reports produce byte-identical files.
void write_report_csv(const std::vector<RiskReport>& reports,
                      const std::string& path);

ExperimentConfig read_config_json(const std::string& path);

// Inverse of read_config_json for the JSON-encodable estimator kinds;
// gamma-class and custom-profile estimators are code-level only.
void write_config_json(const ExperimentConfig& config,
                       const std::string& path);

// Matrix files use {"rows": r, "cols": c, "re": [...], "im": [...]} with
// row-major entry order.
CMatrix read_matrix_json(const std::string& path);
void write_matrix_json(const CMatrix& a, const std::string& path);

// One-shot estimation payload: z required, the rest per estimator kind.
struct EstimateInput {
  CMatrix z;
  std::optional<CMatrix> s;
  std::optional<std::size_t> n;
  std::optional<CMatrix> sigma;
  std::optional<CMatrix> k;
};

EstimateInput read_estimate_input(const std::string& path);

}  // namespace cxshrink
