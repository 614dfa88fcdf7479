#include "cxshrink/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <utility>

#include "json.hpp"

#include "cxshrink/accum.hpp"
#include "cxshrink/eigen.hpp"
#include "cxshrink/risk.hpp"
#include "cxshrink/rng.hpp"
#include "cxshrink/sampling.hpp"

namespace cxshrink {

namespace {

using nlohmann::json;

// Replicate streams use indices 0..reps-1; the mean draw lives where no
// replicate can reach.
constexpr std::uint64_t kXiStreamIndex = ~std::uint64_t{0};

const char* covariance_mode_name(CovarianceMode mode) {
  return mode == CovarianceMode::Known ? "known" : "unknown";
}

bool is_known_kind(EstimatorKind kind) {
  return kind == EstimatorKind::KnownCrudeEm ||
         kind == EstimatorKind::KnownGamma ||
         kind == EstimatorKind::KnownOrdered;
}

bool is_unknown_kind(EstimatorKind kind) {
  return kind == EstimatorKind::UnknownEm ||
         kind == EstimatorKind::UnknownAs ||
         kind == EstimatorKind::UnknownGamma;
}

// Resolves the profile an estimator will run with, converting shape
// incompatibilities into ConfigInvalid so misconfiguration surfaces before
// any sampling.
ShrinkageProfile lane_profile(const EstimatorSpec& spec, std::size_t m,
                              std::size_t p, std::size_t n) {
  if (is_known_kind(spec.kind) && spec.covariance != CovarianceMode::Known)
    throw ConfigInvalid("config: kind " + estimator_kind_name(spec.kind) +
                        " requires known covariance");
  if (is_unknown_kind(spec.kind) && spec.covariance != CovarianceMode::Unknown)
    throw ConfigInvalid("config: kind " + estimator_kind_name(spec.kind) +
                        " requires unknown covariance");
  try {
    if (spec.profile) {
      if (spec.covariance == CovarianceMode::Known) {
        if (m < p)
          throw BranchMismatch("custom known profile requires m >= p");
        if (spec.profile->q != p)
          throw BranchMismatch("custom known profile length must equal p");
      } else {
        if (m == p)
          throw BranchMismatch("custom unknown profile requires m != p");
        if (spec.profile->q != std::min(m, p))
          throw BranchMismatch(
              "custom unknown profile length must equal min(m, p)");
      }
      return *spec.profile;
    }
    return make_profile(spec.kind, m, p, n);
  } catch (const BranchMismatch& e) {
    throw ConfigInvalid(std::string("config: ") + e.what());
  } catch (const MissingArgument& e) {
    throw ConfigInvalid(std::string("config: ") + e.what());
  }
}

double neumaier_mean(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  NeumaierSum s;
  for (double x : v) s.add(x);
  return s.get() / static_cast<double>(v.size());
}

double neumaier_se(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  NeumaierSum s;
  for (double x : v) s.add((x - mean) * (x - mean));
  const double var = s.get() / static_cast<double>(v.size() - 1);
  return std::sqrt(std::max(0.0, var) / static_cast<double>(v.size()));
}

struct Lane {
  EstimatorSpec spec;
  std::string id;
  ShrinkageProfile profile;  // unused for the MLE lane
  std::vector<double> loss_samples;
  std::vector<double> ure_samples;
  std::size_t discarded = 0;
};

}  // namespace

const char* xi_mode_name(XiMode mode) {
  switch (mode) {
    case XiMode::Zero: return "zero";
    case XiMode::Literal: return "literal";
    case XiMode::ScaledRandom: return "scaled_random";
  }
  return "zero";
}

const char* loss_kind_name(LossKind kind) {
  return kind == LossKind::Known ? "known" : "invariant";
}

void ExperimentConfig::validate() const {
  if (m == 0 || p == 0)
    throw ConfigInvalid("config: m and p must be positive");
  if (n <= p) throw ConfigInvalid("config: requires n > p");
  if (sigma.rows() != p || sigma.cols() != p)
    throw ConfigInvalid("config: sigma must be p x p");
  if (k.rows() != m || k.cols() != m)
    throw ConfigInvalid("config: k must be m x m");
  try {
    cholesky(sigma);
  } catch (const Error&) {
    throw ConfigInvalid("config: sigma must be Hermitian positive definite");
  }
  try {
    cholesky(k);
  } catch (const Error&) {
    throw ConfigInvalid("config: k must be Hermitian positive definite");
  }
  if (xi.mode == XiMode::Literal &&
      (xi.matrix.rows() != m || xi.matrix.cols() != p))
    throw ConfigInvalid("config: literal xi must be m x p");
  if (xi.mode == XiMode::ScaledRandom && !std::isfinite(xi.scale))
    throw ConfigInvalid("config: xi scale must be finite");
  if (!(gap_threshold >= 0.0))
    throw ConfigInvalid("config: gap_threshold must be nonnegative");
  if (reps < 100) throw ConfigInvalid("config: reps must be at least 100");
  if (estimators.empty())
    throw ConfigInvalid("config: estimator list is empty");
  for (const EstimatorSpec& spec : estimators)
    if (spec.kind != EstimatorKind::Mle) lane_profile(spec, m, p, n);
}

CMatrix ExperimentConfig::build_xi() const {
  switch (xi.mode) {
    case XiMode::Zero:
      return CMatrix(m, p);
    case XiMode::Literal:
      return xi.matrix;
    case XiMode::ScaledRandom: {
      CounterRng rng({xi.sub_seed, kXiStreamIndex});
      return xi.scale * sample_std_cnormal(m, p, rng);
    }
  }
  throw ConfigInvalid("config: unhandled xi mode");
}

std::vector<RiskReport> run_experiment(const ExperimentConfig& config,
                                       const ProgressFn& progress) {
  config.validate();
  const std::size_t m = config.m;
  const std::size_t p = config.p;
  const std::size_t n = config.n;
  const double baseline = static_cast<double>(m) * static_cast<double>(p);
  const CMatrix xi = config.build_xi();

  const CMatrix sigma_sqrt = sqrt_herm(config.sigma);
  const CMatrix sigma_inv_sqrt = inv_sqrt_herm(config.sigma);
  const CMatrix k_sqrt = sqrt_herm(config.k);
  const CMatrix k_inv_sqrt = inv_sqrt_herm(config.k);

  std::vector<Lane> lanes;
  lanes.reserve(config.estimators.size());
  for (const EstimatorSpec& spec : config.estimators) {
    Lane lane;
    lane.spec = spec;
    lane.id = estimator_kind_name(spec.kind);
    if (spec.kind != EstimatorKind::Mle)
      lane.profile = lane_profile(spec, m, p, n);
    lane.loss_samples.reserve(config.reps);
    lane.ure_samples.reserve(config.reps);
    lanes.push_back(std::move(lane));
  }

  for (std::size_t r = 0; r < config.reps; ++r) {
    CounterRng rng({config.seed, r});
    const CMatrix z = sample_cn_matrix(xi, k_sqrt, sigma_sqrt, rng);
    const CMatrix s = sample_cwishart_root(sigma_sqrt, n, rng);
    const CMatrix zw = k_inv_sqrt * z;
    const CMatrix zw_known = zw * sigma_inv_sqrt;

    for (Lane& lane : lanes) {
      try {
        CMatrix xi_hat(m, p);
        double ure = baseline;
        if (lane.spec.kind == EstimatorKind::Mle) {
          xi_hat = z;
        } else if (lane.spec.covariance == CovarianceMode::Known) {
          const CMatrix shrunk =
              apply_h_known(zw_known, lane.profile, config.gap_threshold);
          xi_hat = (k_sqrt * shrunk) * sigma_sqrt;
          const UreValue u =
              ure_known(zw_known, lane.profile, config.gap_threshold);
          if (u.degenerate || !std::isfinite(u.value))
            throw DegenerateSpectrum("replicate spectrum under threshold");
          ure = u.value;
        } else {
          const CMatrix shrunk =
              apply_h_unknown(zw, s, lane.profile, config.gap_threshold);
          xi_hat = k_sqrt * shrunk;
          const UreValue u =
              ure_unknown(zw, s, n, lane.profile, config.gap_threshold);
          if (u.degenerate || !std::isfinite(u.value))
            throw DegenerateSpectrum("replicate spectrum under threshold");
          ure = u.value;
        }
        const double loss =
            config.loss == LossKind::Known
                ? loss_known(xi_hat, xi)
                : loss_invariant(xi_hat, xi, config.sigma, config.k);
        lane.loss_samples.push_back(loss);
        lane.ure_samples.push_back(ure);
      } catch (const DegenerateSpectrum&) {
        ++lane.discarded;
      }
    }
    if (progress) progress(r + 1, config.reps);
  }

  std::vector<RiskReport> reports;
  reports.reserve(lanes.size());
  for (const Lane& lane : lanes) {
    RiskReport rep;
    rep.estimator_id = lane.id;
    rep.m = m;
    rep.p = p;
    rep.n = n;
    rep.xi_mode = config.xi.mode;
    rep.xi_scale = config.xi.scale;
    rep.reps_used = lane.loss_samples.size();
    rep.discarded = lane.discarded;
    rep.empirical_risk = neumaier_mean(lane.loss_samples);
    rep.risk_se = neumaier_se(lane.loss_samples, rep.empirical_risk);
    rep.ure_mean = neumaier_mean(lane.ure_samples);
    rep.ure_se = neumaier_se(lane.ure_samples, rep.ure_mean);
    rep.baseline = baseline;
    reports.push_back(std::move(rep));
  }
  return reports;
}

void write_report_csv(const std::vector<RiskReport>& reports,
                      const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("write_report_csv: cannot open " + path);
  std::fputs(
      "estimator_id,m,p,n,xi_mode,xi_scale,reps_used,discarded,"
      "empirical_risk,risk_se,ure_mean,ure_se,baseline\n",
      f);
  for (const RiskReport& r : reports) {
    std::fprintf(f, "%s,%zu,%zu,%zu,%s,%.17g,%zu,%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                 r.estimator_id.c_str(), r.m, r.p, r.n, xi_mode_name(r.xi_mode),
                 r.xi_scale, r.reps_used, r.discarded, r.empirical_risk,
                 r.risk_se, r.ure_mean, r.ure_se, r.baseline);
  }
  if (std::fclose(f) != 0) throw IoError("write_report_csv: write failed");
}

namespace {

const json& require_field(const json& j, const char* name,
                          const std::string& where) {
  const auto it = j.find(name);
  if (it == j.end())
    throw ConfigParseError("config: missing field '" + where + name + "'");
  return *it;
}

std::size_t get_size(const json& j, const char* name,
                     const std::string& where) {
  const json& v = require_field(j, name, where);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
    throw ConfigParseError("config: field '" + where + name +
                           "' must be a nonnegative integer");
  return v.get<std::size_t>();
}

std::uint64_t get_u64(const json& j, const char* name,
                      const std::string& where) {
  const json& v = require_field(j, name, where);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer())
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigParseError("config: field '" + where + name +
                         "' must be an integer");
}

double get_double(const json& j, const char* name, const std::string& where) {
  const json& v = require_field(j, name, where);
  if (!v.is_number())
    throw ConfigParseError("config: field '" + where + name +
                           "' must be a number");
  return v.get<double>();
}

std::string get_string(const json& j, const char* name,
                       const std::string& where) {
  const json& v = require_field(j, name, where);
  if (!v.is_string())
    throw ConfigParseError("config: field '" + where + name +
                           "' must be a string");
  return v.get<std::string>();
}

CMatrix parse_matrix(const json& j, const std::string& where) {
  if (!j.is_object())
    throw ConfigParseError("config: field '" + where +
                           "' must be a matrix object");
  const std::size_t rows = get_size(j, "rows", where + ".");
  const std::size_t cols = get_size(j, "cols", where + ".");
  const json& re = require_field(j, "re", where + ".");
  const json& im = require_field(j, "im", where + ".");
  if (!re.is_array() || re.size() != rows * cols)
    throw ConfigParseError("config: field '" + where +
                           ".re' must hold rows*cols numbers");
  if (!im.is_array() || im.size() != rows * cols)
    throw ConfigParseError("config: field '" + where +
                           ".im' must hold rows*cols numbers");
  CMatrix a(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t jj = 0; jj < cols; ++jj) {
      const std::size_t idx = i * cols + jj;
      if (!re[idx].is_number() || !im[idx].is_number())
        throw ConfigParseError("config: field '" + where +
                               "' entries must be numbers");
      a(i, jj) = cxd{re[idx].get<double>(), im[idx].get<double>()};
    }
  return a;
}

json matrix_to_json(const CMatrix& a) {
  json j;
  j["rows"] = a.rows();
  j["cols"] = a.cols();
  std::vector<double> re, im;
  re.reserve(a.data().size());
  im.reserve(a.data().size());
  for (const cxd& v : a.data()) {
    re.push_back(v.real());
    im.push_back(v.imag());
  }
  j["re"] = re;
  j["im"] = im;
  return j;
}

// "identity" or a matrix object; the identity shorthand takes its dimension
// from the model.
CMatrix parse_matrix_or_identity(const json& j, std::size_t dim,
                                 const std::string& where) {
  if (j.is_string()) {
    if (j.get<std::string>() != "identity")
      throw ConfigParseError("config: field '" + where +
                             "' must be \"identity\" or a matrix object");
    return CMatrix::identity(dim);
  }
  return parse_matrix(j, where);
}

bool is_exact_identity(const CMatrix& a) {
  if (a.rows() != a.cols()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (a(i, j) != (i == j ? cxd{1.0, 0.0} : cxd{0.0, 0.0})) return false;
  return true;
}

EstimatorSpec parse_estimator(const json& e, std::size_t index) {
  const std::string where = "estimators[" + std::to_string(index) + "].";
  if (!e.is_object())
    throw ConfigParseError("config: field 'estimators[" +
                           std::to_string(index) + "]' must be an object");
  const std::string kind = get_string(e, "kind", where);
  EstimatorSpec spec;
  try {
    spec = estimator_spec_from_name(kind);
  } catch (const ConfigParseError&) {
    throw ConfigParseError("config: field '" + where + "kind' names no "
                           "estimator: " + kind);
  }
  const std::string cov = get_string(e, "covariance", where);
  CovarianceMode mode;
  if (cov == "known") {
    mode = CovarianceMode::Known;
  } else if (cov == "unknown") {
    mode = CovarianceMode::Unknown;
  } else {
    throw ConfigParseError("config: field '" + where +
                           "covariance' must be known or unknown");
  }
  if (spec.kind == EstimatorKind::Mle) {
    spec.covariance = mode;
  } else if (mode != spec.covariance) {
    throw ConfigParseError("config: field '" + where +
                           "covariance' contradicts kind " + kind);
  }
  return spec;
}

json load_json(const std::string& path, const char* who) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(std::string(who) + ": cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigParseError(std::string(who) + ": " + e.what());
  }
}

void store_json(const json& j, const std::string& path, const char* who) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(std::string(who) + ": cannot open " + path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError(std::string(who) + ": write failed");
}

}  // namespace

ExperimentConfig read_config_json(const std::string& path) {
  const json j = load_json(path, "read_config_json");
  ExperimentConfig cfg;

  const json& model = require_field(j, "model", "");
  cfg.m = get_size(model, "m", "model.");
  cfg.p = get_size(model, "p", "model.");
  cfg.n = get_size(model, "n", "model.");

  const json& xi = require_field(model, "xi", "model.");
  const std::string mode = get_string(xi, "mode", "model.xi.");
  if (mode == "zero") {
    cfg.xi.mode = XiMode::Zero;
  } else if (mode == "literal") {
    cfg.xi.mode = XiMode::Literal;
    cfg.xi.matrix =
        parse_matrix(require_field(xi, "matrix", "model.xi."), "model.xi.matrix");
  } else if (mode == "scaled_random") {
    cfg.xi.mode = XiMode::ScaledRandom;
    cfg.xi.scale = get_double(xi, "scale", "model.xi.");
    cfg.xi.sub_seed =
        xi.contains("sub_seed") ? get_u64(xi, "sub_seed", "model.xi.") : 0;
  } else {
    throw ConfigParseError(
        "config: field 'model.xi.mode' must be zero, literal, or "
        "scaled_random");
  }

  cfg.sigma = parse_matrix_or_identity(require_field(model, "sigma", "model."),
                                       cfg.p, "model.sigma");
  cfg.k = parse_matrix_or_identity(require_field(model, "k", "model."), cfg.m,
                                   "model.k");

  const json& ests = require_field(j, "estimators", "");
  if (!ests.is_array())
    throw ConfigParseError("config: field 'estimators' must be an array");
  for (std::size_t i = 0; i < ests.size(); ++i)
    cfg.estimators.push_back(parse_estimator(ests[i], i));

  cfg.reps = get_size(j, "reps", "");
  cfg.seed = get_u64(j, "seed", "");
  const std::string loss = get_string(j, "loss", "");
  if (loss == "known") {
    cfg.loss = LossKind::Known;
  } else if (loss == "invariant") {
    cfg.loss = LossKind::Invariant;
  } else {
    throw ConfigParseError("config: field 'loss' must be known or invariant");
  }
  cfg.gap_threshold =
      j.contains("gap_threshold") ? get_double(j, "gap_threshold", "") : 1e-8;

  cfg.validate();
  return cfg;
}

void write_config_json(const ExperimentConfig& config,
                       const std::string& path) {
  json xi;
  xi["mode"] = xi_mode_name(config.xi.mode);
  if (config.xi.mode == XiMode::Literal)
    xi["matrix"] = matrix_to_json(config.xi.matrix);
  if (config.xi.mode == XiMode::ScaledRandom) {
    xi["scale"] = config.xi.scale;
    xi["sub_seed"] = config.xi.sub_seed;
  }

  json model;
  model["m"] = config.m;
  model["p"] = config.p;
  model["n"] = config.n;
  model["xi"] = std::move(xi);
  model["sigma"] = is_exact_identity(config.sigma)
                       ? json("identity")
                       : matrix_to_json(config.sigma);
  model["k"] =
      is_exact_identity(config.k) ? json("identity") : matrix_to_json(config.k);

  json ests = json::array();
  for (const EstimatorSpec& spec : config.estimators) {
    if (spec.kind == EstimatorKind::KnownGamma ||
        spec.kind == EstimatorKind::UnknownGamma ||
        spec.kind == EstimatorKind::CustomH)
      throw ConfigInvalid("write_config_json: kind " +
                          estimator_kind_name(spec.kind) +
                          " has no JSON encoding");
    json e;
    e["kind"] = estimator_kind_name(spec.kind);
    e["covariance"] = covariance_mode_name(spec.covariance);
    ests.push_back(std::move(e));
  }

  json j;
  j["model"] = std::move(model);
  j["estimators"] = std::move(ests);
  j["reps"] = config.reps;
  j["seed"] = config.seed;
  j["loss"] = loss_kind_name(config.loss);
  j["gap_threshold"] = config.gap_threshold;
  store_json(j, path, "write_config_json");
}

CMatrix read_matrix_json(const std::string& path) {
  const json j = load_json(path, "read_matrix_json");
  return parse_matrix(j, "matrix");
}

void write_matrix_json(const CMatrix& a, const std::string& path) {
  store_json(matrix_to_json(a), path, "write_matrix_json");
}

EstimateInput read_estimate_input(const std::string& path) {
  const json j = load_json(path, "read_estimate_input");
  EstimateInput in;
  in.z = parse_matrix(require_field(j, "z", ""), "z");
  if (j.contains("s")) in.s = parse_matrix(j["s"], "s");
  if (j.contains("n")) in.n = get_size(j, "n", "");
  if (j.contains("sigma")) in.sigma = parse_matrix(j["sigma"], "sigma");
  if (j.contains("k")) in.k = parse_matrix(j["k"], "k");
  return in;
}

}  // namespace cxshrink
