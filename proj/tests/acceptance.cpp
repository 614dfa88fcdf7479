// Acceptance gate: one line per criterion, exit 0 only if every criterion
// holds. All tolerances are pinned here, in code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cxshrink/calculus.hpp"
#include "cxshrink/cmatrix.hpp"
#include "cxshrink/eigen.hpp"
#include "cxshrink/errors.hpp"
#include "cxshrink/estimators.hpp"
#include "cxshrink/harness.hpp"
#include "cxshrink/profile.hpp"
#include "cxshrink/risk.hpp"
#include "cxshrink/rng.hpp"
#include "cxshrink/sampling.hpp"
#include "cxshrink/verify.hpp"

using namespace cxshrink;

namespace {

constexpr std::uint64_t kSeed = 20240815;

int g_failures = 0;

void report(int id, const char* label, bool pass, const std::string& detail) {
  std::printf("criterion %2d  %-46s %s  %s\n", id, label,
              pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void report_error(int id, const char* label, const std::exception& e) {
  report(id, label, false, std::string("error: ") + e.what());
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

template <typename... Args>
std::string format(const char* fmt, Args... args) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

ShrinkageProfile inverse_profile(std::size_t q, std::vector<double> c) {
  ShrinkageProfile prof;
  prof.q = q;
  prof.h = [c](const std::vector<double>& f) {
    std::vector<double> h(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) h[k] = -c[k] / f[k];
    return h;
  };
  prof.h_deriv = [c](const std::vector<double>& f) {
    std::vector<double> hd(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) hd[k] = c[k] / (f[k] * f[k]);
    return hd;
  };
  return prof;
}

// Criteria 1 and 2: every analytic derivative tensor and every divergence
// closed form agrees with finite differences on 50 gap-guarded instances for
// each of the four shapes, at 1e-5 relative error (1e-8 absolute floor built
// into the suite), with the sweep finishing inside 60 seconds.
void criteria_calculus() {
  const char* label1 = "derivative closed forms vs finite differences";
  const char* label2 = "divergence closed forms vs finite differences";
  try {
    const std::size_t shapes[4][2] = {{4, 2}, {5, 3}, {2, 4}, {3, 5}};
    const auto t0 = std::chrono::steady_clock::now();
    bool deriv_pass = true, div_pass = true;
    double deriv_worst = 0.0, div_worst = 0.0;
    std::size_t deriv_rows = 0, div_rows = 0;
    for (const auto& shape : shapes) {
      const std::vector<VerifyRow> rows =
          verify_calculus(shape[0], shape[1], kSeed, 1e-6, 50);
      for (const VerifyRow& row : rows) {
        if (row.name.find("divergence") != std::string::npos) {
          div_pass = div_pass && row.pass;
          div_worst = std::max(div_worst, row.stat);
          ++div_rows;
        } else {
          deriv_pass = deriv_pass && row.pass;
          deriv_worst = std::max(deriv_worst, row.stat);
          ++deriv_rows;
        }
      }
    }
    const double elapsed = seconds_since(t0);
    deriv_pass = deriv_pass && deriv_rows > 0 && elapsed < 60.0;
    div_pass = div_pass && div_rows > 0;
    report(1, label1, deriv_pass,
           format("worst rel err %.2e at tol 1e-05, %.1fs", deriv_worst,
                  elapsed));
    report(2, label2, div_pass,
           format("worst rel err %.2e at tol 1e-05", div_worst));
  } catch (const std::exception& e) {
    report_error(1, label1, e);
    report_error(2, label2, e);
  }
}

// Criterion 3: the location-family expectation identity holds for identity,
// constant, and covariance-linear fields within 3 standard errors at 1e5
// replicates, and the pinned two-dimensional identity-field value sits at 4.
void criterion_stein() {
  const char* label = "location expectation identity";
  try {
    const std::vector<VerifyRow> rows = verify_stein(2, 100000, kSeed);
    bool pass = rows.size() == 4;
    double worst = 0.0;
    for (const VerifyRow& row : rows) {
      pass = pass && row.pass;
      if (row.threshold > 0.0)
        worst = std::max(worst, row.stat / row.threshold);
    }
    report(3, label, pass,
           format("4 fields at 1e5 reps, worst gap at %.2f of 3se", worst));
  } catch (const std::exception& e) {
    report_error(3, label, e);
  }
}

// Criterion 4: the scatter-family expectation identity holds at n = 8, p = 2:
// the linear field closes at n*p = 16 to within solver roundoff and the
// constant field agrees within 3 standard errors at 1e5 replicates.
void criterion_stein_haff() {
  const char* label = "scatter expectation identity";
  try {
    const std::vector<VerifyRow> rows = verify_stein_haff(2, 8, 100000, kSeed);
    bool pass = !rows.empty();
    bool saw_pinned = false;
    double pinned_stat = 0.0;
    for (const VerifyRow& row : rows) {
      pass = pass && row.pass;
      if (row.name == "linear field pinned value") {
        saw_pinned = true;
        pinned_stat = row.stat;
      }
    }
    pass = pass && saw_pinned;
    report(4, label, pass,
           format("linear field closes at 16 within %.1e (tol 1e-09)",
                  pinned_stat));
  } catch (const std::exception& e) {
    report_error(4, label, e);
  }
}

ExperimentConfig monte_carlo_config(std::size_t m, std::size_t p,
                                    std::size_t n,
                                    const std::vector<std::string>& names,
                                    double xi_scale, std::size_t reps) {
  ExperimentConfig cfg;
  cfg.m = m;
  cfg.p = p;
  cfg.n = n;
  cfg.xi.mode = XiMode::ScaledRandom;
  cfg.xi.scale = xi_scale;
  cfg.xi.sub_seed = 271828;
  cfg.sigma = CMatrix::identity(p);
  cfg.k = CMatrix::identity(m);
  for (const std::string& name : names)
    cfg.estimators.push_back(estimator_spec_from_name(name));
  cfg.reps = reps;
  cfg.seed = 31415926;
  cfg.loss = LossKind::Known;
  return cfg;
}

// Criteria 5 and 6 share their Monte Carlo runs: the tall shape (6, 2, 10)
// carries all four built-in shrinkage estimators at mean scales {0, 1, 10},
// the wide shape (2, 6, 10) carries the scale-adaptive pair at {0, 1}.
void criteria_monte_carlo() {
  const char* label5 = "risk estimates track empirical risk";
  const char* label6 = "shrinkage never loses to the baseline";
  try {
    const std::vector<std::string> all{"known_crude_em", "known_ordered",
                                       "unknown_em", "unknown_as"};
    const std::vector<std::string> unknown_only{"unknown_em", "unknown_as"};
    const std::size_t reps = 10000;

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::vector<RiskReport>> tall;  // scales 0, 1, 10
    for (double scale : {0.0, 1.0, 10.0})
      tall.push_back(
          run_experiment(monte_carlo_config(6, 2, 10, all, scale, reps)));
    std::vector<std::vector<RiskReport>> wide;  // scales 0, 1
    for (double scale : {0.0, 1.0})
      wide.push_back(run_experiment(
          monte_carlo_config(2, 6, 10, unknown_only, scale, reps)));
    const double elapsed = seconds_since(t0);

    // Criterion 5: |mean risk estimate - empirical risk| <= 3 combined
    // standard errors on every lane at mean scales {0, 1}, inside 5 minutes.
    bool pass5 = elapsed < 300.0;
    double worst5 = 0.0;
    auto check_tracking = [&](const std::vector<RiskReport>& reports) {
      for (const RiskReport& r : reports) {
        const double combined =
            std::sqrt(r.risk_se * r.risk_se + r.ure_se * r.ure_se);
        const double gap = std::abs(r.ure_mean - r.empirical_risk);
        pass5 = pass5 && r.reps_used > 1 && gap <= 3.0 * combined;
        if (combined > 0.0) worst5 = std::max(worst5, gap / (3.0 * combined));
      }
    };
    check_tracking(tall[0]);
    check_tracking(tall[1]);
    check_tracking(wide[0]);
    check_tracking(wide[1]);
    report(5, label5, pass5,
           format("12 lanes at 1e4 reps, worst gap at %.2f of 3se, %.1fs",
                  worst5, elapsed));

    // Criterion 6: no lane loses to the baseline at any scale, and at a zero
    // mean the scale-adaptive pair on the tall shape strictly improves.
    bool pass6 = true;
    double worst_excess = -1e300;
    auto check_dominance = [&](const std::vector<RiskReport>& reports) {
      for (const RiskReport& r : reports) {
        const double excess = r.empirical_risk - r.baseline;
        pass6 = pass6 && excess <= 3.0 * r.risk_se;
        worst_excess = std::max(worst_excess, excess / r.risk_se);
      }
    };
    for (const auto& reports : tall) check_dominance(reports);
    for (const auto& reports : wide) check_dominance(reports);
    double least_gain = 1e300;
    for (const RiskReport& r : tall[0]) {
      if (r.estimator_id != "unknown_em" && r.estimator_id != "unknown_as")
        continue;
      const double gain = r.baseline - r.empirical_risk;
      pass6 = pass6 && gain > 3.0 * r.risk_se;
      least_gain = std::min(least_gain, gain / r.risk_se);
    }
    report(6, label6, pass6,
           format("worst excess %.2f se, zero-mean gain >= %.1f se",
                  worst_excess, least_gain));
  } catch (const std::exception& e) {
    report_error(5, label5, e);
    report_error(6, label6, e);
  }
}

// Criterion 7: the closed-form risk increment of every built-in estimator
// class is nonpositive on 1000 random strictly descending positive spectra
// per class, with no tolerance.
void criterion_signs() {
  const char* label = "risk increments are pointwise nonpositive";
  try {
    CounterRng rng({kSeed, 7});
    auto draw_spectrum = [&rng](std::size_t q) {
      std::vector<double> f(q);
      for (;;) {
        const double spread = std::exp(3.0 * (rng.next_uniform() - 0.5));
        for (std::size_t k = 0; k < q; ++k)
          f[k] = spread * (0.05 + 8.0 * rng.next_uniform());
        std::sort(f.begin(), f.end(), std::greater<double>());
        bool ok = true;
        for (std::size_t k = 0; k + 1 < q; ++k)
          ok = ok && (f[k] - f[k + 1]) > 1e-9 * f[0];
        if (ok) return f;
      }
    };

    const std::size_t m = 6, p = 2, n = 10;
    const std::size_t trials = 1000;
    bool pass = true;
    double worst = -1e300;
    std::size_t checked = 0;

    // Known-covariance classes, evaluated through the closed form on a
    // diagonal observation carrying the drawn spectrum.
    auto gamma_half_known = [](const std::vector<double>& l) {
      return std::vector<double>(l.size(), 4.0);  // half the class bound 8
    };
    auto gamma_zero_deriv = [](const std::vector<double>& l) {
      return std::vector<double>(l.size(), 0.0);
    };
    const std::vector<ShrinkageProfile> known_profiles{
        make_profile(EstimatorKind::KnownCrudeEm, m, p, 0),
        make_profile(EstimatorKind::KnownOrdered, m, p, 0),
        make_known_gamma_profile(gamma_half_known, gamma_zero_deriv, m, p)};
    for (const ShrinkageProfile& prof : known_profiles) {
      for (std::size_t t = 0; t < trials; ++t) {
        const std::vector<double> l = draw_spectrum(p);
        CMatrix z(m, p);
        for (std::size_t k = 0; k < p; ++k)
          z(k, k) = cxd{std::sqrt(l[k]), 0.0};
        const UreValue u = ure_known(z, prof);
        pass = pass && u.delta <= 0.0;
        worst = std::max(worst, u.delta);
        ++checked;
      }
    }

    // Scale- and order-adaptive classes on the tall orientation.
    auto gamma_half_unknown = [](const std::vector<double>& f) {
      return std::vector<double>(f.size(), 1.0 / 3.0);  // half the bound 2/3
    };
    const std::vector<ShrinkageProfile> tall_profiles{
        make_profile(EstimatorKind::UnknownEm, m, p, n),
        make_profile(EstimatorKind::UnknownAs, m, p, n),
        make_unknown_gamma_profile(gamma_half_unknown, gamma_zero_deriv, m, p,
                                   n)};
    for (const ShrinkageProfile& prof : tall_profiles) {
      for (std::size_t t = 0; t < trials; ++t) {
        const double d = delta_hat(n, m, p, draw_spectrum(p), prof);
        pass = pass && d <= 0.0;
        worst = std::max(worst, d);
        ++checked;
      }
    }

    // The wide orientation evaluates the increment at the swapped arguments
    // (n + m_wide - p_wide, p_wide, m_wide) = (n - m + p, m, p) with profiles
    // built at the wide shape (p, m, n).
    const std::vector<ShrinkageProfile> wide_profiles{
        make_profile(EstimatorKind::UnknownEm, p, m, n),
        make_profile(EstimatorKind::UnknownAs, p, m, n)};
    for (const ShrinkageProfile& prof : wide_profiles) {
      for (std::size_t t = 0; t < trials; ++t) {
        const double d = delta_hat(n - m + p, m, p, draw_spectrum(p), prof);
        pass = pass && d <= 0.0;
        worst = std::max(worst, d);
        ++checked;
      }
    }

    report(7, label, pass,
           format("%zu configurations, largest increment %.3g", checked,
                  worst));
  } catch (const std::exception& e) {
    report_error(7, label, e);
  }
}

// Criterion 8: the closed-form risk estimate agrees with the generic
// finite-difference reference within 1e-4 relative error on 20 admissible
// random instances per orientation.
void criterion_general_reference() {
  const char* label = "closed-form risk matches the generic reference";
  try {
    bool pass = true;
    double worst = 0.0;
    std::size_t used = 0;

    auto run_branch = [&](std::size_t m, std::size_t p, std::size_t n,
                          std::uint64_t stream) {
      const ShrinkageProfile prof =
          make_profile(EstimatorKind::UnknownAs, m, p, n);
      auto g = [&prof](const CMatrix& zz, const CMatrix& ss) {
        return apply_h_unknown(zz, ss, prof) - zz;
      };
      std::size_t accepted = 0;
      std::size_t attempts = 0;
      std::uint64_t idx = stream;
      while (accepted < 20 && attempts < 400) {
        ++attempts;
        CounterRng draw({kSeed, idx++});
        CMatrix z = sample_std_cnormal(m, p, draw);
        const std::size_t q = std::min(m, p);
        for (std::size_t k = 0; k < q; ++k)
          z(k, k) += cxd{3.0 * static_cast<double>(q - k), 0.0};
        const CMatrix s = sample_cwishart(CMatrix::identity(p), p + 6, draw);
        const UreValue u = ure_unknown(z, s, n, prof);
        if (u.degenerate || u.min_gap < 5e-2) continue;
        const double ref = ure_general(z, s, n, g);
        const double rel = std::abs(u.value - ref) /
                           std::max({std::abs(u.value), std::abs(ref), 1.0});
        pass = pass && rel < 1e-4;
        worst = std::max(worst, rel);
        ++accepted;
        ++used;
      }
      pass = pass && accepted == 20;
    };

    run_branch(5, 2, 9, 100);
    run_branch(2, 5, 9, 900);
    report(8, label, pass,
           format("%zu instances, worst rel diff %.2e (tol 1e-04)", used,
                  worst));
  } catch (const std::exception& e) {
    report_error(8, label, e);
  }
}

// Criterion 9: frozen scalar values of the closed forms.
void criterion_hand_values() {
  const char* label = "frozen coefficient and increment values";
  try {
    // Increment at n=5, m=3, p=1, f=2 with coefficient 1/3 equals -1/3.
    const double d =
        delta_hat(5, 3, 1, {2.0}, inverse_profile(1, {1.0 / 3.0}));
    const bool ok1 = std::abs(d - (-1.0 / 3.0)) <= 1e-12;

    // Leading order-adaptive coefficient at m=5, p=2, n=6 is 5/6.
    const ShrinkageProfile as = make_profile(EstimatorKind::UnknownAs, 5, 2, 6);
    const std::vector<double> h_as = as.h({1.0, 0.5});
    const bool ok2 = std::abs(-h_as[0] - 5.0 / 6.0) <= 1e-15;

    // Scale-adaptive constant at m=6, p=3, n=8 is 3/11.
    const ShrinkageProfile em = make_profile(EstimatorKind::UnknownEm, 6, 3, 8);
    const std::vector<double> h_em = em.h({1.0, 0.9, 0.8});
    const bool ok3 = std::abs(-h_em[0] - 3.0 / 11.0) <= 1e-15;

    report(9, label, ok1 && ok2 && ok3,
           format("increment %.12f, coefficients 5/6 and 3/11 exact", d));
  } catch (const std::exception& e) {
    report_error(9, label, e);
  }
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) return {};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Criterion 10: two runs of the shipped configuration produce byte-identical
// reports.
void criterion_determinism(const std::string& config_path) {
  const char* label = "replicated runs produce identical output";
  try {
    const ExperimentConfig cfg = read_config_json(config_path);
    const std::vector<RiskReport> a = run_experiment(cfg);
    const std::vector<RiskReport> b = run_experiment(cfg);
    write_report_csv(a, "acceptance_run_a.csv");
    write_report_csv(b, "acceptance_run_b.csv");
    const std::string ta = slurp("acceptance_run_a.csv");
    const std::string tb = slurp("acceptance_run_b.csv");
    std::remove("acceptance_run_a.csv");
    std::remove("acceptance_run_b.csv");
    const bool pass = !ta.empty() && ta == tb;
    report(10, label, pass, format("%zu bytes, byte-identical", ta.size()));
  } catch (const std::exception& e) {
    report_error(10, label, e);
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::string config_path =
      argc > 1 ? argv[1] : "configs/simulate_example.json";

  criteria_calculus();
  criterion_stein();
  criterion_stein_haff();
  criteria_monte_carlo();
  criterion_signs();
  criterion_general_reference();
  criterion_hand_values();
  criterion_determinism(config_path);

  if (g_failures == 0) {
    std::printf("acceptance: all 10 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) failed\n", g_failures);
  return 1;
}
