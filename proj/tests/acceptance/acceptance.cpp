// Acceptance suite: one PASS/FAIL line per criterion.
//
//   josephus_acceptance                 run every criterion
//   josephus_acceptance --criterion 5   run one (repeatable)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "josephus/analysis.hpp"
#include "josephus/deterministic.hpp"
#include "josephus/errors.hpp"
#include "josephus/experiment.hpp"
#include "josephus/process.hpp"
#include "josephus/survival_dp.hpp"

using namespace josephus;

namespace {

struct Verdict {
  bool passed = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string yes_no(bool b) { return b ? "yes" : "no"; }

// 1. Deterministic survivor methods and the generating series.
Verdict deterministic_cross_check() {
  Stopwatch clock;
  std::uint64_t disagreements = 0;
  for (std::uint64_t n = 1; n <= 1000000; ++n) {
    const auto r = det::survivor_recurrence(n);
    if (!(r == det::survivor_closed_form(n)) || !(r == det::survivor_binary_rotation(n))) ++disagreements;
  }
  const auto coeffs = det::generating_series_coefficients(1024);
  std::uint64_t series_mismatches = 0;
  for (std::uint64_t n = 1; n <= 1024; ++n) {
    if (coeffs[n] != det::survivor_recurrence(n).survivor_one_based) ++series_mismatches;
  }
  const double t = clock.seconds();
  return {disagreements == 0 && series_mismatches == 0 && t < 10.0,
          fmt::format("method disagreements up to 1e6: {}, series mismatches up to 1024: {}, {:.2f} s (limit 10 s)",
                      disagreements, series_mismatches, t)};
}

// 2. Recursions against exhaustive enumeration.
Verdict oracle_equivalence() {
  Stopwatch clock;
  double worst = 0;
  int cases = 0;
  auto compare = [&](const RuleSpec& rule, int n) {
    const auto dp = dp::exact_distribution(rule, n);
    const auto oracle = sim::oracle_distribution(rule, n);
    for (std::size_t k = 0; k < dp.probs.size(); ++k) worst = std::max(worst, std::abs(dp.probs[k] - oracle.probs[k]));
    ++cases;
  };
  for (int i = 0; i <= 10; ++i) {
    const double p = i / 10.0;
    for (int n = 3; n <= 14; ++n) {
      compare(RuleSpec::r1(p), n);
      compare(RuleSpec::r2(p), n);
    }
  }
  const double grid[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (double p : grid) {
    for (double q : grid) {
      for (int n = 3; n <= 12; ++n) compare(RuleSpec::r3(p, q), n);
    }
  }
  const double t = clock.seconds();
  return {worst <= 1e-12 && t < 120.0,
          fmt::format("{} (rule, p, N) cases, max termwise difference {:.3g} (limit 1e-12), {:.1f} s (limit 120 s)",
                      cases, worst, t)};
}

// 3. The first two rows of the R1 recursion.
Verdict base_vectors() {
  bool g3_exact = true;
  double g4_err = 0;
  for (int i = 0; i <= 20; ++i) {
    const double p = i / 20.0;
    g3_exact = g3_exact && dp::r1_distribution(3, p).probs == std::vector<double>{0.0, 1.0 - p, p};
    const auto g4 = dp::r1_distribution(4, p).probs;
    const double expected[] = {p, (1 - p) * (1 - p), 0.0, p * (1 - p)};
    for (std::size_t k = 0; k < 4; ++k) g4_err = std::max(g4_err, std::abs(g4[k] - expected[k]));
  }
  return {g3_exact && g4_err <= 1e-15,
          fmt::format("g_3 exact on 21 values of p: {}, max g_4 error {:.3g} (limit 1e-15)", yes_no(g3_exact), g4_err)};
}

// 4. Mirror symmetry and 1/2 - E[X_N] = g_N(0)/2 at p = 1/2.
Verdict unbiased_symmetry() {
  double sym_err = 0, mean_err = 0;
  dp::for_each_row(RuleSpec::r1(0.5), 4000, [&](int n, std::span<const double> row) {
    for (int k = 0; k < n; ++k) {
      sym_err = std::max(sym_err, std::abs(row[static_cast<std::size_t>(k)] - row[static_cast<std::size_t>((n - k) % n)]));
    }
    mean_err = std::max(mean_err, std::abs(0.5 - analysis::mean(row) - row[0] / 2));
  });
  return {sym_err <= 1e-12 && mean_err <= 1e-12,
          fmt::format("N = 3..4000: max symmetry error {:.3g}, max mean-identity error {:.3g} (limit 1e-12)", sym_err,
                      mean_err)};
}

// 5. Exponential decay for p in the middle range.
Verdict middle_range_decay() {
  Stopwatch clock;
  bool ok = true;
  std::string detail;
  for (double p : {0.4, 0.5, 0.6}) {
    const auto params = analysis::decay_params_feasible(p);
    const double violation = analysis::decay_constraint_violation(p, params);
    const auto fit = analysis::decay_bound_check(p, 500);
    const bool this_ok = params.gamma > 1.0 && violation <= 0.0 && fit.stabilized();
    ok = ok && this_ok;
    detail += fmt::format("p={}: beta {:.4f}, gamma {:.4f}, K(<=500)/K(<=250) = {:.4f}; ", p, params.beta,
                          params.gamma, fit.k / fit.k_half);
  }
  const double t = clock.seconds();
  ok = ok && t < 60.0;
  return {ok, detail + fmt::format("{:.2f} s (limit 60 s)", t)};
}

// 6. Unbiased decay at epsilon = 0.05, alpha = 1.03.
Verdict unbiased_decay() {
  constexpr double eps = 0.05, alpha = 1.03;
  const auto ineq = analysis::unbiased_decay_inequality(eps, alpha);
  const auto fit =
      analysis::fit_decay_constant(RuleSpec::r1(0.5), std::pow(alpha, 2 * (1 + eps)), alpha, 1, 1000);
  std::vector<double> xs, ys;
  dp::for_each_row(RuleSpec::r1(0.5), 1000, [&](int n, std::span<const double> row) {
    if (n >= 50 && row[0] > 0) {
      xs.push_back(n);
      ys.push_back(std::log(row[0]));
    }
  });
  const auto line = analysis::fit_line(xs, ys);
  const bool ok = ineq.holds() && fit.stabilized() && line.slope < 0 && line.r_squared >= 0.99;
  return {ok, fmt::format("alpha^(2+4(1+eps)) = {:.4f} (<= 2: {}), alpha^(1-4(1+eps)) + alpha^(1+2(1+eps)) = {:.4f} "
                          "(<= 2: {}); K(<=1000)/K(<=500) = {:.4f}; log g_N(0) on [50,1000]: slope {:.4f}, R^2 {:.4f}",
                          ineq.first_term, yes_no(ineq.first_term <= 2), ineq.second_term,
                          yes_no(ineq.second_term <= 2), fit.k / fit.k_half, line.slope, line.r_squared)};
}

// 7. Moment scaling for k = 1, 2, 3.
Verdict moment_scaling() {
  bool ok = true;
  std::string detail;
  for (int k : {1, 2, 3}) {
    const auto r = analysis::moment_scaling_check(4000, k, 50);
    ok = ok && r.passes();
    detail += fmt::format("k={}: sup {:.4g}, max on [50,2000] {:.4g}, max on [2000,4000] {:.4g}", k, r.sup_ratio,
                          r.low_window_max, r.high_window_max);
    if (k == 1) detail += fmt::format(", log E[phi_1] slope {:.4f}", r.first_moment_fit.slope);
    detail += "; ";
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

// 8. B_L^2 grows like ln L; the squared means are summable.
Verdict variance_growth() {
  double lo = INFINITY, hi = 0, b2 = 0, phi1_sq = 0, phi1_sq_at_100 = 0;
  dp::for_each_row(RuleSpec::r1(0.5), 10000, [&](int n, std::span<const double> row) {
    b2 += analysis::variance(row);
    const double phi1 = analysis::moment(row, 1);
    phi1_sq += phi1 * phi1;
    if (n == 100) phi1_sq_at_100 = phi1_sq;
    if (n >= 100) {
      const double ratio = b2 / std::log(n);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  });
  const double tail = phi1_sq - phi1_sq_at_100;
  return {hi / lo <= 2.0 && tail < 1e-6,
          fmt::format("B_L^2/ln L in [{:.4f}, {:.4f}] over L in [100, 10000], ratio {:.4f} (limit 2); "
                      "sum of E_N[phi_1]^2 over 100 < N <= 10000: {:.3g} (limit 1e-6)",
                      lo, hi, hi / lo, tail)};
}

// 9. Central limit theorem at L = 10^4 with 10^4 trials.
Verdict clt(int threads) {
  Stopwatch clock;
  const auto r = analysis::clt_experiment(10000, 10000, 20240601, threads);
  const double t = clock.seconds();
  const bool lyapunov_ok = r.lyapunov_at(10000) < r.lyapunov_at(100);
  return {r.ks_distance <= 0.05 && lyapunov_ok && t < 600.0,
          fmt::format("KS distance {:.4f} (limit 0.05; {:.4f} if centered at 1/2, offset {:.4f}); Lyapunov ratio "
                      "{:.4f} at L=100, {:.4f} at L=10000; {:.1f} s (limit 600 s)",
                      r.ks_distance, r.ks_distance_half, r.centering_offset, r.lyapunov_at(100),
                      r.lyapunov_at(10000), t)};
}

// 10. Figure data at N = 2000.
Verdict figures() {
  constexpr int n = 2000;
  const std::vector<double> r1_grid{0.0, 0.4, 0.6, 1.0};
  const auto r1 = cli::figure_r1(n, r1_grid);
  bool ok = true;
  std::string detail;
  for (std::size_t i : {1u, 2u}) {
    const double mass = analysis::window_mass(r1.series[i].dist.probs, 0.45, 0.55);
    ok = ok && mass >= 0.99;
    detail += fmt::format("r1 p={} mass in [0.45N,0.55N] {:.4f} (limit 0.99); ", r1_grid[i], mass);
  }
  for (std::size_t i : {0u, 3u}) {
    const auto& probs = r1.series[i].dist.probs;
    const auto mode = std::max_element(probs.begin(), probs.end()) - probs.begin();
    const bool point = probs[static_cast<std::size_t>(mode)] == 1.0;
    ok = ok && point;
    detail += fmt::format("r1 p={} point mass at {}: {}; ", r1_grid[i], mode, yes_no(point));
    if (i == 0) {
      const double off = std::abs(static_cast<double>(mode) / n - 0.5);
      ok = ok && off <= 2.0 / n;
      detail += fmt::format("|a/N - 1/2| = {:.4g} (limit {:.4g}); ", off, 2.0 / n);
    }
  }
  const std::vector<double> r2_grid{0.4, 0.5};
  const auto r2 = cli::figure_r2(n, r2_grid);
  for (const auto& c : r2.checks) {
    ok = ok && c.passed;
    detail += c.name + ": " + c.detail + "; ";
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

// 11. Same config and seed give the same bytes.
Verdict reproducibility() {
  namespace fs = std::filesystem;
  const auto root = fs::temp_directory_path() / "josephus_acceptance_repro";
  fs::remove_all(root);

  auto read = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };

  std::vector<cli::ExperimentConfig> configs(3);
  configs[0].command = cli::Command::Exact;
  configs[0].rule = RuleSpec::r3(0.3, 0.7);
  configs[0].n = 2000;
  configs[1].command = cli::Command::Figure;
  configs[1].rule = RuleSpec::r1(0.5);
  configs[1].n = 500;
  configs[2].command = cli::Command::Simulate;
  configs[2].rule = RuleSpec::r1(0.45);
  configs[2].n = 300;
  configs[2].samples = 50000;
  configs[2].seed = 12345;
  configs[2].threads = 2;

  std::size_t files = 0, differing = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::string outputs[2];
    for (int run = 0; run < 2; ++run) {
      auto c = configs[i];
      c.out_dir = (root / fmt::format("{}_{}", i, run)).string();
      std::ostringstream out, err;
      if (cli::run_experiment(c, out, err) != cli::kExitOk) return {false, "run failed: " + err.str()};
      for (const auto& entry : fs::directory_iterator(c.out_dir)) {
        if (entry.path().filename() == "manifest.json") continue;
        outputs[run] += entry.path().filename().string() + "\n" + read(entry.path());
        if (run == 0) ++files;
      }
    }
    if (outputs[0] != outputs[1]) ++differing;
  }
  fs::remove_all(root);
  return {differing == 0, fmt::format("{} result files from exact, figure and Monte Carlo runs; configs with "
                                      "differing output: {}",
                                      files, differing)};
}

struct Criterion {
  int id;
  std::string title;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> selected;
  int threads = 2;
  app.add_option("--criterion", selected, "criterion number (repeatable)")->check(CLI::Range(1, 11));
  app.add_option("--threads", threads, "worker threads for sampling")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "deterministic cross-check", deterministic_cross_check},
      {2, "oracle equivalence", oracle_equivalence},
      {3, "base vectors", base_vectors},
      {4, "unbiased symmetry and mean identity", unbiased_symmetry},
      {5, "exponential decay, middle range", middle_range_decay},
      {6, "unbiased decay", unbiased_decay},
      {7, "moment scaling", moment_scaling},
      {8, "B_L^2 of order ln L", variance_growth},
      {9, "central limit theorem", [threads] { return clt(threads); }},
      {10, "figure reproduction", figures},
      {11, "reproducibility", reproducibility},
  };
  const std::set<int> wanted(selected.begin(), selected.end());

  int failures = 0;
  for (const auto& c : criteria) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, fmt::format("exception: {}", e.what())};
    }
    if (!v.passed) ++failures;
    fmt::print("criterion {:>2} {} {}: {}\n", c.id, v.passed ? "PASS" : "FAIL", c.title, v.detail);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
