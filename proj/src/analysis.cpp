#include "josephus/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "josephus/errors.hpp"
#include "josephus/process.hpp"
#include "josephus/rng.hpp"
#include "josephus/survival_dp.hpp"
#include "parallel.hpp"

namespace josephus::analysis {

double moment(std::span<const double> probs, int k, bool absolute) {
  if (k < 1) throw DomainError(fmt::format("moment order must be positive (got {})", k));
  return expectation_functional(probs, [k, absolute](double x) {
    const double v = std::pow(0.5 - x, k);
    return absolute ? std::abs(v) : v;
  });
}

double moment(const SurvivalDistribution& dist, int k, bool absolute) {
  return moment(std::span<const double>(dist.probs), k, absolute);
}

double mean(std::span<const double> probs) {
  return expectation_functional(probs, [](double x) { return x; });
}

double variance(std::span<const double> probs) {
  const double m = mean(probs);
  return expectation_functional(probs, [m](double x) { return (x - m) * (x - m); });
}

double third_abs_central(std::span<const double> probs) {
  const double m = mean(probs);
  return expectation_functional(probs, [m](double x) { return std::pow(std::abs(x - m), 3); });
}

double eta(std::span<const double> probs) {
  const long long size = static_cast<long long>(probs.size());
  double best = 0.0;
  for (long long offset = -2; offset <= 2; ++offset) {
    const long long idx = ((offset % size) + size) % size;
    best = std::max(best, probs[static_cast<std::size_t>(idx)]);
  }
  return best;
}

double eta(const SurvivalDistribution& dist) { return eta(std::span<const double>(dist.probs)); }

double window_mass(std::span<const double> probs, double lo, double hi) {
  const double size = static_cast<double>(probs.size());
  double mass = 0.0;
  for (std::size_t n = 0; n < probs.size(); ++n) {
    const double x = static_cast<double>(n) / size;
    if (x >= lo && x <= hi) mass += probs[n];
  }
  return mass;
}

MomentRecord moment_record(std::span<const double> probs) {
  MomentRecord r;
  r.n = static_cast<int>(probs.size());
  r.mean = mean(probs);
  r.phi1 = moment(probs, 1);
  r.phi2 = moment(probs, 2);
  r.abs_phi3 = moment(probs, 3, true);
  r.variance = variance(probs);
  r.third_central = third_abs_central(probs);
  r.eta = eta(probs);
  r.g0 = probs[0];
  return r;
}

MomentReport moment_report(const RuleSpec& rule, int n_min, int n_max) {
  if (n_min < 3 || n_max < n_min) {
    throw DomainError(fmt::format("invalid N range [{}, {}] (need 3 <= n_min <= n_max)", n_min, n_max));
  }
  MomentReport report{rule, n_min, n_max, {}};
  report.per_n.reserve(static_cast<std::size_t>(n_max - n_min + 1));
  dp::for_each_row(rule, n_max, [&](int n, std::span<const double> row) {
    if (n >= n_min) report.per_n.push_back(moment_record(row));
  });
  return report;
}

LinearFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw DomainError("a line fit needs at least two points");
  const double count = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= count;
  my /= count;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  LinearFit fit;
  fit.points = xs.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (fit.slope * xs[i] + fit.intercept);
    sse += e * e;
  }
  fit.r_squared = syy > 0 ? 1.0 - sse / syy : 1.0;
  return fit;
}

// ---------------------------------------------------------------------------

namespace {

void require_middle_range(double p) {
  if (!(p > 1.0 / 3.0 && p < 2.0 / 3.0)) {
    throw DomainError(fmt::format("p = {} lies outside the middle range (1/3, 2/3)", p));
  }
}

double gamma_envelope(double p, double beta) {
  const double b2 = beta * beta;
  return std::min({1.0 / (beta * std::sqrt(p)), 1.0 / ((1.0 - p) * beta),
                   1.0 / (p * beta + (1.0 - p) / b2), 1.0 / ((1.0 - p) * beta + p / b2)});
}

}  // namespace

DecayParams decay_params_feasible(double p) {
  require_middle_range(p);
  constexpr int kGrid = 20000;
  constexpr double kLo = 1.0;
  constexpr double kHi = 2.0;
  const double h = (kHi - kLo) / kGrid;

  int best_i = 1;
  double best = gamma_envelope(p, kLo + h);
  for (int i = 2; i <= kGrid; ++i) {
    const double g = gamma_envelope(p, kLo + i * h);
    if (g > best) {
      best = g;
      best_i = i;
    }
  }

  // Golden-section refinement on the bracketing grid cells.
  double a = kLo + std::max(best_i - 1, 0) * h;
  double b = kLo + std::min(best_i + 1, kGrid) * h;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
    if (gamma_envelope(p, c) >= gamma_envelope(p, d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - inv_phi * (b - a);
    d = a + inv_phi * (b - a);
  }
  double beta = 0.5 * (a + b);
  if (beta <= 1.0 || gamma_envelope(p, beta) < best) beta = kLo + best_i * h;

  // Shave a few ulps so every inequality holds strictly in floating point.
  const double gamma = gamma_envelope(p, beta) * (1.0 - 1e-12);
  if (!(gamma > 1.0)) {
    throw DomainError(fmt::format("no feasible (beta, gamma) above (1, 1) found for p = {}", p));
  }
  return {beta, gamma};
}

double decay_constraint_violation(double p, const DecayParams& params) {
  const double b = params.beta;
  const double g = params.gamma;
  return std::max({p * b * b * g * g - 1.0, (1.0 - p) * b * g - 1.0,
                   g * (p * b + (1.0 - p) / (b * b)) - 1.0, g * ((1.0 - p) * b + p / (b * b)) - 1.0});
}

DecayBoundFit fit_decay_constant(const RuleSpec& rule, double beta, double gamma, int n_min, int n_max) {
  if (n_min < 1 || n_max < std::max(n_min, 3)) {
    throw DomainError(fmt::format("invalid N range [{}, {}] for the decay fit", n_min, n_max));
  }
  const double log_beta = std::log(beta);
  const double log_gamma = std::log(gamma);
  const double neg_inf = -std::numeric_limits<double>::infinity();
  double log_k = neg_inf;
  double log_k_half = neg_inf;

  auto scan = [&](int n, std::span<const double> row) {
    if (n < n_min) return;
    double best = neg_inf;
    for (int label = 0; label < n; ++label) {
      const double g = row[static_cast<std::size_t>(label)];
      if (g <= 0.0) continue;
      const int dist = std::min(label, n - label);
      best = std::max(best, std::log(g) + n * log_gamma - dist * log_beta);
    }
    log_k = std::max(log_k, best);
    if (2 * n <= n_max) log_k_half = std::max(log_k_half, best);
  };

  // Conventions below the recursion's base case: one participant survives
  // alone; of two, the knife holder survives.
  const std::vector<double> one{1.0};
  const std::vector<double> two{1.0, 0.0};
  scan(1, one);
  scan(2, two);
  dp::for_each_row(rule, n_max, scan);

  DecayBoundFit fit;
  fit.p = rule.p;
  fit.beta = beta;
  fit.gamma = gamma;
  fit.k = std::exp(log_k);
  fit.k_half = std::exp(log_k_half);
  fit.max_violation = log_k - log_k_half;
  fit.n_max = n_max;
  return fit;
}

DecayBoundFit decay_bound_check(double p, int n_max) {
  const DecayParams params = decay_params_feasible(p);
  return fit_decay_constant(RuleSpec::r1(p), params.beta, params.gamma, 3, n_max);
}

UnbiasedDecayInequality unbiased_decay_inequality(double epsilon, double alpha) {
  const double s = 1.0 + epsilon;
  return {std::pow(alpha, 2.0 + 4.0 * s), std::pow(alpha, 1.0 - 4.0 * s) + std::pow(alpha, 1.0 + 2.0 * s)};
}

DecayBoundFit unbiased_decay_check(int n_max, double epsilon, double alpha) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw DomainError(fmt::format("epsilon = {} must lie in (0, 1)", epsilon));
  }
  if (!(alpha > 1.0 && alpha <= 1.0 + epsilon)) {
    throw DomainError(fmt::format("alpha = {} must lie in (1, 1 + epsilon] = (1, {}]", alpha, 1.0 + epsilon));
  }
  const auto ineq = unbiased_decay_inequality(epsilon, alpha);
  if (ineq.first_term > 2.0) {
    throw DomainError(fmt::format("alpha^(2+4(1+eps)) = {:.17g} exceeds 2 (alpha = {}, eps = {})",
                                  ineq.first_term, alpha, epsilon));
  }
  if (ineq.second_term > 2.0) {
    throw DomainError(fmt::format("alpha^(1-4(1+eps)) + alpha^(1+2(1+eps)) = {:.17g} exceeds 2 (alpha = {}, eps = {})",
                                  ineq.second_term, alpha, epsilon));
  }
  return fit_decay_constant(RuleSpec::r1(0.5), std::pow(alpha, 2.0 * (1.0 + epsilon)), alpha, 1, n_max);
}

// ---------------------------------------------------------------------------

bool MomentScalingReport::bounded() const {
  return !ratios.empty() && std::isfinite(sup_ratio);
}

bool MomentScalingReport::passes() const {
  if (!bounded() || high_window_max > low_window_max) return false;
  if (k == 1) return first_moment_fit.points >= 2 && first_moment_fit.slope < 0.0;
  return true;
}

MomentScalingReport moment_scaling_check(int n_max, int k, int n_min) {
  if (k < 1 || k > 3) throw DomainError(fmt::format("moment scaling is checked for k in {{1,2,3}} (got {})", k));
  if (n_min < 3 || n_max < 2 * n_min) {
    throw DomainError(fmt::format("need 3 <= n_min and n_max >= 2 n_min (got [{}, {}])", n_min, n_max));
  }
  MomentScalingReport report;
  report.k = k;
  report.n_min = n_min;
  report.n_max = n_max;
  // Below this magnitude E_N[phi_1] is dominated by the rounding error of
  // the weighted sum and its logarithm carries no signal.
  constexpr double kPhi1Floor = 1e-13;
  std::vector<double> xs, ys;
  dp::for_each_row(RuleSpec::r1(0.5), n_max, [&](int n, std::span<const double> row) {
    if (n < n_min) return;
    const double scale = std::pow(std::log(n) / n, 0.5 * k);
    const double ratio = moment(row, k, true) / scale;
    report.ratios.push_back(ratio);
    report.sup_ratio = std::max(report.sup_ratio, ratio);
    if (2 * n <= n_max) report.low_window_max = std::max(report.low_window_max, ratio);
    if (2 * n >= n_max) report.high_window_max = std::max(report.high_window_max, ratio);
    if (k == 1 && row[0] > 0.0) {
      const double phi1 = moment(row, 1);
      if (phi1 > kPhi1Floor) {
        xs.push_back(n);
        ys.push_back(std::log(phi1));
      }
    }
  });
  if (xs.size() >= 2) report.first_moment_fit = fit_line(xs, ys);
  return report;
}

bool SecondMomentReport::passes() const {
  return band_ratio <= 2.0 && increasing && decomposition_error <= 1e-9;
}

SecondMomentReport second_moment_sum_check(int l_max) {
  if (l_max < 100) throw DomainError(fmt::format("L_max must be at least 100 (got {})", l_max));
  SecondMomentReport report;
  report.l_max = l_max;

  std::vector<int> grid;
  constexpr int kGridPoints = 41;
  for (int i = 0; i < kGridPoints; ++i) {
    const double l = 100.0 * std::pow(l_max / 100.0, i / double(kGridPoints - 1));
    const int li = std::clamp(static_cast<int>(std::lround(l)), 100, l_max);
    if (grid.empty() || li > grid.back()) grid.push_back(li);
  }
  if (grid.back() != l_max) grid.push_back(l_max);

  double s = 0, phi1_sq = 0, b2 = 0;
  double band_lo = std::numeric_limits<double>::infinity(), band_hi = 0;
  double top_lo = std::numeric_limits<double>::infinity(), top_hi = 0;
  std::size_t next = 0;
  dp::for_each_row(RuleSpec::r1(0.5), l_max, [&](int n, std::span<const double> row) {
    const double phi1 = moment(row, 1);
    s += moment(row, 2);
    phi1_sq += phi1 * phi1;
    b2 += variance(row);
    if (n >= 100) {
      const double ratio = s / std::log(n);
      band_lo = std::min(band_lo, ratio);
      band_hi = std::max(band_hi, ratio);
      if (4 * n >= l_max) {
        top_lo = std::min(top_lo, ratio);
        top_hi = std::max(top_hi, ratio);
      }
    }
    if (next < grid.size() && n == grid[next]) {
      report.grid.push_back({n, s, phi1_sq, b2});
      report.decomposition_error = std::max(report.decomposition_error, std::abs(b2 - (s - phi1_sq)));
      ++next;
    }
  });
  report.band_ratio = band_hi / band_lo;
  report.top_band_ratio = top_hi / top_lo;
  report.increasing = std::adjacent_find(report.grid.begin(), report.grid.end(), [](const auto& a, const auto& b) {
                        return b.s_l <= a.s_l;
                      }) == report.grid.end();
  return report;
}

// ---------------------------------------------------------------------------

double ks_distance_to_normal(std::vector<double> samples) {
  if (samples.empty()) throw DomainError("KS distance needs at least one sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-samples[i] / std::numbers::sqrt2);
    d = std::max({d, (i + 1) / n - cdf, cdf - i / n});
  }
  return d;
}

double ks_critical_value_1pct(std::uint64_t n) {
  return std::sqrt(-std::log(0.005) / 2.0) / std::sqrt(static_cast<double>(n));
}

CltReport clt_experiment(int l_max, std::uint64_t trials, std::uint64_t seed, int threads, CltSampler sampler) {
  if (l_max < 4) throw DomainError(fmt::format("L_max must be at least 4 (got {})", l_max));
  if (trials < 1) throw DomainError("at least one trial is required");

  CltReport report;
  report.l_max = l_max;
  report.trials = trials;
  report.seed = seed;
  report.b_l.reserve(static_cast<std::size_t>(l_max - 2));
  report.lyapunov_ratio.reserve(static_cast<std::size_t>(l_max - 2));

  std::vector<double> centered(trials, 0.0);
  std::vector<double> halved(trials, 0.0);
  std::vector<double> cdf;
  const RuleSpec unbiased = RuleSpec::r1(0.5);
  double b2 = 0, w_sum = 0, phi1_sum = 0;

  dp::for_each_row(unbiased, l_max, [&](int n, std::span<const double> row) {
    const double m = mean(row);
    b2 += variance(row);
    w_sum += third_abs_central(row);
    phi1_sum += moment(row, 1);
    const double b = std::sqrt(b2);
    report.b_l.push_back(b);
    report.lyapunov_ratio.push_back(w_sum / (b2 * b));

    if (sampler == CltSampler::InverseCdf) {
      cdf.resize(row.size());
      double acc = 0;
      for (std::size_t k = 0; k < row.size(); ++k) cdf[k] = (acc += row[k]);
    }
    const double size = static_cast<double>(n);
    detail::parallel_chunks(trials, threads, [&](int, std::uint64_t begin, std::uint64_t end) {
      for (std::uint64_t t = begin; t < end; ++t) {
        const std::uint64_t stream = rng::stream_seed(rng::stream_seed(seed, t), static_cast<std::uint64_t>(n));
        int label;
        if (sampler == CltSampler::InverseCdf) {
          rng::SplitMix64 gen(stream);
          const double u = gen.uniform() * cdf.back();
          const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
          label = static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(), n - 1));
        } else {
          label = sim::sample_survivor(unbiased, n, stream).survivor;
        }
        const double x = label / size;
        centered[t] += x - m;
        halved[t] += x - 0.5;
      }
    });
  });

  const double b = report.b_l.back();
  for (auto& v : centered) v /= b;
  for (auto& v : halved) v /= b;
  report.centering_offset = phi1_sum / b;
  report.ks_distance = ks_distance_to_normal(centered);
  report.ks_distance_half = ks_distance_to_normal(halved);
  report.ks_critical_1pct = ks_critical_value_1pct(trials);
  report.normalized_sums = std::move(centered);
  return report;
}

}  // namespace josephus::analysis
