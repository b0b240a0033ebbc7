#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "josephus/rule.hpp"

// Functionals of survival distributions and the numerical checks of the
// limit theorems (exponential decay, moment scaling, CLT).
namespace josephus::analysis {

// sum_n phi(n/N) probs[n].
template <class Fn>
double expectation_functional(std::span<const double> probs, Fn&& phi) {
  const double size = static_cast<double>(probs.size());
  double acc = 0.0;
  for (std::size_t n = 0; n < probs.size(); ++n) {
    if (probs[n] != 0.0) acc += phi(static_cast<double>(n) / size) * probs[n];
  }
  return acc;
}

template <class Fn>
double expectation_functional(const SurvivalDistribution& dist, Fn&& phi) {
  return expectation_functional(std::span<const double>(dist.probs), phi);
}

// E_N[phi_k] with phi_k(x) = (1/2 - x)^k, or E_N[|phi_k|] when `absolute`.
double moment(std::span<const double> probs, int k, bool absolute = false);
double moment(const SurvivalDistribution& dist, int k, bool absolute = false);

double mean(std::span<const double> probs);               // E[X_N]
double variance(std::span<const double> probs);           // V_N(X_N)
double third_abs_central(std::span<const double> probs);  // W_N(X_N)

// max of probs over labels {-2,-1,0,1,2} mod N (deduplicated).
double eta(std::span<const double> probs);
double eta(const SurvivalDistribution& dist);

// Mass of {n : n/N in [lo, hi]}.
double window_mass(std::span<const double> probs, double lo, double hi);

struct MomentRecord {
  int n = 0;
  double mean = 0, phi1 = 0, phi2 = 0, abs_phi3 = 0;
  double variance = 0, third_central = 0, eta = 0, g0 = 0;
};

MomentRecord moment_record(std::span<const double> probs);

struct MomentReport {
  RuleSpec rule;
  int n_min = 3;
  int n_max = 3;
  std::vector<MomentRecord> per_n;
};

MomentReport moment_report(const RuleSpec& rule, int n_min, int n_max);

// Ordinary least squares y = slope x + intercept.
struct LinearFit {
  double slope = 0, intercept = 0, r_squared = 0;
  std::size_t points = 0;
};
LinearFit fit_line(std::span<const double> xs, std::span<const double> ys);

// ---------------------------------------------------------------------------
// Exponential bounds g_N(n) <= K beta^<n>_N / gamma^N.

struct DecayParams {
  double beta = 1, gamma = 1;
};

// Largest gamma over beta > 1 subject to
//   p beta^2 gamma^2 <= 1,            (1-p) beta gamma <= 1,
//   gamma (p beta + (1-p)/beta^2) <= 1,  gamma ((1-p) beta + p/beta^2) <= 1.
// For fixed beta the best gamma is the minimum of the four caps; that
// envelope is maximized by a grid over beta in (1, 2] refined by golden
// section. Ties go to the smaller beta. Needs 1/3 < p < 2/3.
DecayParams decay_params_feasible(double p);

// Largest violation of the four inequalities at (beta, gamma); <= 0 when all hold.
double decay_constraint_violation(double p, const DecayParams& params);

struct DecayBoundFit {
  double p = 0.5;
  double beta = 1;   // growth per unit of circular distance <n>_N
  double gamma = 1;  // decay per participant
  double k = 0;      // smallest K over 1 <= N <= n_max (or 3 <= N)
  double k_half = 0; // same over N <= n_max / 2
  // log(k / k_half): <= 0 when the constant fitted on the first half of the
  // range already bounds the whole range.
  double max_violation = 0;
  int n_max = 0;

  // k within 5% of k_half.
  bool stabilized() const { return k <= 1.05 * k_half; }
};

// Smallest K with probs_N(n) <= K beta^<n>_N / gamma^N for N in [n_min, n_max].
// Rows N = 1, 2 (the conventions (1) and (1, 0)) are included when n_min < 3.
DecayBoundFit fit_decay_constant(const RuleSpec& rule, double beta, double gamma, int n_min, int n_max);

// R1 in the middle range: (beta, gamma) from decay_params_feasible, K over 3 <= N <= n_max.
DecayBoundFit decay_bound_check(double p, int n_max);

struct UnbiasedDecayInequality {
  double first_term = 0;   // alpha^(2 + 4(1+eps))
  double second_term = 0;  // alpha^(1 - 4(1+eps)) + alpha^(1 + 2(1+eps))
  bool holds() const { return first_term <= 2.0 && second_term <= 2.0; }
};

UnbiasedDecayInequality unbiased_decay_inequality(double epsilon, double alpha);

// g_N(n) <= K alpha^(2(1+eps) n - N) for 1 <= N <= n_max, 0 <= n <= N/2.
// Throws DomainError naming the violated inequality when alpha is not admissible.
DecayBoundFit unbiased_decay_check(int n_max, double epsilon, double alpha);

// ---------------------------------------------------------------------------
// Unbiased moment estimates.

struct MomentScalingReport {
  int k = 1;
  int n_min = 50;
  int n_max = 0;
  std::vector<double> ratios;  // ratios[i] for N = n_min + i
  double sup_ratio = 0;
  double low_window_max = 0;   // over [n_min, n_max/2]
  double high_window_max = 0;  // over [n_max/2, n_max]
  // Fit of log E_N[phi_1] against N over N with g_N(0) > 0 (k = 1 only).
  LinearFit first_moment_fit;

  bool bounded() const;
  bool passes() const;
};

// ratio_N = E_N[|phi_k|] / (ln N / N)^(k/2) for N in [n_min, n_max], k in {1,2,3}.
MomentScalingReport moment_scaling_check(int n_max, int k, int n_min = 50);

struct SecondMomentPoint {
  int l = 0;
  double s_l = 0;          // sum_{N=3}^{L} E_N[phi_2]
  double phi1_sq_sum = 0;  // sum_{N=3}^{L} E_N[phi_1]^2
  double b_l_squared = 0;  // sum_{N=3}^{L} V_N
};

struct SecondMomentReport {
  int l_max = 0;
  std::vector<SecondMomentPoint> grid;  // log-spaced L in [100, l_max]
  double band_ratio = 0;      // max / min of S_L / ln L over the grid
  double top_band_ratio = 0;  // same over the top two octaves [l_max/4, l_max]
  bool increasing = false;
  double decomposition_error = 0;  // max |B_L^2 - (S_L - sum E_N[phi_1]^2)|

  bool passes() const;
};

SecondMomentReport second_moment_sum_check(int l_max);

// ---------------------------------------------------------------------------
// Central limit theorem harness (p = 1/2).

enum class CltSampler {
  InverseCdf,  // draw X_N from the exact DP row
  Process,     // run the elimination process (expensive, small L only)
};

struct CltReport {
  int l_min = 3;
  int l_max = 0;
  std::vector<double> b_l;             // b_l[i] = B_L for L = l_min + i
  std::vector<double> lyapunov_ratio;  // (1/B_L^3) sum_{N<=L} W_N
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  // sum_{N=3}^{L_max} (X_N - E_N(X_N)) / B_{L_max}, one per trial.
  std::vector<double> normalized_sums;
  double ks_distance = 0;
  // Same statistic for the sums centered at 1/2 instead of E_N(X_N).
  double ks_distance_half = 0;
  // sum_{N<=L_max} E_N[phi_1] / B_{L_max}, the offset between the two.
  double centering_offset = 0;
  double ks_critical_1pct = 0;

  double b_at(int l) const { return b_l[static_cast<std::size_t>(l - l_min)]; }
  double lyapunov_at(int l) const { return lyapunov_ratio[static_cast<std::size_t>(l - l_min)]; }
};

CltReport clt_experiment(int l_max, std::uint64_t trials, std::uint64_t seed, int threads = 1,
                         CltSampler sampler = CltSampler::InverseCdf);

// sup_x |F_n(x) - Phi(x)| for the empirical CDF of `samples`.
double ks_distance_to_normal(std::vector<double> samples);

// c(0.01) / sqrt(n) with c(0.01) = sqrt(-ln(0.005) / 2).
double ks_critical_value_1pct(std::uint64_t n);

}  // namespace josephus::analysis
