#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "josephus/rational.hpp"

namespace josephus {

enum class RuleKind { Deterministic, R1, R2, R3 };

std::string_view to_string(RuleKind kind);
RuleKind parse_rule_kind(std::string_view name);

// Which elimination process runs, and its Bernoulli parameters.
//
//  Deterministic  every holder stabs right and passes right (p, q unused).
//  R1(p)          keep the previous stabbing direction w.p. p, flip w.p. 1-p.
//  R2(p)          stab right and pass right w.p. p, else left/left.
//  R3(p, q)       victim on the right w.p. p; knife passed right w.p. q.
struct RuleSpec {
  RuleKind kind = RuleKind::R1;
  double p = 0.5;
  double q = 0.5;

  static RuleSpec deterministic();
  static RuleSpec r1(double p);
  static RuleSpec r2(double p);
  static RuleSpec r3(double p, double q);

  bool has_p() const { return kind != RuleKind::Deterministic; }
  bool has_q() const { return kind == RuleKind::R3; }

  friend bool operator==(const RuleSpec&, const RuleSpec&) = default;
};

std::string describe(const RuleSpec& rule);

// Throws DomainError unless x is a finite value in [0,1].
double checked_probability(double x, std::string_view name);

// RuleSpec with exact rational parameters, used by the enumeration oracle
// and the rational DP cross-check.
struct ExactRule {
  RuleKind kind = RuleKind::R1;
  Rational p{1, 2};
  Rational q{1, 2};

  static ExactRule from(const RuleSpec& rule);
  static ExactRule make(RuleKind kind, Rational p, Rational q = Rational(1, 2));
  RuleSpec approx() const;
};

enum class Method { ExactDP, ExactOracle, MonteCarlo };

std::string_view to_string(Method method);

// Survival probabilities (probs[n] for participant n among N) together with
// how they were obtained.
struct SurvivalDistribution {
  RuleSpec rule;
  std::vector<double> probs;
  Method method = Method::ExactDP;
  std::optional<std::uint64_t> mc_samples;

  int n_participants() const { return static_cast<int>(probs.size()); }
  // Label taken modulo N, so at(-1) is the last participant.
  double at(long long n) const;
};

struct ExactDistribution {
  ExactRule rule;
  std::vector<Rational> probs;
  Method method = Method::ExactOracle;

  int n_participants() const { return static_cast<int>(probs.size()); }
  SurvivalDistribution to_double() const;
};

}  // namespace josephus
