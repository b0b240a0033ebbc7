#include "josephus/rule.hpp"

#include <cmath>

#include <fmt/format.h>

#include "josephus/errors.hpp"

namespace josephus {

std::string_view to_string(RuleKind kind) {
  switch (kind) {
    case RuleKind::Deterministic: return "det";
    case RuleKind::R1: return "r1";
    case RuleKind::R2: return "r2";
    case RuleKind::R3: return "r3";
  }
  return "?";
}

RuleKind parse_rule_kind(std::string_view name) {
  if (name == "det" || name == "deterministic") return RuleKind::Deterministic;
  if (name == "r1") return RuleKind::R1;
  if (name == "r2") return RuleKind::R2;
  if (name == "r3") return RuleKind::R3;
  throw DomainError(fmt::format("unknown rule '{}' (expected det, r1, r2 or r3)", name));
}

double checked_probability(double x, std::string_view name) {
  if (!std::isfinite(x) || x < 0.0 || x > 1.0) {
    throw DomainError(fmt::format("{} = {} is not a probability in [0,1]", name, x));
  }
  return x;
}

RuleSpec RuleSpec::deterministic() { return {RuleKind::Deterministic, 1.0, 1.0}; }

RuleSpec RuleSpec::r1(double p) { return {RuleKind::R1, checked_probability(p, "p"), 0.5}; }

RuleSpec RuleSpec::r2(double p) { return {RuleKind::R2, checked_probability(p, "p"), 0.5}; }

RuleSpec RuleSpec::r3(double p, double q) {
  return {RuleKind::R3, checked_probability(p, "p"), checked_probability(q, "q")};
}

std::string describe(const RuleSpec& rule) {
  switch (rule.kind) {
    case RuleKind::Deterministic: return "det";
    case RuleKind::R1:
    case RuleKind::R2: return fmt::format("{}(p={})", to_string(rule.kind), rule.p);
    case RuleKind::R3: return fmt::format("r3(p={},q={})", rule.p, rule.q);
  }
  return "?";
}

namespace {

Rational checked_probability(const Rational& x, std::string_view name) {
  if (x < 0 || x > 1) {
    throw DomainError(fmt::format("{} = {} is not a probability in [0,1]", name, x.str()));
  }
  return x;
}

}  // namespace

ExactRule ExactRule::from(const RuleSpec& rule) {
  return make(rule.kind, exact_rational(rule.p), exact_rational(rule.q));
}

ExactRule ExactRule::make(RuleKind kind, Rational p, Rational q) {
  ExactRule r;
  r.kind = kind;
  if (kind == RuleKind::Deterministic) {
    r.p = 1;
    r.q = 1;
  } else {
    r.p = checked_probability(p, "p");
    r.q = kind == RuleKind::R3 ? checked_probability(q, "q") : Rational(1, 2);
  }
  return r;
}

RuleSpec ExactRule::approx() const { return {kind, to_double(p), to_double(q)}; }

std::string_view to_string(Method method) {
  switch (method) {
    case Method::ExactDP: return "exact-dp";
    case Method::ExactOracle: return "exact-oracle";
    case Method::MonteCarlo: return "monte-carlo";
  }
  return "?";
}

double SurvivalDistribution::at(long long n) const {
  const long long size = static_cast<long long>(probs.size());
  long long idx = n % size;
  if (idx < 0) idx += size;
  return probs[static_cast<std::size_t>(idx)];
}

SurvivalDistribution ExactDistribution::to_double() const {
  SurvivalDistribution out;
  out.rule = rule.approx();
  out.method = method;
  out.probs.reserve(probs.size());
  for (const auto& v : probs) out.probs.push_back(josephus::to_double(v));
  return out;
}

}  // namespace josephus
