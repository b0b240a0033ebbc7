#include "josephus/survival_dp.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "josephus/deterministic.hpp"
#include "josephus/errors.hpp"

namespace josephus::dp {
namespace {

void require_min_size(int n) {
  if (n < 3) throw DomainError(fmt::format("N = {} is below the base case N = 3", n));
}

template <class T>
std::vector<T> base_row(const T& p) {
  return {T(0), T(1) - p, p};
}

// Each kernel maps the N-1 row `prev` to the N row `next` (next.size() == N).
// Labels on the right-hand side are taken modulo M = N-1.

template <class T>
void r1_kernel(std::span<const T> prev, std::span<T> next, const T& p, const T& p_bar) {
  const std::size_t m = prev.size();
  const std::size_t n = next.size();
  next[0] = prev[m - 1];
  next[1] = p_bar * prev[m - 2];
  next[n - 1] = p * prev[m - 2];
  for (std::size_t k = 2; k + 1 < n; ++k) {
    next[k] = p * prev[k - 2] + p_bar * prev[n - k - 2];
  }
}

template <class T>
void r1_unbiased_kernel(std::span<const T> prev, std::span<T> next) {
  const std::size_t m = prev.size();
  const std::size_t n = next.size();
  next[0] = prev[m - 1];
  next[1] = prev[m - 2] / 2;
  next[n - 1] = next[1];
  for (std::size_t k = 2; 2 * k <= n; ++k) {
    next[k] = (prev[k - 2] + prev[(k + 1) % m]) / 2;
    next[n - k] = next[k];
  }
}

template <class T>
void r2_kernel(std::span<const T> prev, std::span<T> next, const T& p, const T& p_bar) {
  const std::size_t m = prev.size();
  const std::size_t n = next.size();
  next[0] = p * prev[m - 1] + p_bar * prev[1 % m];
  next[1] = p_bar * prev[2 % m];
  next[n - 1] = p * prev[m - 2];
  for (std::size_t k = 2; k + 1 < n; ++k) {
    next[k] = p * prev[k - 2] + p_bar * prev[(k + 1) % m];
  }
}

// Branch weights for R3: victim right/left (p, 1-p) times pass right/left
// (q, 1-q). With the holder at 0 among N, the new holder is relabeled 0 and
// the counterclockwise orientation kept:
//   right/right  n -> n-2      right/left  n -> n   (0 -> 1)
//   left/right   n -> n-1      left/left   n -> n+1
template <class T>
struct R3Weights {
  T rr, rl, lr, ll, q, q_bar;
};

template <class T>
R3Weights<T> r3_weights(const T& p, const T& q) {
  const T p_bar = T(1) - p;
  const T q_bar = T(1) - q;
  return {p * q, p * q_bar, p_bar * q, p_bar * q_bar, q, q_bar};
}

template <class T>
void r3_kernel(std::span<const T> prev, std::span<T> next, const R3Weights<T>& w) {
  const std::size_t m = prev.size();
  const std::size_t n = next.size();
  next[0] = w.q * prev[m - 1] + w.q_bar * prev[1 % m];
  next[1] = w.lr * prev[0] + w.ll * prev[2 % m];
  next[n - 1] = w.rr * prev[n - 3] + w.rl * prev[0];
  for (std::size_t k = 2; k + 1 < n; ++k) {
    next[k] = w.rr * prev[k - 2] + w.rl * prev[k] + w.lr * prev[k - 1] + w.ll * prev[(k + 1) % m];
  }
}

// Applies one step for `rule` with scalar type T.
template <class T>
class Stepper {
 public:
  Stepper(RuleKind kind, const T& p, const T& q, bool unbiased)
      : kind_(kind), p_(p), p_bar_(T(1) - p), unbiased_(unbiased), r3_(r3_weights(p, q)) {}

  void operator()(std::span<const T> prev, std::span<T> next) const {
    switch (kind_) {
      case RuleKind::Deterministic:
      case RuleKind::R1:
        if (unbiased_) {
          r1_unbiased_kernel<T>(prev, next);
        } else {
          r1_kernel<T>(prev, next, p_, p_bar_);
        }
        return;
      case RuleKind::R2: r2_kernel<T>(prev, next, p_, p_bar_); return;
      case RuleKind::R3: r3_kernel<T>(prev, next, r3_); return;
    }
  }

 private:
  RuleKind kind_;
  T p_, p_bar_;
  bool unbiased_;
  R3Weights<T> r3_;
};

template <class T>
std::vector<T> iterate(const Stepper<T>& step, const T& p, int n) {
  std::vector<T> current = base_row(p);
  std::vector<T> next;
  current.reserve(static_cast<std::size_t>(n));
  next.reserve(static_cast<std::size_t>(n));
  for (int size = 4; size <= n; ++size) {
    next.resize(static_cast<std::size_t>(size));
    step(std::span<const T>(current), std::span<T>(next));
    std::swap(current, next);
  }
  return current;
}

SurvivalDistribution make_distribution(const RuleSpec& rule, std::vector<double> probs) {
  SurvivalDistribution d;
  d.rule = rule;
  d.probs = std::move(probs);
  d.method = Method::ExactDP;
  return d;
}

SurvivalDistribution point_mass(const RuleSpec& rule, int n) {
  std::vector<double> probs(static_cast<std::size_t>(n), 0.0);
  probs[det::survivor_closed_form(static_cast<std::uint64_t>(n)).survivor_zero_based] = 1.0;
  return make_distribution(rule, std::move(probs));
}

}  // namespace

SurvivalDistribution r1_distribution(int n, double p) {
  require_min_size(n);
  const auto rule = RuleSpec::r1(p);
  return make_distribution(rule, iterate(Stepper<double>(RuleKind::R1, p, 0.5, false), p, n));
}

SurvivalDistribution r1_unbiased_distribution(int n) {
  require_min_size(n);
  const auto rule = RuleSpec::r1(0.5);
  return make_distribution(rule, iterate(Stepper<double>(RuleKind::R1, 0.5, 0.5, true), 0.5, n));
}

SurvivalDistribution r2_distribution(int n, double p) {
  require_min_size(n);
  const auto rule = RuleSpec::r2(p);
  return make_distribution(rule, iterate(Stepper<double>(RuleKind::R2, p, 0.5, false), p, n));
}

SurvivalDistribution r3_distribution(int n, double p, double q) {
  require_min_size(n);
  const auto rule = RuleSpec::r3(p, q);
  return make_distribution(rule, iterate(Stepper<double>(RuleKind::R3, p, q, false), p, n));
}

SurvivalDistribution exact_distribution(const RuleSpec& rule, int n) {
  switch (rule.kind) {
    case RuleKind::Deterministic:
      require_min_size(n);
      return point_mass(rule, n);
    case RuleKind::R1: return r1_distribution(n, rule.p);
    case RuleKind::R2: return r2_distribution(n, rule.p);
    case RuleKind::R3: return r3_distribution(n, rule.p, rule.q);
  }
  throw DomainError("unknown rule");
}

ExactDistribution exact_rational_distribution(const ExactRule& rule, int n) {
  require_min_size(n);
  if (n > kMaxRationalN) {
    throw DomainError(fmt::format("rational DP is limited to N <= {} (got {})", kMaxRationalN, n));
  }
  ExactDistribution out;
  out.rule = rule;
  out.method = Method::ExactDP;
  if (rule.kind == RuleKind::Deterministic) {
    out.probs.assign(static_cast<std::size_t>(n), Rational(0));
    out.probs[det::survivor_closed_form(static_cast<std::uint64_t>(n)).survivor_zero_based] = 1;
    return out;
  }
  out.probs = iterate(Stepper<Rational>(rule.kind, rule.p, rule.q, false), rule.p, n);
  return out;
}

RowStream::RowStream(const RuleSpec& rule) : rule_(rule) {
  if (rule_.kind == RuleKind::Deterministic) {
    current_ = {0.0, 0.0, 1.0};
  } else {
    current_ = base_row(rule_.p);
  }
}

void RowStream::advance() {
  const std::size_t size = current_.size() + 1;
  scratch_.resize(size);
  if (rule_.kind == RuleKind::Deterministic) {
    // p = 1 under R1 is the classical process; 0/1 weights keep it exact.
    Stepper<double>(RuleKind::R1, 1.0, 0.5, false)(current_, scratch_);
  } else {
    const bool unbiased = rule_.kind == RuleKind::R1 && rule_.p == 0.5;
    Stepper<double>(rule_.kind, rule_.p, rule_.q, unbiased)(current_, scratch_);
  }
  std::swap(current_, scratch_);
}

void RowStream::advance_to(int n) {
  require_min_size(n);
  if (n < this->n()) throw DomainError("RowStream cannot move backwards");
  while (this->n() < n) advance();
}

}  // namespace josephus::dp
