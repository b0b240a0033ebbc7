#pragma once

#include <span>
#include <vector>

#include "josephus/rational.hpp"
#include "josephus/rule.hpp"

// Exact survival-probability vectors from the one-step relabeling recursions.
//
// Every routine starts from the N = 3 vector (0, 1-p, p) and builds row N from
// row N-1, keeping two rows alive. Cost is O(N^2) time and O(N) memory.
namespace josephus::dp {

// g_N(n,p): rule R1 (direction persistence).
SurvivalDistribution r1_distribution(int n, double p);

// g_N(n,1/2) through the symmetric recursion; only n <= N/2 is computed.
SurvivalDistribution r1_unbiased_distribution(int n);

// f_N(n,p): rule R2. The n = 0 row reads p f_{N-1}(-1) + (1-p) f_{N-1}(1).
SurvivalDistribution r2_distribution(int n, double p);

// h_N(n,p,q): rule R3, four branches over (victim side, pass side).
SurvivalDistribution r3_distribution(int n, double p, double q);

// Dispatch on rule kind. The deterministic rule yields the point mass at a_N.
SurvivalDistribution exact_distribution(const RuleSpec& rule, int n);

// Same recursions in exact rational arithmetic, for cross-checking the
// double-precision rows. Capped at N <= kMaxRationalN.
inline constexpr int kMaxRationalN = 64;
ExactDistribution exact_rational_distribution(const ExactRule& rule, int n);

// Streams rows N = 3, 4, ... of the recursion for one rule without keeping
// the triangle. R1 with p = 1/2 uses the symmetric kernel.
class RowStream {
 public:
  explicit RowStream(const RuleSpec& rule);

  int n() const { return static_cast<int>(current_.size()); }
  std::span<const double> row() const { return current_; }
  const RuleSpec& rule() const { return rule_; }
  void advance();
  void advance_to(int n);

 private:
  RuleSpec rule_;
  std::vector<double> current_;
  std::vector<double> scratch_;
};

// Calls fn(N, row) for N = 3 .. n_max in order.
template <class Fn>
void for_each_row(const RuleSpec& rule, int n_max, Fn&& fn) {
  RowStream stream(rule);
  for (;;) {
    fn(stream.n(), stream.row());
    if (stream.n() >= n_max) break;
    stream.advance();
  }
}

}  // namespace josephus::dp
