#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "josephus/rule.hpp"

// Step-by-step elimination process, the exhaustive oracle built on it, and
// the seeded Monte Carlo sampler.
//
// Labels run counterclockwise; "right" of label n is n+1 and "left" is n-1.
namespace josephus::sim {

enum class Direction { Right, Left };

// Outcome of a Bernoulli trial: the branch taken with probability p (or q)
// versus the complementary branch.
enum class Coin { P, NotP };

class ProcessState {
 public:
  // N participants 0..N-1, knife at 0, R1 direction Right.
  ProcessState(const RuleSpec& rule, int n);

  const RuleSpec& rule() const { return rule_; }
  int n_participants() const { return static_cast<int>(next_.size()); }
  int size() const { return size_; }
  int knife_at() const { return knife_; }
  Direction direction() const { return direction_; }
  bool is_alive(int label) const { return alive_[static_cast<std::size_t>(label)]; }

  // Alive labels in counterclockwise order, starting from the lowest label.
  std::vector<int> alive() const;
  // Bit k set when label k is alive (N <= 64).
  std::uint64_t alive_mask() const;
  // Only participant left; InvalidStateError while more remain.
  int survivor() const;

  // Removes one participant. coin_knife must be given exactly for R3; the
  // deterministic rule ignores coin_victim.
  void apply(Coin coin_victim, std::optional<Coin> coin_knife = std::nullopt);

 private:
  int neighbor(int label, Direction d) const;
  void remove(int label);

  RuleSpec rule_;
  std::vector<int> next_;  // toward the right
  std::vector<int> prev_;  // toward the left
  std::vector<bool> alive_;
  int size_;
  int knife_ = 0;
  Direction direction_ = Direction::Right;
};

// Value-returning form of ProcessState::apply.
ProcessState step(ProcessState state, Coin coin_victim, std::optional<Coin> coin_knife = std::nullopt);

inline constexpr int kOracleCapR1R2 = 16;
inline constexpr int kOracleCapR3 = 12;

// Exact survival distribution by enumerating every coin sequence with
// rational weights; states with equal (alive set, knife, direction) merge.
ExactDistribution oracle_distribution(const ExactRule& rule, int n);
SurvivalDistribution oracle_distribution(const RuleSpec& rule, int n);

struct SurvivorSample {
  RuleSpec rule;
  int n_participants = 0;
  int survivor = 0;
  double normalized_position = 0.0;  // survivor / N
  std::uint64_t rng_seed = 0;
  int path_length = 0;
};

// One full run of N-1 steps driven by SplitMix64(seed).
SurvivorSample sample_survivor(const RuleSpec& rule, int n, std::uint64_t seed);

// Counts of survivors over `samples` runs; run i uses
// rng::stream_seed(seed, i). Work is split over `threads` workers; the
// result does not depend on the split.
std::vector<std::uint64_t> survivor_histogram(const RuleSpec& rule, int n, std::uint64_t samples,
                                              std::uint64_t seed, int threads = 1);

SurvivalDistribution empirical_distribution(const RuleSpec& rule, int n, std::uint64_t samples,
                                            std::uint64_t seed, int threads = 1);

}  // namespace josephus::sim
