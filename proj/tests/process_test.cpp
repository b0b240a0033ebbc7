#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "josephus/deterministic.hpp"
#include "josephus/errors.hpp"
#include "josephus/process.hpp"
#include "josephus/rng.hpp"
#include "josephus/survival_dp.hpp"
#include "support/brute_force.hpp"

namespace josephus::sim {
namespace {

TEST(Process, R1FirstStep) {
  const ProcessState s(RuleSpec::r1(0.3), 3);
  const auto keep = step(s, Coin::P);
  EXPECT_EQ(keep.alive(), (std::vector<int>{0, 2}));
  EXPECT_EQ(keep.knife_at(), 2);
  EXPECT_EQ(keep.direction(), Direction::Right);

  const auto flip = step(s, Coin::NotP);
  EXPECT_EQ(flip.alive(), (std::vector<int>{0, 1}));
  EXPECT_EQ(flip.knife_at(), 1);
  EXPECT_EQ(flip.direction(), Direction::Left);
}

TEST(Process, R2LeftStep) {
  const auto s = step(ProcessState(RuleSpec::r2(0.4), 4), Coin::NotP);
  EXPECT_EQ(s.alive(), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(s.knife_at(), 2);
}

TEST(Process, R3CoinsAreIndependent) {
  const ProcessState s(RuleSpec::r3(0.5, 0.5), 5);
  const auto rl = step(s, Coin::P, Coin::NotP);  // stab 1, pass back to 4
  EXPECT_EQ(rl.alive(), (std::vector<int>{0, 2, 3, 4}));
  EXPECT_EQ(rl.knife_at(), 4);
  const auto lr = step(s, Coin::NotP, Coin::P);  // stab 4, pass to 1
  EXPECT_EQ(lr.alive(), (std::vector<int>{0, 1, 2, 3}));
  EXPECT_EQ(lr.knife_at(), 1);
  EXPECT_THROW(step(s, Coin::P), InvalidStateError);
  EXPECT_THROW(step(ProcessState(RuleSpec::r1(0.5), 5), Coin::P, Coin::P), InvalidStateError);
}

TEST(Process, SurvivorOnlyAtTheEnd) {
  ProcessState s(RuleSpec::deterministic(), 2);
  EXPECT_THROW((void)s.survivor(), InvalidStateError);
  s.apply(Coin::P);
  EXPECT_EQ(s.survivor(), 0);
  EXPECT_THROW(s.apply(Coin::P), InvalidStateError);
  EXPECT_THROW(ProcessState(RuleSpec::r1(0.5), 0), DomainError);
}

TEST(Process, OracleExamples) {
  const auto base = oracle_distribution(ExactRule::make(RuleKind::R1, Rational(3, 10)), 3);
  EXPECT_EQ(base.probs, (std::vector<Rational>{0, Rational(7, 10), Rational(3, 10)}));
  const auto four = oracle_distribution(ExactRule::make(RuleKind::R1, Rational(1, 2)), 4);
  EXPECT_EQ(four.probs, (std::vector<Rational>{Rational(1, 2), Rational(1, 4), 0, Rational(1, 4)}));
  const auto r3 = oracle_distribution(ExactRule::make(RuleKind::R3, Rational(1), Rational(1)), 3);
  EXPECT_EQ(r3.probs, (std::vector<Rational>{0, 0, 1}));
}

TEST(Process, OracleMatchesBruteForce) {
  const Rational p(2, 7), q(5, 9);
  for (RuleKind kind : {RuleKind::Deterministic, RuleKind::R1, RuleKind::R2}) {
    for (int n = 2; n <= 10; ++n) {
      EXPECT_EQ(oracle_distribution(ExactRule::make(kind, p, q), n).probs,
                testing::brute_force_distribution(kind, p, q, n))
          << to_string(kind) << " N=" << n;
    }
  }
  for (int n = 2; n <= 8; ++n) {
    EXPECT_EQ(oracle_distribution(ExactRule::make(RuleKind::R3, p, q), n).probs,
              testing::brute_force_distribution(RuleKind::R3, p, q, n))
        << n;
  }
}

TEST(Process, OracleMatchesDp) {
  const auto r2 = oracle_distribution(RuleSpec::r2(0.4), 10);
  const auto r2_dp = dp::r2_distribution(10, 0.4);
  const auto r3 = oracle_distribution(RuleSpec::r3(0.3, 0.7), 10);
  const auto r3_dp = dp::r3_distribution(10, 0.3, 0.7);
  for (std::size_t k = 0; k < 10; ++k) {
    EXPECT_NEAR(r2.probs[k], r2_dp.probs[k], 1e-12);
    EXPECT_NEAR(r3.probs[k], r3_dp.probs[k], 1e-12);
  }
  const auto sum = std::accumulate(r3.probs.begin(), r3.probs.end(), 0.0);
  EXPECT_NEAR(sum, 1.0, 1e-15);
}

TEST(Process, OracleLimits) {
  EXPECT_THROW(oracle_distribution(RuleSpec::r1(0.5), kOracleCapR1R2 + 1), EnumerationCapError);
  EXPECT_THROW(oracle_distribution(RuleSpec::r3(0.5, 0.5), kOracleCapR3 + 1), EnumerationCapError);
  EXPECT_THROW(oracle_distribution(RuleSpec::r1(0.5), 1), DomainError);
  const auto exact = oracle_distribution(ExactRule::make(RuleKind::R3, Rational(1, 3), Rational(1, 5)), 9);
  EXPECT_EQ(std::accumulate(exact.probs.begin(), exact.probs.end(), Rational(0)), 1);
}

TEST(Process, DeterministicSamples) {
  EXPECT_EQ(sample_survivor(RuleSpec::deterministic(), 41, 123).survivor, 18);
  for (int n : {3, 10, 41, 100}) {
    const auto a = static_cast<int>(det::survivor_closed_form(static_cast<std::uint64_t>(n)).survivor_zero_based);
    for (std::uint64_t seed : {0ULL, 1ULL, 99ULL}) {
      EXPECT_EQ(sample_survivor(RuleSpec::r1(1.0), n, seed).survivor, a);
    }
  }
  const auto s = sample_survivor(RuleSpec::r1(0.5), 40, 5);
  EXPECT_EQ(s.path_length, 39);
  EXPECT_DOUBLE_EQ(s.normalized_position, s.survivor / 40.0);
}

TEST(Process, SingleSampleIsPointMass) {
  const auto d = empirical_distribution(RuleSpec::r1(0.5), 30, 1, 11);
  const auto s = sample_survivor(RuleSpec::r1(0.5), 30, rng::stream_seed(11, 0));
  EXPECT_EQ(d.probs[static_cast<std::size_t>(s.survivor)], 1.0);
  EXPECT_EQ(std::accumulate(d.probs.begin(), d.probs.end(), 0.0), 1.0);
  EXPECT_EQ(d.method, Method::MonteCarlo);
  EXPECT_EQ(d.mc_samples, 1u);
}

TEST(Process, HistogramIndependentOfThreads) {
  const auto one = survivor_histogram(RuleSpec::r3(0.4, 0.6), 60, 5000, 42, 1);
  EXPECT_EQ(one, survivor_histogram(RuleSpec::r3(0.4, 0.6), 60, 5000, 42, 4));
  EXPECT_EQ(one, survivor_histogram(RuleSpec::r3(0.4, 0.6), 60, 5000, 42, 1));
  EXPECT_NE(one, survivor_histogram(RuleSpec::r3(0.4, 0.6), 60, 5000, 43, 1));
}

TEST(MonteCarlo, SmallCircleWithinStandardErrors) {
  const std::uint64_t samples = 1000000;
  const auto emp = empirical_distribution(RuleSpec::r1(0.5), 50, samples, 2024, 2);
  const auto exact = dp::r1_unbiased_distribution(50);
  for (std::size_t k = 0; k < 50; ++k) {
    const double p = exact.probs[k];
    const double se = std::sqrt(std::max(p * (1 - p), 1e-12) / static_cast<double>(samples));
    EXPECT_LE(std::abs(emp.probs[k] - p), 5 * se) << k;
  }
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  double tv = 0;
  for (std::size_t k = 0; k < a.size(); ++k) tv += std::abs(a[k] - b[k]);
  return tv / 2;
}

TEST(MonteCarlo, LargeCircleTotalVariation) {
  const auto emp = empirical_distribution(RuleSpec::r1(0.5), 2000, 100000, 7, 2);
  const auto exact = dp::r1_unbiased_distribution(2000);
  const double tv = total_variation(emp.probs, exact.probs);
  RecordProperty("total_variation", std::to_string(tv));
  EXPECT_LE(tv, 0.02);
}

TEST(MonteCarlo, R2ModeTracksThreePMinusOne) {
  const auto emp = empirical_distribution(RuleSpec::r2(0.45), 2000, 100000, 3, 2);
  const auto mode = std::max_element(emp.probs.begin(), emp.probs.end()) - emp.probs.begin();
  EXPECT_LE(std::abs(static_cast<double>(mode) - 0.35 * 2000), 0.03 * 2000);
}

TEST(Rng, ReferenceValues) {
  // First outputs of SplitMix64 seeded with 0 and 1234567.
  rng::SplitMix64 g(0);
  EXPECT_EQ(g(), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(g(), 0x6E789E6AA1B965F4ULL);
  rng::SplitMix64 h(1234567);
  EXPECT_EQ(h(), 6457827717110365317ULL);
  EXPECT_EQ(h(), 3203168211198807973ULL);
  rng::SplitMix64 u(5);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    ASSERT_GE(x, 0.0);
    ASSERT_LT(x, 1.0);
  }
  EXPECT_FALSE(rng::SplitMix64(9).bernoulli(0.0));
  EXPECT_TRUE(rng::SplitMix64(9).bernoulli(1.0));
}

}  // namespace
}  // namespace josephus::sim
