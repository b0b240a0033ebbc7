#include "josephus/process.hpp"

#include <map>
#include <tuple>

#include <fmt/format.h>

#include "josephus/errors.hpp"
#include "josephus/rng.hpp"
#include "parallel.hpp"

namespace josephus::sim {
namespace {

Direction flip(Direction d) { return d == Direction::Right ? Direction::Left : Direction::Right; }

Direction side(Coin c) { return c == Coin::P ? Direction::Right : Direction::Left; }

}  // namespace

ProcessState::ProcessState(const RuleSpec& rule, int n)
    : rule_(rule),
      next_(static_cast<std::size_t>(std::max(n, 0))),
      prev_(static_cast<std::size_t>(std::max(n, 0))),
      alive_(static_cast<std::size_t>(std::max(n, 0)), true),
      size_(n) {
  if (n < 1) throw DomainError(fmt::format("a process needs at least one participant (N = {})", n));
  for (int k = 0; k < n; ++k) {
    next_[static_cast<std::size_t>(k)] = (k + 1) % n;
    prev_[static_cast<std::size_t>(k)] = (k + n - 1) % n;
  }
}

std::vector<int> ProcessState::alive() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(size_));
  for (int k = 0; k < n_participants(); ++k) {
    if (alive_[static_cast<std::size_t>(k)]) out.push_back(k);
  }
  return out;
}

std::uint64_t ProcessState::alive_mask() const {
  if (n_participants() > 64) throw InvalidStateError("alive_mask needs N <= 64");
  std::uint64_t mask = 0;
  for (int k = 0; k < n_participants(); ++k) {
    if (alive_[static_cast<std::size_t>(k)]) mask |= std::uint64_t{1} << k;
  }
  return mask;
}

int ProcessState::survivor() const {
  if (size_ != 1) throw InvalidStateError(fmt::format("{} participants are still alive", size_));
  return knife_;
}

int ProcessState::neighbor(int label, Direction d) const {
  const auto idx = static_cast<std::size_t>(label);
  return d == Direction::Right ? next_[idx] : prev_[idx];
}

void ProcessState::remove(int label) {
  const auto idx = static_cast<std::size_t>(label);
  const int r = next_[idx];
  const int l = prev_[idx];
  next_[static_cast<std::size_t>(l)] = r;
  prev_[static_cast<std::size_t>(r)] = l;
  alive_[idx] = false;
  --size_;
}

// With two participants left both neighbors of the holder coincide, so the
// holder eliminates the other one whatever the coins say.
void ProcessState::apply(Coin coin_victim, std::optional<Coin> coin_knife) {
  if (size_ < 2) throw InvalidStateError("cannot step a process with fewer than two participants");
  if (coin_knife.has_value() != (rule_.kind == RuleKind::R3)) {
    throw InvalidStateError("a knife coin is required for rule R3 and only for R3");
  }
  switch (rule_.kind) {
    case RuleKind::Deterministic: {
      remove(neighbor(knife_, Direction::Right));
      knife_ = neighbor(knife_, Direction::Right);
      return;
    }
    case RuleKind::R1: {
      const Direction d = coin_victim == Coin::P ? direction_ : flip(direction_);
      remove(neighbor(knife_, d));
      knife_ = neighbor(knife_, d);
      direction_ = d;
      return;
    }
    case RuleKind::R2: {
      const Direction d = side(coin_victim);
      remove(neighbor(knife_, d));
      knife_ = neighbor(knife_, d);
      return;
    }
    case RuleKind::R3: {
      remove(neighbor(knife_, side(coin_victim)));
      knife_ = neighbor(knife_, side(*coin_knife));
      return;
    }
  }
}

ProcessState step(ProcessState state, Coin coin_victim, std::optional<Coin> coin_knife) {
  state.apply(coin_victim, coin_knife);
  return state;
}

ExactDistribution oracle_distribution(const ExactRule& rule, int n) {
  const int cap = rule.kind == RuleKind::R3 ? kOracleCapR3 : kOracleCapR1R2;
  if (n < 2) throw DomainError(fmt::format("the oracle needs N >= 2 (got {})", n));
  if (n > cap) {
    throw EnumerationCapError(fmt::format(
        "oracle enumeration for rule {} is capped at N <= {} (got N = {})", to_string(rule.kind), cap, n));
  }

  struct Branch {
    Coin victim;
    std::optional<Coin> knife;
    Rational weight;
  };
  std::vector<Branch> branches;
  const Rational p_bar = 1 - rule.p;
  switch (rule.kind) {
    case RuleKind::Deterministic: branches = {{Coin::P, std::nullopt, Rational(1)}}; break;
    case RuleKind::R1:
    case RuleKind::R2:
      branches = {{Coin::P, std::nullopt, rule.p}, {Coin::NotP, std::nullopt, p_bar}};
      break;
    case RuleKind::R3: {
      const Rational q_bar = 1 - rule.q;
      branches = {{Coin::P, Coin::P, rule.p * rule.q},
                  {Coin::P, Coin::NotP, rule.p * q_bar},
                  {Coin::NotP, Coin::P, p_bar * rule.q},
                  {Coin::NotP, Coin::NotP, p_bar * q_bar}};
      break;
    }
  }
  std::erase_if(branches, [](const Branch& b) { return b.weight == 0; });

  using Key = std::tuple<std::uint64_t, int, Direction>;
  auto key_of = [](const ProcessState& s) { return Key{s.alive_mask(), s.knife_at(), s.direction()}; };

  std::map<Key, std::pair<ProcessState, Rational>> level;
  ProcessState start(rule.approx(), n);
  level.emplace(key_of(start), std::pair{start, Rational(1)});
  for (int removed = 0; removed + 1 < n; ++removed) {
    std::map<Key, std::pair<ProcessState, Rational>> next_level;
    for (const auto& [key, entry] : level) {
      const auto& [state, weight] = entry;
      for (const auto& b : branches) {
        ProcessState child = step(state, b.victim, b.knife);
        const Rational w = weight * b.weight;
        auto [it, inserted] = next_level.try_emplace(key_of(child), child, w);
        if (!inserted) it->second.second += w;
      }
    }
    level = std::move(next_level);
  }

  ExactDistribution out;
  out.rule = rule;
  out.method = Method::ExactOracle;
  out.probs.assign(static_cast<std::size_t>(n), Rational(0));
  for (const auto& [key, entry] : level) {
    out.probs[static_cast<std::size_t>(entry.first.survivor())] += entry.second;
  }
  return out;
}

SurvivalDistribution oracle_distribution(const RuleSpec& rule, int n) {
  return oracle_distribution(ExactRule::from(rule), n).to_double();
}

namespace {

int run_once(const RuleSpec& rule, ProcessState& state, rng::SplitMix64& gen) {
  while (state.size() > 1) {
    switch (rule.kind) {
      case RuleKind::Deterministic: state.apply(Coin::P); break;
      case RuleKind::R1:
      case RuleKind::R2: state.apply(gen.bernoulli(rule.p) ? Coin::P : Coin::NotP); break;
      case RuleKind::R3: {
        const Coin victim = gen.bernoulli(rule.p) ? Coin::P : Coin::NotP;
        const Coin knife = gen.bernoulli(rule.q) ? Coin::P : Coin::NotP;
        state.apply(victim, knife);
        break;
      }
    }
  }
  return state.survivor();
}

}  // namespace

SurvivorSample sample_survivor(const RuleSpec& rule, int n, std::uint64_t seed) {
  if (n < 2) throw DomainError(fmt::format("sampling needs N >= 2 (got {})", n));
  ProcessState state(rule, n);
  rng::SplitMix64 gen(seed);
  const int survivor = run_once(rule, state, gen);
  return {rule, n, survivor, static_cast<double>(survivor) / n, seed, n - 1};
}

std::vector<std::uint64_t> survivor_histogram(const RuleSpec& rule, int n, std::uint64_t samples,
                                              std::uint64_t seed, int threads) {
  if (n < 2) throw DomainError(fmt::format("sampling needs N >= 2 (got {})", n));
  if (samples == 0) throw DomainError("at least one sample is required");
  const int workers = std::max(1, threads);
  std::vector<std::vector<std::uint64_t>> partial(static_cast<std::size_t>(workers));
  detail::parallel_chunks(samples, workers, [&](int w, std::uint64_t begin, std::uint64_t end) {
    auto& counts = partial[static_cast<std::size_t>(w)];
    counts.assign(static_cast<std::size_t>(n), 0);
    const ProcessState fresh(rule, n);
    for (std::uint64_t i = begin; i < end; ++i) {
      ProcessState state = fresh;
      rng::SplitMix64 gen(rng::stream_seed(seed, i));
      ++counts[static_cast<std::size_t>(run_once(rule, state, gen))];
    }
  });
  std::vector<std::uint64_t> total(static_cast<std::size_t>(n), 0);
  for (const auto& counts : partial) {
    for (std::size_t k = 0; k < counts.size(); ++k) total[k] += counts[k];
  }
  return total;
}

SurvivalDistribution empirical_distribution(const RuleSpec& rule, int n, std::uint64_t samples,
                                            std::uint64_t seed, int threads) {
  const auto counts = survivor_histogram(rule, n, samples, seed, threads);
  SurvivalDistribution d;
  d.rule = rule;
  d.method = Method::MonteCarlo;
  d.mc_samples = samples;
  d.probs.reserve(counts.size());
  for (auto c : counts) d.probs.push_back(static_cast<double>(c) / static_cast<double>(samples));
  return d;
}

}  // namespace josephus::sim
