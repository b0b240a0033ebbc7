#include "josephus/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "josephus/analysis.hpp"
#include "josephus/deterministic.hpp"
#include "josephus/errors.hpp"
#include "josephus/process.hpp"
#include "josephus/rng.hpp"
#include "josephus/survival_dp.hpp"

namespace josephus::cli {

using nlohmann::json;

namespace {

constexpr std::pair<Command, std::string_view> kCommandNames[] = {
    {Command::Det, "det"},         {Command::Exact, "exact"}, {Command::Simulate, "simulate"},
    {Command::Oracle, "oracle"},   {Command::Moments, "moments"}, {Command::Decay, "decay"},
    {Command::Clt, "clt"},         {Command::Figure, "figure"}, {Command::Sweep, "sweep"},
};

}  // namespace

std::string_view to_string(Command c) {
  for (const auto& [cmd, name] : kCommandNames) {
    if (cmd == c) return name;
  }
  return "?";
}

Command parse_command(std::string_view name) {
  for (const auto& [cmd, n] : kCommandNames) {
    if (n == name) return cmd;
  }
  throw DomainError(fmt::format("unknown command '{}'", name));
}

std::string_view to_string(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "jsonl"; }

OutputFormat parse_format(std::string_view name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "jsonl") return OutputFormat::Jsonl;
  throw DomainError(fmt::format("unknown output format '{}' (expected csv or jsonl)", name));
}

// ---------------------------------------------------------------------------
// Config (de)serialization.

json to_json(const ExperimentConfig& c) {
  json pq = json::array();
  for (const auto& [p, q] : c.pq_grid) pq.push_back({p, q});
  return json{
      {"schema_version", kSchemaVersion},
      {"command", to_string(c.command)},
      {"rule", {{"kind", to_string(c.rule.kind)}, {"p", c.rule.p}, {"q", c.rule.q}}},
      {"n", c.n},
      {"n_min", c.n_min},
      {"n_max", c.n_max},
      {"p_grid", c.p_grid},
      {"pq_grid", pq},
      {"n_values", c.n_values},
      {"p_num", c.p_num},
      {"p_den", c.p_den},
      {"q_num", c.q_num},
      {"q_den", c.q_den},
      {"samples", c.samples},
      {"seed", c.seed},
      {"threads", c.threads},
      {"out_dir", c.out_dir},
      {"format", to_string(c.format)},
      {"series_degree", c.series_degree},
      {"moment_k", c.moment_k},
      {"sum_check", c.sum_check},
      {"unbiased", c.unbiased},
      {"epsilon", c.epsilon},
      {"alpha", c.alpha},
      {"l_max", c.l_max},
      {"trials", c.trials},
      {"montecarlo", c.montecarlo},
      {"gnuplot", c.gnuplot},
      {"delta", c.delta},
      {"paper_literal", c.paper_literal},
  };
}

namespace {

template <class T>
T get_as(const json& value, std::string_view key) {
  try {
    return value.get<T>();
  } catch (const json::exception& e) {
    throw DomainError(fmt::format("config key '{}': {}", key, e.what()));
  }
}

RuleSpec rule_from_json(const json& j) {
  if (!j.is_object()) throw DomainError("config key 'rule' must be an object");
  RuleKind kind = RuleKind::R1;
  double p = 0.5, q = 0.5;
  for (const auto& [key, value] : j.items()) {
    if (key == "kind") {
      kind = parse_rule_kind(get_as<std::string>(value, "rule.kind"));
    } else if (key == "p") {
      p = get_as<double>(value, "rule.p");
    } else if (key == "q") {
      q = get_as<double>(value, "rule.q");
    } else {
      throw DomainError(fmt::format("unknown config key 'rule.{}'", key));
    }
  }
  switch (kind) {
    case RuleKind::Deterministic: return RuleSpec::deterministic();
    case RuleKind::R1: return RuleSpec::r1(p);
    case RuleKind::R2: return RuleSpec::r2(p);
    case RuleKind::R3: return RuleSpec::r3(p, q);
  }
  return RuleSpec::r1(p);
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw DomainError("a config must be a JSON object");
  if (!j.contains("schema_version") || j.at("schema_version") != kSchemaVersion) {
    throw DomainError(fmt::format("config schema_version must be {}", kSchemaVersion));
  }
  if (!j.contains("command")) throw DomainError("config is missing 'command'");

  ExperimentConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "schema_version") continue;
    if (key == "command") c.command = parse_command(get_as<std::string>(v, key));
    else if (key == "rule") c.rule = rule_from_json(v);
    else if (key == "n") c.n = get_as<int>(v, key);
    else if (key == "n_min") c.n_min = get_as<int>(v, key);
    else if (key == "n_max") c.n_max = get_as<int>(v, key);
    else if (key == "p_grid") c.p_grid = get_as<std::vector<double>>(v, key);
    else if (key == "pq_grid") c.pq_grid = get_as<std::vector<std::pair<double, double>>>(v, key);
    else if (key == "n_values") c.n_values = get_as<std::vector<int>>(v, key);
    else if (key == "p_num") c.p_num = get_as<std::int64_t>(v, key);
    else if (key == "p_den") c.p_den = get_as<std::int64_t>(v, key);
    else if (key == "q_num") c.q_num = get_as<std::int64_t>(v, key);
    else if (key == "q_den") c.q_den = get_as<std::int64_t>(v, key);
    else if (key == "samples") c.samples = get_as<std::uint64_t>(v, key);
    else if (key == "seed") c.seed = get_as<std::uint64_t>(v, key);
    else if (key == "threads") c.threads = get_as<int>(v, key);
    else if (key == "out_dir") c.out_dir = get_as<std::string>(v, key);
    else if (key == "format") c.format = parse_format(get_as<std::string>(v, key));
    else if (key == "series_degree") c.series_degree = get_as<int>(v, key);
    else if (key == "moment_k") c.moment_k = get_as<int>(v, key);
    else if (key == "sum_check") c.sum_check = get_as<bool>(v, key);
    else if (key == "unbiased") c.unbiased = get_as<bool>(v, key);
    else if (key == "epsilon") c.epsilon = get_as<double>(v, key);
    else if (key == "alpha") c.alpha = get_as<double>(v, key);
    else if (key == "l_max") c.l_max = get_as<int>(v, key);
    else if (key == "trials") c.trials = get_as<std::uint64_t>(v, key);
    else if (key == "montecarlo") c.montecarlo = get_as<bool>(v, key);
    else if (key == "gnuplot") c.gnuplot = get_as<bool>(v, key);
    else if (key == "delta") c.delta = get_as<double>(v, key);
    else if (key == "paper_literal") c.paper_literal = get_as<bool>(v, key);
    else throw DomainError(fmt::format("unknown config key '{}'", key));
  }
  return c;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  auto j = to_json(config);
  j.erase("out_dir");  // where results land does not change them
  return fnv1a64(j.dump() + std::string(kCodeVersion));
}

// ---------------------------------------------------------------------------
// Output helpers.

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

std::string distribution_csv(const SurvivalDistribution& dist) {
  std::string out = "n,prob\n";
  for (std::size_t n = 0; n < dist.probs.size(); ++n) {
    out += fmt::format("{},{:.17g}\n", n, dist.probs[n]);
  }
  return out;
}

std::string counts_csv(std::span<const std::uint64_t> counts) {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  std::string out = "n,count,freq\n";
  for (std::size_t n = 0; n < counts.size(); ++n) {
    out += fmt::format("{},{},{:.17g}\n", n, counts[n], static_cast<double>(counts[n]) / static_cast<double>(total));
  }
  return out;
}

void write_atomically(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += fmt::format(".tmp{:x}", fnv1a64(path.string()) ^ rng::mix64(static_cast<std::uint64_t>(content.size())));
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error(fmt::format("cannot open {} for writing", tmp.string()));
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw std::runtime_error(fmt::format("failed writing {}", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

namespace {

// One JSON object per line; floats always carry 17 significant digits.
class JsonRecord {
 public:
  JsonRecord& field(std::string_view key, double v) {
    return raw(key, std::isfinite(v) ? format_double(v) : "null");
  }
  JsonRecord& field(std::string_view key, int v) { return raw(key, std::to_string(v)); }
  JsonRecord& field(std::string_view key, std::uint64_t v) { return raw(key, std::to_string(v)); }
  JsonRecord& field(std::string_view key, bool v) { return raw(key, v ? "true" : "false"); }
  JsonRecord& field(std::string_view key, std::string_view v) { return raw(key, json(std::string(v)).dump()); }
  JsonRecord& field(std::string_view key, const char* v) { return field(key, std::string_view(v)); }

  std::string line() const { return "{" + body_ + "}\n"; }

 private:
  JsonRecord& raw(std::string_view key, const std::string& value) {
    if (!body_.empty()) body_ += ",";
    body_ += json(std::string(key)).dump() + ":" + value;
    return *this;
  }
  std::string body_;
};

std::string distribution_output(const SurvivalDistribution& dist, OutputFormat format) {
  if (format == OutputFormat::Csv) return distribution_csv(dist);
  std::string out;
  for (std::size_t n = 0; n < dist.probs.size(); ++n) {
    out += JsonRecord().field("n", static_cast<int>(n)).field("prob", dist.probs[n]).line();
  }
  return out;
}

std::string grid_label(double x) { return fmt::format("{}", x); }

SurvivalDistribution figure_distribution(const RuleSpec& rule, int n, const MonteCarloOptions* mc,
                                         std::uint64_t grid_index) {
  if (mc == nullptr) return dp::exact_distribution(rule, n);
  return sim::empirical_distribution(rule, n, mc->samples, rng::stream_seed(mc->seed, grid_index), mc->threads);
}

int argmax(std::span<const double> probs) {
  return static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

void require_figure_size(int n) {
  if (n < 3) throw DomainError(fmt::format("figures need N >= 3 (got {})", n));
}

}  // namespace

std::vector<double> default_r1_grid() { return {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}; }
std::vector<double> default_r2_grid() { return {0.0, 0.1, 0.2, 0.3, 0.4, 0.5}; }

std::vector<std::pair<double, double>> default_r3_grid() {
  std::vector<std::pair<double, double>> grid;
  for (double p : {0.25, 0.5, 0.75}) {
    for (double q : {0.25, 0.5, 0.75}) grid.emplace_back(p, q);
  }
  return grid;
}

FigureResult figure_r1(int n, std::span<const double> p_grid, const MonteCarloOptions* mc) {
  require_figure_size(n);
  FigureResult result;
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    const auto rule = RuleSpec::r1(p_grid[i]);
    result.series.push_back({fmt::format("r1_n{}_p{}.csv", n, grid_label(p_grid[i])), figure_distribution(rule, n, mc, i)});
  }
  return result;
}

FigureResult figure_r2(int n, std::span<const double> p_grid, const MonteCarloOptions* mc) {
  require_figure_size(n);
  FigureResult result;
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    const double p = p_grid[i];
    const auto rule = RuleSpec::r2(p);
    auto dist = figure_distribution(rule, n, mc, i);
    if (p > 1.0 / 3.0 && p < 2.0 / 3.0) {
      const int mode = argmax(dist.probs);
      const double target = (3.0 * p - 1.0) * n;
      const bool ok = std::abs(mode - target) <= 0.03 * n;
      result.checks.push_back({fmt::format("r2 p={} argmax near (3p-1)N", grid_label(p)), ok,
                               fmt::format("argmax {} vs (3p-1)N = {:.6g}, tolerance {:.6g}", mode, target, 0.03 * n)});
    }
    result.series.push_back({fmt::format("r2_n{}_p{}.csv", n, grid_label(p)), std::move(dist)});
  }
  return result;
}

FigureResult figure_r3(int n, std::span<const std::pair<double, double>> pq_grid, const MonteCarloOptions* mc) {
  require_figure_size(n);
  FigureResult result;
  for (std::size_t i = 0; i < pq_grid.size(); ++i) {
    const auto [p, q] = pq_grid[i];
    const auto rule = RuleSpec::r3(p, q);
    result.series.push_back(
        {fmt::format("r3_n{}_p{}_q{}.csv", n, grid_label(p), grid_label(q)), figure_distribution(rule, n, mc, i)});
  }
  return result;
}

std::vector<SweepRecord> sweep_limit_parameter(std::span<const double> p_grid, std::span<const int> n_values,
                                               double delta) {
  if (!(delta > 0.0 && delta < 0.25)) throw DomainError(fmt::format("delta = {} must lie in (0, 1/4)", delta));
  std::vector<int> sizes(n_values.begin(), n_values.end());
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  if (sizes.empty() || sizes.front() < 3) throw DomainError("sweep sizes must all be at least 3");

  std::vector<SweepRecord> records;
  for (double p : p_grid) {
    std::size_t next = 0;
    dp::for_each_row(RuleSpec::r1(p), sizes.back(), [&](int n, std::span<const double> row) {
      if (next >= sizes.size() || n != sizes[next]) return;
      ++next;
      SweepRecord r;
      r.p = p;
      r.n = n;
      r.delta = delta;
      for (std::size_t k = 0; k < row.size(); ++k) {
        const double x = static_cast<double>(k) / n;
        if (x < delta || x > 1.0 - delta) r.mass_near_zero += row[k];
        if (std::abs(x - 0.5) <= delta) r.mass_near_half += row[k];
      }
      records.push_back(r);
    });
  }
  return records;
}

// ---------------------------------------------------------------------------
// Command execution.

namespace {

struct Artifact {
  std::string name;
  std::string content;
};

struct Outcome {
  std::vector<Artifact> artifacts;
  std::vector<CheckOutcome> checks;
};

std::string moment_table(const analysis::MomentReport& report, OutputFormat format) {
  std::string out;
  if (format == OutputFormat::Csv) out = "n,mean,phi1,phi2,abs_phi3,variance,third_central,eta,g0\n";
  for (const auto& r : report.per_n) {
    if (format == OutputFormat::Csv) {
      out += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.n, r.mean, r.phi1,
                         r.phi2, r.abs_phi3, r.variance, r.third_central, r.eta, r.g0);
    } else {
      out += JsonRecord()
                 .field("n", r.n)
                 .field("mean", r.mean)
                 .field("phi1", r.phi1)
                 .field("phi2", r.phi2)
                 .field("abs_phi3", r.abs_phi3)
                 .field("variance", r.variance)
                 .field("third_central", r.third_central)
                 .field("eta", r.eta)
                 .field("g0", r.g0)
                 .line();
    }
  }
  return out;
}

Outcome run_det(const ExperimentConfig& c) {
  Outcome o;
  if (c.series_degree > 0) {
    const auto coeffs = det::generating_series_coefficients(static_cast<std::size_t>(c.series_degree));
    std::uint64_t mismatches = 0;
    for (int n = 1; n <= c.series_degree; ++n) {
      if (coeffs[static_cast<std::size_t>(n)] != det::survivor_recurrence(static_cast<std::uint64_t>(n)).survivor_one_based) {
        ++mismatches;
      }
    }
    o.checks.push_back({"series coefficients equal b_N", mismatches == 0,
                        fmt::format("{} mismatches up to degree {}", mismatches, c.series_degree)});
    o.artifacts.push_back({"series_check.txt", fmt::format("{} {}\n", mismatches == 0 ? "ok" : "mismatch", c.series_degree)});
    return o;
  }
  if (c.n_max > 0) {
    if (c.n_min < 1 || c.n_max < c.n_min) throw DomainError("det range needs 1 <= n_min <= n_max");
    std::string out = "N,b_N\n";
    for (int n = c.n_min; n <= c.n_max; ++n) {
      out += fmt::format("{},{}\n", n, det::survivor_recurrence(static_cast<std::uint64_t>(n)).survivor_one_based);
    }
    o.artifacts.push_back({"det.csv", std::move(out)});
    return o;
  }
  if (c.n < 1) throw DomainError("det needs --n N >= 1, a range, or --series-check D");
  o.artifacts.push_back(
      {"det.txt", fmt::format("{}\n", det::survivor_recurrence(static_cast<std::uint64_t>(c.n)).survivor_one_based)});
  return o;
}

Outcome run_exact(const ExperimentConfig& c) {
  if (c.paper_literal && c.rule.kind == RuleKind::R2) {
    throw DomainError(
        "the literal R2 recursion reads (1-p) f_N(1,p) in the n = 0 case, which refers to the row being "
        "computed; this tool evaluates f_{N-1}(1,p), the reading the enumeration oracle confirms");
  }
  const auto dist = dp::exact_distribution(c.rule, c.n);
  const std::string ext = c.format == OutputFormat::Csv ? "csv" : "jsonl";
  return {{{fmt::format("exact.{}", ext), distribution_output(dist, c.format)}}, {}};
}

Outcome run_simulate(const ExperimentConfig& c) {
  const auto counts = sim::survivor_histogram(c.rule, c.n, c.samples, c.seed, c.threads);
  if (c.format == OutputFormat::Csv) return {{{"simulate.csv", counts_csv(counts)}}, {}};
  std::string out;
  for (std::size_t n = 0; n < counts.size(); ++n) {
    out += JsonRecord()
               .field("n", static_cast<int>(n))
               .field("count", counts[n])
               .field("freq", static_cast<double>(counts[n]) / static_cast<double>(c.samples))
               .line();
  }
  return {{{"simulate.jsonl", std::move(out)}}, {}};
}

Outcome run_oracle(const ExperimentConfig& c) {
  if (c.p_den <= 0 || c.q_den <= 0) throw DomainError("rational denominators must be positive");
  const auto rule = ExactRule::make(c.rule.kind, Rational(c.p_num, c.p_den), Rational(c.q_num, c.q_den));
  const auto dist = sim::oracle_distribution(rule, c.n);
  std::string out = "n,num,den\n";
  for (std::size_t n = 0; n < dist.probs.size(); ++n) {
    out += fmt::format("{},{},{}\n", n, numerator(dist.probs[n]).str(), denominator(dist.probs[n]).str());
  }
  return {{{"oracle.csv", std::move(out)}}, {}};
}

Outcome run_moments(const ExperimentConfig& c) {
  Outcome o;
  if (c.moment_k > 0) {
    const auto r = analysis::moment_scaling_check(c.n_max, c.moment_k, c.n_min > 3 ? c.n_min : 50);
    JsonRecord rec;
    rec.field("check", "moment_scaling")
        .field("k", r.k)
        .field("n_min", r.n_min)
        .field("n_max", r.n_max)
        .field("sup_ratio", r.sup_ratio)
        .field("low_window_max", r.low_window_max)
        .field("high_window_max", r.high_window_max);
    if (r.k == 1) rec.field("phi1_log_slope", r.first_moment_fit.slope).field("phi1_fit_points", static_cast<std::uint64_t>(r.first_moment_fit.points));
    rec.field("passed", r.passes());
    o.artifacts.push_back({"moment_scaling.jsonl", rec.line()});
    o.checks.push_back({fmt::format("moment scaling k={}", r.k), r.passes(), ""});
  }
  if (c.sum_check) {
    const auto r = analysis::second_moment_sum_check(c.l_max > 0 ? c.l_max : c.n_max);
    std::string out;
    for (const auto& g : r.grid) {
      out += JsonRecord()
                 .field("L", g.l)
                 .field("S_L", g.s_l)
                 .field("S_L_over_lnL", g.s_l / std::log(g.l))
                 .field("phi1_sq_sum", g.phi1_sq_sum)
                 .field("B_L_squared", g.b_l_squared)
                 .line();
    }
    out += JsonRecord()
               .field("check", "second_moment_sum")
               .field("L_max", r.l_max)
               .field("band_ratio", r.band_ratio)
               .field("top_band_ratio", r.top_band_ratio)
               .field("increasing", r.increasing)
               .field("decomposition_error", r.decomposition_error)
               .field("passed", r.passes())
               .line();
    o.artifacts.push_back({"second_moment_sum.jsonl", std::move(out)});
    o.checks.push_back({"second moment sum", r.passes(), ""});
  }
  if (o.artifacts.empty()) {
    const auto report = analysis::moment_report(c.rule, c.n_min, c.n_max);
    o.artifacts.push_back({c.format == OutputFormat::Csv ? "moments.csv" : "moments.jsonl", moment_table(report, c.format)});
  }
  return o;
}

Outcome run_decay(const ExperimentConfig& c) {
  const auto fit = c.unbiased ? analysis::unbiased_decay_check(c.n_max, c.epsilon, c.alpha)
                              : analysis::decay_bound_check(c.rule.p, c.n_max);
  Outcome o;
  if (c.format == OutputFormat::Csv) {
    o.artifacts.push_back({"decay.csv", fmt::format("p,beta,gamma,K,K_half,max_violation,N_max,stabilized\n"
                                                    "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{},{}\n",
                                                    fit.p, fit.beta, fit.gamma, fit.k, fit.k_half, fit.max_violation,
                                                    fit.n_max, fit.stabilized() ? "true" : "false")});
  } else {
    o.artifacts.push_back({"decay.jsonl", JsonRecord()
                                              .field("p", fit.p)
                                              .field("beta", fit.beta)
                                              .field("gamma", fit.gamma)
                                              .field("K", fit.k)
                                              .field("K_half", fit.k_half)
                                              .field("max_violation", fit.max_violation)
                                              .field("N_max", fit.n_max)
                                              .field("stabilized", fit.stabilized())
                                              .line()});
  }
  o.checks.push_back({"decay constant stabilized", fit.stabilized(),
                      fmt::format("K = {:.6g}, K over the first half = {:.6g}", fit.k, fit.k_half)});
  return o;
}

Outcome run_clt(const ExperimentConfig& c) {
  const auto r = analysis::clt_experiment(c.l_max, c.trials, c.seed, c.threads);
  std::string out;
  if (c.format == OutputFormat::Csv) out = "L,B_L,lyapunov_ratio\n";
  for (int l = r.l_min; l <= r.l_max; ++l) {
    if (c.format == OutputFormat::Csv) {
      out += fmt::format("{},{:.17g},{:.17g}\n", l, r.b_at(l), r.lyapunov_at(l));
    } else {
      out += JsonRecord().field("L", l).field("B_L", r.b_at(l)).field("lyapunov_ratio", r.lyapunov_at(l)).line();
    }
  }
  Outcome o;
  if (c.format == OutputFormat::Jsonl) {
    out += JsonRecord()
               .field("record", "ensemble")
               .field("L_max", r.l_max)
               .field("trials", r.trials)
               .field("seed", r.seed)
               .field("ks_distance", r.ks_distance)
               .field("ks_distance_centered_at_half", r.ks_distance_half)
               .field("centering_offset", r.centering_offset)
               .field("ks_critical_1pct", r.ks_critical_1pct)
               .line();
  }
  o.artifacts.push_back({c.format == OutputFormat::Csv ? "clt.csv" : "clt.jsonl", std::move(out)});
  return o;
}

std::string gnuplot_script(const FigureResult& fig) {
  std::string out = "set datafile separator ','\nset key outside\nset xlabel 'n'\nset ylabel 'probability'\nplot ";
  for (std::size_t i = 0; i < fig.series.size(); ++i) {
    if (i > 0) out += ", \\\n     ";
    out += fmt::format("'{}' every ::1 using 1:2 with lines title '{}'", fig.series[i].file_name,
                       describe(fig.series[i].dist.rule));
  }
  return out + "\n";
}

Outcome run_figure(const ExperimentConfig& c) {
  const int n = c.n > 0 ? c.n : 2000;
  MonteCarloOptions mc{c.samples > 0 ? c.samples : 100000, c.seed, c.threads};
  const MonteCarloOptions* mc_ptr = c.montecarlo ? &mc : nullptr;
  FigureResult fig;
  switch (c.rule.kind) {
    case RuleKind::R1: {
      const auto grid = c.p_grid.empty() ? default_r1_grid() : c.p_grid;
      fig = figure_r1(n, grid, mc_ptr);
      break;
    }
    case RuleKind::R2: {
      const auto grid = c.p_grid.empty() ? default_r2_grid() : c.p_grid;
      fig = figure_r2(n, grid, mc_ptr);
      break;
    }
    case RuleKind::R3: {
      const auto grid = c.pq_grid.empty() ? default_r3_grid() : c.pq_grid;
      fig = figure_r3(n, grid, mc_ptr);
      break;
    }
    case RuleKind::Deterministic: throw DomainError("figures are drawn for rules r1, r2 and r3");
  }
  Outcome o;
  for (const auto& s : fig.series) o.artifacts.push_back({s.file_name, distribution_csv(s.dist)});
  if (c.gnuplot) o.artifacts.push_back({"plot.gp", gnuplot_script(fig)});
  o.checks = std::move(fig.checks);
  return o;
}

Outcome run_sweep(const ExperimentConfig& c) {
  const std::vector<int> sizes = c.n_values.empty() ? std::vector<int>{500, 1000, 2000} : c.n_values;
  const std::vector<double> grid = c.p_grid.empty() ? std::vector<double>{0.1, 0.2, 0.3, 0.5, 0.7, 0.8, 0.9} : c.p_grid;
  const auto records = sweep_limit_parameter(grid, sizes, c.delta);
  std::string out;
  if (c.format == OutputFormat::Csv) out = "p,N,delta,mass_near_zero,mass_near_half\n";
  for (const auto& r : records) {
    if (c.format == OutputFormat::Csv) {
      out += fmt::format("{:.17g},{},{:.17g},{:.17g},{:.17g}\n", r.p, r.n, r.delta, r.mass_near_zero, r.mass_near_half);
    } else {
      out += JsonRecord()
                 .field("p", r.p)
                 .field("N", r.n)
                 .field("delta", r.delta)
                 .field("mass_near_zero", r.mass_near_zero)
                 .field("mass_near_half", r.mass_near_half)
                 .field("assertive", false)
                 .line();
    }
  }
  return {{{c.format == OutputFormat::Csv ? "sweep.csv" : "sweep.jsonl", std::move(out)}}, {}};
}

Outcome dispatch(const ExperimentConfig& c) {
  switch (c.command) {
    case Command::Det: return run_det(c);
    case Command::Exact: return run_exact(c);
    case Command::Simulate: return run_simulate(c);
    case Command::Oracle: return run_oracle(c);
    case Command::Moments: return run_moments(c);
    case Command::Decay: return run_decay(c);
    case Command::Clt: return run_clt(c);
    case Command::Figure: return run_figure(c);
    case Command::Sweep: return run_sweep(c);
  }
  throw DomainError("unknown command");
}

void write_outputs(const ExperimentConfig& c, const Outcome& o) {
  const std::filesystem::path dir(c.out_dir);
  std::filesystem::create_directories(dir);
  json files = json::array();
  for (const auto& a : o.artifacts) {
    write_atomically(dir / a.name, a.content);
    files.push_back({{"name", a.name}, {"fnv1a64", fmt::format("{:016x}", fnv1a64(a.content))}});
  }
  json checks = json::array();
  for (const auto& ch : o.checks) checks.push_back({{"name", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}});
  const json manifest{
      {"code_version", kCodeVersion},
      {"config", to_json(c)},
      {"config_hash", fmt::format("{:016x}", config_hash(c))},
      {"files", files},
      {"checks", checks},
  };
  write_atomically(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace

int run_experiment(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  Outcome outcome;
  try {
    outcome = dispatch(config);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomainError;
  }
  if (config.out_dir.empty()) {
    if (config.command == Command::Figure && outcome.artifacts.size() > 1) {
      err << "error: figure writes several files; pass --out DIR\n";
      return kExitDomainError;
    }
    for (const auto& a : outcome.artifacts) out << a.content;
  } else {
    write_outputs(config, outcome);
  }
  int code = kExitOk;
  for (const auto& ch : outcome.checks) {
    if (!ch.passed) {
      err << "check failed: " << ch.name << (ch.detail.empty() ? "" : " (" + ch.detail + ")") << '\n';
      code = kExitCheckFailed;
    }
  }
  return code;
}

}  // namespace josephus::cli
