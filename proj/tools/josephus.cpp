#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "josephus/errors.hpp"
#include "josephus/experiment.hpp"

using namespace josephus;
using josephus::cli::Command;
using josephus::cli::ExperimentConfig;

namespace {

struct RuleArgs {
  std::string kind = "r1";
  double p = 0.5;
  double q = 0.5;
};

RuleSpec make_rule(const RuleArgs& a) {
  switch (parse_rule_kind(a.kind)) {
    case RuleKind::Deterministic: return RuleSpec::deterministic();
    case RuleKind::R1: return RuleSpec::r1(a.p);
    case RuleKind::R2: return RuleSpec::r2(a.p);
    case RuleKind::R3: return RuleSpec::r3(a.p, a.q);
  }
  return RuleSpec::r1(a.p);
}

// "a/b" or an integer.
std::pair<std::int64_t, std::int64_t> parse_fraction(const std::string& text) {
  auto parse_int = [&](std::string_view s) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw DomainError(fmt::format("'{}' is not a fraction a/b", text));
    }
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string::npos) return {parse_int(text), 1};
  return {parse_int(std::string_view(text).substr(0, slash)), parse_int(std::string_view(text).substr(slash + 1))};
}

// "p:q" pairs separated by commas.
std::vector<std::pair<double, double>> parse_pq_grid(const std::vector<std::string>& items) {
  std::vector<std::pair<double, double>> grid;
  for (const auto& item : items) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw DomainError(fmt::format("'{}' is not a p:q pair", item));
    grid.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
  }
  return grid;
}

void add_rule_options(CLI::App* cmd, RuleArgs& rule, const std::string& default_kind) {
  rule.kind = default_kind;
  cmd->add_option("--rule", rule.kind, "det, r1, r2 or r3")->capture_default_str();
  cmd->add_option("--p", rule.p, "probability p")->capture_default_str();
  cmd->add_option("--q", rule.q, "probability q (r3)")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Survivor distributions of the random Josephus elimination process"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  ExperimentConfig c;
  std::string format = "csv";
  std::string config_file;
  bool dump_config = false;
  app.add_option("--out", c.out_dir, "write result files and manifest.json into DIR");
  app.add_option("--format", format, "csv or jsonl")->capture_default_str();
  app.add_option("--seed", c.seed, "base seed for random streams")->capture_default_str();
  app.add_option("--threads", c.threads, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--config", config_file, "re-run the config stored in a JSON file or manifest");
  app.add_flag("--dump-config", dump_config, "print the config as JSON instead of running it");

  RuleArgs rule;

  auto* det = app.add_subcommand("det", "classical survivor b_N");
  det->add_option("--n", c.n, "number of participants");
  det->add_option("--n-min", c.n_min, "first N of a range");
  det->add_option("--n-max", c.n_max, "last N of a range");
  det->add_option("--series-check", c.series_degree, "compare generating-series coefficients up to degree D");

  auto* exact = app.add_subcommand("exact", "exact survivor distribution by recursion");
  add_rule_options(exact, rule, "r1");
  exact->add_option("--n", c.n, "number of participants")->required();
  exact->add_flag("--paper-literal", c.paper_literal, "use the R2 recursion exactly as printed");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo survivor counts");
  add_rule_options(simulate, rule, "r1");
  simulate->add_option("--n", c.n, "number of participants")->required();
  c.samples = 100000;
  simulate->add_option("--samples", c.samples, "number of runs")->capture_default_str();

  auto* oracle = app.add_subcommand("oracle", "exact rational distribution by exhaustive enumeration");
  std::string p_frac = "1/2", q_frac = "1/2";
  std::string oracle_rule = "r1";
  oracle->add_option("--rule", oracle_rule, "det, r1, r2 or r3")->capture_default_str();
  oracle->add_option("--p", p_frac, "p as a fraction a/b")->capture_default_str();
  oracle->add_option("--q", q_frac, "q as a fraction a/b")->capture_default_str();
  oracle->add_option("--n", c.n, "number of participants")->required();

  auto* moments = app.add_subcommand("moments", "moment table and scaling checks");
  add_rule_options(moments, rule, "r1");
  moments->add_option("--n-min", c.n_min, "first N")->capture_default_str();
  moments->add_option("--n-max", c.n_max, "last N")->required();
  moments->add_option("--scaling-check", c.moment_k, "check E_N[|phi_k|] against (ln N / N)^(k/2)")
      ->check(CLI::Range(1, 3));
  moments->add_flag("--sum-check", c.sum_check, "check the growth of sum_N E_N[phi_2]");

  auto* decay = app.add_subcommand("decay", "fit exponential decay bounds");
  decay->add_option("--p", rule.p, "probability p (r1)")->capture_default_str();
  decay->add_option("--n-max", c.n_max, "largest N")->required();
  decay->add_flag("--unbiased", c.unbiased, "unbiased bound with parameters epsilon and alpha");
  decay->add_option("--epsilon", c.epsilon)->capture_default_str();
  decay->add_option("--alpha", c.alpha)->capture_default_str();

  auto* clt = app.add_subcommand("clt", "central limit theorem experiment at p = 1/2");
  clt->add_option("--l-max", c.l_max, "largest N in the sum")->required();
  clt->add_option("--trials", c.trials, "number of sampled sums")->required();

  auto* figure = app.add_subcommand("figure", "distribution curves for a grid of parameters");
  add_rule_options(figure, rule, "r1");
  c.n = 0;
  figure->add_option("--n", c.n, "number of participants (default 2000)");
  std::vector<std::string> pq_items;
  figure->add_option("--p-grid", c.p_grid, "comma-separated p values")->delimiter(',');
  figure->add_option("--pq-grid", pq_items, "comma-separated p:q pairs (r3)")->delimiter(',');
  figure->add_flag("--montecarlo", c.montecarlo, "sample instead of computing exactly");
  figure->add_option("--samples", c.samples, "runs per grid point with --montecarlo");
  figure->add_flag("--gnuplot", c.gnuplot, "also write plot.gp");

  auto* sweep = app.add_subcommand("sweep", "mass near 0 and near 1/2 across p and N (exploratory)");
  sweep->add_option("--p-grid", c.p_grid, "comma-separated p values")->delimiter(',');
  sweep->add_option("--n-values", c.n_values, "comma-separated N values")->delimiter(',');
  sweep->add_option("--delta", c.delta, "window half-width")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitDomainError;
  }

  try {
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) throw DomainError(fmt::format("cannot read config file '{}'", config_file));
      auto j = nlohmann::json::parse(in, nullptr, true);
      if (j.contains("config") && j.contains("config_hash")) j = j.at("config");
      auto loaded = cli::config_from_json(j);
      // Output location is not part of the experiment; allow redirecting it.
      if (!c.out_dir.empty()) loaded.out_dir = c.out_dir;
      c = std::move(loaded);
    } else {
      const auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front();
      if (sub == nullptr) {
        std::cerr << app.help();
        return cli::kExitDomainError;
      }
      c.command = cli::parse_command(sub->get_name());
      c.format = cli::parse_format(format);
      if (c.command == Command::Decay) {
        c.rule = RuleSpec::r1(rule.p);
      } else if (c.command == Command::Oracle) {
        std::tie(c.p_num, c.p_den) = parse_fraction(p_frac);
        std::tie(c.q_num, c.q_den) = parse_fraction(q_frac);
        c.rule.kind = parse_rule_kind(oracle_rule);
      } else if (c.command == Command::Exact || c.command == Command::Simulate || c.command == Command::Moments ||
                 c.command == Command::Figure) {
        c.rule = make_rule(rule);
      }
      if (c.command == Command::Figure) c.pq_grid = parse_pq_grid(pq_items);
    }
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitDomainError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitDomainError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitDomainError;
  }

  if (dump_config) {
    std::cout << cli::to_json(c).dump(2) << '\n';
    return cli::kExitOk;
  }
  try {
    return cli::run_experiment(c, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
