#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "josephus/rule.hpp"

// Experiment configuration, result files and the figure/sweep drivers behind
// the `josephus` command-line tool.
namespace josephus::cli {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kCodeVersion = "josephus-lab 1.0.0";

enum class Command { Det, Exact, Simulate, Oracle, Moments, Decay, Clt, Figure, Sweep };
enum class OutputFormat { Csv, Jsonl };

std::string_view to_string(Command c);
Command parse_command(std::string_view name);
std::string_view to_string(OutputFormat f);
OutputFormat parse_format(std::string_view name);

// Everything needed to re-run a command. Fields a command does not use keep
// their defaults and are still serialized, so the JSON form is canonical.
struct ExperimentConfig {
  Command command = Command::Exact;
  RuleSpec rule = RuleSpec::r1(0.5);
  int n = 0;
  int n_min = 3;
  int n_max = 0;
  std::vector<double> p_grid;
  std::vector<std::pair<double, double>> pq_grid;
  std::vector<int> n_values;
  std::int64_t p_num = 1, p_den = 2, q_num = 1, q_den = 2;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out_dir;
  OutputFormat format = OutputFormat::Csv;
  int series_degree = 0;  // det: generating-series check up to this degree
  int moment_k = 0;       // moments: scaling check for phi_k
  bool sum_check = false; // moments: second-moment sum check
  bool unbiased = false;  // decay: unbiased bound instead of the middle-range one
  double epsilon = 0.05;
  double alpha = 1.005;
  int l_max = 0;
  std::uint64_t trials = 0;
  bool montecarlo = false;  // figure: sample instead of exact DP
  bool gnuplot = false;
  double delta = 0.02;
  bool paper_literal = false;
};

nlohmann::json to_json(const ExperimentConfig& config);
// Strict: unknown keys, a missing or different schema_version, or a missing
// command are DomainErrors.
ExperimentConfig config_from_json(const nlohmann::json& j);

std::uint64_t fnv1a64(std::string_view bytes);
// Hash of the canonical config JSON (without out_dir) followed by kCodeVersion.
std::uint64_t config_hash(const ExperimentConfig& config);

std::string format_double(double x);  // 17 significant digits

std::string distribution_csv(const SurvivalDistribution& dist);  // n,prob
std::string counts_csv(std::span<const std::uint64_t> counts);    // n,count,freq

// Writes to a sibling temporary file and renames it into place.
void write_atomically(const std::filesystem::path& path, std::string_view content);

struct CheckOutcome {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct FigureSeries {
  std::string file_name;
  SurvivalDistribution dist;
};

struct FigureResult {
  std::vector<FigureSeries> series;
  std::vector<CheckOutcome> checks;
};

struct MonteCarloOptions {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  int threads = 1;
};

std::vector<double> default_r1_grid();  // {0, 0.2, 0.4, 0.6, 0.8, 1}
std::vector<double> default_r2_grid();  // {0, 0.1, 0.2, 0.3, 0.4, 0.5}
std::vector<std::pair<double, double>> default_r3_grid();  // {0.25, 0.5, 0.75}^2

FigureResult figure_r1(int n, std::span<const double> p_grid, const MonteCarloOptions* mc = nullptr);
// Checks the argmax against (3p-1)N, within 0.03N, for p in (1/3, 2/3).
FigureResult figure_r2(int n, std::span<const double> p_grid, const MonteCarloOptions* mc = nullptr);
FigureResult figure_r3(int n, std::span<const std::pair<double, double>> pq_grid,
                       const MonteCarloOptions* mc = nullptr);

// Exploratory only: never asserts anything.
struct SweepRecord {
  double p = 0;
  int n = 0;
  double delta = 0.02;
  double mass_near_zero = 0;  // x in [0, delta) or (1 - delta, 1]
  double mass_near_half = 0;  // x in [1/2 - delta, 1/2 + delta]
};

std::vector<SweepRecord> sweep_limit_parameter(std::span<const double> p_grid, std::span<const int> n_values,
                                               double delta = 0.02);

// Exit codes of run_experiment and the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 2;
inline constexpr int kExitCheckFailed = 3;

// Runs one command. Results go to `out` unless config.out_dir is set, in
// which case every artifact is written atomically into that directory along
// with manifest.json. Domain errors are reported on `err`.
int run_experiment(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

}  // namespace josephus::cli
