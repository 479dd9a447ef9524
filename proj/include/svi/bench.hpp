#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "svi/problems.hpp"
#include "svi/schedules.hpp"
#include "svi/solvers.hpp"

namespace svi {

struct StepRule {
  enum class Kind { PaperGame, PaperFractional, Explicit };
  Kind kind = Kind::PaperGame;
  double alpha = 0.0;  // Explicit only

  StepSizePolicy policy(const ProblemInstance& problem, Algorithm algorithm) const;
};

struct BatchRule {
  enum class Kind { Experiment, Constant, PolyLog };
  Kind kind = Kind::Experiment;
  std::optional<std::int64_t> d;  // Experiment; defaults to the problem dimension
  ExperimentBatch::Rounding rounding = ExperimentBatch::Rounding::HalfUp;
  std::int64_t m = 1;             // Constant
  double c = 1.0;                 // PolyLog
  std::int64_t n0 = 2;
  double a = 1.0;
  double b = 0.0;

  BatchSchedule schedule(std::int64_t problem_dim) const;
};

/// One benchmark definition: a family, a list of sizes and the algorithms to
/// compare over seeded replications. See README.md for the file schema.
struct ExperimentConfig {
  Family family = Family::ZeroSum;
  /// Fractional/affine: {d}. Games: {n_I, n_II}.
  std::vector<std::vector<std::int64_t>> dims;
  std::vector<Algorithm> algorithms{Algorithm::SFBF, Algorithm::SEG};
  std::int64_t replications = 10;
  std::uint64_t base_seed = 0;
  double noise_sd = 0.1;
  std::optional<PayoffOrientation> payoffs;
  bool affine_strong = true;
  StoppingRule stop;
  StepRule step_rule;
  bool step_override = false;
  BatchRule batch_rule;
  bool record_trajectory = false;
  std::string output_dir;
  int parallelism = 1;

  void validate() const;
};

/// Throws ConfigError on schema violations.
ExperimentConfig parse_experiment_config(const std::string& yaml_text);
ExperimentConfig load_experiment_config(const std::string& path);

/// Per-(dim, replication) problem seed, shared by all algorithms so the
/// comparison is paired, and per-(dim, algorithm, replication) solver seed.
std::uint64_t problem_seed(const ExperimentConfig& config, std::size_t dim_index,
                           std::int64_t replication);
std::uint64_t solver_seed(const ExperimentConfig& config, std::size_t dim_index,
                          Algorithm algorithm, std::int64_t replication);
ProblemSpec problem_spec(const ExperimentConfig& config, std::size_t dim_index,
                         std::int64_t replication);

struct RunRecord {
  ProblemSpec spec;
  Algorithm algorithm = Algorithm::SFBF;
  std::int64_t replication = 0;
  std::uint64_t solver_seed = 0;
  RunReport report;

  std::string run_id() const;
};

struct SummaryRow {
  std::string family;
  std::string dim;
  std::string algorithm;
  double mean_iterations = 0.0;
  double sd_iterations = 0.0;
  double mean_time_s = 0.0;
  double sd_time_s = 0.0;
  double mean_oracle_calls = 0.0;
  double convergence_rate = 0.0;
};

struct BenchmarkSummary {
  std::vector<SummaryRow> rows;

  const SummaryRow* find(const std::string& dim, const std::string& algorithm) const;
  /// mean_iterations(SEG) / mean_iterations(SFBF) for one size.
  std::optional<double> iteration_ratio(const std::string& dim) const;
  std::optional<double> time_ratio(const std::string& dim) const;
};

struct ExperimentResult {
  std::vector<RunRecord> runs;  // ordered by (dim, algorithm, replication)
  BenchmarkSummary summary;
};

/// Runs every (dim, algorithm, replication) triple. A run that aborts on a
/// numeric error is kept as non-converged. Writes CSV artifacts when
/// config.output_dir is set.
ExperimentResult run_experiment(const ExperimentConfig& config);

BenchmarkSummary summarize(const std::vector<RunRecord>& runs);

enum class TableStyle { Csv, AlignedText };

std::string emit_table(const BenchmarkSummary& summary, TableStyle style);
BenchmarkSummary parse_summary_csv(const std::string& csv);

/// Long-format CSV: run_id,algorithm,n,wall_time_s,residual.
std::string emit_trajectory_curves(const std::vector<RunRecord>& runs);

/// Per-run CSV without timing columns (byte-identical across repeats).
std::string emit_runs_csv(const std::vector<RunRecord>& runs);
std::string emit_timings_csv(const std::vector<RunRecord>& runs);

void write_experiment_artifacts(const ExperimentConfig& config, const ExperimentResult& result);

}  // namespace svi
