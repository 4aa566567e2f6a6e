#ifndef EDKIT_EXPERIMENT_HPP
#define EDKIT_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "edkit/dispatch.hpp"
#include "edkit/oracles.hpp"
#include "edkit/pso.hpp"
#include "edkit/sa.hpp"

namespace edkit {

/// One experiment: a problem file, a solver label, and the seeds to run.
/// Stochastic solvers (pso, sa, sa-pso) run once per seed; lambda and
/// grid are deterministic and run exactly once. pso.iter_max is the
/// shared iteration budget for all three stochastic solvers.
struct ExperimentConfig {
    std::string problem_path;
    std::string solver;  // pso | sa | sa-pso | lambda | grid
    std::vector<std::uint64_t> seeds = default_seeds();
    PsoParams pso;
    SaParams sa;
    OracleParams oracle;
    std::string output_dir = "out";

    static std::vector<std::uint64_t> default_seeds();
};

struct RunRecord {
    std::optional<std::uint64_t> seed;
    double cost = 0.0;      // final best cost at CSV precision
    double residual = 0.0;  // MW
    double wall_time_s = 0.0;
    std::optional<double> gap;  // (cost - oracle) / oracle
    std::string csv;            // file name inside output_dir
};

struct FailedRun {
    std::optional<std::uint64_t> seed;
    std::string error;
};

struct ExperimentSummary {
    std::string problem_path;
    std::string solver;
    std::vector<RunRecord> runs;
    std::vector<FailedRun> failures;
    double best = 0.0;
    double worst = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
    double mean_residual = 0.0;
    double mean_wall_time_s = 0.0;
    std::optional<double> oracle_cost;
    std::optional<double> best_gap;
    std::optional<double> mean_gap;
};

/// Load a problem instance from a JSON document of the shape
///   { "demand": MW, "balance_tol": MW (optional),
///     "units": [ {"a":..,"b":..,"c":..,"p_min":..,"p_max":..}, .. ],
///     "loss": [[..]] (optional, row-major) }
/// Malformed documents raise std::invalid_argument naming the offending
/// field; a lossless demand outside the aggregate limits raises
/// InfeasibleError.
DispatchProblem parse_problem(const std::string& path);

/// Same validation applied to an in-memory JSON text.
DispatchProblem parse_problem_text(const std::string& text);

/// Write `iteration,best_cost,mean_cost` rows, costs with six decimals,
/// LF endings. The fixed format makes reruns byte-comparable.
void write_convergence_csv(const ConvergenceTrace& trace, const std::string& path);

/// Inverse of write_convergence_csv (used for summary cross-checks).
ConvergenceTrace read_convergence_csv(const std::string& path);

/// Round a cost to the exact double that its CSV representation parses
/// back to, so summary statistics and re-read CSV columns agree.
double csv_cost(double value);

/// Run the configured solver over all seeds, writing one convergence CSV
/// per run plus summary.json into output_dir. Failing seeds are recorded
/// and skipped; if every run fails, throws SolverError.
ExperimentSummary run_experiment(const ExperimentConfig& config);

void write_summary_json(const ExperimentSummary& summary, const std::string& path);

}  // namespace edkit

#endif  // EDKIT_EXPERIMENT_HPP
