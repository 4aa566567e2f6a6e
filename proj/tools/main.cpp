// Experiment runner: load a dispatch instance, solve it with the chosen
// method over one or more seeds, and leave convergence CSVs plus a
// summary.json in the output directory.
#include <cstdio>
#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "edkit/experiment.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitSolverFailure = 4;

void print_summary(const edkit::ExperimentSummary& summary,
                   const std::string& output_dir)
{
    std::printf("solver        %s\n", summary.solver.c_str());
    std::printf("runs          %zu ok, %zu failed\n", summary.runs.size(),
                summary.failures.size());
    std::printf("final cost    best %.6f  mean %.6f  worst %.6f  stddev %.6f\n",
                summary.best, summary.mean, summary.worst, summary.stddev);
    std::printf("mean residual %.3e MW\n", summary.mean_residual);
    std::printf("mean time     %.4f s\n", summary.mean_wall_time_s);
    if (summary.oracle_cost)
        std::printf("oracle        %.6f (best gap %.4f%%, mean gap %.4f%%)\n",
                    *summary.oracle_cost, 100.0 * *summary.best_gap,
                    100.0 * *summary.mean_gap);
    for (const auto& f : summary.failures) {
        if (f.seed)
            std::fprintf(stderr, "seed %llu failed: %s\n",
                         static_cast<unsigned long long>(*f.seed),
                         f.error.c_str());
        else
            std::fprintf(stderr, "run failed: %s\n", f.error.c_str());
    }
    std::printf("outputs in    %s\n", output_dir.c_str());
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"edkit - economic dispatch solvers (PSO, SA, SA-PSO) with "
                 "lambda-iteration and grid-search references"};

    edkit::ExperimentConfig config;

    app.add_option("--problem", config.problem_path,
                   "Problem instance (JSON)")
        ->required();
    app.add_option("--solver", config.solver,
                   "Solver: pso, sa, sa-pso, lambda or grid")
        ->required()
        ->check(CLI::IsMember({"pso", "sa", "sa-pso", "lambda", "grid"}));
    app.add_option("--seeds", config.seeds,
                   "Seeds for the stochastic solvers (default 0..19)")
        ->delimiter(',');
    app.add_option("--out", config.output_dir, "Output directory")
        ->capture_default_str();

    app.add_option("--iters", config.pso.iter_max,
                   "Iteration budget (PSO/sa-pso iterations, SA temperature levels)")
        ->capture_default_str();
    app.add_option("--particles", config.pso.n_particles, "Swarm size")
        ->capture_default_str();
    app.add_option("--c1", config.pso.c1, "Cognitive acceleration")
        ->capture_default_str();
    app.add_option("--c2", config.pso.c2, "Social acceleration")
        ->capture_default_str();
    app.add_option("--w-max", config.pso.w_max, "Initial inertia weight")
        ->capture_default_str();
    app.add_option("--w-min", config.pso.w_min, "Final inertia weight")
        ->capture_default_str();
    app.add_option("--penalty-weight", config.pso.penalty_weight,
                   "Fitness penalty per MW of residual")
        ->capture_default_str();

    app.add_option("--t0", config.sa.t0,
                   "Initial temperature (0 = auto from fitness spread)")
        ->capture_default_str();
    app.add_option("--alpha", config.sa.alpha, "Geometric cooling ratio")
        ->capture_default_str();
    app.add_option("--moves-per-temp", config.sa.moves_per_temp,
                   "SA proposals per temperature level")
        ->capture_default_str();
    app.add_option("--neighbor-scale", config.sa.neighbor_scale,
                   "SA perturbation size as a fraction of unit range")
        ->capture_default_str();

    app.add_option("--lambda-tol", config.oracle.lambda_tol,
                   "Lambda-iteration balance tolerance (MW)")
        ->capture_default_str();
    app.add_option("--grid-resolution", config.oracle.grid_resolution,
                   "Grid-search step (MW)")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        const auto summary = edkit::run_experiment(config);
        print_summary(summary, config.output_dir);
        return 0;
    } catch (const edkit::InfeasibleError& e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return kExitInfeasible;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitSolverFailure;
    }
}
