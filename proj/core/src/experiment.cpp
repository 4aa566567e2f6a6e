#include "edkit/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

namespace edkit {

namespace {

using nlohmann::ordered_json;

double require_number(const ordered_json& obj, const char* key,
                      const std::string& context)
{
    if (!obj.contains(key))
        throw std::invalid_argument(context + ": missing field \"" + key + "\"");
    const auto& v = obj.at(key);
    if (!v.is_number())
        throw std::invalid_argument(context + ": field \"" + key +
                                    "\" must be a number");
    return v.get<double>();
}

std::string format_row(int iteration, double best, double mean)
{
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f\n", iteration, best, mean);
    return buf;
}

bool is_stochastic(const std::string& solver)
{
    return solver == "pso" || solver == "sa" || solver == "sa-pso";
}

struct RunOutput {
    DispatchSolution solution;
    ConvergenceTrace trace;
};

RunOutput run_one(const DispatchProblem& problem, const ExperimentConfig& config,
                  std::uint64_t seed)
{
    if (config.solver == "pso") {
        auto [solution, trace] = pso_solve(problem, config.pso, seed);
        return {std::move(solution), std::move(trace)};
    }
    if (config.solver == "sa") {
        auto [solution, trace] =
            sa_solve(problem, config.sa, config.pso.iter_max, seed);
        return {std::move(solution), std::move(trace)};
    }
    if (config.solver == "sa-pso") {
        auto [solution, trace] =
            hybrid_solve(problem, {config.pso, config.sa}, seed);
        return {std::move(solution), std::move(trace)};
    }

    DispatchSolution solution = config.solver == "lambda"
                                    ? lambda_dispatch(problem, config.oracle)
                                    : grid_search(problem, config.oracle);
    ConvergenceTrace trace;
    trace.rows.push_back({0, solution.cost, solution.cost});
    return {std::move(solution), std::move(trace)};
}

}  // namespace

std::vector<std::uint64_t> ExperimentConfig::default_seeds()
{
    std::vector<std::uint64_t> seeds(20);
    std::iota(seeds.begin(), seeds.end(), 0);
    return seeds;
}

DispatchProblem parse_problem(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::invalid_argument("cannot open problem file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_problem_text(buffer.str());
}

DispatchProblem parse_problem_text(const std::string& text)
{
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw std::invalid_argument(std::string("problem file is not valid JSON: ") +
                                    e.what());
    }
    if (!doc.is_object())
        throw std::invalid_argument("problem file: top level must be an object");

    DispatchProblem problem;
    problem.demand = require_number(doc, "demand", "problem");
    if (doc.contains("balance_tol"))
        problem.balance_tol = require_number(doc, "balance_tol", "problem");

    if (!doc.contains("units") || !doc.at("units").is_array())
        throw std::invalid_argument("problem: missing or non-array field \"units\"");
    std::size_t index = 0;
    for (const auto& entry : doc.at("units")) {
        std::ostringstream context;
        context << "units[" << index << "]";
        if (!entry.is_object())
            throw std::invalid_argument(context.str() + ": must be an object");
        GeneratingUnit unit;
        unit.a = require_number(entry, "a", context.str());
        unit.b = require_number(entry, "b", context.str());
        unit.c = require_number(entry, "c", context.str());
        unit.p_min = require_number(entry, "p_min", context.str());
        unit.p_max = require_number(entry, "p_max", context.str());
        problem.units.push_back(unit);
        ++index;
    }

    if (doc.contains("loss")) {
        const auto& loss = doc.at("loss");
        if (!loss.is_array())
            throw std::invalid_argument("loss: must be an array of rows");
        std::vector<std::vector<double>> rows;
        for (const auto& row : loss) {
            if (!row.is_array())
                throw std::invalid_argument("loss: every row must be an array");
            rows.emplace_back();
            for (const auto& v : row) {
                if (!v.is_number())
                    throw std::invalid_argument("loss: entries must be numbers");
                rows.back().push_back(v.get<double>());
            }
        }
        problem.loss.emplace(rows);
    }

    validate(problem);
    return problem;
}

void write_convergence_csv(const ConvergenceTrace& trace, const std::string& path)
{
    if (trace.rows.empty())
        throw std::invalid_argument("write_convergence_csv: empty trace");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    out << "iteration,best_cost,mean_cost\n";
    for (const auto& row : trace.rows)
        out << format_row(row.iteration, row.best_cost, row.mean_cost);
    out.flush();
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

ConvergenceTrace read_convergence_csv(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "iteration,best_cost,mean_cost")
        throw std::runtime_error("bad convergence CSV header in " + path);

    ConvergenceTrace trace;
    while (std::getline(in, line)) {
        ConvergenceTrace::Row row;
        if (std::sscanf(line.c_str(), "%d,%lf,%lf", &row.iteration,
                        &row.best_cost, &row.mean_cost) != 3)
            throw std::runtime_error("bad convergence CSV row in " + path + ": " +
                                     line);
        trace.rows.push_back(row);
    }
    if (trace.rows.empty())
        throw std::runtime_error("convergence CSV has no rows: " + path);
    return trace;
}

double csv_cost(double value)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    return std::strtod(buf, nullptr);
}

ExperimentSummary run_experiment(const ExperimentConfig& config)
{
    static const std::vector<std::string> known = {"pso", "sa", "sa-pso",
                                                   "lambda", "grid"};
    if (std::find(known.begin(), known.end(), config.solver) == known.end())
        throw std::invalid_argument("unknown solver \"" + config.solver +
                                    "\" (expected pso, sa, sa-pso, lambda or grid)");

    const DispatchProblem problem = parse_problem(config.problem_path);

    const bool stochastic = is_stochastic(config.solver);
    if (stochastic && config.seeds.empty())
        throw std::invalid_argument("solver \"" + config.solver +
                                    "\" needs at least one seed");

    std::filesystem::create_directories(config.output_dir);

    ExperimentSummary summary;
    summary.problem_path = config.problem_path;
    summary.solver = config.solver;

    // Reference cost for gap reporting; skipped silently if the oracle
    // cannot handle the instance.
    try {
        summary.oracle_cost = lambda_dispatch(problem, config.oracle).cost;
    } catch (const std::exception&) {
        summary.oracle_cost = std::nullopt;
    }

    const std::size_t n_runs = stochastic ? config.seeds.size() : 1;
    for (std::size_t k = 0; k < n_runs; ++k) {
        std::optional<std::uint64_t> seed;
        if (stochastic) seed = config.seeds[k];

        std::ostringstream name;
        name << config.solver << "_run" << k;
        if (seed) name << "_seed" << *seed;
        name << ".csv";

        try {
            const auto start = std::chrono::steady_clock::now();
            RunOutput out = run_one(problem, config, seed.value_or(0));
            const std::chrono::duration<double> elapsed =
                std::chrono::steady_clock::now() - start;

            validate(problem, out.solution);
            write_convergence_csv(
                out.trace,
                (std::filesystem::path(config.output_dir) / name.str()).string());

            RunRecord record;
            record.seed = seed;
            record.cost = csv_cost(out.trace.rows.back().best_cost);
            record.residual = out.solution.residual;
            record.wall_time_s = elapsed.count();
            record.csv = name.str();
            if (summary.oracle_cost)
                record.gap = (record.cost - *summary.oracle_cost) / *summary.oracle_cost;
            summary.runs.push_back(std::move(record));
        } catch (const std::exception& e) {
            summary.failures.push_back({seed, e.what()});
        }
    }

    if (summary.runs.empty()) {
        std::ostringstream msg;
        msg << "all " << n_runs << " runs failed";
        if (!summary.failures.empty())
            msg << "; first error: " << summary.failures.front().error;
        throw SolverError(msg.str());
    }

    summary.best = summary.runs.front().cost;
    summary.worst = summary.runs.front().cost;
    double cost_sum = 0.0;
    double residual_sum = 0.0;
    double time_sum = 0.0;
    for (const auto& r : summary.runs) {
        summary.best = std::min(summary.best, r.cost);
        summary.worst = std::max(summary.worst, r.cost);
        cost_sum += r.cost;
        residual_sum += r.residual;
        time_sum += r.wall_time_s;
    }
    const double n = static_cast<double>(summary.runs.size());
    summary.mean = cost_sum / n;
    double var = 0.0;
    for (const auto& r : summary.runs)
        var += (r.cost - summary.mean) * (r.cost - summary.mean);
    summary.stddev = std::sqrt(var / n);
    summary.mean_residual = residual_sum / n;
    summary.mean_wall_time_s = time_sum / n;
    if (summary.oracle_cost) {
        summary.best_gap = (summary.best - *summary.oracle_cost) / *summary.oracle_cost;
        summary.mean_gap = (summary.mean - *summary.oracle_cost) / *summary.oracle_cost;
    }

    write_summary_json(
        summary,
        (std::filesystem::path(config.output_dir) / "summary.json").string());
    return summary;
}

void write_summary_json(const ExperimentSummary& summary, const std::string& path)
{
    ordered_json doc;
    doc["problem"] = summary.problem_path;
    doc["solver"] = summary.solver;

    doc["runs"] = ordered_json::array();
    for (const auto& r : summary.runs) {
        ordered_json run;
        if (r.seed) run["seed"] = *r.seed;
        run["cost"] = r.cost;
        run["residual"] = r.residual;
        run["wall_time_s"] = r.wall_time_s;
        if (r.gap) run["gap"] = *r.gap;
        run["csv"] = r.csv;
        doc["runs"].push_back(std::move(run));
    }

    doc["failures"] = ordered_json::array();
    for (const auto& f : summary.failures) {
        ordered_json failure;
        if (f.seed) failure["seed"] = *f.seed;
        failure["error"] = f.error;
        doc["failures"].push_back(std::move(failure));
    }

    doc["final_cost"] = {{"best", summary.best},
                         {"worst", summary.worst},
                         {"mean", summary.mean},
                         {"stddev", summary.stddev}};
    doc["mean_residual"] = summary.mean_residual;
    doc["mean_wall_time_s"] = summary.mean_wall_time_s;
    if (summary.oracle_cost) {
        doc["oracle_cost"] = *summary.oracle_cost;
        doc["best_gap"] = *summary.best_gap;
        doc["mean_gap"] = *summary.mean_gap;
    }

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    out << doc.dump(2) << "\n";
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

}  // namespace edkit
