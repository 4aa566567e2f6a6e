#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "edkit/experiment.hpp"
#include "test_support.hpp"

using namespace edkit;
namespace fs = std::filesystem;

namespace {

fs::path data_dir()
{
    return fs::path(EDKIT_DATA_DIR);
}

fs::path fresh_dir(const std::string& tag)
{
    static int counter = 0;
    auto dir = fs::temp_directory_path() /
               ("edkit_test_" + tag + "_" + std::to_string(counter++));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

TEST_CASE("parse_problem loads the bundled canonical instances")
{
    const auto p = parse_problem((data_dir() / "canonical3.json").string());
    REQUIRE(p.n_units() == 3);
    CHECK(p.demand == doctest::Approx(150.0));
    CHECK(p.balance_tol == doctest::Approx(1e-4));
    CHECK_FALSE(p.loss.has_value());
    CHECK(p.units[1].b == doctest::Approx(6.3));

    const auto lossy =
        parse_problem((data_dir() / "canonical3_lossy.json").string());
    REQUIRE(lossy.loss.has_value());
    CHECK((*lossy.loss)(0, 0) == doctest::Approx(2.18e-5));
    CHECK((*lossy.loss)(1, 0) == doctest::Approx(0.93e-5));
}

TEST_CASE("parse_problem reports malformed documents with field names")
{
    CHECK_THROWS_AS(parse_problem("/nonexistent/problem.json"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_problem_text("{"), std::invalid_argument);
    CHECK_THROWS_AS(parse_problem_text("[1,2]"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_problem_text("{\"units\": []}"),
                         doctest::Contains("demand"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        parse_problem_text(R"({"demand": 50, "units": [{"a": 0.1, "b": 2,
            "c": 0, "p_min": 0}]})"),
        doctest::Contains("units[0]"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        parse_problem_text(R"({"demand": 50, "units": [{"a": -0.1, "b": 2,
            "c": 0, "p_min": 0, "p_max": 100}]})"),
        doctest::Contains("units[0]"), std::invalid_argument);
    CHECK_THROWS_AS(
        parse_problem_text(R"({"demand": 50,
            "units": [{"a": 0.1, "b": 2, "c": 0, "p_min": 0, "p_max": 100}],
            "loss": [[1e-4], [2e-4]]})"),
        std::invalid_argument);
    CHECK_THROWS_AS(
        parse_problem_text(R"({"demand": 500,
            "units": [{"a": 0.1, "b": 2, "c": 0, "p_min": 0, "p_max": 100}]})"),
        InfeasibleError);
}

TEST_CASE("convergence CSV round-trips byte for byte")
{
    ConvergenceTrace trace;
    trace.rows = {{0, 1700.5, 1800.25}, {1, 1650.123456789, 1750.0},
                  {2, 1600.0, 1700.0}};
    const auto dir = fresh_dir("csv");
    const auto path = (dir / "trace.csv").string();
    write_convergence_csv(trace, path);

    const std::string text = slurp(path);
    CHECK(text ==
          "iteration,best_cost,mean_cost\n"
          "0,1700.500000,1800.250000\n"
          "1,1650.123457,1750.000000\n"
          "2,1600.000000,1700.000000\n");

    const auto parsed = read_convergence_csv(path);
    REQUIRE(parsed.rows.size() == 3);
    CHECK(parsed.rows[1].best_cost == doctest::Approx(1650.123457).epsilon(1e-12));

    const auto path2 = (dir / "trace2.csv").string();
    write_convergence_csv(parsed, path2);
    CHECK(slurp(path) == slurp(path2));

    CHECK_THROWS_AS(write_convergence_csv(ConvergenceTrace{}, path),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        write_convergence_csv(trace, (dir / "missing" / "x.csv").string()),
        std::runtime_error);
    CHECK_THROWS_AS(read_convergence_csv((dir / "nope.csv").string()),
                    std::runtime_error);
}

TEST_CASE("run_experiment with the lambda oracle reports a zero gap")
{
    ExperimentConfig config;
    config.problem_path = (data_dir() / "canonical3.json").string();
    config.solver = "lambda";
    config.output_dir = fresh_dir("lambda").string();

    const auto summary = run_experiment(config);
    REQUIRE(summary.runs.size() == 1);
    CHECK_FALSE(summary.runs[0].seed.has_value());
    REQUIRE(summary.oracle_cost.has_value());
    CHECK(std::abs(*summary.runs[0].gap) <= 1e-9);
    CHECK(summary.best == summary.worst);
    CHECK(fs::exists(fs::path(config.output_dir) / "summary.json"));
    CHECK(fs::exists(fs::path(config.output_dir) / summary.runs[0].csv));
}

TEST_CASE("run_experiment repeats a seed to byte-identical CSVs")
{
    ExperimentConfig config;
    config.problem_path = (data_dir() / "canonical3.json").string();
    config.solver = "pso";
    config.seeds = {7, 7};
    config.pso.iter_max = 50;
    config.output_dir = fresh_dir("repeat").string();

    const auto summary = run_experiment(config);
    REQUIRE(summary.runs.size() == 2);
    CHECK(summary.runs[0].csv != summary.runs[1].csv);
    CHECK(slurp(fs::path(config.output_dir) / summary.runs[0].csv) ==
          slurp(fs::path(config.output_dir) / summary.runs[1].csv));
}

TEST_CASE("summary statistics agree with the emitted CSV files")
{
    ExperimentConfig config;
    config.problem_path = (data_dir() / "canonical3_lossy.json").string();
    config.solver = "sa-pso";
    config.seeds = {0, 1, 2, 3, 4};
    config.pso.iter_max = 60;
    config.output_dir = fresh_dir("stats").string();

    const auto summary = run_experiment(config);
    REQUIRE(summary.runs.size() == 5);
    CHECK(summary.failures.empty());

    double best = 1e300;
    double worst = -1e300;
    double sum = 0.0;
    std::vector<double> finals;
    for (const auto& run : summary.runs) {
        const auto trace =
            read_convergence_csv((fs::path(config.output_dir) / run.csv).string());
        for (std::size_t i = 1; i < trace.rows.size(); ++i)
            CHECK(trace.rows[i].best_cost <= trace.rows[i - 1].best_cost);
        const double final_cost = trace.rows.back().best_cost;
        CHECK(final_cost == doctest::Approx(run.cost).epsilon(1e-15));
        finals.push_back(final_cost);
        best = std::min(best, final_cost);
        worst = std::max(worst, final_cost);
        sum += final_cost;
    }
    const double mean = sum / 5.0;
    double var = 0.0;
    for (double f : finals) var += (f - mean) * (f - mean);

    CHECK(std::abs(summary.best - best) <= 1e-9);
    CHECK(std::abs(summary.worst - worst) <= 1e-9);
    CHECK(std::abs(summary.mean - mean) <= 1e-9);
    CHECK(std::abs(summary.stddev - std::sqrt(var / 5.0)) <= 1e-9);
    CHECK(summary.best <= summary.mean);
    CHECK(summary.mean <= summary.worst);
}

TEST_CASE("run_experiment is deterministic across invocations")
{
    ExperimentConfig config;
    config.problem_path = (data_dir() / "canonical3.json").string();
    config.solver = "sa";
    config.seeds = {3};
    config.pso.iter_max = 40;

    config.output_dir = fresh_dir("det_a").string();
    const auto first = run_experiment(config);
    const auto csv_a = slurp(fs::path(config.output_dir) / first.runs[0].csv);

    config.output_dir = fresh_dir("det_b").string();
    const auto second = run_experiment(config);
    const auto csv_b = slurp(fs::path(config.output_dir) / second.runs[0].csv);

    CHECK(csv_a == csv_b);
    CHECK(first.runs[0].cost == second.runs[0].cost);
}

TEST_CASE("run_experiment rejects bad configurations")
{
    ExperimentConfig config;
    config.problem_path = (data_dir() / "canonical3.json").string();
    config.solver = "annealing";
    config.output_dir = fresh_dir("bad").string();
    CHECK_THROWS_AS(run_experiment(config), std::invalid_argument);

    config.solver = "pso";
    config.seeds.clear();
    CHECK_THROWS_AS(run_experiment(config), std::invalid_argument);
}

TEST_CASE("run_experiment surfaces total failure")
{
    const auto dir = fresh_dir("fail");
    const auto problem_path = dir / "four_units.json";
    std::ofstream out(problem_path);
    out << R"({"demand": 100, "units": [
        {"a": 0.01, "b": 2, "c": 0, "p_min": 0, "p_max": 100},
        {"a": 0.01, "b": 2, "c": 0, "p_min": 0, "p_max": 100},
        {"a": 0.01, "b": 2, "c": 0, "p_min": 0, "p_max": 100},
        {"a": 0.01, "b": 2, "c": 0, "p_min": 0, "p_max": 100}]})";
    out.close();

    ExperimentConfig config;
    config.problem_path = problem_path.string();
    config.solver = "grid";  // refuses N > 3
    config.output_dir = (dir / "out").string();
    CHECK_THROWS_AS(run_experiment(config), SolverError);
}
