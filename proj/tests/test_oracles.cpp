#include <cmath>
#include <vector>

#include "doctest.h"
#include "edkit/oracles.hpp"
#include "edkit/rng.hpp"
#include "test_support.hpp"

using namespace edkit;

namespace {

double marginal_cost(const GeneratingUnit& u, double p)
{
    return 2.0 * u.a * p + u.b;
}

// Analytic bound on the cost error a uniform grid can introduce.
double grid_bound(const DispatchProblem& p, double resolution)
{
    double max_a = 0.0;
    double lo = p.units.front().p_min;
    double hi = p.units.front().p_max;
    for (const auto& u : p.units) {
        max_a = std::max(max_a, u.a);
        lo = std::min(lo, u.p_min);
        hi = std::max(hi, u.p_max);
    }
    return static_cast<double>(p.n_units()) * max_a * (hi - lo) * resolution;
}

DispatchProblem random_convex_problem(Rng& rng, std::size_t n)
{
    DispatchProblem p;
    double min_sum = 0.0;
    double max_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        GeneratingUnit u;
        u.a = rng.uniform(0.002, 0.02);
        u.b = rng.uniform(1.0, 8.0);
        u.c = rng.uniform(0.0, 300.0);
        u.p_min = rng.uniform(0.0, 20.0);
        u.p_max = u.p_min + rng.uniform(30.0, 150.0);
        min_sum += u.p_min;
        max_sum += u.p_max;
        p.units.push_back(u);
    }
    const double margin = 0.1 * (max_sum - min_sum);
    p.demand = rng.uniform(min_sum + margin, max_sum - margin);
    return p;
}

}  // namespace

TEST_CASE("lambda_dispatch splits twin units evenly")
{
    const auto solution = lambda_dispatch(edtest::twin_units());
    CHECK(solution.power[0] == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(solution.power[1] == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(solution.cost == doctest::Approx(600.0).epsilon(1e-9));
    CHECK(solution.residual <= 1e-8);
    CHECK_FALSE(solution.seed.has_value());
}

TEST_CASE("lambda_dispatch clamps the cheap small unit at its cap")
{
    DispatchProblem p;
    p.units = {{0.001, 1.0, 0.0, 0.0, 50.0}, {0.01, 3.0, 0.0, 0.0, 200.0}};
    p.demand = 100.0;
    const auto solution = lambda_dispatch(p);
    CHECK(solution.power[0] == doctest::Approx(50.0).epsilon(1e-9));
    CHECK(solution.power[1] == doctest::Approx(50.0).epsilon(1e-9));
    CHECK(solution.cost == doctest::Approx(227.5).epsilon(1e-9));

    const auto grid = grid_search(p, {.grid_resolution = 0.1});
    CHECK(std::abs(grid.cost - solution.cost) <= grid_bound(p, 0.1));
}

TEST_CASE("lambda_dispatch reproduces the frozen canonical optimum")
{
    const auto solution = lambda_dispatch(edtest::canonical3());
    CHECK(solution.cost ==
          doctest::Approx(edtest::kCanonicalCost).epsilon(1e-9));
    CHECK(solution.residual <= 1e-8);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(solution.power[i] ==
              doctest::Approx(edtest::kCanonicalPower[i]).epsilon(1e-7));

    for (std::size_t i = 0; i < 3; ++i)
        CHECK(marginal_cost(edtest::canonical3().units[i], solution.power[i]) ==
              doctest::Approx(edtest::kCanonicalLambda).epsilon(1e-7));
}

TEST_CASE("lossy lambda_dispatch matches the frozen penalty-factor optimum")
{
    const auto p = edtest::canonical3_lossy();
    const auto solution = lambda_dispatch(p);
    CHECK(solution.cost ==
          doctest::Approx(edtest::kCanonicalLossyCost).epsilon(1e-8));
    CHECK(solution.loss ==
          doctest::Approx(edtest::kCanonicalLossyLoss).epsilon(1e-4));
    CHECK(solution.residual <= 1e-8);

    // Coarse lossy grid agrees within the resolution bound.
    const auto grid = grid_search(p, {.grid_resolution = 1.0});
    CHECK(std::abs(grid.cost - solution.cost) <= grid_bound(p, 1.0));
}

TEST_CASE("lambda_dispatch handles zero-curvature units via a marginal unit")
{
    DispatchProblem p;
    p.units = {{0.0, 5.0, 10.0, 0.0, 100.0}, {0.01, 7.0, 0.0, 10.0, 100.0}};
    p.demand = 60.0;
    const auto solution = lambda_dispatch(p);
    CHECK(solution.power[0] == doctest::Approx(50.0).epsilon(1e-9));
    CHECK(solution.power[1] == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(solution.residual <= 1e-8);

    DispatchProblem tied;
    tied.units = {{0.0, 5.0, 1.0, 10.0, 100.0}, {0.0, 5.0, 2.0, 10.0, 100.0}};
    tied.demand = 110.0;
    const auto flat = lambda_dispatch(tied);
    CHECK(flat.residual <= 1e-8);
    CHECK(flat.cost == doctest::Approx(5.0 * 110.0 + 3.0).epsilon(1e-12));
}

TEST_CASE("lambda_dispatch rejects infeasible and pathological instances")
{
    auto p = edtest::canonical3();
    p.demand = 1000.0;
    CHECK_THROWS_AS(lambda_dispatch(p), InfeasibleError);

    // Loss derivative reaches 1 at the operating point: penalty factor blows up.
    DispatchProblem singular;
    singular.units = {{0.01, 2.0, 0.0, 0.0, 100.0}};
    singular.demand = 50.0;
    singular.loss.emplace(std::vector<std::vector<double>>{{0.01}});
    CHECK_THROWS_AS(lambda_dispatch(singular), SolverError);
}

TEST_CASE("grid_search handles the degenerate and tiny cases")
{
    const auto one = edtest::single_unit(50.0);
    const auto s1 = grid_search(one);
    CHECK(s1.power[0] == doctest::Approx(50.0));

    const auto twin = grid_search(edtest::twin_units(), {.grid_resolution = 0.1});
    CHECK(s1.residual <= one.balance_tol);
    CHECK(twin.power[0] == doctest::Approx(100.0).epsilon(1e-6));
    CHECK(twin.power[1] == doctest::Approx(100.0).epsilon(1e-6));

    DispatchProblem four;
    four.units = std::vector<GeneratingUnit>(4, {0.01, 2.0, 0.0, 0.0, 100.0});
    four.demand = 100.0;
    CHECK_THROWS_AS(grid_search(four), std::invalid_argument);

    // Demand reachable only between grid points: no feasible sample.
    DispatchProblem narrow;
    narrow.units = {{0.01, 2.0, 0.0, 0.0, 100.0}, {0.01, 2.0, 0.0, 0.0, 0.05}};
    narrow.demand = 99.8;
    narrow.balance_tol = 1e-6;
    CHECK_THROWS_AS(grid_search(narrow, {.grid_resolution = 0.5}), SolverError);
}

TEST_CASE("grid_search satisfies equal marginal cost at interior optima")
{
    const auto p = edtest::canonical3();
    const double resolution = 0.1;
    const auto solution = grid_search(p, {.grid_resolution = resolution});

    double max_a = 0.0;
    for (const auto& u : p.units) max_a = std::max(max_a, u.a);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = i + 1; j < 3; ++j) {
            const bool interior =
                solution.power[i] > p.units[i].p_min + resolution &&
                solution.power[i] < p.units[i].p_max - resolution &&
                solution.power[j] > p.units[j].p_min + resolution &&
                solution.power[j] < p.units[j].p_max - resolution;
            if (!interior) continue;
            const double diff =
                std::abs(marginal_cost(p.units[i], solution.power[i]) -
                         marginal_cost(p.units[j], solution.power[j]));
            CHECK(diff <= 2.0 * resolution * max_a);
        }
    }
}

TEST_CASE("oracles agree on random convex instances")
{
    Rng rng(2024);
    const double resolution = 0.5;
    int accepted = 0;
    for (int trial = 0; trial < 60 && accepted < 12; ++trial) {
        const std::size_t n = 2 + rng.uniform_index(2);
        const auto p = random_convex_problem(rng, n);
        const auto reference = lambda_dispatch(p);

        // The resolution bound is derived for optima whose dependent unit
        // (the last one) sits strictly inside its limits.
        const auto& last = p.units.back();
        const double margin = static_cast<double>(n) * resolution;
        if (reference.power.back() < last.p_min + margin ||
            reference.power.back() > last.p_max - margin)
            continue;
        ++accepted;

        CHECK(reference.residual <= 1e-8);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(reference.power[i] >= p.units[i].p_min);
            CHECK(reference.power[i] <= p.units[i].p_max);
        }

        // Equal incremental cost among strictly interior units.
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const bool interior =
                    reference.power[i] > p.units[i].p_min + 1e-6 &&
                    reference.power[i] < p.units[i].p_max - 1e-6 &&
                    reference.power[j] > p.units[j].p_min + 1e-6 &&
                    reference.power[j] < p.units[j].p_max - 1e-6;
                if (!interior) continue;
                CHECK(std::abs(marginal_cost(p.units[i], reference.power[i]) -
                               marginal_cost(p.units[j], reference.power[j])) <=
                      1e-6);
            }
        }

        const auto grid = grid_search(p, {.grid_resolution = resolution});
        const double bound = grid_bound(p, resolution);
        CHECK(grid.cost >= reference.cost - bound);
        CHECK(grid.cost <= reference.cost + bound);
    }
    CHECK(accepted >= 8);
}
