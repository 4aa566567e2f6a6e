#include "edkit/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

namespace edkit {

namespace {

void validate_params(const OracleParams& params)
{
    if (!(params.lambda_tol > 0.0))
        throw std::invalid_argument("oracle: lambda_tol must be > 0");
    if (params.max_bisections < 1)
        throw std::invalid_argument("oracle: max_bisections must be >= 1");
    if (!(params.grid_resolution > 0.0))
        throw std::invalid_argument("oracle: grid_resolution must be > 0");
}

// Clamped equal-incremental-cost dispatch of one unit at marginal cost
// lambda, corrected by its penalty factor (1 for lossless instances).
// Zero-curvature units dispatch as a step: p_min below the breakpoint,
// p_max at or above it.
double dispatch_unit(const GeneratingUnit& u, double lambda, double pf)
{
    const double effective = lambda / pf;
    if (u.a > 0.0)
        return std::clamp((effective - u.b) / (2.0 * u.a), u.p_min, u.p_max);
    return effective < u.b ? u.p_min : u.p_max;
}

struct BisectionResult {
    std::vector<double> power;
    double lo = 0.0;
    double hi = 0.0;
};

// Bisect lambda until sum(p(lambda)) meets `target`, over a bracket that
// provably pins all units to p_min (left end) and p_max (right end).
BisectionResult bisect_lambda(const DispatchProblem& problem,
                              const std::vector<double>& pf,
                              double target,
                              const OracleParams& params)
{
    const std::size_t n = problem.n_units();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& u = problem.units[i];
        lo = std::min(lo, u.b * pf[i]);
        hi = std::max(hi, (u.b + 2.0 * u.a * u.p_max) * pf[i]);
    }
    lo -= 1.0;  // strictly below every breakpoint so step units start at p_min

    auto dispatch_all = [&](double lambda) {
        std::vector<double> p(n);
        for (std::size_t i = 0; i < n; ++i)
            p[i] = dispatch_unit(problem.units[i], lambda, pf[i]);
        return p;
    };
    auto surplus = [&](const std::vector<double>& p) {
        return std::accumulate(p.begin(), p.end(), 0.0) - target;
    };

    if (surplus(dispatch_all(hi)) < 0.0) {
        std::ostringstream msg;
        msg << "lambda_dispatch: target " << target
            << " MW not reachable at aggregate maximum output";
        throw SolverError(msg.str());
    }
    if (surplus(dispatch_all(lo)) > 0.0) {
        // Minimum output already oversupplies; only a step unit at its
        // breakpoint can absorb the difference (handled by the caller).
        return {dispatch_all(lo), lo, lo};
    }

    for (int it = 0; it < params.max_bisections; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (surplus(dispatch_all(mid)) >= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    const double lambda = 0.5 * (lo + hi);
    return {dispatch_all(lambda), lo, hi};
}

// Let the cheapest step unit sitting at its breakpoint absorb a residual
// the bisection cannot remove (the supply staircase is discontinuous
// there). Ties break toward the lowest index.
void absorb_with_marginal_unit(const DispatchProblem& problem,
                               const std::vector<double>& pf,
                               BisectionResult& r)
{
    const double slack = 1e-9 * std::max(1.0, std::abs(r.hi));
    std::size_t marginal = problem.n_units();
    for (std::size_t i = 0; i < problem.n_units(); ++i) {
        const auto& u = problem.units[i];
        if (u.a > 0.0) continue;
        const double breakpoint = u.b * pf[i];
        if (breakpoint < r.lo - slack || breakpoint > r.hi + slack) continue;
        if (marginal == problem.n_units() ||
            u.b < problem.units[marginal].b)
            marginal = i;
    }
    if (marginal == problem.n_units()) return;

    const auto& u = problem.units[marginal];
    const double mismatch = power_mismatch(problem, r.power);
    r.power[marginal] =
        std::clamp(r.power[marginal] - mismatch, u.p_min, u.p_max);
}

DispatchSolution package(const DispatchProblem& problem,
                         std::vector<double> power, const char* solver_id)
{
    DispatchSolution s;
    s.power = std::move(power);
    s.cost = total_cost(problem, s.power);
    s.loss = problem.loss ? transmission_loss(*problem.loss, s.power) : 0.0;
    s.residual = std::abs(power_mismatch(problem, s.power));
    s.solver_id = solver_id;
    return s;
}

}  // namespace

DispatchSolution lambda_dispatch(const DispatchProblem& problem,
                                 const OracleParams& params)
{
    validate(problem);
    validate_params(params);
    if (auto reason = check_feasible(problem))
        throw InfeasibleError(*reason);

    const std::size_t n = problem.n_units();
    std::vector<double> pf(n, 1.0);

    if (!problem.loss) {
        BisectionResult r = bisect_lambda(problem, pf, problem.demand, params);
        if (std::abs(power_mismatch(problem, r.power)) > params.lambda_tol)
            absorb_with_marginal_unit(problem, pf, r);
        const double residual = std::abs(power_mismatch(problem, r.power));
        if (residual > params.lambda_tol) {
            std::ostringstream msg;
            msg << "lambda_dispatch: residual " << residual
                << " MW after bisection (tol " << params.lambda_tol << ")";
            throw SolverError(msg.str());
        }
        return package(problem, std::move(r.power), "lambda");
    }

    // Lossy case: alternate between refreshing the penalty factors and the
    // loss estimate at the current point and re-solving the corrected
    // equal-incremental-cost conditions.
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i)
        p[i] = 0.5 * (problem.units[i].p_min + problem.units[i].p_max);

    constexpr int max_penalty_rounds = 100;
    for (int round = 0; round < max_penalty_rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            double dloss = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                dloss += (*problem.loss)(i, j) * p[j];
            dloss *= 2.0;
            if (1.0 - dloss <= 1e-9) {
                std::ostringstream msg;
                msg << "lambda_dispatch: penalty factor singular at unit " << i
                    << " (dP_L/dP = " << dloss << ")";
                throw SolverError(msg.str());
            }
            pf[i] = 1.0 / (1.0 - dloss);
        }

        const double target =
            problem.demand + transmission_loss(*problem.loss, p);
        BisectionResult r = bisect_lambda(problem, pf, target, params);
        if (std::abs(power_mismatch(problem, r.power)) > params.lambda_tol)
            absorb_with_marginal_unit(problem, pf, r);
        p = std::move(r.power);

        if (std::abs(power_mismatch(problem, p)) <= params.lambda_tol)
            return package(problem, std::move(p), "lambda");
    }

    std::ostringstream msg;
    msg << "lambda_dispatch: penalty-factor iteration did not reach |mismatch| <= "
        << params.lambda_tol << " within " << max_penalty_rounds << " rounds";
    throw SolverError(msg.str());
}

DispatchSolution grid_search(const DispatchProblem& problem,
                             const OracleParams& params)
{
    validate(problem);
    validate_params(params);
    const std::size_t n = problem.n_units();
    if (n > 3)
        throw std::invalid_argument(
            "grid_search: at most 3 units supported (complexity guard)");

    const std::size_t dependent = n - 1;
    const double res = params.grid_resolution;

    // Inclusive per-unit grids over the free dimensions.
    std::vector<std::vector<double>> grids(dependent);
    for (std::size_t i = 0; i < dependent; ++i) {
        const auto& u = problem.units[i];
        const auto steps =
            static_cast<std::size_t>((u.p_max - u.p_min) / res + 1e-9);
        grids[i].reserve(steps + 2);
        for (std::size_t k = 0; k <= steps; ++k)
            grids[i].push_back(
                std::min(u.p_min + static_cast<double>(k) * res, u.p_max));
        if (u.p_max - grids[i].back() > 1e-12)
            grids[i].push_back(u.p_max);
    }

    std::vector<double> point(n);
    std::vector<std::size_t> index(dependent, 0);
    double best_cost = std::numeric_limits<double>::infinity();
    std::vector<double> best;

    for (;;) {
        for (std::size_t i = 0; i < dependent; ++i)
            point[i] = grids[i][index[i]];
        point[dependent] = problem.units[dependent].p_min;  // cold start
        point = repair_balance(problem, std::move(point), dependent);

        if (std::abs(power_mismatch(problem, point)) <= problem.balance_tol) {
            const double cost = total_cost(problem, point);
            if (cost < best_cost) {
                best_cost = cost;
                best = point;
            }
        }

        // Odometer over the free dimensions.
        std::size_t d = 0;
        for (; d < dependent; ++d) {
            if (++index[d] < grids[d].size()) break;
            index[d] = 0;
        }
        if (d == dependent) break;
    }

    if (best.empty())
        throw SolverError("grid_search: no feasible grid point");
    return package(problem, std::move(best), "grid");
}

}  // namespace edkit
