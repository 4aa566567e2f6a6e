#include "edkit/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace edkit {

namespace {

double clamp(double x, double lo, double hi)
{
    return std::min(std::max(x, lo), hi);
}

void require_dimension(std::size_t got, std::size_t want, const char* what)
{
    if (got != want) {
        std::ostringstream msg;
        msg << what << ": expected " << want << " entries, got " << got;
        throw std::invalid_argument(msg.str());
    }
}

}  // namespace

LossMatrix::LossMatrix(const std::vector<std::vector<double>>& rows)
    : n_(rows.size())
{
    coeff_.resize(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i) {
        if (rows[i].size() != n_) {
            std::ostringstream msg;
            msg << "loss: row " << i << " has " << rows[i].size()
                << " entries, expected " << n_ << " (matrix must be square)";
            throw std::invalid_argument(msg.str());
        }
    }
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
            coeff_[i * n_ + j] = 0.5 * (rows[i][j] + rows[j][i]);
}

void validate(const DispatchProblem& problem)
{
    if (problem.units.empty())
        throw std::invalid_argument("units: at least one generating unit required");
    if (!(problem.demand > 0.0))
        throw std::invalid_argument("demand: must be > 0");
    if (!(problem.balance_tol > 0.0))
        throw std::invalid_argument("balance_tol: must be > 0");

    for (std::size_t i = 0; i < problem.units.size(); ++i) {
        const auto& u = problem.units[i];
        std::ostringstream msg;
        msg << "units[" << i << "]: ";
        if (u.a < 0.0) {
            msg << "a (" << u.a << ") must be >= 0";
            throw std::invalid_argument(msg.str());
        }
        if (u.p_min < 0.0) {
            msg << "p_min (" << u.p_min << ") must be >= 0";
            throw std::invalid_argument(msg.str());
        }
        if (u.p_min > u.p_max) {
            msg << "p_min (" << u.p_min << ") exceeds p_max (" << u.p_max << ")";
            throw std::invalid_argument(msg.str());
        }
    }

    if (problem.loss && problem.loss->size() != problem.n_units()) {
        std::ostringstream msg;
        msg << "loss: dimension " << problem.loss->size()
            << " does not match unit count " << problem.n_units();
        throw std::invalid_argument(msg.str());
    }

    if (!problem.loss) {
        if (auto reason = check_feasible(problem))
            throw InfeasibleError(*reason);
    }
}

void validate(const DispatchProblem& problem, const DispatchSolution& solution)
{
    require_dimension(solution.power.size(), problem.n_units(), "solution power");
    for (std::size_t i = 0; i < solution.power.size(); ++i) {
        const auto& u = problem.units[i];
        if (solution.power[i] < u.p_min || solution.power[i] > u.p_max) {
            std::ostringstream msg;
            msg << solution.solver_id << ": power[" << i << "] = "
                << solution.power[i] << " outside [" << u.p_min << ", "
                << u.p_max << "]";
            throw SolverError(msg.str());
        }
    }
    const double residual = std::abs(power_mismatch(problem, solution.power));
    if (residual > problem.balance_tol) {
        std::ostringstream msg;
        msg << solution.solver_id << ": balance residual " << residual
            << " MW exceeds tolerance " << problem.balance_tol;
        throw SolverError(msg.str());
    }
}

double unit_cost(const GeneratingUnit& unit, double p)
{
    return unit.a * p * p + unit.b * p + unit.c;
}

double total_cost(const DispatchProblem& problem, std::span<const double> power)
{
    require_dimension(power.size(), problem.n_units(), "power");
    double sum = 0.0;
    for (std::size_t i = 0; i < power.size(); ++i)
        sum += unit_cost(problem.units[i], power[i]);
    return sum;
}

double transmission_loss(const LossMatrix& loss, std::span<const double> power)
{
    require_dimension(power.size(), loss.size(), "power");
    double sum = 0.0;
    for (std::size_t m = 0; m < power.size(); ++m) {
        double row = 0.0;
        for (std::size_t n = 0; n < power.size(); ++n)
            row += loss(m, n) * power[n];
        sum += power[m] * row;
    }
    return sum;
}

double power_mismatch(const DispatchProblem& problem, std::span<const double> power)
{
    require_dimension(power.size(), problem.n_units(), "power");
    double sum = std::accumulate(power.begin(), power.end(), 0.0);
    double mismatch = sum - problem.demand;
    if (problem.loss)
        mismatch -= transmission_loss(*problem.loss, power);
    return mismatch;
}

std::vector<double> repair_balance(const DispatchProblem& problem,
                                   std::vector<double> power,
                                   std::size_t dependent)
{
    require_dimension(power.size(), problem.n_units(), "power");
    if (dependent >= power.size())
        throw std::invalid_argument("repair_balance: dependent index out of range");

    double others = 0.0;
    for (std::size_t i = 0; i < power.size(); ++i)
        if (i != dependent) others += power[i];

    const auto& unit = problem.units[dependent];
    if (!problem.loss) {
        power[dependent] = clamp(problem.demand - others, unit.p_min, unit.p_max);
        return power;
    }

    // P_L depends on the unknown entry, so iterate the fixed point.
    for (int round = 0; round < 20; ++round) {
        power[dependent] =
            problem.demand + transmission_loss(*problem.loss, power) - others;
        if (std::abs(power_mismatch(problem, power)) <= problem.balance_tol)
            break;
    }
    power[dependent] = clamp(power[dependent], unit.p_min, unit.p_max);
    return power;
}

std::optional<std::string> check_feasible(const DispatchProblem& problem)
{
    double min_sum = 0.0;
    double max_sum = 0.0;
    for (const auto& u : problem.units) {
        min_sum += u.p_min;
        max_sum += u.p_max;
    }

    if (!problem.loss) {
        if (problem.demand < min_sum) {
            std::ostringstream msg;
            msg << "demand " << problem.demand << " MW below aggregate minimum "
                << min_sum << " MW";
            return msg.str();
        }
        if (problem.demand > max_sum) {
            std::ostringstream msg;
            msg << "demand " << problem.demand << " MW above aggregate maximum "
                << max_sum << " MW";
            return msg.str();
        }
        return std::nullopt;
    }

    std::vector<double> at_min;
    at_min.reserve(problem.units.size());
    for (const auto& u : problem.units) at_min.push_back(u.p_min);
    const double loss_at_min = transmission_loss(*problem.loss, at_min);

    if (problem.demand + loss_at_min < min_sum) {
        std::ostringstream msg;
        msg << "demand " << problem.demand << " MW plus minimum losses "
            << loss_at_min << " MW below aggregate minimum " << min_sum << " MW";
        return msg.str();
    }
    if (problem.demand > max_sum) {
        std::ostringstream msg;
        msg << "demand " << problem.demand << " MW above aggregate maximum "
            << max_sum << " MW";
        return msg.str();
    }
    return std::nullopt;
}

}  // namespace edkit
