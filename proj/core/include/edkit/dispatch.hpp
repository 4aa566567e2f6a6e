#ifndef EDKIT_DISPATCH_HPP
#define EDKIT_DISPATCH_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace edkit {

/// Thrown when a problem cannot be dispatched (demand outside aggregate
/// limits, or a solver pre-check fails).
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when a solver fails to produce a converged answer.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One thermal generating unit with quadratic fuel cost
/// a*p^2 + b*p + c ($/h) and active-power limits [p_min, p_max] (MW).
struct GeneratingUnit {
    double a = 0.0;      // $/MW^2 h
    double b = 0.0;      // $/MWh
    double c = 0.0;      // $/h
    double p_min = 0.0;  // MW
    double p_max = 0.0;  // MW
};

/// Symmetric matrix of transmission-loss coefficients B_mn (1/MW).
/// Input is symmetrized to (B + B^T)/2 on construction; the quadratic
/// form p^T B p is invariant under that replacement.
class LossMatrix {
public:
    explicit LossMatrix(const std::vector<std::vector<double>>& rows);

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const
    {
        return coeff_[i * n_ + j];
    }

private:
    std::size_t n_ = 0;
    std::vector<double> coeff_;  // row-major, symmetric
};

/// An economic dispatch instance: unit set, total demand P_D (MW),
/// optional loss matrix, and the tolerance on the power balance.
struct DispatchProblem {
    std::vector<GeneratingUnit> units;
    double demand = 0.0;  // MW
    std::optional<LossMatrix> loss;
    double balance_tol = 1e-4;  // MW

    std::size_t n_units() const { return units.size(); }
};

/// A dispatch result: generation per unit plus bookkeeping.
struct DispatchSolution {
    std::vector<double> power;  // MW per unit
    double cost = 0.0;          // $/h
    double loss = 0.0;          // MW
    double residual = 0.0;      // |sum(P) - P_D - P_L| (MW)
    std::string solver_id;
    std::optional<std::uint64_t> seed;  // absent for deterministic solvers
};

/// Check every DispatchProblem invariant; throws std::invalid_argument
/// naming the offending unit/field, or InfeasibleError when the demand
/// falls outside the aggregate limits of a lossless instance.
void validate(const DispatchProblem& problem);

/// Check that a solution respects unit limits and balances to the
/// problem tolerance; throws SolverError otherwise.
void validate(const DispatchProblem& problem, const DispatchSolution& solution);

/// Fuel cost of one unit at output p: a*p^2 + b*p + c.
double unit_cost(const GeneratingUnit& unit, double p);

/// Total fuel cost of a generation vector.
double total_cost(const DispatchProblem& problem, std::span<const double> power);

/// Transmission loss P_L = sum_m sum_n P_m * B_mn * P_n.
double transmission_loss(const LossMatrix& loss, std::span<const double> power);

/// Signed balance error: sum(P) - P_D, minus P_L when the problem has a
/// loss matrix. Positive means surplus generation.
double power_mismatch(const DispatchProblem& problem, std::span<const double> power);

/// Restore the power balance by recomputing entry `dependent`.
/// Lossless: P_d = P_D - sum of the others. Lossy: fixed-point iteration
/// of P_d = P_D + P_L(P) - sum of the others, stopped at |mismatch| <=
/// balance_tol or 20 rounds. The dependent entry is clamped to its limits
/// last, so the returned vector can carry a residual when the clamp binds;
/// callers price that residual into fitness instead of re-repairing.
std::vector<double> repair_balance(const DispatchProblem& problem,
                                   std::vector<double> power,
                                   std::size_t dependent);

/// nullopt when the demand is coverable, otherwise a human-readable
/// reason. The lossy check is conservative (a necessary condition only);
/// final feasibility is decided by the solver residual.
std::optional<std::string> check_feasible(const DispatchProblem& problem);

}  // namespace edkit

#endif  // EDKIT_DISPATCH_HPP
