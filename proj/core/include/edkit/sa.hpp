#ifndef EDKIT_SA_HPP
#define EDKIT_SA_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "edkit/dispatch.hpp"
#include "edkit/pso.hpp"
#include "edkit/rng.hpp"

namespace edkit {

/// Annealing parameters. t0 = 0 selects an automatic initial temperature
/// scaled to the fitness spread of seeded probe points (floored at 1e-6),
/// so the schedule tracks the cost magnitude of the instance.
struct SaParams {
    double t0 = 0.0;             // $/h; 0 = auto
    double alpha = 0.98;         // geometric cooling ratio
    int moves_per_temp = 10;     // standalone SA only
    double neighbor_scale = 0.1; // fraction of a unit's range
};

struct HybridParams {
    PsoParams pso;
    SaParams sa;
};

/// Metropolis criterion: downhill moves always pass, uphill moves pass
/// with probability exp(-delta/temperature). Draws from rng only when
/// delta > 0.
bool metropolis_accept(double delta, double temperature, Rng& rng);

/// One geometric cooling step: alpha * temperature.
double cooling_step(double temperature, const SaParams& params);

/// Random nearby solution: perturb one uniformly chosen unit by a uniform
/// step within +-neighbor_scale of its range, clamp, and repair the
/// balance through the next unit in cyclic order.
std::vector<double> propose_neighbor(const DispatchProblem& problem,
                                     std::span<const double> power,
                                     const SaParams& params,
                                     Rng& rng);

/// Standalone annealing baseline: iter_max temperature levels of
/// moves_per_temp Metropolis moves each. Returns the best solution ever
/// visited, not the final chain state.
std::pair<DispatchSolution, ConvergenceTrace> sa_solve(
    const DispatchProblem& problem, const SaParams& params, int iter_max,
    std::uint64_t seed);

/// PSO with annealing grafted on: candidate positions replace the current
/// position through the Metropolis test at the current temperature (so
/// worse moves survive probabilistically), pbest/gbest record only true
/// improvements, and each iteration one neighbor of gbest is tried and
/// adopted only when strictly better. Temperature cools geometrically
/// each iteration.
std::pair<DispatchSolution, ConvergenceTrace> hybrid_solve(
    const DispatchProblem& problem, const HybridParams& params,
    std::uint64_t seed);

}  // namespace edkit

#endif  // EDKIT_SA_HPP
