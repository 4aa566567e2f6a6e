#ifndef EDKIT_PSO_HPP
#define EDKIT_PSO_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "edkit/dispatch.hpp"
#include "edkit/rng.hpp"

namespace edkit {

/// Swarm parameters. Defaults follow the usual three-unit study setup:
/// 10 particles, c1 = c2 = 1.99, inertia scheduled from 0.9 down to 0.4
/// over 200 iterations.
struct PsoParams {
    int n_particles = 10;
    int iter_max = 200;
    double c1 = 1.99;
    double c2 = 1.99;
    double w_max = 0.9;
    double w_min = 0.4;
    double penalty_weight = 1e6;  // $/h per MW of balance residual
};

struct Particle {
    std::vector<double> position;  // MW per unit
    std::vector<double> velocity;  // MW per iteration
    std::vector<double> pbest_position;
    double pbest_fitness = 0.0;
};

struct Swarm {
    std::vector<Particle> particles;
    std::vector<double> gbest_position;
    double gbest_fitness = 0.0;
    int iteration = 0;
};

/// Best/mean cost per iteration, row 0 being the initial state.
struct ConvergenceTrace {
    struct Row {
        int iteration = 0;
        double best_cost = 0.0;
        double mean_cost = 0.0;
    };
    std::vector<Row> rows;
};

/// Linearly scheduled inertia: w_max - ((w_max - w_min) / iter_max) * iter.
double inertia_weight(const PsoParams& params, int iter);

/// Velocity update with explicit random factors, one r1/r2 pair per
/// dimension: v' = w*v + c1*r1*(pbest - x) + c2*r2*(gbest - x).
std::vector<double> update_velocity(const Particle& particle,
                                    std::span<const double> gbest,
                                    double w,
                                    const PsoParams& params,
                                    std::span<const double> r1,
                                    std::span<const double> r2);

/// Same update drawing fresh uniform [0,1) factors from rng, r1 before r2
/// for each dimension in order.
std::vector<double> update_velocity(const Particle& particle,
                                    std::span<const double> gbest,
                                    double w,
                                    const PsoParams& params,
                                    Rng& rng);

/// Clamp each component to [-0.5 * p_min_i, +0.5 * p_max_i].
std::vector<double> clamp_velocity(std::vector<double> velocity,
                                   const DispatchProblem& problem);

/// x' = x + v, clamped per dimension to the unit limits.
std::vector<double> update_position(const Particle& particle,
                                    std::span<const double> velocity,
                                    const DispatchProblem& problem);

/// Evaluation function: fuel cost plus penalty_weight * |balance residual|.
/// The penalty prices vectors whose repair was cut short by a binding clamp.
double fitness(const DispatchProblem& problem,
               std::span<const double> power,
               const PsoParams& params);

/// Random swarm: positions uniform within unit limits and repaired onto
/// the balance, velocities uniform within the clamp bounds, pbest seeded
/// with the initial position, gbest with the best pbest. Per particle the
/// draw order is position dimensions first, then velocity dimensions.
Swarm init_swarm(const DispatchProblem& problem, const PsoParams& params, Rng& rng);

/// Advance the swarm by one iteration (velocity/position updates against
/// the gbest of the previous iteration, balance repair with the dependent
/// unit cycling as iter mod N, then the pbest/gbest bookkeeping pass).
/// Returns the mean fitness of the updated particles.
double pso_step(const DispatchProblem& problem, const PsoParams& params,
                Swarm& swarm, int iter, Rng& rng);

/// Full PSO solve; deterministic per seed.
std::pair<DispatchSolution, ConvergenceTrace> pso_solve(
    const DispatchProblem& problem, const PsoParams& params, std::uint64_t seed);

}  // namespace edkit

#endif  // EDKIT_PSO_HPP
