#include "edkit/pso.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace edkit {

namespace {

void validate_params(const PsoParams& params)
{
    if (params.n_particles < 1)
        throw std::invalid_argument("pso: n_particles must be >= 1");
    if (params.iter_max < 1)
        throw std::invalid_argument("pso: iter_max must be >= 1");
    if (!(params.c1 > 0.0) || !(params.c2 > 0.0))
        throw std::invalid_argument("pso: c1 and c2 must be > 0");
    if (!(params.w_min >= 0.0) || !(params.w_min <= params.w_max))
        throw std::invalid_argument("pso: need 0 <= w_min <= w_max");
    if (params.penalty_weight < 0.0)
        throw std::invalid_argument("pso: penalty_weight must be >= 0");
}

void require_feasible(const DispatchProblem& problem)
{
    validate(problem);
    if (auto reason = check_feasible(problem))
        throw InfeasibleError(*reason);
}

}  // namespace

double inertia_weight(const PsoParams& params, int iter)
{
    return params.w_max -
           ((params.w_max - params.w_min) / params.iter_max) * iter;
}

std::vector<double> update_velocity(const Particle& particle,
                                    std::span<const double> gbest,
                                    double w,
                                    const PsoParams& params,
                                    std::span<const double> r1,
                                    std::span<const double> r2)
{
    const std::size_t n = particle.position.size();
    std::vector<double> v(n);
    for (std::size_t d = 0; d < n; ++d) {
        v[d] = w * particle.velocity[d] +
               params.c1 * r1[d] * (particle.pbest_position[d] - particle.position[d]) +
               params.c2 * r2[d] * (gbest[d] - particle.position[d]);
    }
    return v;
}

std::vector<double> update_velocity(const Particle& particle,
                                    std::span<const double> gbest,
                                    double w,
                                    const PsoParams& params,
                                    Rng& rng)
{
    const std::size_t n = particle.position.size();
    std::vector<double> r1(n), r2(n);
    for (std::size_t d = 0; d < n; ++d) {
        r1[d] = rng.uniform();
        r2[d] = rng.uniform();
    }
    return update_velocity(particle, gbest, w, params, r1, r2);
}

std::vector<double> clamp_velocity(std::vector<double> velocity,
                                   const DispatchProblem& problem)
{
    for (std::size_t i = 0; i < velocity.size(); ++i) {
        const auto& u = problem.units[i];
        velocity[i] = std::clamp(velocity[i], -0.5 * u.p_min, 0.5 * u.p_max);
    }
    return velocity;
}

std::vector<double> update_position(const Particle& particle,
                                    std::span<const double> velocity,
                                    const DispatchProblem& problem)
{
    const std::size_t n = particle.position.size();
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& u = problem.units[i];
        x[i] = std::clamp(particle.position[i] + velocity[i], u.p_min, u.p_max);
    }
    return x;
}

double fitness(const DispatchProblem& problem,
               std::span<const double> power,
               const PsoParams& params)
{
    return total_cost(problem, power) +
           params.penalty_weight * std::abs(power_mismatch(problem, power));
}

Swarm init_swarm(const DispatchProblem& problem, const PsoParams& params, Rng& rng)
{
    validate_params(params);
    require_feasible(problem);

    const std::size_t n = problem.n_units();
    Swarm swarm;
    swarm.particles.resize(params.n_particles);
    for (auto& p : swarm.particles) {
        p.position.resize(n);
        p.velocity.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& u = problem.units[i];
            p.position[i] = rng.uniform(u.p_min, u.p_max);
        }
        for (std::size_t i = 0; i < n; ++i) {
            const auto& u = problem.units[i];
            p.velocity[i] = rng.uniform(-0.5 * u.p_min, 0.5 * u.p_max);
        }
        p.position = repair_balance(problem, std::move(p.position), 0);
        p.pbest_position = p.position;
        p.pbest_fitness = fitness(problem, p.position, params);
    }

    swarm.gbest_position = swarm.particles.front().pbest_position;
    swarm.gbest_fitness = swarm.particles.front().pbest_fitness;
    for (const auto& p : swarm.particles) {
        if (p.pbest_fitness < swarm.gbest_fitness) {
            swarm.gbest_fitness = p.pbest_fitness;
            swarm.gbest_position = p.pbest_position;
        }
    }
    swarm.iteration = 0;
    return swarm;
}

double pso_step(const DispatchProblem& problem, const PsoParams& params,
                Swarm& swarm, int iter, Rng& rng)
{
    const std::size_t n = problem.n_units();
    const double w = inertia_weight(params, iter);
    const std::size_t dependent = static_cast<std::size_t>(iter) % n;

    // All particles move against the gbest of the previous iteration;
    // gbest itself is refreshed afterwards.
    const std::vector<double> gbest_snapshot = swarm.gbest_position;

    double fitness_sum = 0.0;
    for (auto& p : swarm.particles) {
        p.velocity = clamp_velocity(
            update_velocity(p, gbest_snapshot, w, params, rng), problem);
        p.position = repair_balance(
            problem, update_position(p, p.velocity, problem), dependent);
        const double f = fitness(problem, p.position, params);
        fitness_sum += f;
        if (f < p.pbest_fitness) {
            p.pbest_fitness = f;
            p.pbest_position = p.position;
        }
    }

    for (const auto& p : swarm.particles) {
        if (p.pbest_fitness < swarm.gbest_fitness) {
            swarm.gbest_fitness = p.pbest_fitness;
            swarm.gbest_position = p.pbest_position;
        }
    }
    swarm.iteration = iter;
    return fitness_sum / static_cast<double>(swarm.particles.size());
}

std::pair<DispatchSolution, ConvergenceTrace> pso_solve(
    const DispatchProblem& problem, const PsoParams& params, std::uint64_t seed)
{
    Rng rng(seed);
    Swarm swarm = init_swarm(problem, params, rng);

    ConvergenceTrace trace;
    trace.rows.reserve(params.iter_max + 1);
    double mean0 = 0.0;
    for (const auto& p : swarm.particles) mean0 += p.pbest_fitness;
    mean0 /= static_cast<double>(swarm.particles.size());
    trace.rows.push_back({0, swarm.gbest_fitness, mean0});

    for (int iter = 1; iter <= params.iter_max; ++iter) {
        const double mean = pso_step(problem, params, swarm, iter, rng);
        trace.rows.push_back({iter, swarm.gbest_fitness, mean});
    }

    DispatchSolution solution;
    solution.power = swarm.gbest_position;
    solution.cost = total_cost(problem, solution.power);
    solution.loss =
        problem.loss ? transmission_loss(*problem.loss, solution.power) : 0.0;
    solution.residual = std::abs(power_mismatch(problem, solution.power));
    solution.solver_id = "pso";
    solution.seed = seed;
    return {std::move(solution), std::move(trace)};
}

}  // namespace edkit
