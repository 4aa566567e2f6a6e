#include "edkit/sa.hpp"

#include <algorithm>
#include <cmath>

namespace edkit {

namespace {

void validate_params(const SaParams& params)
{
    if (params.t0 < 0.0)
        throw std::invalid_argument("sa: t0 must be > 0, or 0 for auto");
    if (!(params.alpha > 0.0) || !(params.alpha < 1.0))
        throw std::invalid_argument("sa: alpha must lie in (0, 1)");
    if (params.moves_per_temp < 1)
        throw std::invalid_argument("sa: moves_per_temp must be >= 1");
    if (!(params.neighbor_scale > 0.0) || params.neighbor_scale > 1.0)
        throw std::invalid_argument("sa: neighbor_scale must lie in (0, 1]");
}

void require_feasible(const DispatchProblem& problem)
{
    validate(problem);
    if (auto reason = check_feasible(problem))
        throw InfeasibleError(*reason);
}

std::vector<double> random_repaired_point(const DispatchProblem& problem, Rng& rng)
{
    std::vector<double> p(problem.n_units());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto& u = problem.units[i];
        p[i] = rng.uniform(u.p_min, u.p_max);
    }
    return repair_balance(problem, std::move(p), 0);
}

double population_stddev(std::span<const double> values)
{
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    return std::sqrt(var / static_cast<double>(values.size()));
}

// Decorrelated second stream for the annealing decisions inside
// hybrid_solve, so the swarm draws match pso_solve draw for draw.
std::uint64_t annealing_stream_seed(std::uint64_t seed)
{
    return seed ^ 0x9e3779b97f4a7c15ull;
}

}  // namespace

bool metropolis_accept(double delta, double temperature, Rng& rng)
{
    if (!(temperature > 0.0))
        throw std::invalid_argument("metropolis_accept: temperature must be > 0");
    if (delta <= 0.0) return true;
    return rng.uniform() < std::exp(-delta / temperature);
}

double cooling_step(double temperature, const SaParams& params)
{
    return params.alpha * temperature;
}

std::vector<double> propose_neighbor(const DispatchProblem& problem,
                                     std::span<const double> power,
                                     const SaParams& params,
                                     Rng& rng)
{
    const std::size_t n = problem.n_units();
    std::vector<double> candidate(power.begin(), power.end());

    const std::size_t pick = rng.uniform_index(n);
    const auto& u = problem.units[pick];
    const double span = params.neighbor_scale * (u.p_max - u.p_min);
    candidate[pick] =
        std::clamp(candidate[pick] + rng.uniform(-span, span), u.p_min, u.p_max);

    return repair_balance(problem, std::move(candidate), (pick + 1) % n);
}

std::pair<DispatchSolution, ConvergenceTrace> sa_solve(
    const DispatchProblem& problem, const SaParams& params, int iter_max,
    std::uint64_t seed)
{
    validate_params(params);
    require_feasible(problem);
    if (iter_max < 1)
        throw std::invalid_argument("sa: iter_max must be >= 1");

    const PsoParams fitness_params;  // shared penalty weight default
    Rng rng(seed);

    std::vector<double> current = random_repaired_point(problem, rng);
    double f_current = fitness(problem, current, fitness_params);

    double temperature = params.t0;
    if (temperature <= 0.0) {
        // Auto scale: fitness spread of the start plus nine probe points.
        std::vector<double> probes{f_current};
        for (int k = 1; k < 10; ++k) {
            probes.push_back(
                fitness(problem, random_repaired_point(problem, rng), fitness_params));
        }
        temperature = std::max(population_stddev(probes), 1e-6);
    }

    std::vector<double> best = current;
    double f_best = f_current;

    ConvergenceTrace trace;
    trace.rows.reserve(iter_max + 1);
    trace.rows.push_back({0, f_best, f_current});

    for (int level = 1; level <= iter_max; ++level) {
        double level_sum = 0.0;
        for (int move = 0; move < params.moves_per_temp; ++move) {
            std::vector<double> candidate =
                propose_neighbor(problem, current, params, rng);
            const double f_candidate = fitness(problem, candidate, fitness_params);
            if (metropolis_accept(f_candidate - f_current, temperature, rng)) {
                current = std::move(candidate);
                f_current = f_candidate;
                if (f_current < f_best) {
                    f_best = f_current;
                    best = current;
                }
            }
            level_sum += f_current;
        }
        temperature = cooling_step(temperature, params);
        trace.rows.push_back(
            {level, f_best, level_sum / params.moves_per_temp});
    }

    DispatchSolution solution;
    solution.power = std::move(best);
    solution.cost = total_cost(problem, solution.power);
    solution.loss =
        problem.loss ? transmission_loss(*problem.loss, solution.power) : 0.0;
    solution.residual = std::abs(power_mismatch(problem, solution.power));
    solution.solver_id = "sa";
    solution.seed = seed;
    return {std::move(solution), std::move(trace)};
}

std::pair<DispatchSolution, ConvergenceTrace> hybrid_solve(
    const DispatchProblem& problem, const HybridParams& params,
    std::uint64_t seed)
{
    validate_params(params.sa);

    Rng pso_rng(seed);
    Rng sa_rng(annealing_stream_seed(seed));

    Swarm swarm = init_swarm(problem, params.pso, pso_rng);
    const std::size_t n = problem.n_units();

    std::vector<double> f_current(swarm.particles.size());
    for (std::size_t i = 0; i < swarm.particles.size(); ++i)
        f_current[i] = swarm.particles[i].pbest_fitness;

    double temperature = params.sa.t0 > 0.0
                             ? params.sa.t0
                             : std::max(population_stddev(f_current), 1e-6);

    ConvergenceTrace trace;
    trace.rows.reserve(params.pso.iter_max + 1);
    double mean0 = 0.0;
    for (double f : f_current) mean0 += f;
    trace.rows.push_back(
        {0, swarm.gbest_fitness, mean0 / static_cast<double>(f_current.size())});

    for (int iter = 1; iter <= params.pso.iter_max; ++iter) {
        const double w = inertia_weight(params.pso, iter);
        const std::size_t dependent = static_cast<std::size_t>(iter) % n;
        const std::vector<double> gbest_snapshot = swarm.gbest_position;

        for (std::size_t i = 0; i < swarm.particles.size(); ++i) {
            auto& p = swarm.particles[i];
            p.velocity = clamp_velocity(
                update_velocity(p, gbest_snapshot, w, params.pso, pso_rng),
                problem);
            std::vector<double> candidate = repair_balance(
                problem, update_position(p, p.velocity, problem), dependent);
            const double f_candidate = fitness(problem, candidate, params.pso);

            if (metropolis_accept(f_candidate - f_current[i], temperature, sa_rng)) {
                p.position = std::move(candidate);
                f_current[i] = f_candidate;
                if (f_candidate < p.pbest_fitness) {
                    p.pbest_fitness = f_candidate;
                    p.pbest_position = p.position;
                }
            }
        }

        for (const auto& p : swarm.particles) {
            if (p.pbest_fitness < swarm.gbest_fitness) {
                swarm.gbest_fitness = p.pbest_fitness;
                swarm.gbest_position = p.pbest_position;
            }
        }

        // Local annealing kick on the incumbent: keep only strict improvements.
        std::vector<double> probe =
            propose_neighbor(problem, swarm.gbest_position, params.sa, sa_rng);
        const double f_probe = fitness(problem, probe, params.pso);
        if (f_probe < swarm.gbest_fitness) {
            swarm.gbest_fitness = f_probe;
            swarm.gbest_position = std::move(probe);
        }

        temperature = cooling_step(temperature, params.sa);
        swarm.iteration = iter;

        double mean = 0.0;
        for (double f : f_current) mean += f;
        trace.rows.push_back(
            {iter, swarm.gbest_fitness,
             mean / static_cast<double>(f_current.size())});
    }

    DispatchSolution solution;
    solution.power = swarm.gbest_position;
    solution.cost = total_cost(problem, solution.power);
    solution.loss =
        problem.loss ? transmission_loss(*problem.loss, solution.power) : 0.0;
    solution.residual = std::abs(power_mismatch(problem, solution.power));
    solution.solver_id = "sa-pso";
    solution.seed = seed;
    return {std::move(solution), std::move(trace)};
}

}  // namespace edkit
