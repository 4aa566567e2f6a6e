#ifndef EDKIT_ORACLES_HPP
#define EDKIT_ORACLES_HPP

#include "edkit/dispatch.hpp"

namespace edkit {

struct OracleParams {
    double lambda_tol = 1e-8;      // MW, convergence tolerance on mismatch
    int max_bisections = 200;
    double grid_resolution = 0.01; // MW
};

/// Equal-incremental-cost dispatch found by bisecting the system marginal
/// cost. Lossless instances solve one bisection; lossy instances iterate
/// classical penalty factors 1/(1 - dP_L/dP_i) around it. Deterministic;
/// throws SolverError instead of returning an unconverged answer.
DispatchSolution lambda_dispatch(const DispatchProblem& problem,
                                 const OracleParams& params = {});

/// Brute-force verification oracle for desk-scale instances (N <= 3):
/// enumerates the N-1 free units on a uniform grid, balances the last
/// unit with repair_balance, and keeps the cheapest feasible point.
DispatchSolution grid_search(const DispatchProblem& problem,
                             const OracleParams& params = {});

}  // namespace edkit

#endif  // EDKIT_ORACLES_HPP
