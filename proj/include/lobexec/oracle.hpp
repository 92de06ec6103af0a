#pragma once

#include "lobexec/dynamics.hpp"
#include "lobexec/shape.hpp"
#include "lobexec/strategy.hpp"

#include <cstdint>
#include <vector>

namespace lobexec {

/// Brute-force minimum of C^(i) over strategies summing to X0. Built only on
/// the cost functional and its gradient, never on the solver.
struct OracleResult {
    Strategy best_strategy;
    double best_cost = 0.0;
    int starts = 0;
    bool converged = false;
    int converged_starts = 0;
    double grid_resolution = 0.0;  // lattice spacing (grid search only)
    std::vector<double> start_costs;
    std::vector<bool> start_converged;
};

/// Multi-start descent (Barzilai-Borwein trial steps with Armijo backtracking)
/// on the first N trades, with xi_N = X0 - sum eliminated. Starts: uniform
/// split, everything at t_0, then seeded random splits. Starts run
/// concurrently. Throws NotConverged when no start converges.
OracleResult minimize_cost(const MarketParams& params, const ShapeFunction& shape, int starts = 4,
                           std::uint64_t seed = 0);

/// Exhaustive lattice over [-X0/4, 5 X0/4] per free coordinate (N <= 3).
/// Throws BudgetExceeded above 1e8 lattice points.
OracleResult grid_search(const MarketParams& params, const ShapeFunction& shape, double resolution);

/// Worst |analytic - central difference| over all partials, relative to the
/// largest analytic partial. Step per coordinate: 1e-5 max(1, |x_i|).
double gradient_check(const MarketParams& params, const ShapeFunction& shape, const Strategy& strategy);

}  // namespace lobexec
