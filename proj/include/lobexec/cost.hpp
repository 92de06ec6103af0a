#pragma once

#include "lobexec/dynamics.hpp"
#include "lobexec/shape.hpp"
#include "lobexec/strategy.hpp"

#include <vector>

namespace lobexec {

struct CostReport {
    double total = 0.0;
    double base_term = 0.0;    // A0 X0
    double impact_term = 0.0;  // C^(1) or C^(2)
    std::vector<double> per_trade;
    double lagrange_residual = 0.0;
};

/// Price paid for moving the spread from d_pre to d_post:
/// a0 (F(d_post) - F(d_pre)) + F~(d_post) - F~(d_pre).
double order_cost(const ShapeFunction& shape, double d_pre, double d_post, double a0);

/// Deterministic impact cost C^(i) (mode taken from params), summed as
/// F~ differences along the replayed trajectory.
double impact_cost(const MarketParams& params, const ShapeFunction& shape, const Strategy& strategy);

/// Same functional through G: model 1 sums G(E+x) - G(E), model 2 sums
/// G(x + F(D)) - F~(D), each carrying its native state variable.
double impact_cost_g_form(const MarketParams& params, const ShapeFunction& shape, const Strategy& strategy);

/// Model 1 only: sum_n G(sum_{i<=n} a^{n-i} x_i) - G(a sum_{i<n} a^{n-1-i} x_i),
/// evaluated with explicit sums (O(N^2)).
double impact_cost_unrolled(const MarketParams& params, const ShapeFunction& shape, const Strategy& strategy);

/// Block-shape cost with permanent impact lambda and kappa = 1/q - lambda:
/// a0 sum x + (lambda/2)(sum x)^2 + kappa sum_k sum_{i<k} x_i a^{k-i} x_k + (kappa/2) sum x^2.
double ow_cost(double q, double lambda, const MarketParams& params, const Strategy& strategy, double a0);

/// dC/dx_i by backward recursion over the replayed trajectory.
std::vector<double> analytic_gradient(const MarketParams& params, const ShapeFunction& shape,
                                      const Strategy& strategy);

/// max_i |g_i - mean(g)| / |mean(g)|; zero for identical components.
double lagrange_residual(const std::vector<double>& gradient);

CostReport cost_report(const MarketParams& params, const ShapeFunction& shape, const Strategy& strategy,
                       double a0 = 0.0);

}  // namespace lobexec
