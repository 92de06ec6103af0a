#pragma once

#include "lobexec/dynamics.hpp"
#include "lobexec/shape.hpp"
#include "lobexec/strategy.hpp"
#include "lobexec/validators.hpp"

#include <vector>

namespace lobexec {

struct SolveOptions {
    /// Run the shape validators first and refuse schedules that violate the
    /// assumptions behind the closed forms. Disabling this is for diagnostics only.
    bool check_preconditions = true;
    /// Validators scan volumes up to range_factor * X0.
    double range_factor = 2.0;
};

struct ScheduleDiagnostics {
    double root_residual = 0.0;  // |characteristic equation| / |F^-1(X0)| at xi0
    double lagrange_residual = 0.0;
    ValidationReport validation;
    bool preconditions_checked = false;
    int sign_changes = 0;                // brackets seen by the root scan
    std::vector<double> candidate_roots;  // every accepted root, ascending
};

struct OptimalSchedule {
    Strategy strategy;
    double xi0 = 0.0;
    ResilienceMode model = ResilienceMode::VolumeRecovery;
    ScheduleDiagnostics diagnostics;
};

/// The scalar functions whose roots characterise the optimum.
class CharacteristicFunctions {
public:
    CharacteristicFunctions(const MarketParams& params, const ShapeFunction& shape);

    double h1(double y) const;
    /// h1(y) - (1-a) F^-1(X0 - N y (1-a)); its root is xi0 in model 1.
    double hhat1(double y) const;
    double h2(double x) const;
    /// -F^-1(X0 - N [y - F(a F^-1(y))])
    double hhat2(double y) const;
    double g(double x) const;
    /// h2(F^-1(y)) + hhat2(y); its root is xi0 in model 2.
    double model2_equation(double y) const;
    /// Characteristic equation of the mode in params.
    double equation(double y) const;

private:
    MarketParams params_;
    ShapeFunction shape_;
    double a_;
};

/// Expands xi0 into the full schedule for the mode in params.
Strategy strategy_from_xi0(const MarketParams& params, const ShapeFunction& shape, double xi0);

OptimalSchedule solve_model1(const MarketParams& params, const ShapeFunction& shape,
                             const SolveOptions& options = {});
OptimalSchedule solve_model2(const MarketParams& params, const ShapeFunction& shape,
                             const SolveOptions& options = {});
/// Dispatches on params.mode.
OptimalSchedule solve(const MarketParams& params, const ShapeFunction& shape, const SolveOptions& options = {});

/// Closed form for a block book: xi0 = xi_N = X0 / ((N-1)(1-a) + 2).
OptimalSchedule solve_block(const MarketParams& params, double q);

struct ContinuousLimit {
    double initial_block = 0.0;
    double rate = 0.0;  // shares per unit time
    double final_block = 0.0;
};

ContinuousLimit continuous_limit(ResilienceMode mode, const ShapeFunction& shape, double x0, double rho,
                                 double horizon);

/// Closed-form xi0 in model 1 for f(x) = q / sqrt(1 + mu |x|).
double sqrt_shape_xi0(double q, double mu, double x0, int intervals, double a);

}  // namespace lobexec
