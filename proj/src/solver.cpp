#include "lobexec/solver.hpp"

#include "lobexec/cost.hpp"
#include "lobexec/errors.hpp"
#include "lobexec/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace lobexec {

namespace {

constexpr int kGeometricPoints = 64;
constexpr int kUniformPoints = 256;
constexpr double kLowerEdge = 1e-12;      // scan starts at this fraction of X0
constexpr double kPoleResidual = 1e-6;    // residual (relative to scale) above which a bracket is a pole

struct RootScan {
    std::vector<double> roots;
    int sign_changes = 0;
};

// Brackets every sign change of fn on (lo, hi] and refines each to a few ulp.
// Points past the first OutOfDomain evaluation are dropped; brackets whose
// refined residual stays large straddle a pole rather than a root.
RootScan scan_roots(const std::function<double(double)>& fn, double lo, double hi, double scale) {
    std::vector<double> points;
    for (int k = 0; k < kGeometricPoints; ++k) {
        points.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / (kGeometricPoints - 1)));
    }
    for (int k = 1; k <= kUniformPoints; ++k) points.push_back(hi * k / kUniformPoints);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    std::vector<std::pair<double, double>> samples;
    for (double p : points) {
        double v;
        try {
            v = fn(p);
        } catch (const OutOfDomain&) {
            break;
        }
        if (std::isfinite(v)) samples.emplace_back(p, v);
    }

    RootScan out;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto [x1, v1] = samples[i];
        if (v1 == 0.0) {
            out.roots.push_back(x1);
            continue;
        }
        if (i + 1 == samples.size()) break;
        const auto [x2, v2] = samples[i + 1];
        if (v2 == 0.0 || (v1 > 0.0) == (v2 > 0.0)) continue;
        ++out.sign_changes;
        const auto r = numerics::find_root(fn, x1, x2, v1, v2);
        if (r.residual <= kPoleResidual * scale) out.roots.push_back(r.x);
    }
    return out;
}

void require_decay(double a) {
    if (!(a > 0.0 && a < 1.0)) throw InvalidParam("decay factor a must lie in (0, 1)");
}

[[noreturn]] void refuse(const ValidationReport& report) {
    throw PreconditionFailed(to_string(report.verdict) + ": " + report.detail, report.witness,
                             report.witness_value);
}

OptimalSchedule zero_schedule(const MarketParams& params) {
    OptimalSchedule s;
    s.model = params.mode;
    s.strategy.trades.assign(static_cast<std::size_t>(params.intervals) + 1, 0.0);
    return s;
}

OptimalSchedule solve_generic(MarketParams params, const ShapeFunction& shape, const SolveOptions& options,
                              ResilienceMode mode) {
    params.mode = mode;
    params.validate();
    if (params.x0 == 0.0) return zero_schedule(params);
    const double a = params.decay_factor();
    require_decay(a);

    OptimalSchedule schedule;
    schedule.model = mode;
    auto& diag = schedule.diagnostics;
    if (options.check_preconditions) {
        diag.validation = mode == ResilienceMode::VolumeRecovery
                              ? validate_model1(shape, a, options.range_factor * params.x0)
                              : validate_model2(shape, a, options.range_factor * params.x0);
        diag.preconditions_checked = true;
        if (!diag.validation.ok()) refuse(diag.validation);
    }

    const CharacteristicFunctions cf(params, shape);
    const double scale = std::max(std::abs(shape.inverse_volume(params.x0)), std::numeric_limits<double>::min());
    auto scan = scan_roots([&](double y) { return cf.equation(y); }, kLowerEdge * params.x0, params.x0, scale);
    diag.sign_changes = scan.sign_changes;
    diag.candidate_roots = scan.roots;
    if (scan.roots.empty()) {
        std::ostringstream os;
        os << "characteristic equation of model " << model_number(mode) << " has no root on (0, X0]";
        throw NoRootInBracket(os.str());
    }

    schedule.xi0 = scan.roots.front();
    diag.root_residual = std::abs(cf.equation(schedule.xi0)) / scale;
    schedule.strategy = strategy_from_xi0(params, shape, schedule.xi0);

    if (options.check_preconditions) {
        if (mode == ResilienceMode::SpreadRecovery) {
            const double x = shape.inverse_volume(schedule.xi0);
            const double gx = cf.g(x);
            if (!(gx > 0.0)) throw PreconditionFailed("g(F^-1(xi0)) <= 0 at the solution", x, gx);
        }
        for (std::size_t n = 0; n < schedule.strategy.size(); ++n) {
            if (!(schedule.strategy[n] > 0.0)) {
                throw PreconditionFailed("optimal schedule has a non-positive trade at index " + std::to_string(n),
                                         static_cast<double>(n), schedule.strategy[n]);
            }
        }
    }
    diag.lagrange_residual = lagrange_residual(analytic_gradient(params, shape, schedule.strategy));
    return schedule;
}

}  // namespace

CharacteristicFunctions::CharacteristicFunctions(const MarketParams& params, const ShapeFunction& shape)
    : params_(params), shape_(shape), a_(params.decay_factor()) {}

double CharacteristicFunctions::h1(double y) const {
    return shape_.inverse_volume(y) - a_ * shape_.inverse_volume(a_ * y);
}

double CharacteristicFunctions::hhat1(double y) const {
    const double remaining = params_.x0 - params_.intervals * y * (1.0 - a_);
    return h1(y) - (1.0 - a_) * shape_.inverse_volume(remaining);
}

double CharacteristicFunctions::h2(double x) const {
    if (x == 0.0) return 0.0;
    return x * shape_.decay_gap(x, a_, 2) / shape_.decay_gap(x, a_, 1);
}

double CharacteristicFunctions::hhat2(double y) const {
    const double intermediate = y - shape_.volume(a_ * shape_.inverse_volume(y));
    return -shape_.inverse_volume(params_.x0 - params_.intervals * intermediate);
}

double CharacteristicFunctions::g(double x) const { return shape_.decay_gap(x, a_, 1); }

double CharacteristicFunctions::model2_equation(double y) const {
    return h2(shape_.inverse_volume(y)) + hhat2(y);
}

double CharacteristicFunctions::equation(double y) const {
    return params_.mode == ResilienceMode::VolumeRecovery ? hhat1(y) : model2_equation(y);
}

Strategy strategy_from_xi0(const MarketParams& params, const ShapeFunction& shape, double xi0) {
    const double a = params.decay_factor();
    const int n = params.intervals;
    const double intermediate = params.mode == ResilienceMode::VolumeRecovery
                                    ? xi0 * (1.0 - a)
                                    : xi0 - shape.volume(a * shape.inverse_volume(xi0));
    Strategy s;
    s.trades.assign(static_cast<std::size_t>(n) + 1, intermediate);
    s.trades.front() = xi0;
    s.trades.back() = params.x0 - xi0 - (n - 1) * intermediate;
    return s;
}

OptimalSchedule solve_model1(const MarketParams& params, const ShapeFunction& shape, const SolveOptions& options) {
    return solve_generic(params, shape, options, ResilienceMode::VolumeRecovery);
}

OptimalSchedule solve_model2(const MarketParams& params, const ShapeFunction& shape, const SolveOptions& options) {
    return solve_generic(params, shape, options, ResilienceMode::SpreadRecovery);
}

OptimalSchedule solve(const MarketParams& params, const ShapeFunction& shape, const SolveOptions& options) {
    return solve_generic(params, shape, options, params.mode);
}

OptimalSchedule solve_block(const MarketParams& params, double q) {
    params.validate();
    const auto shape = ShapeFunction::block(q);
    const double a = params.decay_factor();
    const int n = params.intervals;
    OptimalSchedule s;
    s.model = params.mode;
    s.xi0 = params.x0 / ((n - 1) * (1.0 - a) + 2.0);
    s.strategy.trades.assign(static_cast<std::size_t>(n) + 1, 0.0);
    if (n >= 2) {
        const double intermediate = (params.x0 - 2.0 * s.xi0) / (n - 1);
        std::fill(s.strategy.trades.begin() + 1, s.strategy.trades.end() - 1, intermediate);
    }
    s.strategy.trades.front() = s.xi0;
    s.strategy.trades.back() = s.xi0;
    s.diagnostics.validation.detail = "closed form";
    if (params.x0 > 0.0) {
        s.diagnostics.lagrange_residual = lagrange_residual(analytic_gradient(params, shape, s.strategy));
    }
    return s;
}

ContinuousLimit continuous_limit(ResilienceMode mode, const ShapeFunction& shape, double x0, double rho,
                                 double horizon) {
    if (!(x0 > 0.0) || !(rho > 0.0) || !(horizon > 0.0)) {
        throw InvalidParam("continuous limit needs X0 > 0, rho > 0 and T > 0");
    }
    const double rt = rho * horizon;
    std::function<double(double)> equation;
    if (mode == ResilienceMode::VolumeRecovery) {
        equation = [&](double y) {
            const double x = shape.inverse_volume(y);
            return x + y / shape.density(x) - shape.inverse_volume(x0 - rt * y);
        };
    } else {
        equation = [&](double y) {
            const double x = shape.inverse_volume(y);
            const double f = shape.density(x);
            const double h = x * (1.0 + f / (f + x * shape.density_slope(x)));
            return h - shape.inverse_volume(x0 - rt * x * f);
        };
    }
    const double scale = std::abs(shape.inverse_volume(x0));
    const auto scan = scan_roots(equation, kLowerEdge * x0, x0, scale);
    if (scan.roots.empty()) throw NoRootInBracket("continuous-time limit equation has no root on (0, X0]");

    ContinuousLimit limit;
    limit.initial_block = scan.roots.front();
    if (mode == ResilienceMode::VolumeRecovery) {
        limit.rate = rho * limit.initial_block;
    } else {
        const double x = shape.inverse_volume(limit.initial_block);
        limit.rate = rho * x * shape.density(x);
    }
    limit.final_block = x0 - limit.initial_block - limit.rate * horizon;
    return limit;
}

double sqrt_shape_xi0(double q, double mu, double x0, int intervals, double a) {
    if (!(q > 0.0)) throw InvalidParam("sqrt shape depth q must be positive");
    if (!(mu >= 0.0)) throw InvalidParam("sqrt shape slope mu must be >= 0");
    if (!(x0 >= 0.0)) throw InvalidParam("X0 must be >= 0");
    if (intervals < 1) throw InvalidParam("number of intervals N must be >= 1");
    require_decay(a);
    // Rationalised root of the quadratic in xi0; stays finite where the
    // textbook form divides by a vanishing leading coefficient.
    const double n = intervals;
    const double m = mu / (2.0 * q);
    const double big_a = 1.0 + a + n * (1.0 - a) * (1.0 + m * x0);
    const double lead = n + 1.0 - a * (n - 1.0);
    const double big_b =
        lead * lead + 2.0 * m * x0 * (n * (1.0 - a * a) + (1.0 + a + a * a) * (1.0 + 0.5 * m * x0));
    return x0 * (2.0 + m * x0) / (big_a + std::sqrt(big_b));
}

}  // namespace lobexec
