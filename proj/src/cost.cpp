#include "lobexec/cost.hpp"

#include "lobexec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lobexec {

double order_cost(const ShapeFunction& shape, double d_pre, double d_post, double a0) {
    if (d_pre == d_post) return 0.0;
    const double volume = shape.volume(d_post) - shape.volume(d_pre);
    return a0 * volume + shape.moment(d_post) - shape.moment(d_pre);
}

double impact_cost(const MarketParams& params, const ShapeFunction& shape, const Strategy& strategy) {
    double total = 0.0;
    for (const auto& p : replay(params, shape, strategy)) {
        if (p.pre.spread != p.post.spread) total += shape.moment(p.post.spread) - shape.moment(p.pre.spread);
    }
    return total;
}

double impact_cost_g_form(const MarketParams& params, const ShapeFunction& shape, const Strategy& strategy) {
    params.validate();
    check_admissible(strategy, params);
    const double a = params.decay_factor();
    double total = 0.0;
    if (params.mode == ResilienceMode::VolumeRecovery) {
        double e = 0.0;
        for (double x : strategy.trades) {
            total += shape.eating_cost(e + x) - shape.eating_cost(e);
            e = a * (e + x);
        }
    } else {
        double d = 0.0;
        for (double x : strategy.trades) {
            const double post = x + shape.volume(d);
            total += shape.eating_cost(post) - shape.moment(d);
            d = a * shape.inverse_volume(post);
        }
    }
    return total;
}

double impact_cost_unrolled(const MarketParams& params, const ShapeFunction& shape, const Strategy& strategy) {
    params.validate();
    check_admissible(strategy, params);
    if (params.mode != ResilienceMode::VolumeRecovery) {
        throw InvalidParam("the unrolled cost form exists for model 1 only");
    }
    const double a = params.decay_factor();
    const auto& x = strategy.trades;
    double total = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) {
        double after = 0.0;
        for (std::size_t i = 0; i <= n; ++i) after += std::pow(a, static_cast<double>(n - i)) * x[i];
        double before = 0.0;
        for (std::size_t i = 0; i < n; ++i) before += std::pow(a, static_cast<double>(n - i)) * x[i];
        total += shape.eating_cost(after) - shape.eating_cost(before);
    }
    return total;
}

double ow_cost(double q, double lambda, const MarketParams& params, const Strategy& strategy, double a0) {
    params.validate();
    if (!(q > 0.0)) throw InvalidParam("block depth q must be positive");
    const double kappa = 1.0 / q - lambda;
    if (!(kappa > 0.0)) throw InvalidParam("permanent impact lambda must be < 1/q");
    check_admissible(strategy, params);
    const double a = params.decay_factor();
    double sum = 0.0, squares = 0.0, cross = 0.0, carried = 0.0;
    for (double x : strategy.trades) {
        cross += carried * x;
        carried = a * (carried + x);
        sum += x;
        squares += x * x;
    }
    return a0 * sum + 0.5 * lambda * sum * sum + kappa * cross + 0.5 * kappa * squares;
}

std::vector<double> analytic_gradient(const MarketParams& params, const ShapeFunction& shape,
                                      const Strategy& strategy) {
    const auto path = replay(params, shape, strategy);
    const double a = params.decay_factor();
    const std::size_t n = path.size();
    std::vector<double> grad(n);
    grad[n - 1] = path[n - 1].post.spread;
    for (std::size_t i = n - 1; i-- > 0;) {
        const double carry = grad[i + 1] - path[i + 1].pre.spread;
        if (params.mode == ResilienceMode::VolumeRecovery) {
            grad[i] = path[i].post.spread + a * carry;
        } else {
            const double ratio = a * shape.density(path[i + 1].pre.spread) / shape.density(path[i].post.spread);
            grad[i] = path[i].post.spread + ratio * carry;
        }
    }
    return grad;
}

double lagrange_residual(const std::vector<double>& gradient) {
    if (gradient.empty()) return 0.0;
    const double mean = std::accumulate(gradient.begin(), gradient.end(), 0.0) / gradient.size();
    double worst = 0.0;
    for (double g : gradient) worst = std::max(worst, std::abs(g - mean));
    if (worst == 0.0) return 0.0;
    return worst / std::abs(mean);
}

CostReport cost_report(const MarketParams& params, const ShapeFunction& shape, const Strategy& strategy,
                       double a0) {
    check_admissible(strategy, params);
    CostReport report;
    for (const auto& p : replay(params, shape, strategy)) {
        report.per_trade.push_back(order_cost(shape, p.pre.spread, p.post.spread, a0));
        if (p.pre.spread != p.post.spread) {
            report.impact_term += shape.moment(p.post.spread) - shape.moment(p.pre.spread);
        }
    }
    report.base_term = a0 * params.x0;
    report.total = report.base_term + report.impact_term;
    report.lagrange_residual = lagrange_residual(analytic_gradient(params, shape, strategy));
    return report;
}

}  // namespace lobexec
