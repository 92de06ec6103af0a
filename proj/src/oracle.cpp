#include "lobexec/oracle.hpp"

#include "lobexec/cost.hpp"
#include "lobexec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <random>

namespace lobexec {

namespace {

constexpr int kMaxIterations = 100000;
constexpr int kMaxHalvings = 80;
constexpr double kArmijo = 1e-4;
constexpr double kGradientTolerance = 1e-8;
constexpr double kStepTolerance = 1e-10;
constexpr double kInf = std::numeric_limits<double>::infinity();

Strategy expand(const std::vector<double>& free, double x0) {
    Strategy s;
    s.trades = free;
    s.trades.push_back(x0 - std::accumulate(free.begin(), free.end(), 0.0));
    return s;
}

double cost_or_inf(const MarketParams& params, const ShapeFunction& shape, const Strategy& s) {
    try {
        const double c = impact_cost(params, shape, s);
        return std::isfinite(c) ? c : kInf;
    } catch (const OutOfDomain&) {
        return kInf;
    }
}

// Gradient of the cost restricted to the constraint surface.
std::vector<double> reduced_gradient(const MarketParams& params, const ShapeFunction& shape, const Strategy& s) {
    const auto full = analytic_gradient(params, shape, s);
    std::vector<double> r(full.size() - 1);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = full[i] - full.back();
    return r;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

struct Descent {
    std::vector<double> point;
    double cost = kInf;
    bool converged = false;
};

Descent descend(const MarketParams& params, const ShapeFunction& shape, std::vector<double> z) {
    const double x0 = params.x0;
    const double eps = std::numeric_limits<double>::epsilon();
    Descent out;
    double cost = cost_or_inf(params, shape, expand(z, x0));
    if (!std::isfinite(cost)) return out;
    auto grad = reduced_gradient(params, shape, expand(z, x0));

    double step = -1.0;
    double last_move = kInf;
    std::vector<double> prev_z, prev_grad;
    for (int it = 0; it < kMaxIterations; ++it) {
        const double residual = max_abs(grad);
        if (residual == 0.0 ||
            (residual <= kGradientTolerance * (1.0 + std::abs(cost)) && last_move <= kStepTolerance * x0)) {
            out.converged = true;
            break;
        }
        if (!prev_z.empty()) {
            double ss = 0.0, sy = 0.0;
            for (std::size_t i = 0; i < z.size(); ++i) {
                const double dz = z[i] - prev_z[i], dg = grad[i] - prev_grad[i];
                ss += dz * dz;
                sy += dz * dg;
            }
            if (sy > 0.0 && std::isfinite(ss / sy)) step = ss / sy;
        }
        if (!(step > 0.0)) step = 0.01 * x0 / residual;

        double norm2 = 0.0;
        for (double g : grad) norm2 += g * g;
        std::vector<double> trial(z.size());
        double trial_cost = kInf;
        bool accepted = false;
        for (int k = 0; k < kMaxHalvings; ++k, step *= 0.5) {
            for (std::size_t i = 0; i < z.size(); ++i) trial[i] = z[i] - step * grad[i];
            trial_cost = cost_or_inf(params, shape, expand(trial, x0));
            if (trial_cost <= cost - kArmijo * step * norm2 + 10.0 * eps * std::abs(cost)) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            out.converged = residual <= kGradientTolerance * (1.0 + std::abs(cost));
            break;
        }
        last_move = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) last_move = std::max(last_move, std::abs(trial[i] - z[i]));
        prev_z = std::move(z);
        prev_grad = std::move(grad);
        z = trial;
        cost = trial_cost;
        grad = reduced_gradient(params, shape, expand(z, x0));
    }
    out.point = std::move(z);
    out.cost = cost;
    return out;
}

}  // namespace

OracleResult minimize_cost(const MarketParams& params, const ShapeFunction& shape, int starts, std::uint64_t seed) {
    params.validate();
    if (starts < 1) throw InvalidParam("oracle needs at least one start");
    const auto n = static_cast<std::size_t>(params.intervals);
    const double x0 = params.x0;

    OracleResult result;
    result.starts = starts;
    if (x0 == 0.0) {
        result.best_strategy.trades.assign(n + 1, 0.0);
        result.converged = true;
        result.converged_starts = starts;
        result.start_costs.assign(static_cast<std::size_t>(starts), 0.0);
        result.start_converged.assign(static_cast<std::size_t>(starts), true);
        return result;
    }

    // Starting points are drawn up front so the outcome does not depend on scheduling.
    std::vector<std::vector<double>> initial;
    initial.emplace_back(n, x0 / static_cast<double>(n + 1));
    std::vector<double> at_once(n, 0.0);
    at_once[0] = x0;
    initial.push_back(at_once);
    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> weight(2.0, 1.0);
    while (initial.size() < static_cast<std::size_t>(starts)) {
        std::vector<double> w(n + 1);
        for (auto& v : w) v = weight(rng);
        const double total = std::accumulate(w.begin(), w.end(), 0.0);
        std::vector<double> z(n);
        for (std::size_t i = 0; i < n; ++i) z[i] = x0 * w[i] / total;
        initial.push_back(std::move(z));
    }
    initial.resize(static_cast<std::size_t>(starts));

    std::vector<std::future<Descent>> jobs;
    for (auto& z : initial) {
        jobs.push_back(std::async(std::launch::async, [&params, &shape, z] { return descend(params, shape, z); }));
    }
    const Descent* best = nullptr;
    std::vector<Descent> runs;
    runs.reserve(jobs.size());
    for (auto& j : jobs) runs.push_back(j.get());
    for (const auto& r : runs) {
        result.start_costs.push_back(r.cost);
        result.start_converged.push_back(r.converged);
        if (!r.converged) continue;
        ++result.converged_starts;
        if (best == nullptr || r.cost < best->cost) best = &r;
    }
    if (best == nullptr) {
        throw NotConverged("oracle: none of " + std::to_string(starts) + " starts converged within " +
                           std::to_string(kMaxIterations) + " iterations");
    }
    result.converged = true;
    result.best_strategy = expand(best->point, x0);
    result.best_cost = best->cost;
    return result;
}

OracleResult grid_search(const MarketParams& params, const ShapeFunction& shape, double resolution) {
    params.validate();
    if (params.intervals > 3) throw InvalidParam("grid search supports N <= 3 only");
    if (!(resolution > 0.0)) throw InvalidParam("grid resolution must be positive");
    const auto n = static_cast<std::size_t>(params.intervals);
    const double x0 = params.x0;

    OracleResult result;
    result.starts = 1;
    result.grid_resolution = resolution;
    if (x0 == 0.0) {
        result.best_strategy.trades.assign(n + 1, 0.0);
        result.converged = true;
        result.converged_starts = 1;
        return result;
    }

    const double lo = -0.25 * x0;
    const auto per_axis = static_cast<std::uint64_t>(std::floor(1.5 * x0 / resolution)) + 1;
    double total = 1.0;
    for (std::size_t i = 0; i < n; ++i) total *= static_cast<double>(per_axis);
    if (total > 1e8) {
        throw BudgetExceeded("grid search would visit " + std::to_string(total) + " lattice points (limit 1e8)");
    }

    std::vector<std::uint64_t> index(n, 0);
    std::vector<double> z(n);
    double best_cost = kInf;
    std::vector<double> best;
    const auto count = static_cast<std::uint64_t>(total);
    for (std::uint64_t k = 0; k < count; ++k) {
        std::uint64_t rest = k;
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = lo + resolution * static_cast<double>(rest % per_axis);
            rest /= per_axis;
        }
        const double c = cost_or_inf(params, shape, expand(z, x0));
        if (c < best_cost) {
            best_cost = c;
            best = z;
        }
    }
    if (best.empty()) throw NotConverged("grid search found no lattice point inside the shape's domain");
    result.best_strategy = expand(best, x0);
    result.best_cost = best_cost;
    result.converged = true;
    result.converged_starts = 1;
    result.start_costs.push_back(best_cost);
    result.start_converged.push_back(true);
    return result;
}

double gradient_check(const MarketParams& params, const ShapeFunction& shape, const Strategy& strategy) {
    const auto analytic = analytic_gradient(params, shape, strategy);
    const double scale = max_abs(analytic);
    double worst = 0.0;
    for (std::size_t i = 0; i < strategy.size(); ++i) {
        const double h = 1e-5 * std::max(1.0, std::abs(strategy[i]));
        Strategy up = strategy, down = strategy;
        up.trades[i] += h;
        down.trades[i] -= h;
        const double fd = (impact_cost(params, shape, up) - impact_cost(params, shape, down)) / (2.0 * h);
        worst = std::max(worst, std::abs(fd - analytic[i]));
    }
    return scale > 0.0 ? worst / scale : worst;
}

}  // namespace lobexec
