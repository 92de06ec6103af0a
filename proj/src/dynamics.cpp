#include "lobexec/dynamics.hpp"

#include "lobexec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace lobexec {

int model_number(ResilienceMode mode) noexcept { return static_cast<int>(mode); }

ResilienceMode mode_from_number(int model) {
    if (model == 1) return ResilienceMode::VolumeRecovery;
    if (model == 2) return ResilienceMode::SpreadRecovery;
    throw InvalidParam("model must be 1 or 2, got " + std::to_string(model));
}

double MarketParams::decay_factor() const noexcept { return std::exp(-rho * tau()); }

void MarketParams::validate() const {
    if (!(x0 >= 0.0) || !std::isfinite(x0)) throw InvalidParam("X0 must be finite and >= 0");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InvalidParam("horizon T must be > 0");
    if (intervals < 1) throw InvalidParam("number of intervals N must be >= 1");
    if (!(rho > 0.0) || !std::isfinite(rho)) throw InvalidParam("resilience rho must be > 0");
}

double Strategy::total() const noexcept {
    double s = 0.0;
    for (double x : trades) s += x;
    return s;
}

void check_admissible(const Strategy& strategy, const MarketParams& params) {
    const auto expected = static_cast<std::size_t>(params.intervals) + 1;
    if (strategy.size() != expected) {
        throw InvalidParam("strategy has " + std::to_string(strategy.size()) + " trades, expected " +
                           std::to_string(expected));
    }
    double scale = std::abs(params.x0);
    for (double x : strategy.trades) {
        if (!std::isfinite(x)) throw InvalidParam("strategy contains a non-finite trade");
        scale = std::max(scale, std::abs(x));
    }
    if (std::abs(strategy.total() - params.x0) > 1e-9 * scale) {
        throw InvalidParam("strategy trades sum to " + std::to_string(strategy.total()) + ", not X0 = " +
                           std::to_string(params.x0));
    }
}

SimplifiedState apply_order(const SimplifiedState& state, const ShapeFunction& shape, double x) {
    if (x == 0.0) return state;
    SimplifiedState next;
    next.volume = state.volume + x;
    next.spread = shape.inverse_volume(next.volume);
    return next;
}

BookState apply_order(const BookState& state, const ShapeFunction& shape, double x) {
    BookState next = state;
    if (x > 0.0) next.ask = apply_order(state.ask, shape, x);
    if (x < 0.0) next.bid = apply_order(state.bid, shape, x);
    return next;
}

SimplifiedState decay(const SimplifiedState& state, const ShapeFunction& shape, ResilienceMode mode,
                      double s, double rho) {
    if (s < 0.0) throw InvalidParam("decay time must be >= 0");
    const double factor = std::exp(-rho * s);
    SimplifiedState next;
    if (mode == ResilienceMode::VolumeRecovery) {
        next.volume = factor * state.volume;
        next.spread = shape.inverse_volume(next.volume);
    } else {
        next.spread = factor * state.spread;
        next.volume = shape.volume(next.spread);
    }
    return next;
}

BookState decay(const BookState& state, const ShapeFunction& shape, ResilienceMode mode, double s,
                double rho) {
    return {decay(state.ask, shape, mode, s, rho), decay(state.bid, shape, mode, s, rho)};
}

namespace {

template <typename State, typename Point>
std::vector<Point> run(const MarketParams& params, const ShapeFunction& shape, const Strategy& strategy) {
    params.validate();
    if (strategy.size() != static_cast<std::size_t>(params.intervals) + 1) {
        throw InvalidParam("strategy needs N+1 = " + std::to_string(params.intervals + 1) + " trades");
    }
    std::vector<Point> out;
    out.reserve(strategy.size());
    State state{};
    const double tau = params.tau();
    for (int n = 0; n <= params.intervals; ++n) {
        if (n > 0) state = decay(state, shape, params.mode, tau, params.rho);
        Point p;
        p.n = n;
        p.t = n * tau;
        p.pre = state;
        state = apply_order(state, shape, strategy[static_cast<std::size_t>(n)]);
        p.post = state;
        out.push_back(p);
    }
    return out;
}

}  // namespace

Trajectory replay(const MarketParams& params, const ShapeFunction& shape, const Strategy& strategy) {
    return run<SimplifiedState, TrajectoryPoint>(params, shape, strategy);
}

BookTrajectory replay_book(const MarketParams& params, const ShapeFunction& shape, const Strategy& strategy) {
    return run<BookState, BookTrajectoryPoint>(params, shape, strategy);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
    const auto old = out.precision(17);
    out << "n,t,E_pre,D_pre,E_post,D_post\n";
    for (const auto& p : trajectory) {
        out << p.n << ',' << p.t << ',' << p.pre.volume << ',' << p.pre.spread << ',' << p.post.volume << ','
            << p.post.spread << '\n';
    }
    out.precision(old);
}

}  // namespace lobexec
