#pragma once

#include "lobexec/shape.hpp"
#include "lobexec/strategy.hpp"

#include <iosfwd>
#include <vector>

namespace lobexec {

enum class ResilienceMode {
    VolumeRecovery = 1,  // E decays exponentially (model 1)
    SpreadRecovery = 2,  // D decays exponentially (model 2)
};

int model_number(ResilienceMode mode) noexcept;
/// Accepts 1 or 2; throws InvalidParam otherwise.
ResilienceMode mode_from_number(int model);

struct MarketParams {
    double x0 = 100000.0;
    double horizon = 1.0;
    int intervals = 10;
    double rho = 20.0;
    ResilienceMode mode = ResilienceMode::VolumeRecovery;

    double tau() const noexcept { return horizon / intervals; }
    /// a = exp(-rho tau)
    double decay_factor() const noexcept;
    /// Throws InvalidParam unless x0 >= 0, horizon > 0, intervals >= 1, rho > 0.
    void validate() const;
};

/// Collapsed one-sided state (E, D) with E = F(D).
struct SimplifiedState {
    double volume = 0.0;
    double spread = 0.0;
};

/// Ask side consumed by buys (E^A, D^A >= 0), bid side by sells (E^B, D^B <= 0).
struct BookState {
    SimplifiedState ask;
    SimplifiedState bid;
};

SimplifiedState apply_order(const SimplifiedState& state, const ShapeFunction& shape, double x);
BookState apply_order(const BookState& state, const ShapeFunction& shape, double x);

/// Resilience over elapsed time s. The native variable of the mode decays
/// and the other one is recomputed from it.
SimplifiedState decay(const SimplifiedState& state, const ShapeFunction& shape, ResilienceMode mode,
                      double s, double rho);
BookState decay(const BookState& state, const ShapeFunction& shape, ResilienceMode mode, double s,
                double rho);

struct TrajectoryPoint {
    int n = 0;
    double t = 0.0;
    SimplifiedState pre;   // just before the trade at t_n
    SimplifiedState post;  // just after it
};
using Trajectory = std::vector<TrajectoryPoint>;

struct BookTrajectoryPoint {
    int n = 0;
    double t = 0.0;
    BookState pre;
    BookState post;
};
using BookTrajectory = std::vector<BookTrajectoryPoint>;

Trajectory replay(const MarketParams& params, const ShapeFunction& shape, const Strategy& strategy);
BookTrajectory replay_book(const MarketParams& params, const ShapeFunction& shape, const Strategy& strategy);

/// CSV with header `n,t,E_pre,D_pre,E_post,D_post`, full precision.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

}  // namespace lobexec
