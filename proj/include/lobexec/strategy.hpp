#pragma once

#include <cstddef>
#include <vector>

namespace lobexec {

struct MarketParams;

/// Trade sizes xi_0..xi_N at t_0..t_N; positive entries are buys.
struct Strategy {
    std::vector<double> trades;

    double total() const noexcept;
    std::size_t size() const noexcept { return trades.size(); }
    double operator[](std::size_t i) const { return trades[i]; }
};

/// Throws InvalidParam unless the strategy has N+1 finite entries summing to
/// X0 within 1e-9 of the traded scale.
void check_admissible(const Strategy& strategy, const MarketParams& params);

}  // namespace lobexec
