#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace testing_support {

inline double rel_diff(double x, double y) {
    const double scale = std::max(std::abs(x), std::abs(y));
    return scale == 0.0 ? 0.0 : std::abs(x - y) / scale;
}

/// Random split of `total` into `parts` positive pieces.
inline std::vector<double> random_split(std::mt19937_64& rng, double total, std::size_t parts) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<double> w(parts);
    double sum = 0.0;
    for (auto& v : w) sum += (v = u(rng));
    for (auto& v : w) v *= total / sum;
    return w;
}

/// Random strategy summing to `total` with entries of both signs.
inline std::vector<double> random_mixed(std::mt19937_64& rng, double total, std::size_t parts) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> w(parts);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < parts; ++i) sum += (w[i] = u(rng) * total);
    w.back() = total - sum;
    return w;
}

}  // namespace testing_support
