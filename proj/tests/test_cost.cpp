#include "lobexec/cost.hpp"
#include "lobexec/errors.hpp"
#include "lobexec/io.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace lobexec;
using testing_support::random_mixed;
using testing_support::random_split;
using testing_support::rel_diff;

namespace {

MarketParams reference_params(ResilienceMode mode, int n = 10) {
    MarketParams p;
    p.intervals = n;
    p.mode = mode;
    return p;
}

const ResilienceMode kModes[] = {ResilienceMode::VolumeRecovery, ResilienceMode::SpreadRecovery};

std::vector<double> central_difference(const MarketParams& p, const ShapeFunction& s, const Strategy& x) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double h = 1e-5 * std::max(1.0, std::abs(x[i]));
        Strategy up = x, down = x;
        up.trades[i] += h;
        down.trades[i] -= h;
        // The perturbed vectors leave the X0 constraint; cost is defined off it.
        auto q = p;
        q.x0 = up.total();
        const double cu = impact_cost(q, s, up);
        q.x0 = down.total();
        const double cd = impact_cost(q, s, down);
        g[i] = (cu - cd) / (2 * h);
    }
    return g;
}

}  // namespace

TEST_CASE("order cost examples") {
    const auto block = ShapeFunction::block(5000);
    CHECK(order_cost(block, 0.0, 2.0, 100.0) == doctest::Approx(1010000.0).epsilon(1e-15));
    CHECK(order_cost(block, 1.3, 1.3, 100.0) == 0.0);
    const auto power = ShapeFunction::power_law(5000, 1);
    CHECK(order_cost(power, 0.0, 1.0, 0.0) == doctest::Approx(1534.264097200273).epsilon(1e-13));
    CHECK(order_cost(power, 0.0, 1.0, 0.0) == doctest::Approx(5000 * (1 - std::log(2.0))).epsilon(1e-13));
}

TEST_CASE("impact cost examples") {
    const auto power = ShapeFunction::power_law(5000, 0.5);
    for (auto mode : kModes) {
        auto p = reference_params(mode);
        std::vector<double> single(11, 0.0);
        single[0] = p.x0;
        CHECK(impact_cost(p, power, Strategy{single}) ==
              doctest::Approx(power.eating_cost(p.x0)).epsilon(1e-12));
        p.x0 = 0.0;
        CHECK(impact_cost(p, power, Strategy{std::vector<double>(11, 0.0)}) == 0.0);
    }
    CHECK_THROWS_AS(impact_cost(reference_params(kModes[0]), power, Strategy{{1.0, 2.0}}), InvalidParam);
}

TEST_CASE("block book: both models give the same cost") {
    const auto block = ShapeFunction::block(5000);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 50; ++i) {
        const Strategy s{random_mixed(rng, 1e5, 11)};
        CHECK(rel_diff(impact_cost(reference_params(kModes[0]), block, s),
                       impact_cost(reference_params(kModes[1]), block, s)) <= 1e-9);
    }
}

TEST_CASE("ow cost examples and decomposition") {
    const double q = 5000;
    const auto block = ShapeFunction::block(q);
    const auto p = reference_params(kModes[0]);
    std::mt19937_64 rng(2);
    for (int i = 0; i < 50; ++i) {
        const Strategy s{random_mixed(rng, p.x0, 11)};
        CHECK(rel_diff(ow_cost(q, 0.0, p, s, 100.0) - 100.0 * p.x0, impact_cost(p, block, s)) <= 1e-9);
        const double lambda = 1e-4;
        const double kappa_inv = 1.0 / (1.0 / q - lambda);
        const double lhs = ow_cost(q, lambda, p, s, 0.0) - ow_cost(kappa_inv, 0.0, p, s, 0.0);
        CHECK(rel_diff(lhs, 0.5 * lambda * p.x0 * p.x0) <= 1e-9);
    }
    std::vector<double> single(11, 0.0);
    single[0] = p.x0;
    CHECK(ow_cost(q, 0.0, p, Strategy{single}, 0.0) == doctest::Approx(p.x0 * p.x0 / (2 * q)).epsilon(1e-15));
    CHECK_THROWS_AS(ow_cost(q, 1.0 / q, p, Strategy{single}, 0.0), InvalidParam);
}

TEST_CASE("property: cost forms agree") {
    std::mt19937_64 rng(3);
    for (const auto& shape : {ShapeFunction::block(5000), ShapeFunction::power_law(5000, 1),
                              ShapeFunction::power_law(5000, -1), ShapeFunction::power_law(5000, 0.5),
                              ShapeFunction::sqrt_shape(5000, 2)}) {
        CAPTURE(shape.name());
        for (auto mode : kModes) {
            const auto p = reference_params(mode);
            for (int i = 0; i < 30; ++i) {
                const Strategy s{i % 2 ? random_mixed(rng, p.x0, 11) : random_split(rng, p.x0, 11)};
                const double direct = impact_cost(p, shape, s);
                CHECK(rel_diff(direct, impact_cost_g_form(p, shape, s)) <= 1e-9);
                double telescoped = 0.0;
                for (const auto& pt : replay(p, shape, s)) {
                    telescoped += shape.moment(pt.post.spread) - shape.moment(pt.pre.spread);
                }
                CHECK(rel_diff(direct, telescoped) <= 1e-9);
                if (mode == ResilienceMode::VolumeRecovery) {
                    CHECK(rel_diff(direct, impact_cost_unrolled(p, shape, s)) <= 1e-9);
                }
            }
        }
    }
}

TEST_CASE("property: analytic gradient matches central differences") {
    std::mt19937_64 rng(4);
    for (const auto& shape : {ShapeFunction::block(5000), ShapeFunction::power_law(5000, 1)}) {
        for (auto mode : kModes) {
            const auto p = reference_params(mode);
            for (int i = 0; i < 20; ++i) {
                const Strategy s{i % 2 ? random_mixed(rng, p.x0, 11) : random_split(rng, p.x0, 11)};
                const auto analytic = analytic_gradient(p, shape, s);
                const auto fd = central_difference(p, shape, s);
                double scale = 0.0, worst = 0.0;
                for (double g : analytic) scale = std::max(scale, std::abs(g));
                for (std::size_t k = 0; k < fd.size(); ++k) worst = std::max(worst, std::abs(fd[k] - analytic[k]));
                CHECK(worst / scale <= 1e-5);
            }
        }
    }
}

TEST_CASE("block gradient equals the hand-expanded quadratic form") {
    const double q = 5000;
    const auto block = ShapeFunction::block(q);
    const auto p = reference_params(kModes[0]);
    const double a = p.decay_factor();
    std::mt19937_64 rng(5);
    for (const auto& x : {std::vector<double>(11, p.x0 / 11), random_mixed(rng, p.x0, 11)}) {
        const auto g = analytic_gradient(p, block, Strategy{x});
        for (std::size_t j = 0; j < x.size(); ++j) {
            double expected = x[j];
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (i != j) expected += std::pow(a, std::abs(static_cast<double>(j) - static_cast<double>(i))) * x[i];
            }
            expected /= q;
            CHECK(std::abs(g[j] - expected) <= 1e-12 * p.x0 / q);
        }
    }
}

TEST_CASE("property: positivity and coercivity") {
    std::mt19937_64 rng(6);
    for (const auto& shape : {ShapeFunction::block(5000), ShapeFunction::power_law(5000, 1),
                              ShapeFunction::power_law(5000, -2)}) {
        for (auto mode : kModes) {
            const auto p = reference_params(mode);
            for (int i = 0; i < 20; ++i) {
                const Strategy s{random_split(rng, p.x0, 11)};
                CHECK(impact_cost(p, shape, s) >= 0.0);
                // Push a zero-sum direction far out: cost must grow.
                auto d = random_mixed(rng, 1000.0, 11);
                for (auto& v : d) v -= 1000.0 / 11;
                Strategy near = s, far = s;
                for (std::size_t k = 0; k < d.size(); ++k) {
                    near.trades[k] += d[k];
                    far.trades[k] += 1e3 * d[k];
                }
                if (shape.volume_range().second < 1e12) continue;
                const double c_near = impact_cost(p, shape, near);
                double c_far = HUGE_VAL;
                try {
                    c_far = impact_cost(p, shape, far);
                } catch (const OutOfDomain&) {
                    // Exponential book: the far cost exceeds the double range.
                }
                CHECK(c_far > c_near);
            }
        }
    }
}

TEST_CASE("lagrange residual") {
    CHECK(lagrange_residual({2.0, 2.0, 2.0}) == 0.0);
    CHECK(lagrange_residual({1.0, 3.0}) == doctest::Approx(0.5));
}

TEST_CASE("cost report fields and json") {
    const auto power = ShapeFunction::power_law(5000, 1);
    const auto p = reference_params(kModes[1]);
    const Strategy s{std::vector<double>(11, p.x0 / 11)};
    const auto r = cost_report(p, power, s, 100.0);
    CHECK(r.base_term == doctest::Approx(100.0 * p.x0));
    CHECK(r.total == doctest::Approx(r.base_term + r.impact_term).epsilon(1e-15));
    CHECK(r.impact_term == doctest::Approx(impact_cost(p, power, s)).epsilon(1e-15));
    REQUIRE(r.per_trade.size() == 11);
    double sum = 0.0;
    for (double c : r.per_trade) sum += c;
    CHECK(sum == doctest::Approx(r.total).epsilon(1e-12));
    const auto j = to_json(r);
    for (const char* key : {"total", "base_term", "impact_term", "per_trade", "lagrange_residual"}) {
        CHECK(j.contains(key));
    }
    CHECK(j["per_trade"].size() == 11);
}
