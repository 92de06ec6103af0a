#include "lobexec/dynamics.hpp"
#include "lobexec/errors.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

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

}  // namespace

TEST_CASE("decay examples") {
    const auto block = ShapeFunction::block(5000);
    const auto power = ShapeFunction::power_law(5000, 1);
    SimplifiedState s{100.0, power.inverse_volume(100.0)};
    const auto halved = decay(s, power, ResilienceMode::VolumeRecovery, std::log(2.0), 1.0);
    CHECK(halved.volume == doctest::Approx(50.0).epsilon(1e-15));
    CHECK(halved.spread == doctest::Approx(power.inverse_volume(50.0)).epsilon(1e-14));

    const auto d = decay(SimplifiedState{5000.0, 1.0}, block, ResilienceMode::SpreadRecovery, std::log(2.0), 1.0);
    CHECK(d.spread == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(d.volume == doctest::Approx(2500.0).epsilon(1e-15));
    CHECK_THROWS_AS(decay(s, power, ResilienceMode::VolumeRecovery, -1.0, 1.0), InvalidParam);
}

TEST_CASE("apply_order moves volume and recomputes the spread") {
    const auto power = ShapeFunction::power_law(5000, 0.5);
    const auto s = apply_order(SimplifiedState{}, power, 12345.0);
    CHECK(s.volume == 12345.0);
    CHECK(power.volume(s.spread) == doctest::Approx(12345.0).epsilon(1e-12));

    BookState book;
    book = apply_order(book, power, 100.0);
    book = apply_order(book, power, -40.0);
    CHECK(book.ask.volume == 100.0);
    CHECK(book.bid.volume == -40.0);
    CHECK(book.bid.spread < 0.0);
}

TEST_CASE("decay composes in the native variable") {
    const auto power = ShapeFunction::power_law(5000, 1);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 0.3);
    for (auto mode : {ResilienceMode::VolumeRecovery, ResilienceMode::SpreadRecovery}) {
        SimplifiedState s = apply_order(SimplifiedState{}, power, 30000.0);
        for (int i = 0; i < 50; ++i) {
            const double s1 = u(rng), s2 = u(rng);
            const auto two = decay(decay(s, power, mode, s1, 20.0), power, mode, s2, 20.0);
            const auto one = decay(s, power, mode, s1 + s2, 20.0);
            if (mode == ResilienceMode::VolumeRecovery) {
                CHECK(rel_diff(two.volume, one.volume) <= 1e-14);
            } else {
                CHECK(rel_diff(two.spread, one.spread) <= 1e-14);
            }
        }
    }
}

TEST_CASE("property: E = F(D) along random trajectories") {
    std::mt19937_64 rng(11);
    for (const auto& shape : {ShapeFunction::block(5000), ShapeFunction::power_law(5000, 1),
                              ShapeFunction::power_law(5000, -1), ShapeFunction::sqrt_shape(5000, 2)}) {
        for (auto mode : {ResilienceMode::VolumeRecovery, ResilienceMode::SpreadRecovery}) {
            const auto p = reference_params(mode);
            for (int i = 0; i < 20; ++i) {
                const Strategy s{random_mixed(rng, p.x0, 11)};
                for (const auto& pt : replay(p, shape, s)) {
                    for (const auto& st : {pt.pre, pt.post}) {
                        CHECK(std::abs(shape.volume(st.spread) - st.volume) <=
                              1e-10 * std::max(1.0, std::abs(st.volume)));
                    }
                }
            }
        }
    }
}

TEST_CASE("block book: model 1 and model 2 trajectories coincide") {
    const auto block = ShapeFunction::block(5000);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) {
        const Strategy s{random_mixed(rng, 1e5, 11)};
        const auto t1 = replay(reference_params(ResilienceMode::VolumeRecovery), block, s);
        const auto t2 = replay(reference_params(ResilienceMode::SpreadRecovery), block, s);
        for (std::size_t n = 0; n < t1.size(); ++n) {
            CHECK(std::abs(t1[n].post.volume - t2[n].post.volume) <= 1e-9 * 1e5);
            CHECK(std::abs(t1[n].pre.spread - t2[n].pre.spread) <= 1e-9 * 20);
        }
    }
}

TEST_CASE("replay records N+1 points with the decay in between") {
    const auto power = ShapeFunction::power_law(5000, 0.5);
    const auto p = reference_params(ResilienceMode::VolumeRecovery);
    const Strategy s{std::vector<double>(11, p.x0 / 11)};
    const auto tr = replay(p, power, s);
    REQUIRE(tr.size() == 11);
    CHECK(tr[0].pre.volume == 0.0);
    for (std::size_t n = 1; n < tr.size(); ++n) {
        CHECK(tr[n].t == doctest::Approx(0.1 * static_cast<double>(n)));
        CHECK(rel_diff(tr[n].pre.volume, p.decay_factor() * tr[n - 1].post.volume) <= 1e-15);
    }
    CHECK_THROWS_AS(replay(p, power, Strategy{{1.0, 2.0}}), InvalidParam);
}

TEST_CASE("zero strategy stays at rest") {
    const auto power = ShapeFunction::power_law(5000, 1);
    auto p = reference_params(ResilienceMode::SpreadRecovery);
    p.x0 = 0.0;
    for (const auto& pt : replay(p, power, Strategy{std::vector<double>(11, 0.0)})) {
        CHECK(pt.pre.volume == 0.0);
        CHECK(pt.post.volume == 0.0);
        CHECK(pt.post.spread == 0.0);
    }
}

TEST_CASE("property: buy-only book replay equals the collapsed state") {
    std::mt19937_64 rng(5);
    for (const auto& shape : {ShapeFunction::block(5000), ShapeFunction::power_law(5000, 1)}) {
        for (auto mode : {ResilienceMode::VolumeRecovery, ResilienceMode::SpreadRecovery}) {
            const auto p = reference_params(mode);
            const Strategy s{random_split(rng, p.x0, 11)};
            const auto simple = replay(p, shape, s);
            const auto book = replay_book(p, shape, s);
            for (std::size_t n = 0; n < simple.size(); ++n) {
                CHECK(book[n].post.ask.volume == simple[n].post.volume);
                CHECK(book[n].post.ask.spread == simple[n].post.spread);
                CHECK(book[n].post.bid.volume == 0.0);
            }
        }
    }
}

TEST_CASE("property: sandwich E^B <= E <= E^A for mixed strategies") {
    std::mt19937_64 rng(19);
    const double slack = 1e-9 * 1e5;
    for (const auto& shape : {ShapeFunction::block(5000), ShapeFunction::power_law(5000, 1),
                              ShapeFunction::power_law(5000, -2)}) {
        for (auto mode : {ResilienceMode::VolumeRecovery, ResilienceMode::SpreadRecovery}) {
            const auto p = reference_params(mode);
            for (int i = 0; i < 100; ++i) {
                const Strategy s{random_mixed(rng, p.x0, 11)};
                const auto simple = replay(p, shape, s);
                const auto book = replay_book(p, shape, s);
                for (std::size_t n = 0; n < simple.size(); ++n) {
                    CHECK(book[n].post.bid.volume <= simple[n].post.volume + slack);
                    CHECK(simple[n].post.volume <= book[n].post.ask.volume + slack);
                    CHECK(book[n].pre.bid.volume <= simple[n].pre.volume + slack);
                    CHECK(simple[n].pre.volume <= book[n].pre.ask.volume + slack);
                }
            }
        }
    }
}

TEST_CASE("trajectory csv") {
    const auto block = ShapeFunction::block(5000);
    const auto p = reference_params(ResilienceMode::VolumeRecovery, 2);
    std::ostringstream out;
    write_trajectory_csv(out, replay(p, block, Strategy{{50000, 0, 50000}}));
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "n,t,E_pre,D_pre,E_post,D_post");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 3);
}

TEST_CASE("market parameter validation") {
    MarketParams p;
    CHECK_NOTHROW(p.validate());
    CHECK(p.decay_factor() == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
    p.rho = 0;
    CHECK_THROWS_AS(p.validate(), InvalidParam);
    p = MarketParams{};
    p.intervals = 0;
    CHECK_THROWS_AS(p.validate(), InvalidParam);
    p = MarketParams{};
    p.x0 = -1;
    CHECK_THROWS_AS(p.validate(), InvalidParam);
    CHECK_THROWS_AS(mode_from_number(3), InvalidParam);
    CHECK(model_number(mode_from_number(2)) == 2);
}
