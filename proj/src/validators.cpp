#include "lobexec/validators.hpp"

#include "lobexec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

namespace lobexec {

namespace {

constexpr int kGridPoints = 512;
constexpr double kGridSpan = 1e-9;       // smallest grid magnitude relative to the range
constexpr double kExplosionGrowth = 1.5;  // required growth of the proxy over the outer decade

std::vector<double> log_grid(double top) {
    std::vector<double> out(kGridPoints);
    const double lo = std::log(kGridSpan * top);
    const double hi = std::log(top);
    for (int k = 0; k < kGridPoints; ++k) {
        out[k] = std::exp(lo + (hi - lo) * k / (kGridPoints - 1));
    }
    out.back() = top;
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

ValidationReport fail(Verdict verdict, double witness, double value, std::string detail, int points) {
    ValidationReport r;
    r.verdict = verdict;
    r.witness = witness;
    r.witness_value = value;
    r.detail = std::move(detail);
    r.grid_points = points;
    return r;
}

// Offsets or volumes of kinks on one side, each with its 1/a image, capped at `top`.
std::vector<double> kink_points(const std::vector<double>& kinks, double sign, double a, double top,
                                bool in_volume, const ShapeFunction& shape) {
    std::vector<double> out;
    for (double k : kinks) {
        if (k * sign <= 0.0) continue;
        const double base = in_volume ? std::abs(shape.volume(k)) : std::abs(k);
        for (double p : {base, base / a}) {
            if (p > 0.0 && p <= top) out.push_back(p);
        }
    }
    return out;
}

std::optional<ValidationReport> check_depth(const ShapeFunction& shape, double volume) {
    for (double y : {volume, -volume}) {
        try {
            shape.inverse_volume(y);
        } catch (const OutOfDomain& e) {
            return fail(Verdict::InsufficientDepth, y, 0.0,
                        std::string("order book cannot absorb the working volume: ") + e.what(), 0);
        }
    }
    return std::nullopt;
}

}  // namespace

std::string to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::Ok: return "ok";
        case Verdict::H1NotInjective: return "h1_not_injective";
        case Verdict::H2NotInjective: return "h2_not_injective";
        case Verdict::ExplosionViolated: return "explosion_violated";
        case Verdict::InsufficientDepth: return "insufficient_depth";
    }
    return "unknown";
}

ValidationReport validate_model1(const ShapeFunction& shape, double a, double working_volume) {
    if (!(a > 0.0 && a < 1.0)) throw InvalidParam("decay factor a must lie in (0, 1)");
    if (!(working_volume > 0.0)) throw InvalidParam("working volume must be positive");
    if (auto r = check_depth(shape, working_volume)) {
        r->working_volume = working_volume;
        return *r;
    }

    const auto grid = log_grid(working_volume);
    const auto kinks = shape.kinks();
    int points = 0;
    for (double sign : {1.0, -1.0}) {
        auto samples = kink_points(kinks, sign, a, working_volume, true, shape);
        std::sort(samples.begin(), samples.end());
        samples.insert(samples.end(), grid.begin(), grid.end());
        for (double m : samples) {
            const double y = sign * m;
            const double ell =
                shape.density(shape.inverse_volume(a * y)) - a * a * shape.density(shape.inverse_volume(y));
            ++points;
            if (!(ell > 0.0)) {
                auto r = fail(Verdict::H1NotInjective, y, ell,
                              "l(y) = f(F^-1(a y)) - a^2 f(F^-1(y)) = " + fmt(ell) + " <= 0 at y = " + fmt(y),
                              points);
                r.working_volume = working_volume;
                return r;
            }
        }
    }
    ValidationReport ok;
    ok.grid_points = points;
    ok.working_volume = working_volume;
    ok.detail = "l(y) > 0 on the scanned grid";
    return ok;
}

ValidationReport validate_model2(const ShapeFunction& shape, double a, double working_volume) {
    if (!(a > 0.0 && a < 1.0)) throw InvalidParam("decay factor a must lie in (0, 1)");
    if (!(working_volume > 0.0)) throw InvalidParam("working volume must be positive");
    if (auto r = check_depth(shape, working_volume)) {
        r->working_volume = working_volume;
        return *r;
    }

    auto g = [&](double x) { return shape.decay_gap(x, a, 1); };
    auto h2 = [&](double x) { return x * shape.decay_gap(x, a, 2) / shape.decay_gap(x, a, 1); };
    auto proxy = [&](double x) {
        const double lo = std::min(a * x, x), hi = std::max(a * x, x);
        double m = std::numeric_limits<double>::infinity();
        constexpr int samples = 64;
        for (int k = 0; k <= samples; ++k) m = std::min(m, shape.density(lo + (hi - lo) * k / samples));
        for (double k : shape.kinks()) {
            if (k >= lo && k <= hi) m = std::min(m, shape.density(k));
        }
        return x * x * m;
    };

    const auto kinks = shape.kinks();
    int points = 0;
    auto finish = [&](ValidationReport r) {
        r.grid_points = points;
        r.working_volume = working_volume;
        return r;
    };

    for (double sign : {1.0, -1.0}) {
        const double top = std::abs(shape.inverse_volume(sign * working_volume));
        auto kinked = kink_points(kinks, sign, a, top, false, shape);
        std::sort(kinked.begin(), kinked.end());
        const auto grid = log_grid(top);

        // Sign of h2 first: kinks are where counterexamples live.
        std::vector<double> ordered = kinked;
        ordered.insert(ordered.end(), grid.begin(), grid.end());
        for (double m : ordered) {
            const double x = sign * m;
            const double v = h2(x);
            ++points;
            if (!(v / x > 0.0)) {
                return finish(fail(Verdict::H2NotInjective, x, v,
                                   "h2(x) = " + fmt(v) + " has the wrong sign at x = " + fmt(x) +
                                       ", so h2 is not one-to-one",
                                   points));
            }
        }

        std::vector<double> sorted = ordered;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        for (double m : sorted) {
            const double x = sign * m;
            const double gx = g(x);
            if (!(gx > 0.0)) {
                return finish(fail(Verdict::H2NotInjective, x, gx,
                                   "g(x) = f(x) - a f(a x) = " + fmt(gx) + " <= 0 at x = " + fmt(x), points));
            }
        }

        double previous = 0.0;
        for (double m : sorted) {
            const double x = sign * m;
            const double v = sign * h2(x);
            if (!(v > previous)) {
                return finish(fail(Verdict::H2NotInjective, x, sign * v,
                                   "h2 is not strictly monotone near x = " + fmt(x), points));
            }
            previous = v;
        }

        const double outer = sign * top;
        const double ratio = proxy(outer) / proxy(outer / 10.0);
        if (!(ratio > kExplosionGrowth)) {
            return finish(fail(Verdict::ExplosionViolated, outer, ratio,
                               "x^2 min f over [ax, x] grows only by a factor " + fmt(ratio) +
                                   " over the outer decade ending at x = " + fmt(outer),
                               points));
        }
    }

    ValidationReport ok;
    ok.detail = "g > 0, h2 strictly monotone and growth proxy increasing on the scanned grid";
    return finish(ok);
}

}  // namespace lobexec
