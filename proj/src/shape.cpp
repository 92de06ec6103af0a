#include "lobexec/shape.hpp"

#include "lobexec/errors.hpp"
#include "lobexec/numerics.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace lobexec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sign_of(double x) { return x < 0.0 ? -1.0 : 1.0; }

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// --- power law: f(t) = q (1+t)^-alpha on t >= 0 --------------------------------

double power_density(const PowerLaw& s, double t) { return s.q * std::exp(-s.alpha * std::log1p(t)); }

double power_volume(const PowerLaw& s, double t) {
    if (s.alpha == 0.0) return s.q * t;
    if (s.alpha == 1.0) return s.q * std::log1p(t);
    const double r = 1.0 - s.alpha;
    return s.q * std::expm1(r * std::log1p(t)) / r;
}

double power_inverse(const PowerLaw& s, double y) {
    if (s.alpha == 0.0) return y / s.q;
    if (s.alpha == 1.0) return std::expm1(y / s.q);
    const double r = 1.0 - s.alpha;
    const double u = r * y / s.q;
    if (u <= -1.0) {
        throw OutOfDomain("power law: volume " + std::to_string(y) +
                          " exceeds total book depth q/(alpha-1)");
    }
    return std::expm1(std::log1p(u) / r);
}

// (1+t)^p - 1 over p, continuous at p = 0.
double scaled_growth(double p, double log1p_t) {
    return p == 0.0 ? log1p_t : std::expm1(p * log1p_t) / p;
}

double power_moment(const PowerLaw& s, double t) {
    if (s.alpha == 0.0) return 0.5 * s.q * t * t;
    if (t < 0.05) {
        // Closed form cancels for small t; the integrand is analytic here.
        return boost::math::quadrature::gauss<double, 10>::integrate(
            [&](double x) { return x * power_density(s, x); }, 0.0, t);
    }
    const double l = std::log1p(t);
    return s.q * (scaled_growth(2.0 - s.alpha, l) - scaled_growth(1.0 - s.alpha, l));
}

// --- sqrt shape: f(t) = q / sqrt(1 + mu t) -------------------------------------

double sqrt_root(const SqrtShape& s, double t) { return std::sqrt(1.0 + s.mu * t); }

double sqrt_volume(const SqrtShape& s, double t) { return 2.0 * s.q * t / (sqrt_root(s, t) + 1.0); }

double sqrt_inverse(const SqrtShape& s, double y) {
    return y / s.q + s.mu * y * y / (4.0 * s.q * s.q);
}

double sqrt_moment(const SqrtShape& s, double t) {
    const double r = sqrt_root(s, t);
    return 2.0 * s.q * t * t * (r + 2.0) / (3.0 * (r + 1.0) * (r + 1.0));
}

// --- piecewise counterexample ----------------------------------------------------

struct PiecewiseConstants {
    double top;    // n + 1
    double knee;   // 1/n
    double slope;  // n^2/(n-1)
    double volume_knee;
    double volume_one;
    double moment_knee;
    double moment_one;
};

PiecewiseConstants piecewise_constants(const PiecewiseCounterexample& s) {
    const double n = s.n;
    PiecewiseConstants c{};
    c.top = n + 1.0;
    c.knee = 1.0 / n;
    c.slope = n * n / (n - 1.0);
    c.volume_knee = c.top * c.knee;
    c.volume_one = 0.5 * (n + 3.0);
    c.moment_knee = 0.5 * c.top * c.knee * c.knee;
    const double lin = c.top + c.slope * c.knee;
    c.moment_one = c.moment_knee + 0.5 * lin * (1.0 - c.knee * c.knee) -
                   c.slope * (1.0 - c.knee * c.knee * c.knee) / 3.0;
    return c;
}

double piecewise_density(const PiecewiseCounterexample& s, double t) {
    const auto c = piecewise_constants(s);
    if (t < c.knee) return c.top;
    if (t <= 1.0) return c.top - c.slope * (t - c.knee);
    return 1.0;
}

double piecewise_slope(const PiecewiseCounterexample& s, double t) {
    const auto c = piecewise_constants(s);
    return (t >= c.knee && t < 1.0) ? -c.slope : 0.0;
}

double piecewise_volume(const PiecewiseCounterexample& s, double t) {
    const auto c = piecewise_constants(s);
    if (t < c.knee) return c.top * t;
    if (t <= 1.0) {
        const double u = t - c.knee;
        return c.volume_knee + c.top * u - 0.5 * c.slope * u * u;
    }
    return c.volume_one + (t - 1.0);
}

double piecewise_inverse(const PiecewiseCounterexample& s, double y) {
    const auto c = piecewise_constants(s);
    if (y < c.volume_knee) return y / c.top;
    if (y <= c.volume_one) {
        const double excess = y - c.volume_knee;
        const double disc = std::max(0.0, c.top * c.top - 2.0 * c.slope * excess);
        return c.knee + 2.0 * excess / (c.top + std::sqrt(disc));
    }
    return 1.0 + (y - c.volume_one);
}

double piecewise_moment(const PiecewiseCounterexample& s, double t) {
    const auto c = piecewise_constants(s);
    if (t < c.knee) return 0.5 * c.top * t * t;
    if (t <= 1.0) {
        const double lin = c.top + c.slope * c.knee;
        return c.moment_knee + 0.5 * lin * (t * t - c.knee * c.knee) -
               c.slope * (t * t * t - c.knee * c.knee * c.knee) / 3.0;
    }
    return c.moment_one + 0.5 * (t * t - 1.0);
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw InvalidParam(std::string(what) + " must be positive and finite");
    }
}

}  // namespace

// --- tabulated -------------------------------------------------------------------

struct ShapeFunction::Tabulated {
    std::vector<double> x;
    std::vector<double> d;
    std::vector<double> cum_volume;  // int_0^{x_k} f
    std::vector<double> cum_moment;  // int_0^{x_k} x f

    double interpolate(std::size_t k, double at) const {
        const double w = (at - x[k]) / (x[k + 1] - x[k]);
        return d[k] + w * (d[k + 1] - d[k]);
    }

    std::size_t segment(double at) const {
        if (at < x.front() || at > x.back()) {
            throw OutOfDomain("tabulated shape: offset " + std::to_string(at) +
                              " outside grid [" + std::to_string(x.front()) + ", " +
                              std::to_string(x.back()) + "]");
        }
        auto it = std::upper_bound(x.begin(), x.end(), at);
        std::size_t k = static_cast<std::size_t>(it - x.begin());
        return k == 0 ? 0 : std::min(k - 1, x.size() - 2);
    }

    // Integral of weight(t) f(t) from the zero-side end of segment k to `at`.
    template <typename Weight>
    double partial(std::size_t k, double at, Weight weight, const std::vector<double>& cum) const {
        auto integrand = [&](double t) { return weight(t) * interpolate(k, t); };
        if (x[k] >= 0.0) return cum[k] + numerics::integrate(integrand, x[k], at);
        return cum[k + 1] - numerics::integrate(integrand, at, x[k + 1]);
    }

    double volume(double at) const {
        return partial(segment(at), at, [](double) { return 1.0; }, cum_volume);
    }

    double moment(double at) const {
        return partial(segment(at), at, [](double t) { return t; }, cum_moment);
    }

    double inverse(double y) const {
        if (y < cum_volume.front() || y > cum_volume.back()) {
            throw OutOfDomain("tabulated shape: volume " + std::to_string(y) +
                              " exceeds the mass covered by the grid [" +
                              std::to_string(cum_volume.front()) + ", " +
                              std::to_string(cum_volume.back()) + "]");
        }
        auto it = std::upper_bound(cum_volume.begin(), cum_volume.end(), y);
        std::size_t k = static_cast<std::size_t>(it - cum_volume.begin());
        k = k == 0 ? 0 : std::min(k - 1, x.size() - 2);
        if (y == cum_volume[k]) return x[k];
        auto residual = [&](double t) {
            return partial(k, t, [](double) { return 1.0; }, cum_volume) - y;
        };
        return numerics::find_root(residual, x[k], x[k + 1], cum_volume[k] - y,
                                   cum_volume[k + 1] - y, {.f_tolerance = 0.0})
            .x;
    }
};

// --- construction ----------------------------------------------------------------

ShapeFunction ShapeFunction::power_law(double q, double alpha) {
    require_positive(q, "power law depth q");
    if (!std::isfinite(alpha)) throw InvalidParam("power law exponent must be finite");
    return ShapeFunction(PowerLaw{q, alpha});
}

ShapeFunction ShapeFunction::block(double q) {
    require_positive(q, "block depth q");
    return ShapeFunction(Block{q});
}

ShapeFunction ShapeFunction::sqrt_shape(double q, double mu) {
    require_positive(q, "sqrt shape depth q");
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw InvalidParam("sqrt shape slope mu must be >= 0");
    return ShapeFunction(SqrtShape{q, mu});
}

ShapeFunction ShapeFunction::piecewise_counterexample(int n) {
    if (n < 2) throw InvalidParam("piecewise counterexample needs n >= 2");
    return ShapeFunction(PiecewiseCounterexample{n});
}

ShapeFunction ShapeFunction::tabulated(TabulatedData data) {
    auto& x = data.offsets;
    auto& d = data.densities;
    if (x.size() != d.size() || x.size() < 2) {
        throw InvalidParam("tabulated shape needs at least two (offset, density) pairs");
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i])) throw InvalidParam("tabulated shape: non-finite offset");
        if (!(d[i] > 0.0) || !std::isfinite(d[i])) {
            throw InvalidParam("tabulated shape: density must be > 0 at offset " + std::to_string(x[i]));
        }
        if (i > 0 && !(x[i] > x[i - 1])) {
            throw InvalidParam("tabulated shape: offsets must be strictly increasing");
        }
    }
    if (x.front() > 0.0 || x.back() < 0.0) {
        throw InvalidParam("tabulated shape: offsets must straddle zero");
    }

    auto table = std::make_shared<Tabulated>();
    // Anchor the cumulative tables at an explicit zero knot.
    auto pos = std::lower_bound(x.begin(), x.end(), 0.0);
    if (*pos != 0.0) {
        const auto k = static_cast<std::size_t>(pos - x.begin()) - 1;
        const double w = -x[k] / (x[k + 1] - x[k]);
        const double d0 = d[k] + w * (d[k + 1] - d[k]);
        d.insert(d.begin() + static_cast<std::ptrdiff_t>(k + 1), d0);
        x.insert(x.begin() + static_cast<std::ptrdiff_t>(k + 1), 0.0);
    }
    table->x = std::move(x);
    table->d = std::move(d);
    const std::size_t m = table->x.size();
    const auto zero = static_cast<std::size_t>(
        std::find(table->x.begin(), table->x.end(), 0.0) - table->x.begin());
    table->cum_volume.assign(m, 0.0);
    table->cum_moment.assign(m, 0.0);

    auto segment_integral = [&](std::size_t k, bool weighted) {
        auto integrand = [&](double t) { return (weighted ? t : 1.0) * table->interpolate(k, t); };
        return numerics::integrate(integrand, table->x[k], table->x[k + 1]);
    };
    for (std::size_t k = zero + 1; k < m; ++k) {
        table->cum_volume[k] = table->cum_volume[k - 1] + segment_integral(k - 1, false);
        table->cum_moment[k] = table->cum_moment[k - 1] + segment_integral(k - 1, true);
    }
    for (std::size_t k = zero; k-- > 0;) {
        table->cum_volume[k] = table->cum_volume[k + 1] - segment_integral(k, false);
        table->cum_moment[k] = table->cum_moment[k + 1] - segment_integral(k, true);
    }
    return ShapeFunction(std::shared_ptr<const Tabulated>(std::move(table)));
}

ShapeFunction ShapeFunction::load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParam("cannot open shape CSV " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw InvalidParam("empty shape CSV " + path.string());
    line.erase(std::remove_if(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); }),
               line.end());
    if (line != "offset,density") {
        throw InvalidParam("shape CSV " + path.string() + ": expected header 'offset,density'");
    }
    TabulatedData data;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream row(line);
        std::string a, b;
        if (!std::getline(row, a, ',') || !std::getline(row, b)) {
            throw InvalidParam("shape CSV line " + std::to_string(line_no) + ": expected two columns");
        }
        try {
            data.offsets.push_back(std::stod(a));
            data.densities.push_back(std::stod(b));
        } catch (const std::exception&) {
            throw InvalidParam("shape CSV line " + std::to_string(line_no) + ": not a number");
        }
    }
    return tabulated(std::move(data));
}

// --- evaluation --------------------------------------------------------------------

double ShapeFunction::density(double x) const {
    const double t = std::abs(x);
    return std::visit(
        Overloaded{
            [&](const PowerLaw& s) { return power_density(s, t); },
            [&](const Block& s) { return s.q; },
            [&](const SqrtShape& s) { return s.q / sqrt_root(s, t); },
            [&](const PiecewiseCounterexample& s) { return piecewise_density(s, t); },
            [&](const std::shared_ptr<const Tabulated>& s) {
                return s->interpolate(s->segment(x), x);
            },
        },
        kind_);
}

double ShapeFunction::density_slope(double x) const {
    const double t = std::abs(x);
    const double sg = sign_of(x);
    return std::visit(
        Overloaded{
            [&](const PowerLaw& s) {
                return -sg * s.alpha * s.q * std::exp(-(s.alpha + 1.0) * std::log1p(t));
            },
            [&](const Block&) { return 0.0; },
            [&](const SqrtShape& s) {
                const double r = sqrt_root(s, t);
                return -sg * 0.5 * s.q * s.mu / (r * r * r);
            },
            [&](const PiecewiseCounterexample& s) { return sg * piecewise_slope(s, t); },
            [&](const std::shared_ptr<const Tabulated>& s) {
                const std::size_t k = s->segment(x);
                return (s->d[k + 1] - s->d[k]) / (s->x[k + 1] - s->x[k]);
            },
        },
        kind_);
}

double ShapeFunction::volume(double x) const {
    const double t = std::abs(x);
    const double sg = sign_of(x);
    return std::visit(
        Overloaded{
            [&](const PowerLaw& s) { return sg * power_volume(s, t); },
            [&](const Block& s) { return s.q * x; },
            [&](const SqrtShape& s) { return sg * sqrt_volume(s, t); },
            [&](const PiecewiseCounterexample& s) { return sg * piecewise_volume(s, t); },
            [&](const std::shared_ptr<const Tabulated>& s) { return s->volume(x); },
        },
        kind_);
}

double ShapeFunction::inverse_volume(double y) const {
    const double v = std::abs(y);
    const double sg = sign_of(y);
    const double x = std::visit(
        Overloaded{
            [&](const PowerLaw& s) { return sg * power_inverse(s, v); },
            [&](const Block& s) { return y / s.q; },
            [&](const SqrtShape& s) { return sg * sqrt_inverse(s, v); },
            [&](const PiecewiseCounterexample& s) { return sg * piecewise_inverse(s, v); },
            [&](const std::shared_ptr<const Tabulated>& s) { return s->inverse(y); },
        },
        kind_);
    // Exponential books (alpha = 1) reach the end of the double range long
    // before their depth runs out.
    if (!std::isfinite(x) || (std::abs(x) > 1e100 && !std::isfinite(moment(x)))) {
        throw OutOfDomain("volume " + std::to_string(y) + " moves the spread beyond floating-point range");
    }
    return x;
}

double ShapeFunction::moment(double z) const {
    const double t = std::abs(z);
    return std::visit(
        Overloaded{
            [&](const PowerLaw& s) { return power_moment(s, t); },
            [&](const Block& s) { return 0.5 * s.q * z * z; },
            [&](const SqrtShape& s) { return sqrt_moment(s, t); },
            [&](const PiecewiseCounterexample& s) { return piecewise_moment(s, t); },
            [&](const std::shared_ptr<const Tabulated>& s) { return s->moment(z); },
        },
        kind_);
}

double ShapeFunction::eating_cost(double y) const {
    if (const auto* b = std::get_if<Block>(&kind_)) return y * y / (2.0 * b->q);
    return moment(inverse_volume(y));
}

double ShapeFunction::decay_gap(double x, double a, int k) const {
    const double t = std::abs(x);
    const double ak = k == 1 ? a : a * a;
    return std::visit(
        Overloaded{
            [&](const PowerLaw& s) {
                if (s.alpha == 0.0) return s.q * (1.0 - ak);
                // (1+t)^-alpha - a^k (1+at)^-alpha, factored around the second term
                const double log_ratio = std::log1p((1.0 - a) / (a * (1.0 + t)));
                return s.q * std::exp(-s.alpha * std::log1p(a * t)) * ak *
                       std::expm1(s.alpha * log_ratio + (s.alpha - k) * std::log(a));
            },
            [&](const Block& s) { return s.q * (1.0 - ak); },
            [&](const SqrtShape& s) {
                const double r1 = sqrt_root(s, t), ra = sqrt_root(s, a * t);
                const double numer = 1.0 - ak * ak + s.mu * t * (a - ak * ak);
                return s.q * numer / (r1 * ra * (ra + ak * r1));
            },
            [&](const auto&) { return density(x) - ak * density(a * x); },
        },
        kind_);
}

std::pair<double, double> ShapeFunction::volume_range() const {
    return std::visit(
        Overloaded{
            [&](const PowerLaw& s) -> std::pair<double, double> {
                if (s.alpha <= 1.0) return {-kInf, kInf};
                const double depth = s.q / (s.alpha - 1.0);
                return {-depth, depth};
            },
            [&](const std::shared_ptr<const Tabulated>& s) -> std::pair<double, double> {
                return {s->cum_volume.front(), s->cum_volume.back()};
            },
            [&](const auto&) -> std::pair<double, double> { return {-kInf, kInf}; },
        },
        kind_);
}

std::vector<double> ShapeFunction::kinks() const {
    return std::visit(
        Overloaded{
            [&](const PiecewiseCounterexample& s) -> std::vector<double> {
                const double knee = 1.0 / s.n;
                return {-1.0, -knee, knee, 1.0};
            },
            [&](const std::shared_ptr<const Tabulated>& s) -> std::vector<double> {
                return {s->x.begin() + 1, s->x.end() - 1};
            },
            [&](const auto&) -> std::vector<double> { return {}; },
        },
        kind_);
}

std::string ShapeFunction::name() const {
    std::ostringstream os;
    std::visit(Overloaded{
                   [&](const PowerLaw& s) { os << "power(q=" << s.q << ", alpha=" << s.alpha << ")"; },
                   [&](const Block& s) { os << "block(q=" << s.q << ")"; },
                   [&](const SqrtShape& s) { os << "sqrt(q=" << s.q << ", mu=" << s.mu << ")"; },
                   [&](const PiecewiseCounterexample& s) { os << "piecewise-ce(n=" << s.n << ")"; },
                   [&](const std::shared_ptr<const Tabulated>& s) {
                       os << "tabulated(" << s->x.size() << " knots)";
                   },
               },
               kind_);
    return os.str();
}

}  // namespace lobexec
