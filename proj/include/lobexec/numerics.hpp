#pragma once

#include "lobexec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

namespace lobexec::numerics {

struct RootResult {
    double x = 0.0;
    double residual = 0.0;  // |f(x)|
    int iterations = 0;
};

struct RootOptions {
    double x_tolerance = 0.0;  // absolute; 0 means "converge to a few ulp"
    double f_tolerance = 0.0;  // stop early once |f| <= f_tolerance
    int max_iterations = 200;
};

/// Brent's bracketed root finder (bisection safeguarding secant and inverse
/// quadratic steps). Requires f(lo) and f(hi) of opposite sign.
template <typename Fn>
RootResult find_root(Fn&& f, double lo, double hi, double f_lo, double f_hi,
                     const RootOptions& options = {}) {
    if (f_lo == 0.0) return {lo, 0.0, 0};
    if (f_hi == 0.0) return {hi, 0.0, 0};
    if ((f_lo > 0.0) == (f_hi > 0.0)) {
        throw NoRootInBracket("find_root: no sign change on [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "]");
    }

    double a = lo, b = hi, fa = f_lo, fb = f_hi;
    double c = a, fc = fa, d = b - a, e = d;
    constexpr double eps = std::numeric_limits<double>::epsilon();

    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol = 2.0 * eps * std::abs(b) + 0.5 * options.x_tolerance +
                          std::numeric_limits<double>::min();
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= tol || fb == 0.0 || std::abs(fb) <= options.f_tolerance) {
            return {b, std::abs(fb), iter};
        }
        if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                const double qa = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
    }
    return {b, std::abs(fb), options.max_iterations};
}

template <typename Fn>
RootResult find_root(Fn&& f, double lo, double hi, const RootOptions& options = {}) {
    return find_root(f, lo, hi, f(lo), f(hi), options);
}

/// Adaptive Gauss-Kronrod (7/15) quadrature of f over [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tolerance = 1e-12);

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace lobexec::numerics
