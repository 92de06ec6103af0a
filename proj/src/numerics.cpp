#include "lobexec/numerics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace lobexec::numerics {

namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;

double adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                int depth) {
    double err = 0.0;
    const double value = Rule::integrate(f, a, b, 0, 0.0, &err);
    if (err <= std::max(tol, 1e-14 * std::abs(value)) || depth >= 24) return value;
    const double mid = 0.5 * (a + b);
    return adaptive(f, a, mid, 0.5 * tol, depth + 1) + adaptive(f, mid, b, 0.5 * tol, depth + 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double abs_tolerance) {
    if (a == b) return 0.0;
    return adaptive(f, a, b, abs_tolerance, 0);
}

}  // namespace lobexec::numerics
