#include "lobexec/ow_scheme.hpp"

#include "lobexec/errors.hpp"

#include <ostream>

namespace lobexec {

namespace {

OwCoefficients prepare(double q, double lambda, const MarketParams& params) {
    params.validate();
    if (!(q > 0.0)) throw InvalidParam("block depth q must be positive");
    if (!(lambda < 1.0 / q)) throw InvalidParam("permanent impact lambda must be < 1/q");
    OwCoefficients c;
    c.q = q;
    c.lambda = lambda;
    c.kappa = 1.0 / q - lambda;
    c.a = params.decay_factor();
    const auto size = static_cast<std::size_t>(params.intervals) + 1;
    for (auto* v : {&c.alpha, &c.beta, &c.gamma, &c.delta, &c.epsilon, &c.phi}) v->assign(size, 0.0);
    return c;
}

void fill_derived(OwCoefficients& c, std::size_t n) {
    const double k = c.kappa, a = c.a;
    c.delta[n] = 1.0 / (0.5 / c.q + c.alpha[n] - c.beta[n] * k * a + c.gamma[n] * k * k * a * a);
    c.epsilon[n] = c.lambda + 2.0 * c.alpha[n] - c.beta[n] * k * a;
    c.phi[n] = 1.0 - c.beta[n] * a + 2.0 * c.gamma[n] * k * a * a;
}

}  // namespace

OwCoefficients backward_coefficients(double q, double lambda, const MarketParams& params) {
    auto c = prepare(q, lambda, params);
    const auto last = static_cast<std::size_t>(params.intervals);
    c.alpha[last] = 0.5 / q - lambda;
    c.beta[last] = 1.0;
    c.gamma[last] = 0.0;
    fill_derived(c, last);
    for (std::size_t n = last; n-- > 0;) {
        const double d = c.delta[n + 1], e = c.epsilon[n + 1], p = c.phi[n + 1];
        c.alpha[n] = c.alpha[n + 1] - 0.25 * d * e * e;
        c.beta[n] = c.beta[n + 1] * c.a + 0.5 * d * e * p;
        c.gamma[n] = c.gamma[n + 1] * c.a * c.a - 0.25 * d * p * p;
        fill_derived(c, n);
    }
    return c;
}

OwCoefficients closed_form_coefficients(double q, double lambda, const MarketParams& params) {
    auto c = prepare(q, lambda, params);
    const double a = c.a, ia = 1.0 / a, k = c.kappa;
    for (int n = 0; n <= params.intervals; ++n) {
        const double m = params.intervals - n;
        const double base = m * (ia - 1.0) + (1.0 + ia);
        const auto i = static_cast<std::size_t>(n);
        c.alpha[i] = ((1.0 + ia) - q * lambda * (m * (ia - 1.0) + 2.0 * (1.0 + ia))) / (2.0 * q * base);
        c.beta[i] = (1.0 + ia) / base;
        c.gamma[i] = m * (1.0 - ia) / (2.0 * k * base);
        c.delta[i] = 2.0 * ia * ia * base / (k * (m * (1.0 - ia * ia) + (m + 2.0) * (ia * ia * ia - ia)));
        c.epsilon[i] = k * (ia - a) / base;
        c.phi[i] = ((m + 1.0) * (ia - a) - m * (1.0 - a * a)) / base;
    }
    return c;
}

OwPath forward_strategy(const OwCoefficients& c, const MarketParams& params) {
    params.validate();
    if (c.intervals() != params.intervals) {
        throw InvalidParam("coefficient table was built for a different number of intervals");
    }
    const auto n_last = static_cast<std::size_t>(params.intervals);
    OwPath path;
    double remaining = params.x0;
    double transient = 0.0;
    for (std::size_t n = 0; n <= n_last; ++n) {
        path.remaining.push_back(remaining);
        path.transient_spread.push_back(transient);
        path.total_spread.push_back(transient + c.lambda * (params.x0 - remaining));
        const double xi = n == n_last
                              ? remaining
                              : 0.5 * c.delta[n + 1] * (c.epsilon[n + 1] * remaining - c.phi[n + 1] * transient);
        path.strategy.trades.push_back(xi);
        remaining -= xi;
        transient = c.a * (transient + c.kappa * xi);
    }
    return path;
}

void write_coefficients_csv(std::ostream& out, const OwCoefficients& c) {
    const auto old = out.precision(17);
    out << "n,alpha,beta,gamma,delta,epsilon,phi\n";
    for (std::size_t n = 0; n < c.alpha.size(); ++n) {
        out << n << ',' << c.alpha[n] << ',' << c.beta[n] << ',' << c.gamma[n] << ',' << c.delta[n] << ','
            << c.epsilon[n] << ',' << c.phi[n] << '\n';
    }
    out.precision(old);
}

}  // namespace lobexec
