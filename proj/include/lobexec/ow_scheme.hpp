#pragma once

#include "lobexec/dynamics.hpp"
#include "lobexec/strategy.hpp"

#include <iosfwd>
#include <vector>

namespace lobexec {

/// Coefficients of the recursive scheme for a block book of depth q
/// with permanent impact lambda, indexed n = 0..N.
struct OwCoefficients {
    double q = 0.0;
    double lambda = 0.0;
    double kappa = 0.0;  // 1/q - lambda
    double a = 0.0;
    std::vector<double> alpha, beta, gamma, delta, epsilon, phi;

    int intervals() const noexcept { return static_cast<int>(alpha.size()) - 1; }
};

/// Backward induction from alpha_N = 1/(2q) - lambda, beta_N = 1, gamma_N = 0.
OwCoefficients backward_coefficients(double q, double lambda, const MarketParams& params);
/// Explicit closed forms of the same sequences.
OwCoefficients closed_form_coefficients(double q, double lambda, const MarketParams& params);

struct OwPath {
    Strategy strategy;
    std::vector<double> remaining;         // X_{t_n}, shares still to buy before trade n
    std::vector<double> transient_spread;  // sum kappa e^{-rho(t_n - t_k)} xi_k over t_k < t_n
    std::vector<double> total_spread;      // transient part plus lambda * (shares bought so far)
};

/// Forward scheme xi_n = delta_{n+1} (epsilon_{n+1} X_{t_n} - phi_{n+1} D_{t_n}) / 2,
/// xi_N = X_T, where D is the transient part of the spread.
OwPath forward_strategy(const OwCoefficients& coefficients, const MarketParams& params);

/// CSV with header `n,alpha,beta,gamma,delta,epsilon,phi`, full precision.
void write_coefficients_csv(std::ostream& out, const OwCoefficients& coefficients);

}  // namespace lobexec
