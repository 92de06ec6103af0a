#pragma once

#include "lobexec/shape.hpp"

#include <string>

namespace lobexec {

enum class Verdict {
    Ok,
    H1NotInjective,
    H2NotInjective,
    ExplosionViolated,
    /// The working volume range is not covered by the shape (bounded F).
    InsufficientDepth,
};

std::string to_string(Verdict verdict);

/// Outcome of a grid scan. Passing is necessary, not sufficient: injectivity
/// over all of R cannot be decided from finitely many samples.
struct ValidationReport {
    Verdict verdict = Verdict::Ok;
    double witness = 0.0;        // volume (model 1) or price offset (model 2)
    double witness_value = 0.0;  // the offending l(y), h2(x), g(x) or growth ratio
    std::string detail;
    int grid_points = 0;
    double working_volume = 0.0;

    bool ok() const noexcept { return verdict == Verdict::Ok; }
};

/// Scans l(y) = f(F^-1(a y)) - a^2 f(F^-1(y)) > 0 over |y| <= working_volume
/// (512 log-spaced points per sign plus the volumes at kinks of f).
ValidationReport validate_model1(const ShapeFunction& shape, double a, double working_volume);

/// Scans g(x) = f(x) - a f(a x) > 0, monotonicity of h2, and the growth of
/// x^2 min_{[ax, x]} f over |x| <= F^-1(working_volume).
ValidationReport validate_model2(const ShapeFunction& shape, double a, double working_volume);

}  // namespace lobexec
