#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace lobexec {

// Built-in shape families. Each describes the density on x >= 0; negative
// offsets mirror it (f(-x) = f(x), F(-x) = -F(x)).

/// f(x) = q / (|x| + 1)^alpha
struct PowerLaw {
    double q;
    double alpha;
};

/// f(x) = q, the block-shaped book.
struct Block {
    double q;
};

/// f(x) = q / sqrt(1 + mu |x|)
struct SqrtShape {
    double q;
    double mu;
};

/// Three-branch density for which h2 is not one-to-one when a = 1/n:
/// n+1 on [0, 1/n), a line of slope -n^2/(n-1) on [1/n, 1], and 1 beyond.
struct PiecewiseCounterexample {
    int n;
};

/// Density given at grid offsets and linearly interpolated in between. Offsets
/// must straddle zero; evaluation outside the grid is an OutOfDomain error.
struct TabulatedData {
    std::vector<double> offsets;
    std::vector<double> densities;
};

/// Limit order book shape: the density f of shares per unit price offset
/// and its transforms
///   F(x)  = int_0^x f          (volume)
///   F~(z) = int_0^z x f(x) dx  (moment)
///   G(y)  = F~(F^-1(y))        (eating_cost)
/// Immutable and cheap to copy; tabulated data is shared.
class ShapeFunction {
public:
    struct Tabulated;  // precomputed tables, defined in shape.cpp
    using Kind = std::variant<PowerLaw, Block, SqrtShape, PiecewiseCounterexample,
                              std::shared_ptr<const Tabulated>>;

    static ShapeFunction power_law(double q, double alpha);
    static ShapeFunction block(double q);
    static ShapeFunction sqrt_shape(double q, double mu);
    static ShapeFunction piecewise_counterexample(int n);
    static ShapeFunction tabulated(TabulatedData data);
    /// Reads `offset,density` CSV (header required).
    static ShapeFunction load_csv(const std::filesystem::path& path);

    double density(double x) const;
    /// f'(x); one-sided (right) at kinks.
    double density_slope(double x) const;
    double volume(double x) const;
    double inverse_volume(double y) const;
    double moment(double z) const;
    double eating_cost(double y) const;
    /// f(x) - a^k f(a x) for k in {1, 2}, in a form that stays accurate when
    /// the two terms nearly cancel (large |x|).
    double decay_gap(double x, double a, int k) const;

    /// Volume range reachable by F; infinite for the unbounded families.
    std::pair<double, double> volume_range() const;
    /// Offsets where f is not differentiable (validators sample them).
    std::vector<double> kinks() const;

    const Kind& kind() const noexcept { return kind_; }
    std::string name() const;
    bool is_block() const noexcept { return std::holds_alternative<Block>(kind_); }

private:
    explicit ShapeFunction(Kind kind) : kind_(std::move(kind)) {}
    Kind kind_;
};

}  // namespace lobexec
