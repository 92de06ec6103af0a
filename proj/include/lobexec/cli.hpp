#pragma once

#include "lobexec/dynamics.hpp"
#include "lobexec/shape.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace lobexec {

struct ShapeSpec {
    std::string kind = "block";  // block | power | sqrt | piecewise-ce | tabulated
    double q = 5000.0;
    double alpha = 0.5;
    double mu = 1.0;
    int n = 2;
    std::string csv_path;
};

/// Resolved run configuration. Defaults are the X0 = 100000, q = 5000,
/// rho = 20, T = 1, N = 10 study.
struct RunConfig {
    ShapeSpec shape;
    MarketParams market;
    double a0 = 0.0;
    std::uint64_t seed = 0;
};

/// Applies the keys present in a config document on top of `base`.
/// Unknown keys are rejected with InvalidParam.
RunConfig merge_config(RunConfig base, const nlohmann::json& document);
nlohmann::json to_json(const RunConfig& config);
ShapeFunction build_shape(const ShapeSpec& spec);

/// Entry point of the command-line tool. Exit codes: 0 ok, 1 usage or
/// invalid parameter, 2 precondition failure, 3 numerical failure,
/// 4 verification mismatch.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lobexec
