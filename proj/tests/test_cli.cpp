#include "lobexec/cli.hpp"
#include "lobexec/errors.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace lobexec;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("lobexec_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

nlohmann::json read_json(const fs::path& path) {
    std::ifstream in(path);
    return nlohmann::json::parse(in);
}

std::vector<std::string> read_lines(const fs::path& path) {
    std::ifstream in(path);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

TEST_CASE("solve writes the block schedule in both models") {
    const auto dir = scratch("solve");
    const double xi0 = 1e5 / (9 * (1 - std::exp(-2.0)) + 2);
    std::vector<double> first;
    for (const char* model : {"1", "2"}) {
        const auto r = run({"solve", "--shape", "block", "--q", "5000", "--x0", "100000", "--n", "10", "--rho", "20",
                            "--t", "1", "--model", model, "--out-dir", dir.string()});
        REQUIRE(r.code == 0);
        CHECK(r.out.find("xi0 = 10222.9") != std::string::npos);
        const auto doc = read_json(dir / "schedule.json");
        CHECK(doc["model"] == std::stoi(model));
        CHECK(doc["xi0"].get<double>() == doctest::Approx(xi0).epsilon(1e-9));
        CHECK(doc["trades"].size() == 11);
        CHECK(doc["diagnostics"].contains("lagrange_residual"));
        CHECK(doc["diagnostics"]["validation"]["verdict"] == "ok");
        const auto trades = doc["trades"].get<std::vector<double>>();
        if (first.empty()) {
            first = trades;
        } else {
            for (std::size_t n = 0; n < trades.size(); ++n) CHECK(trades[n] == doctest::Approx(first[n]).epsilon(1e-9));
        }
        const auto csv = read_lines(dir / "schedule.csv");
        CHECK(csv.front() == "n,trade");
        CHECK(csv.size() == 12);
    }
}

TEST_CASE("replay reproduces the stored cost") {
    const auto dir = scratch("replay");
    REQUIRE(run({"solve", "--shape", "power", "--alpha", "1", "--model", "2", "--a0", "100", "--out-dir",
                 dir.string()})
                .code == 0);
    const auto r = run({"replay", "--out-dir", dir.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("relative deviation") != std::string::npos);
    const auto csv = read_lines(dir / "trajectory.csv");
    CHECK(csv.front() == "n,t,E_pre,D_pre,E_post,D_post");
    CHECK(csv.size() == 12);

    // A tampered cost is caught.
    auto doc = read_json(dir / "schedule.json");
    doc["diagnostics"]["cost"]["total"] = doc["diagnostics"]["cost"]["total"].get<double>() * 1.001;
    std::ofstream(dir / "tampered.json") << doc.dump();
    CHECK(run({"replay", "--schedule", (dir / "tampered.json").string(), "--out-dir", dir.string()}).code == 4);
    CHECK(run({"replay", "--schedule", (dir / "missing.json").string(), "--out-dir", dir.string()}).code == 1);
}

TEST_CASE("counterexample solve exits with the witness") {
    const auto dir = scratch("ce");
    const auto r = run({"solve", "--shape", "piecewise-ce", "--n-param", "2", "--model", "2", "--x0", "14.5", "--rho",
                        std::to_string(10 * std::log(2.0)), "--out-dir", dir.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("h2_not_injective") != std::string::npos);
    CHECK(r.err.find("witness: 1 ") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "schedule.json"));
}

TEST_CASE("sweep rows follow the ordering patterns") {
    const auto dir = scratch("sweep");
    const auto r = run({"sweep", "--shape", "power", "--alphas", "-2,-1,0,0.5,1,3", "--out-dir", dir.string()});
    REQUIRE(r.code == 0);
    const auto lines = read_lines(dir / "sweep.csv");
    REQUIRE(lines.size() == 13);
    CHECK(lines.front() == "alpha,model,xi0,xi1,xiN,cost,status");
    double xi1_model1 = 0.0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto c = split(lines[i]);
        REQUIRE(c.size() == 7);
        const double alpha = std::stod(c[0]);
        const int model = std::stoi(c[1]);
        if (alpha == 3.0) {
            CHECK(c[6] == "insufficient_depth");
            CHECK(c[2] == "nan");
            continue;
        }
        CHECK(c[6] == "ok");
        const double xi0 = std::stod(c[2]), xi1 = std::stod(c[3]), xin = std::stod(c[4]);
        if (model == 1) {
            xi1_model1 = xi1;
            if (alpha > 0) CHECK(xi0 > xin);
            if (alpha < 0) CHECK(xi0 < xin);
            if (alpha == 0) CHECK(xi0 == doctest::Approx(xin).epsilon(1e-12));
        } else {
            if (alpha > 0) CHECK(xi1_model1 > xi1);
            if (alpha < 0) CHECK(xi1_model1 < xi1);
        }
    }
}

TEST_CASE("ow-compare") {
    const auto dir = scratch("ow");
    const auto r = run({"ow-compare", "--shape", "block", "--lambdas", "0,5e-5,1.5e-4", "--out-dir", dir.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("PASS") != std::string::npos);
    const auto lines = read_lines(dir / "ow_compare.csv");
    CHECK(lines.front() == "lambda,n,ow_trade,closed_form_trade,rel_dev,match");
    CHECK(lines.size() == 1 + 3 * 11);
    for (std::size_t i = 1; i < lines.size(); ++i) CHECK(split(lines[i]).back() == "true");

    const auto bad = run({"ow-compare", "--shape", "block", "--lambdas", "2e-4", "--out-dir", dir.string()});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("invalid parameter") != std::string::npos);
}

TEST_CASE("oracle-check") {
    const auto dir = scratch("oracle");
    for (const char* model : {"1", "2"}) {
        const auto r = run({"oracle-check", "--shape", "power", "--alpha", "1", "--model", model});
        CHECK(r.code == 0);
        CHECK(r.out.find("PASS") != std::string::npos);
    }
    const auto forced = run({"oracle-check", "--shape", "piecewise-ce", "--n-param", "2", "--model", "2", "--x0",
                             "14.5", "--rho", std::to_string(10 * std::log(2.0)), "--force", "--starts", "8"});
    CHECK(forced.out.find("oracle beats this root strategy") != std::string::npos);
}

TEST_CASE("configuration precedence") {
    const auto dir = scratch("config");
    const auto cfg = dir / "run.json";
    std::ofstream(cfg) << R"({"shape": {"kind": "block", "q": 2500}, "n": 4, "x0": 1000})";
    REQUIRE(run({"solve", "--config", cfg.string(), "--n", "5", "--out-dir", dir.string()}).code == 0);
    const auto doc = read_json(dir / "schedule.json");
    CHECK(doc["config"]["n"] == 5);            // flag beats file
    CHECK(doc["config"]["x0"] == 1000.0);      // file beats default
    CHECK(doc["config"]["shape"]["q"] == 2500.0);
    CHECK(doc["config"]["rho"] == 20.0);       // default
    CHECK(doc["trades"].size() == 6);

    std::ofstream(dir / "bad.json") << R"({"shape": {"kind": "block"}, "horizon": 2})";
    const auto r = run({"solve", "--config", (dir / "bad.json").string(), "--out-dir", dir.string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("horizon") != std::string::npos);
}

TEST_CASE("merge_config and build_shape") {
    const auto merged = merge_config(RunConfig{}, nlohmann::json{{"model", 2}, {"shape", {{"kind", "sqrt"}, {"mu", 3}}}});
    CHECK(merged.market.mode == ResilienceMode::SpreadRecovery);
    CHECK(build_shape(merged.shape).name().find("sqrt") != std::string::npos);
    CHECK_THROWS_AS(merge_config(RunConfig{}, nlohmann::json{{"model", 3}}), InvalidParam);
    CHECK_THROWS_AS(build_shape(ShapeSpec{"cubic"}), InvalidParam);
    CHECK_THROWS_AS(build_shape(ShapeSpec{"tabulated"}), InvalidParam);
}

TEST_CASE("usage errors") {
    CHECK(run({}).code == 1);
    CHECK(run({"solve", "--bogus"}).code == 1);
    CHECK(run({"solve", "--x0", "0"}).code == 1);
    CHECK(run({"solve", "--model", "7"}).code == 1);
    CHECK(run({"--help"}).code == 0);
}
