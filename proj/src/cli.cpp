#include "lobexec/cli.hpp"

#include "lobexec/cost.hpp"
#include "lobexec/errors.hpp"
#include "lobexec/io.hpp"
#include "lobexec/oracle.hpp"
#include "lobexec/ow_scheme.hpp"
#include "lobexec/solver.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace lobexec {

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitPrecondition = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitMismatch = 4;

constexpr double kOracleTradeTolerance = 1e-5;  // per trade, relative to X0
constexpr double kOracleCostTolerance = 1e-7;   // relative to the solver cost
constexpr double kOwTolerance = 1e-9;
constexpr double kReplayTolerance = 1e-9;

// Raw command-line values; an option only overrides the config when it was given.
struct Flags {
    std::string config_path;
    ShapeSpec shape;
    MarketParams market;
    int model = 1;
    double a0 = 0.0;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    double range_factor = 2.0;
    bool force = false;
    int starts = 4;
    std::vector<double> alphas{-2.0, -1.0, 0.0, 0.5, 1.0};
    std::vector<double> lambdas{0.0, 5e-5, 1.5e-4};
    std::string schedule_path;

    std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> overrides;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config_path, "JSON config file (flags take precedence)");
    auto over = [&](CLI::Option* opt, std::function<void(RunConfig&)> apply) {
        f.overrides.emplace_back(opt, std::move(apply));
    };
    over(sub->add_option("--shape", f.shape.kind, "block | power | sqrt | piecewise-ce | tabulated"),
         [&f](RunConfig& c) { c.shape.kind = f.shape.kind; });
    over(sub->add_option("--q", f.shape.q, "order book depth q"), [&f](RunConfig& c) { c.shape.q = f.shape.q; });
    over(sub->add_option("--alpha", f.shape.alpha, "power law exponent"),
         [&f](RunConfig& c) { c.shape.alpha = f.shape.alpha; });
    over(sub->add_option("--mu", f.shape.mu, "sqrt shape slope"), [&f](RunConfig& c) { c.shape.mu = f.shape.mu; });
    over(sub->add_option("--n-param", f.shape.n, "piecewise counterexample parameter n"),
         [&f](RunConfig& c) { c.shape.n = f.shape.n; });
    over(sub->add_option("--csv", f.shape.csv_path, "tabulated shape CSV (offset,density)"),
         [&f](RunConfig& c) { c.shape.csv_path = f.shape.csv_path; });
    over(sub->add_option("--x0", f.market.x0, "shares to buy"), [&f](RunConfig& c) { c.market.x0 = f.market.x0; });
    over(sub->add_option("--t", f.market.horizon, "time horizon T"),
         [&f](RunConfig& c) { c.market.horizon = f.market.horizon; });
    over(sub->add_option("--n", f.market.intervals, "number of intervals N"),
         [&f](RunConfig& c) { c.market.intervals = f.market.intervals; });
    over(sub->add_option("--rho", f.market.rho, "resilience speed rho"),
         [&f](RunConfig& c) { c.market.rho = f.market.rho; });
    over(sub->add_option("--model", f.model, "resilience model (1: volume, 2: spread)"),
         [&f](RunConfig& c) { c.market.mode = mode_from_number(f.model); });
    over(sub->add_option("--a0", f.a0, "unaffected price A0"), [&f](RunConfig& c) { c.a0 = f.a0; });
    over(sub->add_option("--seed", f.seed, "random seed for oracle starts"), [&f](RunConfig& c) { c.seed = f.seed; });
    sub->add_option("--out-dir", f.out_dir, "directory for output files")->capture_default_str();
}

RunConfig resolve(const Flags& f) {
    RunConfig cfg;
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        if (!in) throw InvalidParam("cannot open config file " + f.config_path);
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw InvalidParam("config file " + f.config_path + " is not valid JSON: " + e.what());
        }
        cfg = merge_config(cfg, doc);
    }
    for (const auto& [opt, apply] : f.overrides) {
        if (opt->count() > 0) apply(cfg);
    }
    cfg.market.validate();
    if (!(cfg.market.x0 > 0.0)) throw InvalidParam("X0 must be > 0");
    return cfg;
}

std::string format(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

fs::path prepare_dir(const std::string& dir) {
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw InvalidParam("cannot write " + path.string());
    return out;
}

double max_trade_deviation(const Strategy& a, const Strategy& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

SolveOptions solve_options(const Flags& f) {
    SolveOptions o;
    o.check_preconditions = !f.force;
    o.range_factor = f.range_factor;
    return o;
}

void print_schedule(std::ostream& out, const RunConfig& cfg, const ShapeFunction& shape,
                    const OptimalSchedule& s, const CostReport& cost) {
    const auto& t = s.strategy.trades;
    out << "shape " << shape.name() << ", model " << model_number(s.model) << ", N = " << cfg.market.intervals
        << ", a = " << format(cfg.market.decay_factor()) << "\n";
    out << "xi0 = " << format(t.front()) << "\n";
    out << "xi1 = " << format(t.size() > 2 ? t[1] : t.back()) << "\n";
    out << "xiN = " << format(t.back()) << "\n";
    out << "total cost = " << format(cost.total) << "\n";
    out << "lagrange residual = " << format(s.diagnostics.lagrange_residual) << "\n";
}

int cmd_solve(const Flags& f, std::ostream& out) {
    const auto cfg = resolve(f);
    const auto shape = build_shape(cfg.shape);
    const auto schedule = solve(cfg.market, shape, solve_options(f));
    const auto cost = cost_report(cfg.market, shape, schedule.strategy, cfg.a0);
    print_schedule(out, cfg, shape, schedule, cost);

    const auto dir = prepare_dir(f.out_dir);
    auto csv = open_out(dir / "schedule.csv");
    write_schedule_csv(csv, schedule.strategy);
    auto doc = to_json(schedule);
    doc["diagnostics"]["cost"] = to_json(cost);
    doc["config"] = to_json(cfg);
    auto js = open_out(dir / "schedule.json");
    js << std::setprecision(17) << doc.dump(2) << "\n";
    out << "wrote " << (dir / "schedule.csv").string() << " and " << (dir / "schedule.json").string() << "\n";
    return kExitOk;
}

std::string status_of(const std::exception& e) {
    if (const auto* p = dynamic_cast<const PreconditionFailed*>(&e)) {
        const auto& reason = p->reason();
        return reason.substr(0, reason.find(':'));
    }
    if (dynamic_cast<const NoRootInBracket*>(&e)) return "no_root";
    if (dynamic_cast<const OutOfDomain*>(&e)) return "out_of_domain";
    if (dynamic_cast<const InvalidParam*>(&e)) return "invalid_param";
    return "error";
}

int cmd_sweep(const Flags& f, std::ostream& out) {
    const auto cfg = resolve(f);
    if (cfg.shape.kind != "power") throw InvalidParam("sweep runs over the power law family; use --shape power");
    struct Row {
        double alpha;
        int model;
        std::vector<double> trades;
        double cost = 0.0;
        std::string status = "ok";
    };
    std::vector<std::future<Row>> jobs;
    for (double alpha : f.alphas) {
        for (int model : {1, 2}) {
            jobs.push_back(std::async(std::launch::async, [&cfg, &f, alpha, model] {
                Row row{alpha, model, {}, 0.0, "ok"};
                try {
                    auto params = cfg.market;
                    params.mode = mode_from_number(model);
                    const auto shape = ShapeFunction::power_law(cfg.shape.q, alpha);
                    const auto s = solve(params, shape, solve_options(f));
                    row.trades = s.strategy.trades;
                    row.cost = cost_report(params, shape, s.strategy, cfg.a0).total;
                } catch (const std::exception& e) {
                    row.status = status_of(e);
                }
                return row;
            }));
        }
    }
    const auto dir = prepare_dir(f.out_dir);
    auto csv = open_out(dir / "sweep.csv");
    csv << std::setprecision(17) << "alpha,model,xi0,xi1,xiN,cost,status\n";
    out << std::left << std::setw(8) << "alpha" << std::setw(7) << "model" << std::setw(13) << "xi0"
        << std::setw(13) << "xi1" << std::setw(13) << "xiN" << std::setw(13) << "cost"
        << "status\n";
    for (auto& job : jobs) {
        const Row row = job.get();
        csv << row.alpha << ',' << row.model << ',';
        out << std::setw(8) << format(row.alpha) << std::setw(7) << row.model;
        if (row.trades.empty()) {
            csv << "nan,nan,nan,nan,";
            out << std::setw(13) << "-" << std::setw(13) << "-" << std::setw(13) << "-" << std::setw(13) << "-";
        } else {
            const double xi1 = row.trades.size() > 2 ? row.trades[1] : row.trades.back();
            csv << row.trades.front() << ',' << xi1 << ',' << row.trades.back() << ',' << row.cost << ',';
            out << std::setw(13) << format(row.trades.front()) << std::setw(13) << format(xi1) << std::setw(13)
                << format(row.trades.back()) << std::setw(13) << format(row.cost);
        }
        csv << row.status << '\n';
        out << row.status << '\n';
    }
    out << "wrote " << (dir / "sweep.csv").string() << "\n";
    return kExitOk;
}

int cmd_replay(const Flags& f, std::ostream& out, std::ostream& err) {
    const auto dir = prepare_dir(f.out_dir);
    const fs::path path = f.schedule_path.empty() ? dir / "schedule.json" : fs::path(f.schedule_path);
    std::ifstream in(path);
    if (!in) throw InvalidParam("cannot open schedule " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidParam("schedule " + path.string() + " is not valid JSON: " + e.what());
    }
    if (!doc.contains("config")) throw InvalidParam("schedule document carries no config");
    const auto cfg = merge_config(RunConfig{}, doc["config"]);
    const auto shape = build_shape(cfg.shape);
    const auto strategy = strategy_from_json(doc);
    check_admissible(strategy, cfg.market);

    const auto cost = cost_report(cfg.market, shape, strategy, cfg.a0);
    auto csv = open_out(dir / "trajectory.csv");
    write_trajectory_csv(csv, replay(cfg.market, shape, strategy));
    out << "replayed " << strategy.size() << " trades, total cost = " << format(cost.total) << "\n";
    out << "wrote " << (dir / "trajectory.csv").string() << "\n";

    const auto stored = doc.value("/diagnostics/cost/total"_json_pointer, std::nan(""));
    if (std::isnan(stored)) return kExitOk;
    const double rel = std::abs(cost.total - stored) / std::max(std::abs(stored), std::numeric_limits<double>::min());
    out << "stored cost = " << format(stored) << ", relative deviation = " << format(rel) << "\n";
    if (rel > kReplayTolerance) {
        err << "replayed cost deviates from the stored cost by " << rel << " (tolerance " << kReplayTolerance << ")\n";
        return kExitMismatch;
    }
    return kExitOk;
}

int cmd_oracle_check(const Flags& f, std::ostream& out) {
    const auto cfg = resolve(f);
    const auto shape = build_shape(cfg.shape);
    const auto schedule = solve(cfg.market, shape, solve_options(f));
    const double solver_cost = impact_cost(cfg.market, shape, schedule.strategy);
    const auto oracle = minimize_cost(cfg.market, shape, f.starts, cfg.seed);
    const double x0 = cfg.market.x0;

    const double trade_dev = max_trade_deviation(schedule.strategy, oracle.best_strategy);
    const double cost_dev = std::abs(oracle.best_cost - solver_cost) / std::abs(solver_cost);
    out << "solver xi0 = " << format(schedule.xi0) << ", cost = " << format(solver_cost) << "\n";
    out << "oracle cost = " << format(oracle.best_cost) << " (" << oracle.converged_starts << "/" << oracle.starts
        << " starts converged)\n";
    out << "max per-trade deviation = " << format(trade_dev) << " (tolerance " << format(kOracleTradeTolerance * x0)
        << ")\n";
    out << "relative cost deviation = " << format(cost_dev) << " (tolerance " << format(kOracleCostTolerance) << ")\n";

    if (f.force) {
        for (double root : schedule.diagnostics.candidate_roots) {
            const auto candidate = strategy_from_xi0(cfg.market, shape, root);
            const double c = impact_cost(cfg.market, shape, candidate);
            const double margin = c - oracle.best_cost;
            out << "candidate root xi0 = " << format(root) << ": cost = " << format(c);
            if (margin > kOracleCostTolerance * std::abs(oracle.best_cost)) {
                out << ", oracle beats this root strategy by " << format(margin);
            } else {
                out << ", matches the oracle minimum";
            }
            out << "\n";
        }
    }
    const bool pass = trade_dev <= kOracleTradeTolerance * x0 && cost_dev <= kOracleCostTolerance;
    out << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? kExitOk : kExitMismatch;
}

int cmd_ow_compare(const Flags& f, std::ostream& out) {
    const auto cfg = resolve(f);
    if (cfg.shape.kind != "block") throw InvalidParam("ow-compare needs a block shape (--shape block)");
    const double q = cfg.shape.q;
    const auto closed = solve_block(cfg.market, q).strategy;

    const auto dir = prepare_dir(f.out_dir);
    auto csv = open_out(dir / "ow_compare.csv");
    csv << std::setprecision(17) << "lambda,n,ow_trade,closed_form_trade,rel_dev,match\n";
    bool all_match = true;
    for (double lambda : f.lambdas) {
        const auto path = forward_strategy(backward_coefficients(q, lambda, cfg.market), cfg.market);
        double worst = 0.0;
        for (std::size_t n = 0; n < closed.size(); ++n) {
            const double rel = std::abs(path.strategy[n] - closed[n]) / std::abs(closed[n]);
            const bool match = rel <= kOwTolerance;
            all_match = all_match && match;
            worst = std::max(worst, rel);
            csv << lambda << ',' << n << ',' << path.strategy[n] << ',' << closed[n] << ',' << rel << ','
                << (match ? "true" : "false") << '\n';
        }
        out << "lambda = " << format(lambda) << ": xi0 = " << format(path.strategy[0])
            << ", max relative deviation from closed form = " << format(worst) << "\n";
    }
    out << "wrote " << (dir / "ow_compare.csv").string() << "\n";
    out << (all_match ? "PASS" : "FAIL") << "\n";
    return all_match ? kExitOk : kExitMismatch;
}

}  // namespace

RunConfig merge_config(RunConfig base, const nlohmann::json& doc) {
    if (!doc.is_object()) throw InvalidParam("config must be a JSON object");
    auto number = [](const nlohmann::json& v, const std::string& key) {
        if (!v.is_number()) throw InvalidParam("config key `" + key + "` must be a number");
        return v.get<double>();
    };
    for (const auto& [key, v] : doc.items()) {
        if (key == "shape") {
            if (!v.is_object()) throw InvalidParam("config key `shape` must be an object");
            for (const auto& [sk, sv] : v.items()) {
                if (sk == "kind" || sk == "csv_path") {
                    if (!sv.is_string()) throw InvalidParam("config key `shape." + sk + "` must be a string");
                    (sk == "kind" ? base.shape.kind : base.shape.csv_path) = sv.get<std::string>();
                } else if (sk == "q") {
                    base.shape.q = number(sv, "shape.q");
                } else if (sk == "alpha") {
                    base.shape.alpha = number(sv, "shape.alpha");
                } else if (sk == "mu") {
                    base.shape.mu = number(sv, "shape.mu");
                } else if (sk == "n") {
                    base.shape.n = static_cast<int>(number(sv, "shape.n"));
                } else {
                    throw InvalidParam("unknown config key `shape." + sk + "`");
                }
            }
        } else if (key == "x0") {
            base.market.x0 = number(v, key);
        } else if (key == "t") {
            base.market.horizon = number(v, key);
        } else if (key == "n") {
            base.market.intervals = static_cast<int>(number(v, key));
        } else if (key == "rho") {
            base.market.rho = number(v, key);
        } else if (key == "model") {
            base.market.mode = mode_from_number(static_cast<int>(number(v, key)));
        } else if (key == "a0") {
            base.a0 = number(v, key);
        } else if (key == "seed") {
            base.seed = static_cast<std::uint64_t>(number(v, key));
        } else {
            throw InvalidParam("unknown config key `" + key + "`");
        }
    }
    return base;
}

nlohmann::json to_json(const RunConfig& c) {
    return {{"shape",
             {{"kind", c.shape.kind},
              {"q", c.shape.q},
              {"alpha", c.shape.alpha},
              {"mu", c.shape.mu},
              {"n", c.shape.n},
              {"csv_path", c.shape.csv_path}}},
            {"x0", c.market.x0},
            {"t", c.market.horizon},
            {"n", c.market.intervals},
            {"rho", c.market.rho},
            {"model", model_number(c.market.mode)},
            {"a0", c.a0},
            {"seed", c.seed}};
}

ShapeFunction build_shape(const ShapeSpec& s) {
    if (s.kind == "block") return ShapeFunction::block(s.q);
    if (s.kind == "power") return ShapeFunction::power_law(s.q, s.alpha);
    if (s.kind == "sqrt") return ShapeFunction::sqrt_shape(s.q, s.mu);
    if (s.kind == "piecewise-ce") return ShapeFunction::piecewise_counterexample(s.n);
    if (s.kind == "tabulated") {
        if (s.csv_path.empty()) throw InvalidParam("tabulated shape needs --csv");
        return ShapeFunction::load_csv(s.csv_path);
    }
    throw InvalidParam("unknown shape kind `" + s.kind + "`");
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optimal execution schedules in limit order books with general shape functions", "lobexec"};
    app.require_subcommand(1);
    Flags f;

    auto* solve_cmd = app.add_subcommand("solve", "solve for the optimal schedule and write schedule.csv/json");
    add_common(solve_cmd, f);
    solve_cmd->add_flag("--force", f.force, "skip the precondition checks");
    solve_cmd->add_option("--range-factor", f.range_factor, "validators scan volumes up to this multiple of X0");

    auto* sweep_cmd = app.add_subcommand("sweep", "solve both models over a grid of power law exponents");
    add_common(sweep_cmd, f);
    sweep_cmd->add_option("--alphas", f.alphas, "exponent grid")->delimiter(',');
    sweep_cmd->add_option("--range-factor", f.range_factor, "validators scan volumes up to this multiple of X0");

    auto* replay_cmd = app.add_subcommand("replay", "replay a schedule.json and write trajectory.csv");
    replay_cmd->add_option("--schedule", f.schedule_path, "schedule.json to replay (default <out-dir>/schedule.json)");
    replay_cmd->add_option("--out-dir", f.out_dir, "directory for output files");

    auto* oracle_cmd = app.add_subcommand("oracle-check", "compare the solver against the brute-force minimizer");
    add_common(oracle_cmd, f);
    oracle_cmd->add_option("--starts", f.starts, "number of descent starts")->capture_default_str();
    oracle_cmd->add_flag("--force", f.force, "skip the precondition checks and compare every candidate root");
    oracle_cmd->add_option("--range-factor", f.range_factor, "validators scan volumes up to this multiple of X0");

    auto* ow_cmd = app.add_subcommand("ow-compare", "compare the recursive scheme with the block closed form");
    add_common(ow_cmd, f);
    ow_cmd->add_option("--lambdas", f.lambdas, "permanent impact values")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*solve_cmd) return cmd_solve(f, out);
        if (*sweep_cmd) return cmd_sweep(f, out);
        if (*replay_cmd) return cmd_replay(f, out, err);
        if (*oracle_cmd) return cmd_oracle_check(f, out);
        if (*ow_cmd) return cmd_ow_compare(f, out);
    } catch (const PreconditionFailed& e) {
        err << "precondition failed: " << e.reason() << "\n"
            << "witness: " << std::setprecision(10) << e.witness() << " (value " << e.witness_value() << ")\n";
        return kExitPrecondition;
    } catch (const InvalidParam& e) {
        err << "invalid parameter: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const fs::filesystem_error& e) {
        err << "file system error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitUsage;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("lobexec");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace lobexec
