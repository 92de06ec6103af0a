#include "lobexec/io.hpp"

#include "lobexec/errors.hpp"

#include <cmath>
#include <ostream>

namespace lobexec {

namespace {

// JSON has no infinity; unconverged starts carry null instead.
nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json to_json(const CostReport& report) {
    return {{"total", report.total},
            {"base_term", report.base_term},
            {"impact_term", report.impact_term},
            {"per_trade", report.per_trade},
            {"lagrange_residual", report.lagrange_residual}};
}

nlohmann::json to_json(const ValidationReport& report) {
    return {{"verdict", to_string(report.verdict)},
            {"witness", report.witness},
            {"witness_value", number(report.witness_value)},
            {"detail", report.detail},
            {"grid_points", report.grid_points},
            {"working_volume", report.working_volume}};
}

nlohmann::json to_json(const OptimalSchedule& schedule) {
    const auto& d = schedule.diagnostics;
    nlohmann::json diagnostics = {{"root_residual", d.root_residual},
                                  {"lagrange_residual", d.lagrange_residual},
                                  {"preconditions_checked", d.preconditions_checked},
                                  {"sign_changes", d.sign_changes},
                                  {"candidate_roots", d.candidate_roots}};
    diagnostics["validation"] = to_json(d.validation);
    if (d.preconditions_checked) {
        diagnostics["validation"]["scope"] =
            "grid scan over the working volume range; passing is necessary, not sufficient";
    }
    return {{"model", model_number(schedule.model)},
            {"xi0", schedule.xi0},
            {"trades", schedule.strategy.trades},
            {"diagnostics", diagnostics}};
}

nlohmann::json to_json(const OracleResult& result) {
    nlohmann::json costs = nlohmann::json::array();
    for (double c : result.start_costs) costs.push_back(number(c));
    return {{"best_cost", result.best_cost},
            {"trades", result.best_strategy.trades},
            {"starts", result.starts},
            {"converged", result.converged},
            {"converged_starts", result.converged_starts},
            {"grid_resolution", result.grid_resolution},
            {"start_costs", costs}};
}

Strategy strategy_from_json(const nlohmann::json& document) {
    if (!document.contains("trades") || !document["trades"].is_array()) {
        throw InvalidParam("schedule document has no `trades` array");
    }
    Strategy s;
    for (const auto& v : document["trades"]) {
        if (!v.is_number()) throw InvalidParam("schedule document: trades must be numbers");
        s.trades.push_back(v.get<double>());
    }
    return s;
}

void write_schedule_csv(std::ostream& out, const Strategy& strategy) {
    const auto old = out.precision(17);
    out << "n,trade\n";
    for (std::size_t n = 0; n < strategy.size(); ++n) out << n << ',' << strategy[n] << '\n';
    out.precision(old);
}

}  // namespace lobexec
