#pragma once

#include "lobexec/cost.hpp"
#include "lobexec/oracle.hpp"
#include "lobexec/solver.hpp"
#include "lobexec/validators.hpp"

#include <json.hpp>

#include <iosfwd>

namespace lobexec {

nlohmann::json to_json(const CostReport& report);
nlohmann::json to_json(const ValidationReport& report);
/// {model, xi0, trades[], diagnostics}
nlohmann::json to_json(const OptimalSchedule& schedule);
/// {best_cost, trades[], starts, converged, ...}
nlohmann::json to_json(const OracleResult& result);

/// Reads the `trades` array of a schedule document.
Strategy strategy_from_json(const nlohmann::json& document);

/// CSV with header `n,trade`, full precision.
void write_schedule_csv(std::ostream& out, const Strategy& strategy);

}  // namespace lobexec
