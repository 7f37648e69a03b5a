#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "tfnp/lifting.hpp"
#include "tfnp/problems.hpp"

namespace tfnp {

// {"problem", "params": {"n"}, "circuit" | "circuits", "aux"}. Circuits are in
// the textual format or "tt:<in>:<out>:<hex>" truth tables (n <= 12).
nlohmann::json instance_to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& j);  // throws MalformedError
Instance parse_instance(const std::string& text);      // JSON object or first line of JSON-lines
std::vector<Instance> parse_instances(const std::string& text);

// {"y": hex, "rows": [[hex, ...], ...]}. Entries may carry an explicit width as
// "<width>'<hex>"; otherwise widths come from the instance.
nlohmann::json solution_to_json(const Instance& inst, const Solution& sol);
Solution solution_from_json(const Instance& inst, const nlohmann::json& j);
// A bit string ("0101"), a "0x" hex string, or a JSON solution object.
Solution parse_solution(const Instance& inst, const std::string& text);

}  // namespace tfnp
