#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "demagkit/hybrid.hpp"

namespace demagkit {

/// Reads a SolverConfig from a JSON object whose keys mirror the struct
/// fields. Unknown keys are rejected.
SolverConfig solver_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const SolverConfig& cfg);

KrylovMode parse_krylov_mode(const std::string& name);
std::string to_string(KrylovMode mode);

/// Parses `key=value` tokens; values are read as JSON when possible, as
/// strings otherwise. Dotted keys are not supported.
nlohmann::json parse_overrides(const std::vector<std::string>& tokens);

/// Copies `overrides` onto `base`, rejecting keys that `base` lacks.
void merge_params(nlohmann::json& base, const nlohmann::json& overrides);

}  // namespace demagkit
