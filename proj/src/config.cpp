#include "demagkit/config.hpp"

#include <stdexcept>

namespace demagkit {

namespace {

template <class T>
T get(const nlohmann::json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw std::invalid_argument("config: bad value for '" + key + "': " + v.dump());
  }
}

}  // namespace

KrylovMode parse_krylov_mode(const std::string& name) {
  if (name == "automatic") return KrylovMode::automatic;
  if (name == "arnoldi") return KrylovMode::arnoldi;
  if (name == "lanczos") return KrylovMode::lanczos;
  throw std::invalid_argument("unknown krylov_mode '" + name + "'");
}

std::string to_string(KrylovMode mode) {
  switch (mode) {
    case KrylovMode::arnoldi:
      return "arnoldi";
    case KrylovMode::lanczos:
      return "lanczos";
    case KrylovMode::automatic:
      break;
  }
  return "automatic";
}

SolverConfig solver_config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("config: expected a JSON object");
  SolverConfig cfg;
  for (const auto& [key, v] : doc.items()) {
    if (key == "dim") cfg.dim = get<int>(v, key);
    else if (key == "R") cfg.R = get<double>(v, key);
    else if (key == "T") cfg.T = get<double>(v, key);
    else if (key == "k") cfg.k = get<int>(v, key);
    else if (key == "n_per_unit") cfg.n_per_unit = get<int>(v, key);
    else if (key == "cg_tol") cfg.cg_tol = get<double>(v, key);
    else if (key == "cg_max_iter") cfg.cg_max_iter = get<int>(v, key);
    else if (key == "omega0") {
      if (v.is_null()) cfg.omega0.reset();
      else cfg.omega0 = get<double>(v, key);
    } else if (key == "T_rule") cfg.T_rule = parse_t_rule(get<std::string>(v, key));
    else if (key == "c_d") cfg.c_d = get<double>(v, key);
    else if (key == "lambda1") cfg.lambda1 = get<double>(v, key);
    else if (key == "omega_half_width") cfg.omega_half_width = get<double>(v, key);
    else if (key == "ngp") cfg.ngp = get<int>(v, key);
    else if (key == "krylov_mode") cfg.krylov_mode = parse_krylov_mode(get<std::string>(v, key));
    else throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  return cfg;
}

nlohmann::json to_json(const SolverConfig& cfg) {
  nlohmann::json doc = {{"dim", cfg.dim},
                        {"R", cfg.R},
                        {"T", cfg.T},
                        {"k", cfg.k},
                        {"n_per_unit", cfg.n_per_unit},
                        {"cg_tol", cfg.cg_tol},
                        {"cg_max_iter", cfg.cg_max_iter},
                        {"T_rule", to_string(cfg.T_rule)},
                        {"c_d", cfg.c_d},
                        {"lambda1", cfg.lambda1},
                        {"omega_half_width", cfg.omega_half_width},
                        {"ngp", cfg.ngp},
                        {"krylov_mode", to_string(cfg.krylov_mode)}};
  doc["omega0"] = cfg.omega0 ? nlohmann::json(*cfg.omega0) : nlohmann::json(nullptr);
  return doc;
}

nlohmann::json parse_overrides(const std::vector<std::string>& tokens) {
  nlohmann::json out = nlohmann::json::object();
  for (const std::string& tok : tokens) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::invalid_argument("override '" + tok + "' is not of the form key=value");
    }
    const std::string key = tok.substr(0, eq);
    const std::string text = tok.substr(eq + 1);
    nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
    out[key] = value.is_discarded() ? nlohmann::json(text) : value;
  }
  return out;
}

void merge_params(nlohmann::json& base, const nlohmann::json& overrides) {
  if (!overrides.is_object()) throw std::invalid_argument("parameters must be a JSON object");
  for (const auto& [key, v] : overrides.items()) {
    if (!base.contains(key)) throw std::invalid_argument("unknown parameter '" + key + "'");
    base[key] = v;
  }
}

}  // namespace demagkit
