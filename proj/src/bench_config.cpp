#include "lpigrad/bench/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "lpigrad/errors.hpp"

namespace lpigrad::bench {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

ProblemSpec parse_problem(const json& j) {
  const std::string where = "problem";
  reject_unknown(j, {"type", "n", "margin", "noise_std", "seed", "label_rule"}, where);
  ProblemSpec p;
  read(j, "type", p.type, where);
  if (p.type != "linear_regression")
    throw ConfigError("problem.type: unknown problem type '" + p.type + "'");
  read(j, "n", p.n, where);
  read(j, "margin", p.margin, where);
  read(j, "noise_std", p.noise_std, where);
  if (j.contains("seed")) {
    std::uint64_t s = 0;
    read(j, "seed", s, where);
    p.seed = s;
  }
  if (j.contains("label_rule")) {
    std::string r;
    read(j, "label_rule", r, where);
    try {
      p.label_rule = parse_label_rule(r);
    } catch (const ConfigError& e) {
      throw ConfigError("problem.label_rule: " + std::string(e.what()));
    }
  }
  if (p.n < 1) throw ConfigError("problem.n: must be >= 1");
  if (!(p.margin > 0.0 && p.margin < 0.5)) throw ConfigError("problem.margin: must lie in (0, 1/2)");
  if (!(p.noise_std >= 0.0)) throw ConfigError("problem.noise_std: must be >= 0");
  return p;
}

InterpolationSpec parse_interpolation(const json& j) {
  const std::string where = "interpolation";
  reject_unknown(j, {"bandwidth", "order", "kernel", "grid_convention", "ridge"}, where);
  InterpolationSpec s;
  read(j, "bandwidth", s.bandwidth, where);
  read(j, "order", s.order, where);
  read(j, "ridge", s.ridge, where);
  try {
    if (j.contains("kernel")) s.kernel = parse_kernel(j.at("kernel").get<std::string>());
    if (j.contains("grid_convention"))
      s.convention = parse_grid_convention(j.at("grid_convention").get<std::string>());
  } catch (const json::exception&) {
    throw ConfigError(where + ": kernel and grid_convention must be strings");
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  if (!(s.bandwidth > 0.0 && s.bandwidth < 0.5)) throw ConfigError("interpolation.bandwidth: must lie in (0, 1/2)");
  if (s.order < 0) throw ConfigError("interpolation.order: must be >= 0");
  if (!(s.ridge >= 0.0)) throw ConfigError("interpolation.ridge: must be >= 0");
  return s;
}

MethodSpec parse_method(const json& j, std::size_t index) {
  const std::string where = "methods[" + std::to_string(index) + "]";
  MethodSpec m;
  if (j.is_string()) {
    m.name = j.get<std::string>();
  } else {
    reject_unknown(j,
                   {"name", "label", "step", "batch", "beta", "momentum", "mode", "inner_budget",
                    "grid_cardinality", "init", "iterations", "epsilon_target", "auto_grid",
                    "grid_constant", "search"},
                   where);
    if (!j.contains("name")) throw ConfigError(where + ": missing key 'name'");
    read(j, "name", m.name, where);
  }
  if (std::find(kMethodNames.begin(), kMethodNames.end(), m.name) == kMethodNames.end())
    throw ConfigError(where + ".name: unknown method '" + m.name + "'");
  m.label = m.name;
  m.mode = m.name == "catalyst_lpi" ? "fixed_beta" : m.name == "fgm_lpi" ? "fixed_momentum" : "";
  if (!j.is_object()) return m;

  read(j, "label", m.label, where);
  read(j, "step", m.step, where);
  read(j, "batch", m.batch, where);
  read(j, "beta", m.beta, where);
  read(j, "momentum", m.momentum, where);
  read(j, "mode", m.mode, where);
  read(j, "inner_budget", m.inner_budget, where);
  read(j, "grid_cardinality", m.grid_cardinality, where);
  read(j, "init", m.init, where);
  read(j, "epsilon_target", m.epsilon_target, where);
  read(j, "auto_grid", m.auto_grid, where);
  read(j, "grid_constant", m.grid_constant, where);
  if (j.contains("iterations")) {
    int it = 0;
    read(j, "iterations", it, where);
    m.iterations = it;
  }
  if (j.contains("search")) {
    const auto& s = j.at("search");
    reject_unknown(s, {"grid_cardinalities", "inits"}, where + ".search");
    read(s, "grid_cardinalities", m.search_cardinalities, where + ".search");
    read(s, "inits", m.search_inits, where + ".search");
  }

  if (m.label.empty() || m.label.find_first_of("/\\ ") != std::string::npos)
    throw ConfigError(where + ".label: must be a non-empty name without separators");
  if (!(m.step > 0.0)) throw ConfigError(where + ".step: must be > 0");
  if (m.batch < 1) throw ConfigError(where + ".batch: must be >= 1");
  if (m.inner_budget < 1) throw ConfigError(where + ".inner_budget: must be >= 1");
  if (m.grid_cardinality < 1) throw ConfigError(where + ".grid_cardinality: must be positive");
  for (int c : m.search_cardinalities)
    if (c < 1) throw ConfigError(where + ".search.grid_cardinalities: must be positive");
  if (m.iterations && *m.iterations < 0) throw ConfigError(where + ".iterations: must be >= 0");
  if (m.name == "catalyst_lpi" && m.mode != "fixed_beta" && m.mode != "theoretical")
    throw ConfigError(where + ".mode: catalyst_lpi mode must be fixed_beta or theoretical");
  if (m.name == "fgm_lpi" && m.mode != "fixed_momentum" && m.mode != "theoretical")
    throw ConfigError(where + ".mode: fgm_lpi mode must be fixed_momentum or theoretical");
  if (!m.uses_grid() && (j.contains("grid_cardinality") || !m.search_cardinalities.empty()))
    throw ConfigError(where + ": method '" + m.name + "' takes no grid_cardinality");
  return m;
}

}  // namespace

ExperimentConfig parse_config_json(const json& j) {
  reject_unknown(j, {"problem", "interpolation", "methods", "iterations", "seed", "output_dir", "threshold"},
                 "config");
  ExperimentConfig c;
  if (j.contains("problem")) c.problem = parse_problem(j.at("problem"));
  if (j.contains("interpolation")) c.interpolation = parse_interpolation(j.at("interpolation"));
  read(j, "iterations", c.iterations, "config");
  read(j, "seed", c.seed, "config");
  read(j, "output_dir", c.output_dir, "config");
  read(j, "threshold", c.threshold, "config");
  if (c.iterations < 0) throw ConfigError("config.iterations: must be >= 0");
  if (!(c.threshold > 0.0)) throw ConfigError("config.threshold: must be > 0");

  if (!j.contains("methods") || !j.at("methods").is_array() || j.at("methods").empty())
    throw ConfigError("config.methods: need a non-empty list of methods");
  std::size_t k = 0;
  for (const auto& m : j.at("methods")) c.methods.push_back(parse_method(m, k++));
  return c;
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // Map the byte offset to a line number.
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ConfigError(source + ":" + std::to_string(line) + ": JSON syntax error: " + e.what());
  }
  try {
    return parse_config_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

nlohmann::json to_json(const ExperimentConfig& c) {
  json methods = json::array();
  for (const auto& m : c.methods) {
    json mj = {{"name", m.name}, {"label", m.label}, {"step", m.step}, {"init", m.init}};
    if (m.name == "sgd") mj["batch"] = m.batch;
    if (m.uses_grid()) {
      mj["grid_cardinality"] = m.grid_cardinality;
      if (!m.search_cardinalities.empty() || !m.search_inits.empty())
        mj["search"] = {{"grid_cardinalities", m.search_cardinalities}, {"inits", m.search_inits}};
    }
    if (m.name == "catalyst_lpi") {
      mj["mode"] = m.mode;
      mj["beta"] = m.beta;
      mj["inner_budget"] = m.inner_budget;
    }
    if (m.name == "fgm_lpi") {
      mj["mode"] = m.mode;
      mj["momentum"] = m.momentum;
      mj["epsilon_target"] = m.epsilon_target;
      mj["auto_grid"] = m.auto_grid;
      mj["grid_constant"] = m.grid_constant;
    }
    if (m.iterations) mj["iterations"] = *m.iterations;
    methods.push_back(std::move(mj));
  }
  json problem = {{"type", c.problem.type},
                  {"n", c.problem.n},
                  {"margin", c.problem.margin},
                  {"noise_std", c.problem.noise_std},
                  {"label_rule", to_string(c.problem.label_rule)}};
  if (c.problem.seed) problem["seed"] = *c.problem.seed;
  return {{"problem", problem},
          {"interpolation",
           {{"bandwidth", c.interpolation.bandwidth},
            {"order", c.interpolation.order},
            {"kernel", to_string(c.interpolation.kernel)},
            {"grid_convention", to_string(c.interpolation.convention)},
            {"ridge", c.interpolation.ridge}}},
          {"methods", methods},
          {"iterations", c.iterations},
          {"seed", c.seed},
          {"output_dir", c.output_dir},
          {"threshold", c.threshold}};
}

nlohmann::json reference_config_json() {
  return json::parse(R"({
  "problem": {
    "type": "linear_regression",
    "n": 1000,
    "margin": 0.01,
    "noise_std": 0.05,
    "seed": 42,
    "label_rule": "noiseless_model"
  },
  "interpolation": {
    "bandwidth": 0.01,
    "order": 1,
    "kernel": "rectangular",
    "grid_convention": "upper",
    "ridge": 0.0
  },
  "iterations": 200,
  "seed": 42,
  "output_dir": "out/reference",
  "threshold": 0.001,
  "methods": [
    {"name": "gd", "step": 1.0, "init": 0.4},
    {"name": "sgd", "step": 1.0, "batch": 500, "init": 0.4},
    {"name": "lpi_gd", "step": 1.0, "grid_cardinality": 500, "init": 0.4,
     "search": {"grid_cardinalities": [100, 200, 250, 500, 800],
                "inits": [0.0, 0.2, 0.4, 0.6, 0.8, 1.0]}},
    {"name": "catalyst_lpi", "mode": "fixed_beta", "beta": 0.99, "inner_budget": 1,
     "step": 1.0, "grid_cardinality": 500, "init": 0.4},
    {"name": "fgm_lpi", "mode": "fixed_momentum", "momentum": 0.2, "step": 1.0,
     "grid_cardinality": 500, "init": 0.4}
  ]
})");
}

}  // namespace lpigrad::bench
