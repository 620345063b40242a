#include "pir/run_config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "pir/io.hpp"

namespace pir {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// section -> allowed keys
const std::map<std::string, std::set<std::string>> kSchema = {
    {"run", {"representation", "seed", "output", "threads"}},
    {"problem",
     {"potential", "omega", "bump_c", "bump_k", "observable", "dim", "beta", "a", "M1", "M2",
      "strict"}},
    {"estimator",
     {"n_samples", "N", "D", "n_quad", "step_h", "burn_in", "ess_floor", "metropolis"}},
    {"oracle", {"n_grid", "Q", "tol", "cache"}},
    {"sweep", {"mode", "N_list", "D_list", "N_fixed", "samples", "debug_bound_scale"}},
    {"covariance", {"tau_list", "k_max"}},
    {"holder", {"delta_list", "N", "n_samples"}},
};

const std::set<std::string> kRepresentations = {"std",   "cl",         "cl-disc", "exact",
                                                "sweep", "covariance", "holder"};
const std::set<std::string> kSweepModes = {"std", "cl", "thm-disc", "combined"};

double parse_double(const std::string& where, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw ConfigError(where + ": not a number: '" + v + "'");
  }
}

long parse_long(const std::string& where, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw ConfigError(where + ": not an integer: '" + v + "'");
  }
}

bool parse_bool(const std::string& where, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(where + ": not a boolean: '" + v + "'");
}

template <typename T, typename F>
std::vector<T> parse_list(const std::string& where, const std::string& v, F parse_one) {
  std::vector<T> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_one(where, trim(item)));
  return out;
}

void require_positive(const std::string& what, double v) {
  if (!(v > 0.0)) throw ConfigError(what + ": must be positive");
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  RunConfig cfg;
  cfg.raw_text = text;
  cfg.hash = fnv1a64(text);

  std::map<std::string, std::map<std::string, std::string>> kv;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!kSchema.count(section))
        throw ConfigError("unknown section '" + section + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    if (section.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!kSchema.at(section).count(key))
      throw ConfigError("unknown key '" + section + "." + key + "'");
    if (kv[section].count(key))
      throw ConfigError("duplicate key '" + section + "." + key + "'");
    kv[section][key] = value;
  }

  auto get = [&kv](const std::string& sec, const std::string& key) -> const std::string* {
    auto s = kv.find(sec);
    if (s == kv.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    return &k->second;
  };

  if (const auto* v = get("run", "representation")) cfg.representation = *v;
  if (!kRepresentations.count(cfg.representation))
    throw ConfigError("run.representation: unknown value '" + cfg.representation + "'");
  if (const auto* v = get("run", "seed"))
    cfg.seed = static_cast<std::uint64_t>(parse_long("run.seed", *v));
  if (const auto* v = get("run", "output")) cfg.output = *v;
  if (const auto* v = get("run", "threads")) cfg.threads = static_cast<int>(parse_long("run.threads", *v));
  if (cfg.threads < 1) throw ConfigError("run.threads: must be >= 1");

  if (const auto* v = get("problem", "potential")) cfg.potential = *v;
  for (const char* param : {"omega", "bump_c", "bump_k"})
    if (const auto* v = get("problem", param))
      cfg.potential_params[param] = parse_double(std::string("problem.") + param, *v);
  if (const auto* v = get("problem", "observable")) cfg.observable = *v;
  if (const auto* v = get("problem", "dim")) cfg.dim = static_cast<int>(parse_long("problem.dim", *v));
  if (cfg.dim < 1) throw ConfigError("problem.dim: must be >= 1");
  if (const auto* v = get("problem", "beta")) cfg.beta = parse_double("problem.beta", *v);
  if (const auto* v = get("problem", "a")) cfg.a = parse_double("problem.a", *v);
  if (const auto* v = get("problem", "M1")) cfg.M1 = parse_double("problem.M1", *v);
  if (const auto* v = get("problem", "M2")) cfg.M2 = parse_double("problem.M2", *v);
  if (const auto* v = get("problem", "strict")) cfg.strict = parse_bool("problem.strict", *v);
  require_positive("problem.beta", cfg.beta);
  require_positive("problem.a", cfg.a);
  require_positive("problem.M1", cfg.M1);
  require_positive("problem.M2", cfg.M2);

  if (const auto* v = get("estimator", "n_samples"))
    cfg.n_samples = parse_long("estimator.n_samples", *v);
  if (cfg.n_samples < 2) throw ConfigError("estimator.n_samples: must be >= 2");
  if (const auto* v = get("estimator", "N")) cfg.N = static_cast<int>(parse_long("estimator.N", *v));
  if (const auto* v = get("estimator", "D")) cfg.D = static_cast<int>(parse_long("estimator.D", *v));
  if (cfg.N < 1) throw ConfigError("estimator.N: must be >= 1");
  if (cfg.D < 1) throw ConfigError("estimator.D: must be >= 1");
  if (const auto* v = get("estimator", "n_quad"))
    cfg.n_quad = static_cast<int>(parse_long("estimator.n_quad", *v));
  if (const auto* v = get("estimator", "step_h")) cfg.step_h = parse_double("estimator.step_h", *v);
  if (const auto* v = get("estimator", "burn_in")) cfg.burn_in = parse_double("estimator.burn_in", *v);
  if (cfg.burn_in < 0.0 || cfg.burn_in >= 1.0)
    throw ConfigError("estimator.burn_in: must be in [0, 1)");
  if (const auto* v = get("estimator", "ess_floor"))
    cfg.ess_floor = parse_double("estimator.ess_floor", *v);
  if (const auto* v = get("estimator", "metropolis"))
    cfg.metropolis = parse_bool("estimator.metropolis", *v);

  if (const auto* v = get("oracle", "n_grid"))
    cfg.oracle_n_grid = static_cast<int>(parse_long("oracle.n_grid", *v));
  if (cfg.oracle_n_grid < 16) throw ConfigError("oracle.n_grid: must be >= 16");
  if (const auto* v = get("oracle", "Q")) cfg.oracle_Q = parse_double("oracle.Q", *v);
  if (cfg.oracle_Q < 0.0) throw ConfigError("oracle.Q: must be >= 0 (0 = automatic)");
  if (const auto* v = get("oracle", "tol")) cfg.oracle_tol = parse_double("oracle.tol", *v);
  require_positive("oracle.tol", cfg.oracle_tol);
  if (const auto* v = get("oracle", "cache")) cfg.oracle_cache = *v;

  if (const auto* v = get("sweep", "mode")) cfg.sweep_mode = *v;
  if (!kSweepModes.count(cfg.sweep_mode))
    throw ConfigError("sweep.mode: unknown value '" + cfg.sweep_mode + "'");
  if (const auto* v = get("sweep", "N_list"))
    cfg.N_list = parse_list<int>("sweep.N_list", *v, [](const std::string& w, const std::string& s) {
      return static_cast<int>(parse_long(w, s));
    });
  if (const auto* v = get("sweep", "D_list"))
    cfg.D_list = parse_list<int>("sweep.D_list", *v, [](const std::string& w, const std::string& s) {
      return static_cast<int>(parse_long(w, s));
    });
  if (const auto* v = get("sweep", "N_fixed"))
    cfg.N_fixed = static_cast<int>(parse_long("sweep.N_fixed", *v));
  if (const auto* v = get("sweep", "samples")) cfg.sweep_samples = parse_long("sweep.samples", *v);
  if (const auto* v = get("sweep", "debug_bound_scale"))
    cfg.debug_bound_scale = parse_double("sweep.debug_bound_scale", *v);
  require_positive("sweep.debug_bound_scale", cfg.debug_bound_scale);

  if (const auto* v = get("covariance", "tau_list"))
    cfg.tau_list = parse_list<double>("covariance.tau_list", *v, parse_double);
  if (const auto* v = get("covariance", "k_max")) cfg.k_max = parse_long("covariance.k_max", *v);
  if (cfg.k_max < 1) throw ConfigError("covariance.k_max: must be >= 1");

  if (const auto* v = get("holder", "delta_list"))
    cfg.delta_list = parse_list<double>("holder.delta_list", *v, parse_double);
  if (const auto* v = get("holder", "N"))
    cfg.holder_N = static_cast<int>(parse_long("holder.N", *v));
  if (cfg.holder_N < 1) throw ConfigError("holder.N: must be >= 1");
  if (const auto* v = get("holder", "n_samples"))
    cfg.holder_samples = parse_long("holder.n_samples", *v);
  if (cfg.holder_samples < 2) throw ConfigError("holder.n_samples: must be >= 2");

  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

}  // namespace pir
