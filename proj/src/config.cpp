#include "mrer/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace mrer {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

long parse_long(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected integer, got '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected unsigned integer, got '" + value + "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected number, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  const std::string v = lower(value);
  if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "off" || v == "no" || v == "0") return false;
  throw ConfigError("config key '" + key + "': expected boolean, got '" + value + "'");
}

}  // namespace

StrategyKind parse_strategy(const std::string& name) {
  const std::string v = lower(trim(name));
  if (v == "proid") return StrategyKind::Proid;
  if (v == "proid-safe" || v == "proid_safe" || v == "proidsafe") return StrategyKind::ProidSafe;
  if (v == "periodic") return StrategyKind::Periodic;
  if (v == "final-only" || v == "final_only" || v == "finalonly") return StrategyKind::FinalOnly;
  throw ConfigError("unknown strategy '" + name +
                    "' (expected proid, proid-safe, periodic, final-only)");
}

std::string strategy_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::Proid: return "proid";
    case StrategyKind::ProidSafe: return "proid-safe";
    case StrategyKind::Periodic: return "periodic";
    case StrategyKind::FinalOnly: return "final-only";
  }
  return "?";
}

PredictorType parse_predictor(const std::string& name) {
  const std::string v = lower(trim(name));
  if (v == "null") return PredictorType::Null;
  if (v == "oracle") return PredictorType::Oracle;
  if (v == "heuristic") return PredictorType::Heuristic;
  throw ConfigError("unknown predictor '" + name + "' (expected null, oracle, heuristic)");
}

std::string predictor_name(PredictorType type) {
  switch (type) {
    case PredictorType::Null: return "null";
    case PredictorType::Oracle: return "oracle";
    case PredictorType::Heuristic: return "heuristic";
  }
  return "?";
}

void RunConfig::validate() const {
  if (map_path.empty()) {
    if (gen_width < 20 || gen_height < 20)
      throw ConfigError("generated maps need width and height of at least 20");
  }
  if (n_robots < 1) throw ConfigError("n_robots must be at least 1");
  if (ticks < 0) throw ConfigError("ticks must be non-negative");
  if (speed <= 0.0) throw ConfigError("speed must be positive");
  if (comm_range <= 0.0) throw ConfigError("comm_range must be positive");
  if (sensor_range < 0) throw ConfigError("sensor_range must be non-negative");
  if (n_rays < 1) throw ConfigError("n_rays must be at least 1");
  if (alpha < 1.0) throw ConfigError("alpha must be at least 1");
  if (period < 1) throw ConfigError("period must be at least 1");
  if (final_margin < 0) throw ConfigError("final_margin must be non-negative");
  if (weibull_lambda <= 0.0 || weibull_k <= 0.0)
    throw ConfigError("weibull parameters must be positive");
  if (reveal_radius < 0) throw ConfigError("reveal_radius must be non-negative");
  if (ensemble_size < 1) throw ConfigError("ensemble_size must be at least 1");
  if (!(vote_threshold > 0.0) || vote_threshold > 1.0)
    throw ConfigError("vote_threshold must lie in (0,1]");
  if (min_frontier_region < 1) throw ConfigError("min_frontier_region must be at least 1");
  if (sample_interval < 1) throw ConfigError("sample_interval must be at least 1");
  if (eps_traj < 0.0 || eps_plan < 0.0) throw ConfigError("penalty radii must be non-negative");
  if (penalty < 0.0) throw ConfigError("penalty must be non-negative");
}

RelayStrategy RunConfig::relay_strategy() const {
  RelayStrategy s;
  s.kind = strategy;
  s.alpha = alpha;
  s.period = period;
  s.weibull = weibull();
  return s;
}

PredictorKind RunConfig::predictor_kind() const {
  PredictorKind k;
  k.type = predictor;
  k.reveal_radius = reveal_radius;
  return k;
}

void apply_config_kv(RunConfig& cfg, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = lower(trim(raw_key));
  const std::string value = trim(raw_value);
  if (key == "map") cfg.map_path = value;
  else if (key == "gen_seed") cfg.gen_seed = parse_u64(key, value);
  else if (key == "gen_width") cfg.gen_width = static_cast<int>(parse_long(key, value));
  else if (key == "gen_height") cfg.gen_height = static_cast<int>(parse_long(key, value));
  else if (key == "n_robots") cfg.n_robots = static_cast<int>(parse_long(key, value));
  else if (key == "ticks") cfg.ticks = parse_long(key, value);
  else if (key == "speed") cfg.speed = parse_double(key, value);
  else if (key == "comm_range") cfg.comm_range = parse_double(key, value);
  else if (key == "sensor_range") cfg.sensor_range = static_cast<int>(parse_long(key, value));
  else if (key == "n_rays") cfg.n_rays = static_cast<int>(parse_long(key, value));
  else if (key == "strategy") cfg.strategy = parse_strategy(value);
  else if (key == "alpha") cfg.alpha = parse_double(key, value);
  else if (key == "period") cfg.period = parse_long(key, value);
  else if (key == "final_margin") cfg.final_margin = parse_long(key, value);
  else if (key == "failures_enabled") cfg.failures_enabled = parse_bool(key, value);
  else if (key == "weibull_lambda") cfg.weibull_lambda = parse_double(key, value);
  else if (key == "weibull_k") cfg.weibull_k = parse_double(key, value);
  else if (key == "predictor") cfg.predictor = parse_predictor(value);
  else if (key == "reveal_radius") cfg.reveal_radius = static_cast<int>(parse_long(key, value));
  else if (key == "ensemble_size") cfg.ensemble_size = static_cast<int>(parse_long(key, value));
  else if (key == "vote_threshold") cfg.vote_threshold = parse_double(key, value);
  else if (key == "min_frontier_region")
    cfg.min_frontier_region = static_cast<int>(parse_long(key, value));
  else if (key == "sample_interval") cfg.sample_interval = static_cast<int>(parse_long(key, value));
  else if (key == "eps_traj") cfg.eps_traj = parse_double(key, value);
  else if (key == "eps_plan") cfg.eps_plan = parse_double(key, value);
  else if (key == "penalty") cfg.penalty = parse_double(key, value);
  else if (key == "handoff_enabled") cfg.handoff_enabled = parse_bool(key, value);
  else if (key == "sharing_enabled") cfg.sharing_enabled = parse_bool(key, value);
  else if (key == "seed") cfg.seed = parse_u64(key, value);
  else if (key == "parallel_kernels") cfg.parallel_kernels = parse_bool(key, value);
  else throw ConfigError("unknown config key '" + raw_key + "'");
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    apply_config_kv(base, line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

RunConfig parse_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), std::move(base));
}

}  // namespace mrer
