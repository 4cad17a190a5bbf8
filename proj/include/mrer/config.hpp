#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "mrer/policy.hpp"
#include "mrer/prediction.hpp"

namespace mrer {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  // environment: a map file, or a generated floorplan when map_path is empty
  std::string map_path;
  std::uint64_t gen_seed = 1;
  int gen_width = 60;
  int gen_height = 40;

  // mission
  int n_robots = 3;
  long ticks = 600;
  double speed = 1.0;
  double comm_range = 10.0;
  int sensor_range = 20;
  int n_rays = 250;

  // relay strategy
  StrategyKind strategy = StrategyKind::Proid;
  double alpha = 2.0;
  long period = 100;
  long final_margin = 2;

  // failures
  bool failures_enabled = false;
  double weibull_lambda = 1100.0;
  double weibull_k = 1.5;

  // prediction
  PredictorType predictor = PredictorType::Oracle;
  int reveal_radius = 8;
  int ensemble_size = 3;
  double vote_threshold = 0.5;

  // frontier scoring
  int min_frontier_region = 10;
  int sample_interval = 25;
  double eps_traj = 5.0;
  double eps_plan = 10.0;
  double penalty = 1e6;

  // coordination ablations
  bool handoff_enabled = true;
  bool sharing_enabled = true;

  // engine
  std::uint64_t seed = 1;
  bool parallel_kernels = false;

  void validate() const;
  RelayStrategy relay_strategy() const;
  PredictorKind predictor_kind() const;
  WeibullParams weibull() const { return WeibullParams{weibull_lambda, weibull_k}; }
};

StrategyKind parse_strategy(const std::string& name);
std::string strategy_name(StrategyKind kind);
PredictorType parse_predictor(const std::string& name);
std::string predictor_name(PredictorType type);

// Applies one `key = value` pair; throws ConfigError on unknown keys or
// unparseable values.
void apply_config_kv(RunConfig& cfg, const std::string& key, const std::string& value);

// Flat key = value text; '#' starts a comment, blank lines ignored.
RunConfig parse_config_text(const std::string& text, RunConfig base = RunConfig{});
RunConfig parse_config_file(const std::string& path, RunConfig base = RunConfig{});

}  // namespace mrer
