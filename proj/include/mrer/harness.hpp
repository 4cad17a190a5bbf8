#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mrer/config.hpp"
#include "mrer/sim.hpp"

namespace mrer {

struct SweepError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WeibullSetting {
  bool enabled = false;
  double lambda = 0.0;
  double k = 0.0;
};

struct MapRef {
  std::string id;           // literal token from the spec file
  std::string path;         // empty when generated
  std::uint64_t gen_seed = 0;
};

// Cross-product experiment description.  `base` carries every scalar setting;
// the list fields are swept.  Cell order is maps, strategies, n_robots,
// weibulls, alphas, handoff, sharing, seeds (innermost), and run ids follow
// that order.
struct SweepSpec {
  RunConfig base;
  std::vector<MapRef> maps;
  std::vector<StrategyKind> strategies;
  std::vector<int> n_robots;
  std::vector<WeibullSetting> weibulls;
  std::vector<double> alphas;
  std::vector<bool> handoff{true};
  std::vector<bool> sharing{true};
  std::vector<std::uint64_t> seeds;

  void validate() const;
  std::size_t cell_count() const;
};

// Flat key = value text.  List keys: maps, strategies, n_robots, weibull,
// alphas, seeds, handoff, sharing.  Integer lists accept a..b ranges, map
// entries are gen:<seed> (ranges allowed) or a file path, weibull entries are
// none or lambda:k.  Every other key is a scalar applied to the base config.
SweepSpec parse_sweep_text(const std::string& text);
SweepSpec parse_sweep_file(const std::string& path);

struct ResultRow {
  long run_id = 0;
  std::string strategy;  // strategy label, ablations appended when off
  int n = 0;
  double lambda = 0.0;   // 0,0 when failures are disabled
  double k = 0.0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  std::string map_id;
  double coverage = 0.0;
  long relay_count = 0;
  long handoff_count = 0;
  long failure_count = 0;
  double wall_time_ms = 0.0;
};

struct ErrorRow {
  long run_id = 0;
  std::string message;
};

struct SweepOutcome {
  std::vector<ResultRow> rows;     // completed runs, run-id order
  std::vector<ErrorRow> errors;    // failed runs, run-id order
};

// Config and ground-truth map id for one cell of the cross product.
RunConfig cell_config(const SweepSpec& spec, std::size_t index, std::string* map_id = nullptr,
                      std::uint64_t* seed = nullptr);

std::string strategy_label(const RunConfig& cfg);

// Runs every cell, up to `workers` in parallel; each cell is an independent
// run() with the cell's own seed.  Failed cells become error rows.
SweepOutcome run_sweep(const SweepSpec& spec, int workers = 1);

std::string rows_to_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_rows_csv(const std::string& text);

std::string errors_to_csv(const std::vector<ErrorRow>& errors);

struct AggregateRow {
  std::string strategy;
  int n = 0;
  double lambda = 0.0;
  double k = 0.0;
  double mean_coverage = 0.0;
  double std_coverage = 0.0;
  int runs = 0;
};

// Mean and sample standard deviation of coverage per (strategy, n, lambda),
// rows sorted by that key.
std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows);
std::string aggregate_to_csv(const std::vector<AggregateRow>& rows);

// Text table of the aggregate: one strategy per row, one (lambda, n) scenario
// per column, cells mean +/- std.
std::string report(const std::vector<ResultRow>& rows);

}  // namespace mrer
