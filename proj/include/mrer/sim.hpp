#pragma once

#include <string>
#include <vector>

#include "mrer/config.hpp"
#include "mrer/robot.hpp"

namespace mrer {

struct InvariantError : std::logic_error {
  using std::logic_error::logic_error;
};

struct BaseStation {
  Pose pose{};
  OccupancyGrid map;
};

struct MissionResult {
  double coverage = 0.0;
  long relay_count = 0;
  long handoff_count = 0;
  long failure_count = 0;
  std::vector<double> coverage_series;  // index t = coverage after tick t; [0] is initial
  std::vector<std::string> event_log;   // one JSON record per line
};

struct WorldState {
  RunConfig cfg;
  std::uint64_t seed = 0;
  OccupancyGrid truth;
  std::vector<RobotState> robots;
  BaseStation base;
  long t = 0;
  long relay_count = 0;
  long handoff_count = 0;
  long failure_count = 0;
  std::vector<double> coverage_series;
  std::vector<std::string> event_log;
};

// Free cells plus Occupied cells 4-adjacent to a Free cell: everything a
// sensor could ever label.
CellSet observable_set(const OccupancyGrid& truth);

double coverage_ratio(const OccupancyGrid& base_map, const OccupancyGrid& truth);

// Builds the initial world on the given ground truth: robots co-located at a
// seeded Free start cell, the base at the start, failure times pre-sampled.
WorldState make_world(const RunConfig& cfg, std::uint64_t seed, OccupancyGrid truth);

// One tick: failures, observation, pairwise comms and handoffs, the
// final-return guard, waypoint selection and relay criteria, movement, base
// reports, metrics.
void step(WorldState& world);

// Steps the world to the horizon (or until every robot has failed) and
// summarizes it.
MissionResult run_world(WorldState& world);

// Resolves the map from the config, then runs a full mission.
MissionResult run(const RunConfig& cfg, std::uint64_t seed);

}  // namespace mrer
