#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include "mrer/grid.hpp"
#include "mrer/prediction.hpp"

namespace mrer {

enum class RobotMode { Explore, Relay };

struct CommitRecord {
  std::vector<Pose> trajectory;
  Path plan;
};

// Prediction context for the currently committed waypoint: the ensemble, the
// sampled poses along the plan, and each member's raw raycast mask per sample
// so the per-tick gain recomputation only unions, floods, and votes.
struct WaypointContext {
  bool valid = false;
  Pose frontier{};
  PredictionEnsemble ensemble;
  std::vector<Pose> samples;
  std::vector<std::size_t> sample_plan_index;
  std::vector<std::vector<CellSet>> masks;  // [member][sample]
  long t_front_to_base = 0;

  void invalidate() {
    valid = false;
    ensemble = PredictionEnsemble{};
    samples.clear();
    sample_plan_index.clear();
    masks.clear();
  }
};

struct RobotState {
  int id = 0;
  Pose pose{};
  RobotMode mode = RobotMode::Explore;
  OccupancyGrid local_map;
  CellSet unreported;
  CellSet reported;
  CellSet delegated;
  Path plan;
  std::size_t plan_next = 0;  // index into plan of the next cell to step onto
  std::vector<Pose> trajectory;
  std::map<int, CommitRecord> commitments;
  bool alive = true;
  double failure_time = std::numeric_limits<double>::infinity();
  long last_relay_start = 0;
  bool final_latched = false;
  bool retired = false;
  WaypointContext waypoint;

  bool plan_active() const { return plan_next < plan.size(); }

  Path remaining_plan() const {
    Path out{pose};
    for (std::size_t i = plan_next; i < plan.size(); ++i) out.push_back(plan[i]);
    return out;
  }

  void set_plan(Path p) {
    plan = std::move(p);
    plan_next = plan.empty() ? 0 : 1;
  }

  void clear_plan() {
    plan.clear();
    plan_next = 0;
  }
};

}  // namespace mrer
