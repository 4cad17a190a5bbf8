#pragma once

#include <stdexcept>

#include "mrer/robot.hpp"

namespace mrer {

struct ProtocolError : std::logic_error {
  using std::logic_error::logic_error;
};

// Strict Euclidean range predicate: true iff ||a-b|| < d.
bool in_range(Pose a, Pose b, double d);

// Copy of `grid` with Unknown cells replaced by Occupied; planning over it
// keeps return trips on already-verified Free cells.
OccupancyGrid known_only(const OccupancyGrid& grid);

CellSet known_cells(const OccupancyGrid& grid);

// Bidirectional map fusion plus reported/delegated view merges.  Unreported
// sets do not merge; they only shed cells the merged reported view covers.
// With share_commitments, each side stores a snapshot of the other's
// trajectory and remaining plan.
void exchange(RobotState& a, RobotState& b, double comm_range,
              bool share_commitments, int* fusion_conflicts = nullptr);

struct HandoffResult {
  bool occurred = false;
  int payload_cells = 0;
};

// If `giver` is relaying and `receiver` is strictly closer to the base
// (Euclidean), the unreported payload moves to the receiver, who assumes
// relay duty (plan to base over its known map); the giver marks the payload
// delegated and returns to exploring.  Ties never hand off.
HandoffResult try_handoff(RobotState& giver, RobotState& receiver, Pose base_pose,
                          double comm_range, long tick);

// Fuses the robot's map into the base map and vice versa, marks everything
// reported, empties the payload, and puts the robot back in Explore mode.
void report_to_base(RobotState& robot, OccupancyGrid& base_map,
                    int* fusion_conflicts = nullptr);

// Stores a snapshot of `owner`'s trajectory and remaining plan in `viewer`'s
// commitment table.
void record_commitment(RobotState& viewer, const RobotState& owner);

struct Commitments {
  std::vector<Pose> trajectory_points;
  std::vector<Pose> plan_points;
};

// Teammates' trajectory and plan points known to this robot (never its own).
Commitments commitments_of(const RobotState& robot);

}  // namespace mrer
