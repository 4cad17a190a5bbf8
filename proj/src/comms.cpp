#include "mrer/comms.hpp"

#include <cmath>

namespace mrer {

bool in_range(Pose a, Pose b, double d) {
  return static_cast<double>(distance_sq(a, b)) < d * d;
}

OccupancyGrid known_only(const OccupancyGrid& grid) {
  OccupancyGrid out = grid;
  for (CellState& s : out.cells)
    if (s == CellState::Unknown) s = CellState::Occupied;
  return out;
}

CellSet known_cells(const OccupancyGrid& grid) {
  CellSet out(grid.width, grid.height);
  for (int y = 0; y < grid.height; ++y)
    for (int x = 0; x < grid.width; ++x)
      if (grid.at(Cell{x, y}) != CellState::Unknown) out.insert(Cell{x, y});
  return out;
}

void exchange(RobotState& a, RobotState& b, double comm_range,
              bool share_commitments, int* fusion_conflicts) {
  if (!a.alive || !b.alive) throw ProtocolError("exchange with a failed robot");
  if (!in_range(a.pose, b.pose, comm_range))
    throw ProtocolError("exchange outside communication range");

  OccupancyGrid fused = fuse(a.local_map, b.local_map, fusion_conflicts);
  a.local_map = fused;
  b.local_map = std::move(fused);

  CellSet reported = a.reported;
  reported.unite(b.reported);
  a.reported = reported;
  b.reported = std::move(reported);

  CellSet delegated = a.delegated;
  delegated.unite(b.delegated);
  a.delegated = delegated;
  b.delegated = std::move(delegated);

  a.unreported.subtract(a.reported);
  b.unreported.subtract(b.reported);

  if (share_commitments) {
    record_commitment(a, b);
    record_commitment(b, a);
  }
}

void record_commitment(RobotState& viewer, const RobotState& owner) {
  CommitRecord rec;
  rec.trajectory = owner.trajectory;
  rec.plan = owner.remaining_plan();
  viewer.commitments[owner.id] = std::move(rec);
}

HandoffResult try_handoff(RobotState& giver, RobotState& receiver, Pose base_pose,
                          double comm_range, long tick) {
  HandoffResult result;
  if (!giver.alive || !receiver.alive) return result;
  if (giver.mode != RobotMode::Relay) return result;
  if (!in_range(giver.pose, receiver.pose, comm_range)) return result;
  if (distance_sq(receiver.pose, base_pose) >= distance_sq(giver.pose, base_pose))
    return result;

  result.occurred = true;
  result.payload_cells = giver.unreported.size();

  receiver.unreported.unite(giver.unreported);
  giver.delegated.unite(giver.unreported);
  giver.unreported.clear();

  if (receiver.mode != RobotMode::Relay) {
    receiver.mode = RobotMode::Relay;
    receiver.last_relay_start = tick;
    receiver.waypoint.invalidate();
    auto home = astar(known_only(receiver.local_map), receiver.pose, base_pose);
    receiver.set_plan(home ? std::move(*home) : Path{receiver.pose});
  }

  giver.mode = RobotMode::Explore;
  giver.clear_plan();
  giver.waypoint.invalidate();
  return result;
}

void report_to_base(RobotState& robot, OccupancyGrid& base_map, int* fusion_conflicts) {
  base_map = fuse(base_map, robot.local_map, fusion_conflicts);
  robot.local_map = base_map;
  robot.reported = known_cells(base_map);
  robot.unreported.clear();
  if (robot.mode == RobotMode::Relay) {
    robot.mode = RobotMode::Explore;
    robot.clear_plan();
    robot.waypoint.invalidate();
  }
}

Commitments commitments_of(const RobotState& robot) {
  Commitments out;
  for (const auto& [id, rec] : robot.commitments) {
    if (id == robot.id) continue;
    out.trajectory_points.insert(out.trajectory_points.end(), rec.trajectory.begin(),
                                 rec.trajectory.end());
    out.plan_points.insert(out.plan_points.end(), rec.plan.begin(), rec.plan.end());
  }
  return out;
}

}  // namespace mrer
