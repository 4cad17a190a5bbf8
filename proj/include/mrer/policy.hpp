#pragma once

#include <optional>
#include <vector>

#include "mrer/comms.hpp"
#include "mrer/failure.hpp"
#include "mrer/prediction.hpp"

namespace mrer {

enum class StrategyKind { Proid, ProidSafe, Periodic, FinalOnly };

struct RelayStrategy {
  StrategyKind kind = StrategyKind::Proid;
  double alpha = 2.0;
  long period = 100;
  WeibullParams weibull{};

  void validate() const {
    if (alpha < 1.0) throw std::invalid_argument("alpha must be at least 1");
    if (period < 1) throw std::invalid_argument("period must be at least 1 tick");
    if (kind == StrategyKind::ProidSafe) weibull.validate();
  }
};

struct ScoreParams {
  int sensor_range = 20;
  int n_rays = 250;
  int sample_interval = 25;
  double vote_threshold = 0.5;
  double speed = 1.0;
  double eps_traj = 5.0;
  double eps_plan = 10.0;
  double penalty = 1e6;
};

struct ScoredFrontier {
  FrontierCluster frontier;
  Path path;
  long travel_ticks = 0;
  long gain = 0;
  bool penalized = false;
  double score = 0.0;
};

// Reachable frontiers scored as gain/(1+travel), minus `penalty` once when any
// commitment point lies within the matching radius of the centroid.
// Unreachable frontiers are dropped; *excluded counts them when given.
std::vector<ScoredFrontier> score_frontiers(const std::vector<FrontierCluster>& frontiers,
                                            const PredictionEnsemble& ensemble,
                                            const OccupancyGrid& plan_map, Pose robot_pose,
                                            const Commitments& commitments,
                                            const CellSet& already_known,
                                            const ScoreParams& params,
                                            int* excluded = nullptr);

// Index of the argmax score; ties prefer smaller travel time, then smaller
// (y,x) of the centroid.  Empty list -> nullopt (exploration complete).
std::optional<std::size_t> select_frontier(const std::vector<ScoredFrontier>& scored);

// Unreported cells per tick if the robot relays immediately.
double roid_now(long unreported, long t_to_base);

// Expected cells per tick if the robot finishes its waypoint first.
double proid(long unreported, long expected_gain, long t_to_front, long t_front_to_base);

// True when relaying now beats alpha-weighted exploring first.
bool relay_decision(double gamma_now, double gamma_pred, double alpha);

// Survival-weighted variant; requires S_pred <= S_now.
bool relay_decision_safe(double gamma_now, double gamma_pred, double s_now,
                         double s_pred, double alpha);

// True when the remaining mission time no longer exceeds the return trip by
// more than `margin`.
bool final_return_due(long t, long horizon, long t_to_base, long margin);

// Fixed-interval trigger, measured from the last relay start or base report.
bool periodic_due(long t, long period, long last_relay_start);

}  // namespace mrer
