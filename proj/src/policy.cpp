#include "mrer/policy.hpp"

#include <cmath>
#include <limits>

namespace mrer {

namespace {

bool any_point_within(const std::vector<Pose>& points, Pose center, double radius) {
  const double r2 = radius * radius;
  for (Pose p : points)
    if (static_cast<double>(distance_sq(p, center)) <= r2) return true;
  return false;
}

}  // namespace

std::vector<ScoredFrontier> score_frontiers(const std::vector<FrontierCluster>& frontiers,
                                            const PredictionEnsemble& ensemble,
                                            const OccupancyGrid& plan_map, Pose robot_pose,
                                            const Commitments& commitments,
                                            const CellSet& already_known,
                                            const ScoreParams& params, int* excluded) {
  if (frontiers.empty()) throw std::invalid_argument("score_frontiers on empty list");
  std::vector<ScoredFrontier> out;
  out.reserve(frontiers.size());
  int dropped = 0;
  for (const FrontierCluster& f : frontiers) {
    auto path = astar(plan_map, robot_pose, f.centroid);
    if (!path) {
      ++dropped;
      continue;
    }
    ScoredFrontier sf;
    sf.frontier = f;
    sf.path = std::move(*path);
    sf.travel_ticks = travel_time(sf.path, params.speed);
    const auto samples = path_sample(sf.path, params.sample_interval);
    sf.gain = expected_info_gain(ensemble, samples, params.sensor_range, params.n_rays,
                                 params.vote_threshold, already_known);
    sf.penalized = any_point_within(commitments.trajectory_points, f.centroid, params.eps_traj) ||
                   any_point_within(commitments.plan_points, f.centroid, params.eps_plan);
    sf.score = static_cast<double>(sf.gain) / (1.0 + static_cast<double>(sf.travel_ticks));
    if (sf.penalized) sf.score -= params.penalty;
    out.push_back(std::move(sf));
  }
  if (excluded) *excluded += dropped;
  return out;
}

std::optional<std::size_t> select_frontier(const std::vector<ScoredFrontier>& scored) {
  if (scored.empty()) return std::nullopt;
  std::size_t best = 0;
  for (std::size_t i = 1; i < scored.size(); ++i) {
    const ScoredFrontier& a = scored[i];
    const ScoredFrontier& b = scored[best];
    if (a.score > b.score) {
      best = i;
    } else if (a.score == b.score) {
      if (a.travel_ticks < b.travel_ticks ||
          (a.travel_ticks == b.travel_ticks &&
           cell_less(a.frontier.centroid, b.frontier.centroid)))
        best = i;
    }
  }
  return best;
}

double roid_now(long unreported, long t_to_base) {
  if (unreported < 0 || t_to_base < 0) throw std::invalid_argument("negative roid input");
  if (t_to_base == 0)
    return unreported == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  return static_cast<double>(unreported) / static_cast<double>(t_to_base);
}

double proid(long unreported, long expected_gain, long t_to_front, long t_front_to_base) {
  if (unreported < 0 || expected_gain < 0 || t_to_front < 0 || t_front_to_base < 0)
    throw std::invalid_argument("negative proid input");
  const long denom = t_to_front + t_front_to_base;
  if (denom <= 0) throw std::invalid_argument("proid needs a positive time denominator");
  return static_cast<double>(unreported + expected_gain) / static_cast<double>(denom);
}

bool relay_decision(double gamma_now, double gamma_pred, double alpha) {
  if (alpha < 1.0) throw std::invalid_argument("alpha must be at least 1");
  return gamma_now > alpha * gamma_pred;
}

bool relay_decision_safe(double gamma_now, double gamma_pred, double s_now,
                         double s_pred, double alpha) {
  if (alpha < 1.0) throw std::invalid_argument("alpha must be at least 1");
  if (s_now < 0.0 || s_now > 1.0 || s_pred < 0.0 || s_pred > 1.0)
    throw std::invalid_argument("survival weights must lie in [0,1]");
  if (s_pred > s_now)
    throw std::invalid_argument("S_pred exceeds S_now (longer horizon cannot be safer)");
  return gamma_now * s_now > alpha * (gamma_pred * s_pred);
}

bool final_return_due(long t, long horizon, long t_to_base, long margin) {
  if (t < 0 || t > horizon) throw std::invalid_argument("tick outside mission horizon");
  return horizon - t <= t_to_base + margin;
}

bool periodic_due(long t, long period, long last_relay_start) {
  if (period < 1) throw std::invalid_argument("period must be at least 1 tick");
  return t - last_relay_start >= period;
}

}  // namespace mrer
