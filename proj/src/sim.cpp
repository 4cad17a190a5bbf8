#include "mrer/sim.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "mrer/comms.hpp"
#include "mrer/failure.hpp"
#include "mrer/mapgen.hpp"
#include "mrer/policy.hpp"
#include "mrer/rng.hpp"

namespace mrer {

namespace {

using json = nlohmann::ordered_json;

constexpr std::uint64_t kStartStream = 3;
constexpr std::uint64_t kFailureStream = 7;
constexpr std::uint64_t kPredictStream = 11;

json pos_json(Pose p) { return json::array({p.x, p.y}); }

void emit(WorldState& world, json record) { world.event_log.push_back(record.dump()); }

const char* mode_name(RobotMode m) { return m == RobotMode::Relay ? "relay" : "explore"; }

void emit_mode_change(WorldState& world, const RobotState& r, RobotMode from,
                      const char* reason) {
  emit(world, {{"type", "mode_change"},
               {"tick", world.t},
               {"robot", r.id},
               {"from", mode_name(from)},
               {"to", mode_name(r.mode)},
               {"reason", reason}});
}

json config_json(const RunConfig& c) {
  return {{"map", c.map_path},
          {"gen_seed", c.gen_seed},
          {"gen_width", c.gen_width},
          {"gen_height", c.gen_height},
          {"n_robots", c.n_robots},
          {"ticks", c.ticks},
          {"speed", c.speed},
          {"comm_range", c.comm_range},
          {"sensor_range", c.sensor_range},
          {"n_rays", c.n_rays},
          {"strategy", strategy_name(c.strategy)},
          {"alpha", c.alpha},
          {"period", c.period},
          {"final_margin", c.final_margin},
          {"failures_enabled", c.failures_enabled},
          {"weibull_lambda", c.weibull_lambda},
          {"weibull_k", c.weibull_k},
          {"predictor", predictor_name(c.predictor)},
          {"reveal_radius", c.reveal_radius},
          {"ensemble_size", c.ensemble_size},
          {"vote_threshold", c.vote_threshold},
          {"min_frontier_region", c.min_frontier_region},
          {"sample_interval", c.sample_interval},
          {"eps_traj", c.eps_traj},
          {"eps_plan", c.eps_plan},
          {"penalty", c.penalty},
          {"handoff_enabled", c.handoff_enabled},
          {"sharing_enabled", c.sharing_enabled},
          {"parallel_kernels", c.parallel_kernels}};
}

// Union of the base's known cells and every alive robot's unreported payload;
// handoffs must leave it untouched.
CellSet delivery_union(const WorldState& world) {
  CellSet u = known_cells(world.base.map);
  for (const RobotState& r : world.robots)
    if (r.alive) u.unite(r.unreported);
  return u;
}

// Shortest-known-path travel estimate to base; robots always have one along
// their traveled corridor.
struct HomePath {
  Path path;
  long ticks = 0;
};

HomePath home_path(const WorldState& world, const RobotState& r) {
  auto p = astar(known_only(r.local_map), r.pose, world.base.pose);
  if (!p)
    throw InvariantError("robot " + std::to_string(r.id) +
                         " has no known-safe path to base at tick " + std::to_string(world.t));
  HomePath h;
  h.ticks = travel_time(*p, world.cfg.speed);
  h.path = std::move(*p);
  return h;
}

void start_relay(WorldState& world, RobotState& r, HomePath home, const char* reason,
                 json extra = json::object()) {
  const RobotMode before = r.mode;
  r.mode = RobotMode::Relay;
  r.set_plan(std::move(home.path));
  r.waypoint.invalidate();
  r.last_relay_start = world.t;
  ++world.relay_count;
  json rec{{"type", "relay_start"},
           {"tick", world.t},
           {"robot", r.id},
           {"reason", reason},
           {"pos", pos_json(r.pose)},
           {"payload", r.unreported.size()},
           {"t_to_base", home.ticks}};
  for (auto& [k, v] : extra.items()) rec[k] = v;
  emit(world, std::move(rec));
  emit_mode_change(world, r, before, reason);
}

void retire(WorldState& world, RobotState& r, const char* reason) {
  r.retired = true;
  r.clear_plan();
  r.waypoint.invalidate();
  emit(world, {{"type", "mode_change"},
               {"tick", world.t},
               {"robot", r.id},
               {"from", mode_name(r.mode)},
               {"to", "retired"},
               {"reason", reason}});
}

// Anything the robot could still deliver: payload cells or map knowledge the
// base lacks.
bool has_deliverable(const WorldState& world, const RobotState& r) {
  return !r.unreported.empty() || r.local_map != world.base.map;
}

std::vector<std::size_t> sample_indices(std::size_t path_len, int interval) {
  std::vector<std::size_t> idx;
  if (path_len == 0) return idx;
  for (std::size_t i = 0; i < path_len; i += static_cast<std::size_t>(interval))
    idx.push_back(i);
  if (idx.back() != path_len - 1) idx.push_back(path_len - 1);
  return idx;
}

long front_to_base_ticks(const WorldState& world, const RobotState& r,
                         const PredictionEnsemble& ensemble, Pose frontier) {
  const OccupancyGrid voted = vote_map(ensemble, world.cfg.vote_threshold);
  const OccupancyGrid planning = fuse(r.local_map, voted);
  if (planning.at(frontier) != CellState::Occupied &&
      planning.at(world.base.pose) != CellState::Occupied) {
    if (auto p = astar(planning, frontier, world.base.pose))
      return travel_time(*p, world.cfg.speed);
  }
  const long manhattan = std::abs(frontier.x - world.base.pose.x) +
                         std::abs(frontier.y - world.base.pose.y);
  return static_cast<long>(std::ceil(static_cast<double>(manhattan) / world.cfg.speed));
}

// (Re)samples the committed plan and caches each member's raycast mask per
// sample, so per-tick gain recomputation only unions, floods, and votes.
void bind_waypoint_samples(const WorldState& world, RobotState& r) {
  const RunConfig& cfg = world.cfg;
  WaypointContext& ctx = r.waypoint;
  ctx.samples.clear();
  ctx.masks.clear();
  ctx.sample_plan_index = sample_indices(r.plan.size(), cfg.sample_interval);
  for (std::size_t i : ctx.sample_plan_index) ctx.samples.push_back(r.plan[i]);
  ctx.masks.resize(ctx.ensemble.members.size());
  for (std::size_t m = 0; m < ctx.ensemble.members.size(); ++m) {
    ctx.masks[m].reserve(ctx.samples.size());
    for (Pose p : ctx.samples)
      ctx.masks[m].push_back(
          raycast(ctx.ensemble.members[m].map, p, cfg.sensor_range, cfg.n_rays, true));
  }
  ctx.t_front_to_base = front_to_base_ticks(world, r, ctx.ensemble, ctx.frontier);
}

// Threshold-voted gain over the remaining sampled waypoints, matching
// expected_info_gain over those samples.
long remaining_gain(const WorldState& world, const RobotState& r) {
  const WaypointContext& ctx = r.waypoint;
  const CellSet known = known_cells(r.local_map);
  std::vector<CellSet> member_sets;
  member_sets.reserve(ctx.ensemble.members.size());
  for (std::size_t m = 0; m < ctx.ensemble.members.size(); ++m) {
    CellSet seed(r.local_map.width, r.local_map.height);
    bool any = false;
    for (std::size_t s = 0; s < ctx.samples.size(); ++s) {
      if (ctx.sample_plan_index[s] < r.plan_next) continue;
      seed.unite(ctx.masks[m][s]);
      any = true;
    }
    member_sets.push_back(any ? flood_fill(seed, ctx.ensemble.members[m].map, true)
                              : std::move(seed));
  }
  CellSet visible = vote_cells(member_sets, world.cfg.vote_threshold);
  visible.subtract(known);
  return visible.size();
}

void select_waypoint(WorldState& world, RobotState& r) {
  const RunConfig& cfg = world.cfg;
  const auto frontiers = extract_frontiers(r.local_map, cfg.min_frontier_region);

  auto relay_home_or_idle = [&](const char* reason) {
    if (!r.unreported.empty() && !in_range(r.pose, world.base.pose, cfg.comm_range)) {
      start_relay(world, r, home_path(world, r), reason);
    }
  };

  if (frontiers.empty()) {
    relay_home_or_idle("exploration_complete");
    return;
  }

  PredictionEnsemble ensemble =
      predict(cfg.predictor_kind(), r.local_map, &world.truth, cfg.ensemble_size,
              mix_seed(world.seed, kPredictStream, static_cast<std::uint64_t>(r.id),
                       static_cast<std::uint64_t>(world.t)));

  ScoreParams sp;
  sp.sensor_range = cfg.sensor_range;
  sp.n_rays = cfg.n_rays;
  sp.sample_interval = cfg.sample_interval;
  sp.vote_threshold = cfg.vote_threshold;
  sp.speed = cfg.speed;
  sp.eps_traj = cfg.eps_traj;
  sp.eps_plan = cfg.eps_plan;
  sp.penalty = cfg.penalty;

  int unreachable = 0;
  const auto scored = score_frontiers(frontiers, ensemble, r.local_map, r.pose,
                                      commitments_of(r), known_cells(r.local_map), sp,
                                      &unreachable);
  const auto pick = select_frontier(scored);
  if (!pick) {
    relay_home_or_idle("exploration_complete");
    return;
  }

  const ScoredFrontier& chosen = scored[*pick];
  r.set_plan(chosen.path);

  WaypointContext& ctx = r.waypoint;
  ctx.invalidate();
  ctx.valid = true;
  ctx.frontier = chosen.frontier.centroid;
  ctx.ensemble = std::move(ensemble);
  bind_waypoint_samples(world, r);

  emit(world, {{"type", "waypoint"},
               {"tick", world.t},
               {"robot", r.id},
               {"target", pos_json(ctx.frontier)},
               {"score", chosen.score},
               {"gain", chosen.gain},
               {"travel_ticks", chosen.travel_ticks},
               {"penalized", chosen.penalized},
               {"candidates", static_cast<int>(scored.size())},
               {"unreachable", unreachable}});
}

void evaluate_relay_criterion(WorldState& world, RobotState& r, const HomePath& home) {
  const RunConfig& cfg = world.cfg;
  switch (cfg.strategy) {
    case StrategyKind::FinalOnly:
      return;
    case StrategyKind::Periodic: {
      if (periodic_due(world.t, cfg.period, r.last_relay_start))
        start_relay(world, r, home, "periodic");
      return;
    }
    case StrategyKind::Proid:
    case StrategyKind::ProidSafe: {
      if (!r.waypoint.valid || !r.plan_active()) return;
      if (home.ticks == 0) return;  // delivery happens this tick via the base report
      const long t_to_front = travel_time(r.remaining_plan(), cfg.speed);
      const long t_front_to_base = r.waypoint.t_front_to_base;
      if (t_to_front + t_front_to_base == 0) return;
      const double gamma_now = roid_now(r.unreported.size(), home.ticks);
      const double gamma_pred =
          proid(r.unreported.size(), remaining_gain(world, r), t_to_front, t_front_to_base);
      bool fire;
      json extra{{"gamma_now", gamma_now}, {"gamma_pred", gamma_pred}};
      if (cfg.strategy == StrategyKind::Proid) {
        fire = relay_decision(gamma_now, gamma_pred, cfg.alpha);
      } else {
        SurvivalWeights w =
            survival_weights(cfg.weibull(), static_cast<double>(world.t),
                             static_cast<double>(home.ticks), static_cast<double>(t_to_front),
                             static_cast<double>(t_front_to_base));
        // A predicted shortcut can put the via-frontier horizon before the
        // direct-return horizon; treat that as equal risk.
        if (w.s_pred > w.s_now) w.s_pred = w.s_now;
        extra["s_now"] = w.s_now;
        extra["s_pred"] = w.s_pred;
        fire = relay_decision_safe(gamma_now, gamma_pred, w.s_now, w.s_pred, cfg.alpha);
      }
      if (fire) start_relay(world, r, home, "criterion", std::move(extra));
      return;
    }
  }
}

void move_robot(WorldState& world, RobotState& r) {
  const int steps = static_cast<int>(world.cfg.speed);
  bool replanned = false;
  for (int s = 0; s < steps; ++s) {
    if (!r.plan_active()) break;
    Cell next = r.plan[r.plan_next];
    if (r.local_map.at(next) == CellState::Occupied) {
      if (replanned) break;
      replanned = true;
      if (r.mode == RobotMode::Relay) {
        r.set_plan(home_path(world, r).path);
      } else {
        const Cell goal = r.plan.back();
        std::optional<Path> fresh;
        if (r.local_map.at(goal) != CellState::Occupied)
          fresh = astar(r.local_map, r.pose, goal);
        if (!fresh) {
          r.clear_plan();
          r.waypoint.invalidate();
          break;
        }
        r.set_plan(std::move(*fresh));
        if (r.waypoint.valid) bind_waypoint_samples(world, r);
      }
      if (!r.plan_active()) break;
      next = r.plan[r.plan_next];
    }
    r.pose = next;
    ++r.plan_next;
    r.trajectory.push_back(r.pose);
  }
}

void base_report_phase(WorldState& world, RobotState& r) {
  const RunConfig& cfg = world.cfg;
  if (!in_range(r.pose, world.base.pose, cfg.comm_range)) return;

  const bool dirty = !r.unreported.empty() || r.local_map != world.base.map;
  if (dirty) {
    const RobotMode before = r.mode;
    const int delivered = r.unreported.size();
    int conflicts = 0;
    report_to_base(r, world.base.map, &conflicts);
    r.last_relay_start = world.t;
    emit(world, {{"type", "report"},
                 {"tick", world.t},
                 {"robot", r.id},
                 {"pos", pos_json(r.pose)},
                 {"delivered", delivered},
                 {"base_known", world.base.map.known_count()},
                 {"conflicts", conflicts}});
    if (before == RobotMode::Relay) emit_mode_change(world, r, before, "report");
  } else if (r.mode == RobotMode::Relay && !r.plan_active()) {
    const RobotMode before = r.mode;
    r.mode = RobotMode::Explore;
    r.clear_plan();
    emit_mode_change(world, r, before, "report");
  }
  if (r.final_latched && r.mode == RobotMode::Explore && !r.retired)
    retire(world, r, "final_complete");
}

}  // namespace

CellSet observable_set(const OccupancyGrid& truth) {
  CellSet out(truth.width, truth.height);
  const int dx[4] = {1, -1, 0, 0};
  const int dy[4] = {0, 0, 1, -1};
  for (int y = 0; y < truth.height; ++y) {
    for (int x = 0; x < truth.width; ++x) {
      const Cell c{x, y};
      if (truth.at(c) == CellState::Free) {
        out.insert(c);
        continue;
      }
      for (int k = 0; k < 4; ++k) {
        const Cell n{x + dx[k], y + dy[k]};
        if (truth.in_bounds(n) && truth.at(n) == CellState::Free) {
          out.insert(c);
          break;
        }
      }
    }
  }
  return out;
}

double coverage_ratio(const OccupancyGrid& base_map, const OccupancyGrid& truth) {
  if (base_map.width != truth.width || base_map.height != truth.height)
    throw std::invalid_argument("coverage_ratio dimension mismatch");
  const CellSet observable = observable_set(truth);
  if (observable.empty()) return 0.0;
  int known = 0;
  observable.for_each([&](Cell c) {
    if (base_map.at(c) != CellState::Unknown) ++known;
  });
  return static_cast<double>(known) / static_cast<double>(observable.size());
}

WorldState make_world(const RunConfig& cfg, std::uint64_t seed, OccupancyGrid truth) {
  cfg.validate();
  WorldState world;
  world.cfg = cfg;
  world.seed = seed;
  world.truth = std::move(truth);

  std::vector<Cell> free_cells;
  for (int y = 0; y < world.truth.height; ++y)
    for (int x = 0; x < world.truth.width; ++x)
      if (world.truth.at(Cell{x, y}) == CellState::Free) free_cells.push_back(Cell{x, y});
  if (free_cells.empty()) throw ConfigError("map has no free cells");
  const Pose start =
      free_cells[mix_seed(seed, kStartStream) % static_cast<std::uint64_t>(free_cells.size())];

  world.base.pose = start;
  world.base.map = OccupancyGrid(world.truth.width, world.truth.height,
                                 world.truth.resolution, CellState::Unknown);

  world.robots.reserve(static_cast<std::size_t>(cfg.n_robots));
  for (int i = 0; i < cfg.n_robots; ++i) {
    RobotState r;
    r.id = i;
    r.pose = start;
    r.local_map = world.base.map;
    r.unreported = CellSet(world.truth.width, world.truth.height);
    r.reported = r.unreported;
    r.delegated = r.unreported;
    r.trajectory.push_back(start);
    if (cfg.failures_enabled) {
      const double u =
          uniform01(mix_seed(seed, kFailureStream, static_cast<std::uint64_t>(i)));
      r.failure_time = sample_failure_time(cfg.weibull(), u);
    }
    world.robots.push_back(std::move(r));
  }

  world.coverage_series.push_back(0.0);
  emit(world, {{"type", "meta"},
               {"format", 1},
               {"tick", 0},
               {"seed", seed},
               {"config", config_json(cfg)},
               {"base", pos_json(start)},
               {"map", format_map(world.truth)}});
  return world;
}

void step(WorldState& world) {
  if (world.t >= world.cfg.ticks) throw InvariantError("step past mission horizon");
  const RunConfig& cfg = world.cfg;
  const long t = world.t;

  // (1) failures
  for (RobotState& r : world.robots) {
    if (r.alive && r.failure_time <= static_cast<double>(t)) {
      r.alive = false;
      ++world.failure_count;
      emit(world, {{"type", "failure"},
                   {"tick", t},
                   {"robot", r.id},
                   {"pos", pos_json(r.pose)},
                   {"lost_unreported", r.unreported.size()}});
    }
  }

  // (2) observation
  for (RobotState& r : world.robots) {
    if (!r.alive) continue;
    CellSet newly = observe(r.local_map, world.truth, r.pose, cfg.sensor_range, cfg.n_rays);
    newly.subtract(r.reported);
    newly.subtract(r.delegated);
    if (!newly.empty()) {
      r.unreported.unite(newly);
      emit(world, {{"type", "observe_summary"},
                   {"tick", t},
                   {"robot", r.id},
                   {"pos", pos_json(r.pose)},
                   {"new_cells", newly.size()},
                   {"unreported", r.unreported.size()}});
    }
  }

  // (3) pairwise exchange and handoff, ascending (i, j)
  for (std::size_t i = 0; i < world.robots.size(); ++i) {
    for (std::size_t j = i + 1; j < world.robots.size(); ++j) {
      RobotState& a = world.robots[i];
      RobotState& b = world.robots[j];
      if (!a.alive || !b.alive) continue;
      if (!in_range(a.pose, b.pose, cfg.comm_range)) continue;
      int conflicts = 0;
      exchange(a, b, cfg.comm_range, cfg.sharing_enabled, &conflicts);
      emit(world, {{"type", "exchange"},
                   {"tick", t},
                   {"robots", json::array({a.id, b.id})},
                   {"pos", json::array({pos_json(a.pose), pos_json(b.pose)})},
                   {"conflicts", conflicts}});
      if (!cfg.handoff_enabled) continue;
      // A receiver that cannot reach the base within the mission would strand
      // the payload past the horizon, so such handoffs are never attempted.
      auto fits_horizon = [&](const RobotState& receiver) {
        auto p = astar(known_only(receiver.local_map), receiver.pose, world.base.pose);
        return p && travel_time(*p, cfg.speed) <= cfg.ticks - t;
      };
      const CellSet before = delivery_union(world);
      const RobotMode a_mode = a.mode;
      const RobotMode b_mode = b.mode;
      RobotState* giver = &a;
      RobotState* receiver = &b;
      HandoffResult h;
      if (a.mode == RobotMode::Relay && fits_horizon(b))
        h = try_handoff(a, b, world.base.pose, cfg.comm_range, t);
      if (!h.occurred) {
        giver = &b;
        receiver = &a;
        if (b.mode == RobotMode::Relay && fits_horizon(a))
          h = try_handoff(b, a, world.base.pose, cfg.comm_range, t);
      }
      if (h.occurred) {
        ++world.handoff_count;
        const bool conserved = delivery_union(world) == before;
        emit(world, {{"type", "handoff"},
                     {"tick", t},
                     {"from", giver->id},
                     {"to", receiver->id},
                     {"pos", json::array({pos_json(giver->pose), pos_json(receiver->pose)})},
                     {"payload", h.payload_cells},
                     {"conserved", conserved}});
        const RobotMode receiver_was = receiver == &a ? a_mode : b_mode;
        const RobotMode giver_was = giver == &a ? a_mode : b_mode;
        if (receiver->mode != receiver_was)
          emit_mode_change(world, *receiver, receiver_was, "handoff_receive");
        if (giver->mode != giver_was)
          emit_mode_change(world, *giver, giver_was, "handoff_give");
        if (!conserved)
          throw InvariantError("handoff lost payload cells at tick " + std::to_string(t));
      }
    }
  }

  // Per-robot home paths are reused by the final-return guard and by the
  // relay criteria within this tick.
  std::vector<HomePath> home(world.robots.size());
  for (std::size_t i = 0; i < world.robots.size(); ++i) {
    const RobotState& r = world.robots[i];
    if (r.alive && !r.retired && r.mode == RobotMode::Explore)
      home[i] = home_path(world, r);
  }

  // (4) final-return guard: once the remaining time only covers the return
  // trip, a robot either relays what it still holds or stops exploring where
  // it stands, so nothing can be picked up too late to deliver.
  for (std::size_t i = 0; i < world.robots.size(); ++i) {
    RobotState& r = world.robots[i];
    if (!r.alive || r.retired || r.mode != RobotMode::Explore) continue;
    if (!r.final_latched &&
        !final_return_due(t, cfg.ticks, home[i].ticks, cfg.final_margin))
      continue;
    if (has_deliverable(world, r)) {
      r.final_latched = true;
      start_relay(world, r, home[i], "final_return");
    } else {
      retire(world, r, "final_idle");
    }
  }

  // (5) waypoint selection and relay criteria; a fresh plan is announced to
  // in-range teammates immediately so robots selecting later this tick avoid
  // committing to the same target
  for (std::size_t i = 0; i < world.robots.size(); ++i) {
    RobotState& r = world.robots[i];
    if (!r.alive || r.retired || r.mode != RobotMode::Explore) continue;
    if (!r.plan_active()) {
      select_waypoint(world, r);
      if (cfg.sharing_enabled && r.plan_active()) {
        for (RobotState& other : world.robots) {
          if (other.id == r.id || !other.alive) continue;
          if (in_range(r.pose, other.pose, cfg.comm_range)) record_commitment(other, r);
        }
      }
    }
    if (r.mode != RobotMode::Explore) continue;
    evaluate_relay_criterion(world, r, home[i]);
  }

  // (6) movement
  for (RobotState& r : world.robots) {
    if (!r.alive) continue;
    move_robot(world, r);
  }

  // (7) base reports
  for (RobotState& r : world.robots) {
    if (!r.alive) continue;
    base_report_phase(world, r);
  }

  // (8) metrics
  const double cov = coverage_ratio(world.base.map, world.truth);
  world.coverage_series.push_back(cov);
  json robots = json::array();
  for (const RobotState& r : world.robots)
    robots.push_back({{"id", r.id},
                      {"pos", pos_json(r.pose)},
                      {"mode", r.retired ? "retired" : mode_name(r.mode)},
                      {"alive", r.alive}});
  emit(world, {{"type", "tick"}, {"tick", t}, {"coverage", cov}, {"robots", std::move(robots)}});
  ++world.t;
}

MissionResult run_world(WorldState& world) {
  while (world.t < world.cfg.ticks) {
    step(world);
    const bool any_alive = std::any_of(world.robots.begin(), world.robots.end(),
                                       [](const RobotState& r) { return r.alive; });
    if (!any_alive) break;
  }
  MissionResult result;
  result.coverage = world.coverage_series.back();
  result.relay_count = world.relay_count;
  result.handoff_count = world.handoff_count;
  result.failure_count = world.failure_count;
  result.coverage_series = world.coverage_series;
  result.event_log = world.event_log;
  return result;
}

MissionResult run(const RunConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  OccupancyGrid truth = cfg.map_path.empty()
                            ? generate_map(cfg.gen_seed, cfg.gen_width, cfg.gen_height)
                            : load_map_file(cfg.map_path);
  WorldState world = make_world(cfg, seed, std::move(truth));
  return run_world(world);
}

}  // namespace mrer
