#include "mrer/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mrer/rng.hpp"

namespace mrer {

namespace {

constexpr double kFlipProbability = 0.05;

std::vector<Cell> disk_offsets(int radius) {
  std::vector<Cell> out;
  const long long r2 = static_cast<long long>(radius) * radius;
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx)
      if (static_cast<long long>(dx) * dx + static_cast<long long>(dy) * dy <= r2)
        out.push_back(Cell{dx, dy});
  return out;
}

CellSet revealed_band(const OccupancyGrid& local, int radius) {
  CellSet band(local.width, local.height);
  if (radius <= 0) return band;
  const auto offsets = disk_offsets(radius);
  for (int y = 0; y < local.height; ++y) {
    for (int x = 0; x < local.width; ++x) {
      const Cell c{x, y};
      if (local.at(c) == CellState::Unknown) continue;
      for (Cell off : offsets) {
        const Cell n{x + off.x, y + off.y};
        if (local.in_bounds(n) && local.at(n) == CellState::Unknown) band.insert(n);
      }
    }
  }
  return band;
}

OccupancyGrid oracle_member(const OccupancyGrid& local, const OccupancyGrid& world,
                            const CellSet& band, std::uint64_t member_seed) {
  OccupancyGrid out = local;
  std::mt19937_64 rng(member_seed);
  band.for_each([&](Cell c) {
    CellState label = world.at(c);
    if (uniform01(rng()) < kFlipProbability) {
      label = label == CellState::Occupied ? CellState::Free : CellState::Occupied;
    }
    out.at(c) = label;
  });
  return out;
}

struct WallRun {
  bool horizontal = true;
  int fixed = 0;  // y for horizontal runs, x for vertical
  int lo = 0;     // inclusive start along the run axis
  int hi = 0;     // inclusive end
};

std::vector<WallRun> collect_runs(const OccupancyGrid& local, bool horizontal, int min_len) {
  std::vector<WallRun> runs;
  const int outer = horizontal ? local.height : local.width;
  const int inner = horizontal ? local.width : local.height;
  for (int f = 0; f < outer; ++f) {
    int start = -1;
    for (int i = 0; i <= inner; ++i) {
      const bool occ =
          i < inner &&
          local.at(horizontal ? Cell{i, f} : Cell{f, i}) == CellState::Occupied;
      if (occ && start < 0) start = i;
      if (!occ && start >= 0) {
        if (i - start >= min_len) runs.push_back({horizontal, f, start, i - 1});
        start = -1;
      }
    }
  }
  return runs;
}

Cell run_cell(const WallRun& r, int along) {
  return r.horizontal ? Cell{along, r.fixed} : Cell{r.fixed, along};
}

void extend_run_end(OccupancyGrid& member, const OccupancyGrid& local, const WallRun& r,
                    int from, int dir, int length) {
  for (int s = 1; s <= length; ++s) {
    const Cell c = run_cell(r, from + dir * s);
    if (!member.in_bounds(c)) return;
    if (local.at(c) != CellState::Unknown) return;
    member.at(c) = CellState::Occupied;
  }
}

// Two parallel runs spanning the same interval with one known connecting
// side: draw the missing fourth side through Unknown cells.
void close_rectangles(OccupancyGrid& member, const OccupancyGrid& local,
                      const std::vector<WallRun>& runs) {
  for (std::size_t a = 0; a < runs.size(); ++a) {
    for (std::size_t b = a + 1; b < runs.size(); ++b) {
      const WallRun& r1 = runs[a];
      const WallRun& r2 = runs[b];
      if (r1.horizontal != r2.horizontal) continue;
      if (r1.lo != r2.lo || r1.hi != r2.hi) continue;
      const int f1 = std::min(r1.fixed, r2.fixed);
      const int f2 = std::max(r1.fixed, r2.fixed);
      if (f2 - f1 < 3) continue;
      auto side_cell = [&](int along, int fixed) {
        return r1.horizontal ? Cell{along, fixed} : Cell{fixed, along};
      };
      auto side_known = [&](int along) {
        for (int f = f1 + 1; f < f2; ++f)
          if (local.at(side_cell(along, f)) != CellState::Occupied) return false;
        return true;
      };
      auto side_fill = [&](int along) {
        for (int f = f1 + 1; f < f2; ++f) {
          const Cell c = side_cell(along, f);
          if (local.at(c) == CellState::Unknown) member.at(c) = CellState::Occupied;
        }
      };
      if (side_known(r1.lo)) side_fill(r1.hi);
      if (side_known(r1.hi)) side_fill(r1.lo);
    }
  }
}

OccupancyGrid heuristic_member(const OccupancyGrid& local, std::uint64_t member_seed) {
  OccupancyGrid member = local;
  std::mt19937_64 rng(member_seed);
  constexpr int kEnvelopeRadius = 10;
  constexpr int kMinRunLen = 3;

  auto runs_h = collect_runs(local, true, kMinRunLen);
  auto runs_v = collect_runs(local, false, kMinRunLen);
  for (const auto& runs : {runs_h, runs_v}) {
    for (const WallRun& r : runs) {
      const int len_lo = 4 + static_cast<int>(rng() % 7);
      const int len_hi = 4 + static_cast<int>(rng() % 7);
      extend_run_end(member, local, r, r.lo, -1, len_lo);
      extend_run_end(member, local, r, r.hi, +1, len_hi);
    }
  }
  close_rectangles(member, local, runs_h);
  close_rectangles(member, local, runs_v);

  const auto offsets = disk_offsets(kEnvelopeRadius);
  for (int y = 0; y < local.height; ++y) {
    for (int x = 0; x < local.width; ++x) {
      const Cell c{x, y};
      if (local.at(c) != CellState::Free) continue;
      for (Cell off : offsets) {
        const Cell n{x + off.x, y + off.y};
        if (member.in_bounds(n) && member.at(n) == CellState::Unknown)
          member.at(n) = CellState::Free;
      }
    }
  }
  return member;
}

int vote_need(double threshold, int members) {
  if (!(threshold > 0.0) || threshold > 1.0)
    throw std::invalid_argument("vote threshold must lie in (0,1]");
  const double exact = threshold * static_cast<double>(members);
  int need = static_cast<int>(std::ceil(exact - 1e-9));
  if (need < 1) need = 1;
  return need;
}

}  // namespace

std::uint64_t map_fingerprint(const OccupancyGrid& grid) {
  std::uint64_t h = 1469598103934665603ULL;
  auto fold = [&](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ULL;
  };
  fold(static_cast<std::uint64_t>(grid.width));
  fold(static_cast<std::uint64_t>(grid.height));
  for (CellState s : grid.cells) fold(static_cast<std::uint64_t>(s));
  return h;
}

PredictionEnsemble predict(const PredictorKind& kind, const OccupancyGrid& local,
                           const OccupancyGrid* world, int ensemble_size,
                           std::uint64_t rng_seed) {
  if (ensemble_size < 1) throw std::invalid_argument("ensemble size must be at least 1");
  if (kind.reveal_radius < 0) throw std::invalid_argument("reveal radius must be non-negative");
  if (kind.type == PredictorType::Oracle) {
    if (!world) throw std::invalid_argument("oracle predictor requires a ground-truth map");
    if (!local.same_shape(*world))
      throw std::invalid_argument("oracle predictor local/world shape mismatch");
  }

  PredictionEnsemble ensemble;
  ensemble.input_fingerprint = map_fingerprint(local);
  ensemble.members.reserve(static_cast<std::size_t>(ensemble_size));

  CellSet band = kind.type == PredictorType::Oracle
                     ? revealed_band(local, kind.reveal_radius)
                     : CellSet(local.width, local.height);

  for (int m = 0; m < ensemble_size; ++m) {
    PredictedMap pm;
    pm.source = kind.type;
    pm.member_seed = mix_seed(rng_seed, static_cast<std::uint64_t>(m));
    switch (kind.type) {
      case PredictorType::Null:
        pm.map = local;
        break;
      case PredictorType::Oracle:
        pm.map = oracle_member(local, *world, band, pm.member_seed);
        break;
      case PredictorType::Heuristic:
        pm.map = heuristic_member(local, pm.member_seed);
        break;
    }
    ensemble.members.push_back(std::move(pm));
  }
  return ensemble;
}

static CellSet member_visible(const PredictedMap& member, const std::vector<Pose>& waypoints,
                              int range, int n_rays) {
  CellSet seed(member.map.width, member.map.height);
  for (Pose p : waypoints) seed.unite(raycast(member.map, p, range, n_rays, true));
  return flood_fill(seed, member.map, true);
}

std::vector<CellSet> member_visibility_serial(const PredictionEnsemble& ensemble,
                                              const std::vector<Pose>& waypoints,
                                              int range, int n_rays) {
  std::vector<CellSet> out(ensemble.members.size());
  for (std::size_t m = 0; m < ensemble.members.size(); ++m)
    out[m] = member_visible(ensemble.members[m], waypoints, range, n_rays);
  return out;
}

std::vector<CellSet> member_visibility_parallel(const PredictionEnsemble& ensemble,
                                                const std::vector<Pose>& waypoints,
                                                int range, int n_rays) {
  std::vector<CellSet> out(ensemble.members.size());
  const int count = static_cast<int>(ensemble.members.size());
#pragma omp parallel for schedule(dynamic)
  for (int m = 0; m < count; ++m)
    out[static_cast<std::size_t>(m)] =
        member_visible(ensemble.members[static_cast<std::size_t>(m)], waypoints, range, n_rays);
  return out;
}

CellSet vote_cells(const std::vector<CellSet>& member_sets, double threshold) {
  if (member_sets.empty()) throw std::invalid_argument("vote over empty ensemble");
  const int need = vote_need(threshold, static_cast<int>(member_sets.size()));
  const int w = member_sets.front().width();
  const int h = member_sets.front().height();
  CellSet out(w, h);
  std::vector<std::uint16_t> counts(static_cast<std::size_t>(w) * h, 0);
  for (const CellSet& s : member_sets)
    s.for_each([&](Cell c) {
      ++counts[static_cast<std::size_t>(c.y) * w + c.x];
    });
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (counts[static_cast<std::size_t>(y) * w + x] >= need) out.insert(Cell{x, y});
  return out;
}

CellSet probabilistic_visibility(const PredictionEnsemble& ensemble,
                                 const std::vector<Pose>& waypoints, int range,
                                 int n_rays, double threshold, bool parallel) {
  if (ensemble.members.empty()) throw std::invalid_argument("empty ensemble");
  const int w = ensemble.members.front().map.width;
  const int h = ensemble.members.front().map.height;
  vote_need(threshold, static_cast<int>(ensemble.members.size()));
  if (waypoints.empty()) return CellSet(w, h);
  const auto sets = parallel ? member_visibility_parallel(ensemble, waypoints, range, n_rays)
                             : member_visibility_serial(ensemble, waypoints, range, n_rays);
  return vote_cells(sets, threshold);
}

long expected_info_gain(const PredictionEnsemble& ensemble,
                        const std::vector<Pose>& waypoints, int range, int n_rays,
                        double threshold, const CellSet& already_known, bool parallel) {
  CellSet visible = probabilistic_visibility(ensemble, waypoints, range, n_rays,
                                             threshold, parallel);
  visible.subtract(already_known);
  return visible.size();
}

OccupancyGrid vote_map(const PredictionEnsemble& ensemble, double threshold) {
  if (ensemble.members.empty()) throw std::invalid_argument("empty ensemble");
  const OccupancyGrid& first = ensemble.members.front().map;
  const int need = vote_need(threshold, static_cast<int>(ensemble.members.size()));
  OccupancyGrid out(first.width, first.height, first.resolution, CellState::Unknown);
  for (std::size_t i = 0; i < out.cells.size(); ++i) {
    int occ = 0, free = 0;
    for (const PredictedMap& m : ensemble.members) {
      if (m.map.cells[i] == CellState::Occupied) ++occ;
      else if (m.map.cells[i] == CellState::Free) ++free;
    }
    if (occ >= free && occ >= need) out.cells[i] = CellState::Occupied;
    else if (free > occ && free >= need) out.cells[i] = CellState::Free;
  }
  return out;
}

}  // namespace mrer
