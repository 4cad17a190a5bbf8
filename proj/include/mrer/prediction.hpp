#pragma once

#include <cstdint>
#include <vector>

#include "mrer/grid.hpp"

namespace mrer {

enum class PredictorType { Null, Oracle, Heuristic };

struct PredictorKind {
  PredictorType type = PredictorType::Null;
  int reveal_radius = 8;
};

struct PredictedMap {
  OccupancyGrid map;
  PredictorType source = PredictorType::Null;
  std::uint64_t member_seed = 0;
};

struct PredictionEnsemble {
  std::vector<PredictedMap> members;
  std::uint64_t input_fingerprint = 0;
};

std::uint64_t map_fingerprint(const OccupancyGrid& grid);

// Ensemble of completed maps extending `local`.  Known cells are preserved
// exactly in every member.  `world` is consulted only by the Oracle predictor
// (pass nullptr otherwise).  Seeds for members derive from rng_seed, so the
// whole ensemble is a pure function of its arguments.
PredictionEnsemble predict(const PredictorKind& kind, const OccupancyGrid& local,
                           const OccupancyGrid* world, int ensemble_size,
                           std::uint64_t rng_seed);

// Per-member visible set for a waypoint sequence: the union of raycasts from
// each waypoint over that member's map (Unknown blocks), expanded by flood
// fill through the member's Free cells.
std::vector<CellSet> member_visibility_serial(const PredictionEnsemble& ensemble,
                                              const std::vector<Pose>& waypoints,
                                              int range, int n_rays);
std::vector<CellSet> member_visibility_parallel(const PredictionEnsemble& ensemble,
                                                const std::vector<Pose>& waypoints,
                                                int range, int n_rays);

// Cells visible in at least ceil(threshold * members) of the ensemble.
CellSet vote_cells(const std::vector<CellSet>& member_sets, double threshold);

CellSet probabilistic_visibility(const PredictionEnsemble& ensemble,
                                 const std::vector<Pose>& waypoints, int range,
                                 int n_rays, double threshold, bool parallel = false);

long expected_info_gain(const PredictionEnsemble& ensemble,
                        const std::vector<Pose>& waypoints, int range, int n_rays,
                        double threshold, const CellSet& already_known,
                        bool parallel = false);

// Cell-wise majority map over the ensemble: label assigned when at least
// ceil(threshold * members) members agree, Occupied winning ties; cells the
// ensemble leaves undecided stay Unknown.
OccupancyGrid vote_map(const PredictionEnsemble& ensemble, double threshold);

}  // namespace mrer
