#pragma once

#include <cstdint>

#include "mrer/grid.hpp"

namespace mrer {

struct MapGenError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RoomParams {
  int min_room = 4;      // smallest room side
  int block_width = 14;  // target block size the room grid divides into
  int block_height = 12;
  double extra_corridor_prob = 1.0 / 3.0;
};

struct GeneratedMap {
  OccupancyGrid grid;
  int rooms = 0;
  int corridors = 0;
  int min_door = 0;
  int max_door = 0;
};

// Seeded indoor floorplan: rectangular rooms on a block grid joined by
// L-shaped corridors along a random spanning tree plus occasional extra
// edges.  All Free cells are mutually reachable.
GeneratedMap generate_map_detailed(std::uint64_t seed, int width, int height,
                                   const RoomParams& params = RoomParams{});

OccupancyGrid generate_map(std::uint64_t seed, int width, int height,
                           const RoomParams& params = RoomParams{});

}  // namespace mrer
