#include "mrer/mapgen.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "mrer/rng.hpp"

namespace mrer {

namespace {

struct Dsu {
  std::vector<int> parent;
  explicit Dsu(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      parent[static_cast<std::size_t>(a)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
      a = parent[static_cast<std::size_t>(a)];
    }
    return a;
  }
  bool merge(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<std::size_t>(b)] = a;
    return true;
  }
};

struct Edge {
  int a = 0;
  int b = 0;
  bool horizontal = true;
};

}  // namespace

GeneratedMap generate_map_detailed(std::uint64_t seed, int width, int height,
                                   const RoomParams& params) {
  if (width < 20 || height < 20)
    throw MapGenError("map dimensions must be at least 20x20");

  std::mt19937_64 rng(splitmix64(seed));
  GeneratedMap out;
  out.grid = OccupancyGrid(width, height, 1.0, CellState::Occupied);
  OccupancyGrid& g = out.grid;

  int bx = std::max(2, (width - 2) / params.block_width);
  int by = std::max(2, (height - 2) / params.block_height);
  if (bx > 2 && rng() % 3 == 0) --bx;
  if (by > 2 && rng() % 3 == 0) --by;
  const int cw = (width - 2) / bx;
  const int ch = (height - 2) / by;

  auto carve = [&](int x, int y) {
    if (x >= 1 && x <= width - 2 && y >= 1 && y <= height - 2)
      g.at(Cell{x, y}) = CellState::Free;
  };

  std::vector<Cell> centers(static_cast<std::size_t>(bx) * by);
  for (int j = 0; j < by; ++j) {
    for (int i = 0; i < bx; ++i) {
      const int bx0 = 1 + i * cw;
      const int by0 = 1 + j * ch;
      int rw = std::max(params.min_room, cw - 2 - static_cast<int>(rng() % 3));
      int rh = std::max(params.min_room, ch - 2 - static_cast<int>(rng() % 3));
      rw = std::min(rw, cw - 2);
      rh = std::min(rh, ch - 2);
      const int ox = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(cw - 1 - rw));
      const int oy = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(ch - 1 - rh));
      const int x0 = bx0 + ox;
      const int y0 = by0 + oy;
      for (int y = y0; y < y0 + rh; ++y)
        for (int x = x0; x < x0 + rw; ++x) carve(x, y);
      centers[static_cast<std::size_t>(j) * bx + i] = Cell{x0 + rw / 2, y0 + rh / 2};
      ++out.rooms;
    }
  }

  std::vector<Edge> edges;
  for (int j = 0; j < by; ++j) {
    for (int i = 0; i < bx; ++i) {
      const int node = j * bx + i;
      if (i + 1 < bx) edges.push_back({node, node + 1, true});
      if (j + 1 < by) edges.push_back({node, node + bx, false});
    }
  }
  for (std::size_t i = edges.size(); i > 1; --i) {
    const std::size_t k = static_cast<std::size_t>(rng() % i);
    std::swap(edges[i - 1], edges[k]);
  }

  Dsu dsu(bx * by);
  std::vector<Edge> kept;
  for (const Edge& e : edges) {
    if (dsu.merge(e.a, e.b)) kept.push_back(e);
    else if (uniform01(rng()) < params.extra_corridor_prob) kept.push_back(e);
  }

  out.min_door = 2;
  out.max_door = 1;
  for (const Edge& e : kept) {
    const Cell a = centers[static_cast<std::size_t>(e.a)];
    const Cell b = centers[static_cast<std::size_t>(e.b)];
    const int wid = 1 + static_cast<int>(rng() % 2);
    out.min_door = std::min(out.min_door, wid);
    out.max_door = std::max(out.max_door, wid);
    const int sx = a.x <= b.x ? 1 : -1;
    for (int x = a.x; x != b.x + sx; x += sx)
      for (int k = 0; k < wid; ++k) carve(x, a.y + k);
    const int sy = a.y <= b.y ? 1 : -1;
    for (int y = a.y; y != b.y + sy; y += sy)
      for (int k = 0; k < wid; ++k) carve(b.x + k, y);
    ++out.corridors;
  }

  CellSet seed_set(width, height);
  Cell first{-1, -1};
  int free_count = 0;
  for (int y = 0; y < height && first.x < 0; ++y)
    for (int x = 0; x < width && first.x < 0; ++x)
      if (g.at(Cell{x, y}) == CellState::Free) first = Cell{x, y};
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      if (g.at(Cell{x, y}) == CellState::Free) ++free_count;
  if (first.x < 0) throw MapGenError("generated layout has no free cells");
  seed_set.insert(first);
  const CellSet reached = flood_fill(seed_set, g);
  if (reached.size() != free_count)
    throw MapGenError("generated layout is not fully connected");

  return out;
}

OccupancyGrid generate_map(std::uint64_t seed, int width, int height,
                           const RoomParams& params) {
  return generate_map_detailed(seed, width, height, params).grid;
}

}  // namespace mrer
