#include <algorithm>
#include <random>

#include "doctest.h"
#include "mrer/grid.hpp"
#include "oracles.hpp"

using namespace mrer;

namespace {

OccupancyGrid open_grid(int w, int h) { return OccupancyGrid(w, h, 1.0, CellState::Free); }

std::string open_map_text(int w, int h) {
  std::string text = std::to_string(w) + " " + std::to_string(h) + " 1\n";
  for (int y = 0; y < h; ++y) text += std::string(static_cast<std::size_t>(w), '.') + "\n";
  return text;
}

}  // namespace

TEST_CASE("map parsing accepts plain layouts") {
  const OccupancyGrid g = load_map("3 3 1\n...\n...\n...\n");
  CHECK(g.width == 3);
  CHECK(g.height == 3);
  CHECK(g.resolution == 1.0);
  for (CellState s : g.cells) CHECK(s == CellState::Free);

  const OccupancyGrid ring = load_map("4 3 1\n####\n#..#\n####\n");
  CHECK(ring.at(Cell{0, 0}) == CellState::Occupied);
  CHECK(ring.at(Cell{1, 1}) == CellState::Free);
  CHECK(ring.at(Cell{2, 1}) == CellState::Free);
  CHECK(ring.at(Cell{3, 2}) == CellState::Occupied);
}

TEST_CASE("map parsing rejects malformed input") {
  CHECK_THROWS_AS(load_map(""), MapParseError);
  CHECK_THROWS_AS(load_map("nonsense\n...\n"), MapParseError);
  CHECK_THROWS_AS(load_map("3 3 1 extra\n...\n...\n...\n"), MapParseError);
  CHECK_THROWS_AS(load_map("0 3 1\n"), MapParseError);
  CHECK_THROWS_AS(load_map("3 3 0\n...\n...\n...\n"), MapParseError);
  CHECK_THROWS_AS(load_map("3 3 1\n...\n..\n...\n"), MapParseError);
  CHECK_THROWS_AS(load_map("3 3 1\n...\n...\n"), MapParseError);
  CHECK_THROWS_AS(load_map("3 3 1\n...\n.x.\n...\n"), MapParseError);
  CHECK_THROWS_AS(load_map("3 3 1\n...\n...\n...\n..\n"), MapParseError);
  CHECK_THROWS_AS(load_map("2 2 1\n##\n##\n"), MapParseError);
  CHECK_THROWS_AS(load_map("3 3 1\n...\n.?.\n...\n"), MapParseError);
  CHECK_NOTHROW(parse_map("3 3 1\n...\n.?.\n...\n", true));

  CHECK_THROWS_WITH_AS(load_map("3 3 1\n...\n.x.\n...\n"),
                       "bad glyph 'x' at row 2 col 2", MapParseError);
  CHECK_THROWS_WITH_AS(load_map("3 3 1\n...\n..\n...\n"),
                       "map row 2 has width 2, expected 3", MapParseError);
}

TEST_CASE("map format round-trips") {
  const std::string text = "5 4 1\n#####\n#...#\n#.#.#\n#####\n";
  const OccupancyGrid g = load_map(text);
  CHECK(format_map(g) == text);

  OccupancyGrid partial(3, 2, 1.0, CellState::Unknown);
  partial.at(Cell{1, 0}) = CellState::Free;
  partial.at(Cell{2, 1}) = CellState::Occupied;
  const std::string snap = format_map(partial);
  CHECK(parse_map(snap, true) == partial);
  CHECK_THROWS_AS(format_map(partial, false), std::invalid_argument);
}

TEST_CASE("cell set operations") {
  CellSet s(4, 3);
  CHECK(s.empty());
  CHECK(s.insert(Cell{1, 2}));
  CHECK_FALSE(s.insert(Cell{1, 2}));
  CHECK(s.contains(Cell{1, 2}));
  CHECK(s.size() == 1);
  CHECK_FALSE(s.contains(Cell{0, 0}));
  CHECK_THROWS_AS(s.insert(Cell{4, 0}), std::out_of_range);

  CellSet t(4, 3);
  t.insert(Cell{0, 0});
  t.insert(Cell{1, 2});
  s.unite(t);
  CHECK(s.size() == 2);
  s.subtract(t);
  CHECK(s.empty());

  s.insert(Cell{3, 1});
  s.insert(Cell{0, 0});
  t.insert(Cell{3, 1});
  CellSet inter = s;
  inter.intersect(t);
  CHECK(inter.size() == 2);

  CellSet other(5, 3);
  CHECK_THROWS_AS(s.unite(other), std::invalid_argument);
}

TEST_CASE("cell set iteration is row-major") {
  CellSet s(3, 3);
  s.insert(Cell{2, 2});
  s.insert(Cell{0, 0});
  s.insert(Cell{1, 0});
  s.insert(Cell{0, 1});
  const auto cells = s.cells();
  REQUIRE(cells.size() == 4);
  CHECK(cells[0] == Cell{0, 0});
  CHECK(cells[1] == Cell{1, 0});
  CHECK(cells[2] == Cell{0, 1});
  CHECK(cells[3] == Cell{2, 2});
}

TEST_CASE("raycast degenerate cases") {
  const OccupancyGrid g = open_grid(9, 9);
  const CellSet zero = raycast(g, Pose{4, 4}, 0, 250);
  CHECK(zero.size() == 1);
  CHECK(zero.contains(Cell{4, 4}));
  CHECK_THROWS_AS(raycast(g, Pose{9, 0}, 3, 250), std::out_of_range);
  CHECK_THROWS_AS(raycast(g, Pose{4, 4}, -1, 250), std::invalid_argument);
  CHECK_THROWS_AS(raycast(g, Pose{4, 4}, 3, 0), std::invalid_argument);
}

TEST_CASE("raycast on an open grid is the euclidean disk") {
  const OccupancyGrid g = open_grid(9, 9);
  const CellSet got = raycast(g, Pose{4, 4}, 3, 250);
  const CellSet want = oracles::visible_set(g, Pose{4, 4}, 3, false);
  CHECK(got == want);
  CHECK(got.contains(Cell{4, 1}));
  CHECK(got.contains(Cell{6, 6}));
  CHECK_FALSE(got.contains(Cell{7, 7}));
}

TEST_CASE("raycast does not see through a full wall") {
  OccupancyGrid g = open_grid(7, 7);
  for (int y = 0; y < 7; ++y) g.at(Cell{3, y}) = CellState::Occupied;
  const Pose origin{2, 3};
  const CellSet got = raycast(g, origin, 5, 250);
  CHECK(got == oracles::visible_set(g, origin, 5, false));
  for (int y = 0; y < 7; ++y)
    for (int x = 4; x < 7; ++x) CHECK_FALSE(got.contains(Cell{x, y}));
  CHECK(got.contains(Cell{3, 3}));
}

TEST_CASE("raycast equals the line-of-sight oracle on random grids") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const OccupancyGrid g = oracles::random_grid(seed, 20, 20, 0.25);
    const Pose origin{10, 10};
    CHECK(raycast(g, origin, 8, 250) == oracles::visible_set(g, origin, 8, false));
  }
}

TEST_CASE("raycast with unknown blocking matches the oracle") {
  OccupancyGrid g(11, 11, 1.0, CellState::Unknown);
  for (int y = 3; y < 8; ++y)
    for (int x = 0; x < 11; ++x) g.at(Cell{x, y}) = CellState::Free;
  g.at(Cell{5, 5}) = CellState::Occupied;
  const Pose origin{2, 5};
  const CellSet got = raycast(g, origin, 6, 250, true);
  CHECK(got == oracles::visible_set(g, origin, 6, true));
  got.for_each([&](Cell c) { CHECK(g.at(c) != CellState::Unknown); });
}

TEST_CASE("low ray counts only shrink the visible set") {
  const OccupancyGrid g = oracles::random_grid(7, 20, 20, 0.2);
  const CellSet full = raycast(g, Pose{10, 10}, 8, 250);
  const CellSet sparse = raycast(g, Pose{10, 10}, 8, 16);
  sparse.for_each([&](Cell c) { CHECK(full.contains(c)); });
}

TEST_CASE("observe stamps ground truth and reports new cells") {
  const OccupancyGrid world = load_map(open_map_text(9, 9));
  OccupancyGrid local(9, 9, 1.0, CellState::Unknown);
  const CellSet first = observe(local, world, Pose{4, 4}, 3, 250);
  CHECK(first == raycast(world, Pose{4, 4}, 3, 250));
  first.for_each([&](Cell c) { CHECK(local.at(c) == world.at(c)); });

  const CellSet again = observe(local, world, Pose{4, 4}, 3, 250);
  CHECK(again.empty());

  const int known_before = local.known_count();
  observe(local, world, Pose{6, 4}, 3, 250);
  CHECK(local.known_count() >= known_before);
}

TEST_CASE("observe validates its pose") {
  OccupancyGrid world = open_grid(5, 5);
  world.at(Cell{2, 2}) = CellState::Occupied;
  OccupancyGrid local(5, 5, 1.0, CellState::Unknown);
  CHECK_THROWS_AS(observe(local, world, Pose{2, 2}, 3, 250), std::invalid_argument);
  CHECK_THROWS_AS(observe(local, world, Pose{5, 0}, 3, 250), std::out_of_range);
  OccupancyGrid small(4, 5, 1.0, CellState::Unknown);
  CHECK_THROWS_AS(observe(small, world, Pose{1, 1}, 3, 250), std::invalid_argument);
}

TEST_CASE("fuse identities and conflict policy") {
  const OccupancyGrid m = oracles::random_grid(3, 8, 6, 0.3);
  const OccupancyGrid unknown(8, 6, 1.0, CellState::Unknown);
  CHECK(fuse(m, unknown) == m);
  CHECK(fuse(unknown, m) == m);
  CHECK(fuse(m, m) == m);

  const OccupancyGrid a = oracles::random_grid(4, 8, 6, 0.3);
  CHECK(fuse(m, a) == fuse(a, m));

  OccupancyGrid left(3, 1, 1.0, CellState::Free);
  OccupancyGrid right(3, 1, 1.0, CellState::Unknown);
  right.at(Cell{1, 0}) = CellState::Occupied;
  int conflicts = 0;
  const OccupancyGrid merged = fuse(left, right, &conflicts);
  CHECK(merged.at(Cell{1, 0}) == CellState::Occupied);
  CHECK(merged.at(Cell{0, 0}) == CellState::Free);
  CHECK(conflicts == 1);

  CHECK_THROWS_AS(fuse(left, OccupancyGrid(4, 1)), std::invalid_argument);
}

TEST_CASE("flood fill closures") {
  OccupancyGrid g = load_map("7 5 1\n#######\n#...#.#\n#...#.#\n#...#.#\n#######\n");
  CellSet seed(7, 5);
  CHECK(flood_fill(seed, g).empty());

  seed.insert(Cell{1, 1});
  const CellSet room = flood_fill(seed, g);
  CHECK(room.size() == 9);
  for (int y = 1; y <= 3; ++y)
    for (int x = 1; x <= 3; ++x) CHECK(room.contains(Cell{x, y}));

  seed.insert(Cell{5, 2});
  const CellSet both = flood_fill(seed, g);
  CHECK(both.size() == 12);

  CellSet walls(7, 5);
  walls.insert(Cell{0, 0});
  CHECK(flood_fill(walls, g).empty());
}

TEST_CASE("flood fill result is closed under adjacency") {
  const OccupancyGrid g = oracles::random_grid(11, 15, 15, 0.3);
  CellSet seed(15, 15);
  seed.insert(Cell{7, 7});
  const CellSet fill = flood_fill(seed, g);
  const int dxs[4] = {1, -1, 0, 0};
  const int dys[4] = {0, 0, 1, -1};
  fill.for_each([&](Cell c) {
    for (int i = 0; i < 4; ++i) {
      const Cell nb{c.x + dxs[i], c.y + dys[i]};
      if (g.in_bounds(nb) && g.at(nb) != CellState::Occupied) CHECK(fill.contains(nb));
    }
  });
}

TEST_CASE("frontier extraction") {
  OccupancyGrid done = open_grid(5, 5);
  CHECK(extract_frontiers(done, 1).empty());

  OccupancyGrid half(5, 5, 1.0, CellState::Unknown);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 3; ++x) half.at(Cell{x, y}) = CellState::Free;
  const auto clusters = extract_frontiers(half, 1);
  REQUIRE(clusters.size() == 1);
  CHECK(clusters[0].cells.size() == 5);
  for (const Cell c : clusters[0].cells) {
    CHECK(c.x == 2);
    CHECK(half.at(c) == CellState::Free);
  }
  CHECK(clusters[0].centroid == Cell{2, 2});

  CHECK(extract_frontiers(half, 10).empty());
  CHECK_THROWS_AS(extract_frontiers(half, 0), std::invalid_argument);
}

TEST_CASE("every returned frontier cell borders unknown space") {
  OccupancyGrid g = oracles::random_grid(21, 15, 15, 0.25);
  for (int y = 9; y < 15; ++y)
    for (int x = 0; x < 15; ++x) g.at(Cell{x, y}) = CellState::Unknown;
  const int dxs[4] = {1, -1, 0, 0};
  const int dys[4] = {0, 0, 1, -1};
  for (const auto& cluster : extract_frontiers(g, 1)) {
    for (const Cell c : cluster.cells) {
      CHECK(g.at(c) == CellState::Free);
      bool unknown_neighbor = false;
      for (int i = 0; i < 4; ++i) {
        const Cell nb{c.x + dxs[i], c.y + dys[i]};
        if (g.in_bounds(nb) && g.at(nb) == CellState::Unknown) unknown_neighbor = true;
      }
      CHECK(unknown_neighbor);
    }
  }
}

TEST_CASE("astar basics") {
  const OccupancyGrid g = open_grid(5, 5);
  const auto self = astar(g, Pose{2, 2}, Pose{2, 2});
  REQUIRE(self.has_value());
  CHECK(self->size() == 1);

  const auto corner = astar(g, Pose{0, 0}, Pose{4, 4});
  REQUIRE(corner.has_value());
  CHECK(corner->size() == 9);
  CHECK(corner->front() == Pose{0, 0});
  CHECK(corner->back() == Pose{4, 4});
  for (std::size_t i = 1; i < corner->size(); ++i) {
    const int dx = std::abs((*corner)[i].x - (*corner)[i - 1].x);
    const int dy = std::abs((*corner)[i].y - (*corner)[i - 1].y);
    CHECK(dx + dy == 1);
  }

  OccupancyGrid split = open_grid(5, 5);
  for (int y = 0; y < 5; ++y) split.at(Cell{2, y}) = CellState::Occupied;
  CHECK_FALSE(astar(split, Pose{0, 0}, Pose{4, 0}).has_value());
  CHECK_THROWS_AS(astar(split, Pose{2, 0}, Pose{4, 0}), std::invalid_argument);
  CHECK_THROWS_AS(astar(split, Pose{0, 0}, Pose{5, 0}), std::out_of_range);
}

TEST_CASE("astar treats unknown as traversable") {
  OccupancyGrid g(5, 1, 1.0, CellState::Unknown);
  g.at(Cell{0, 0}) = CellState::Free;
  g.at(Cell{4, 0}) = CellState::Free;
  const auto p = astar(g, Pose{0, 0}, Pose{4, 0});
  REQUIRE(p.has_value());
  CHECK(p->size() == 5);
}

TEST_CASE("astar cost equals the dijkstra oracle on random grids") {
  for (std::uint64_t seed = 100; seed < 200; ++seed) {
    const OccupancyGrid g = oracles::random_grid(seed, 15, 15, 0.3);
    const Cell start{7, 7};
    const auto dist = oracles::dijkstra(g, start);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    for (int trial = 0; trial < 5; ++trial) {
      const Cell goal{static_cast<int>(rng() % 15), static_cast<int>(rng() % 15)};
      if (g.at(goal) == CellState::Occupied) continue;
      const auto path = astar(g, start, goal);
      const long want = dist[g.index(goal)];
      if (want < 0) {
        CHECK_FALSE(path.has_value());
      } else {
        REQUIRE(path.has_value());
        CHECK(static_cast<long>(path->size()) - 1 == want);
      }
    }
  }
}

TEST_CASE("travel time is a ceiling division") {
  const OccupancyGrid g = open_grid(12, 3);
  const Path single{Pose{0, 0}};
  CHECK(travel_time(single, 1.0) == 0);
  const auto p8 = astar(g, Pose{0, 0}, Pose{8, 0});
  REQUIRE(p8.has_value());
  CHECK(travel_time(*p8, 1.0) == 8);
  const auto p9 = astar(g, Pose{0, 0}, Pose{9, 0});
  REQUIRE(p9.has_value());
  CHECK(travel_time(*p9, 2.0) == 5);
  CHECK_THROWS_AS(travel_time(*p9, 0.0), std::invalid_argument);
}

TEST_CASE("path sampling keeps endpoints") {
  Path path;
  for (int i = 0; i <= 50; ++i) path.push_back(Pose{i, 0});

  const auto coarse = path_sample(path, 25);
  REQUIRE(coarse.size() == 3);
  CHECK(coarse[0] == Pose{0, 0});
  CHECK(coarse[1] == Pose{25, 0});
  CHECK(coarse[2] == Pose{50, 0});

  const auto full = path_sample(path, 1);
  CHECK(full == path);

  Path shorty{Pose{0, 0}, Pose{1, 0}, Pose{2, 0}};
  const auto ends = path_sample(shorty, 25);
  REQUIRE(ends.size() == 2);
  CHECK(ends[0] == Pose{0, 0});
  CHECK(ends[1] == Pose{2, 0});

  CHECK_THROWS_AS(path_sample(path, 0), std::invalid_argument);
}
