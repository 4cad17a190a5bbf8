#include "mrer/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <map>
#include <mutex>
#include <queue>
#include <sstream>

namespace mrer {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct RayTable {
  struct Candidate {
    Cell offset;
    std::uint32_t line_begin = 0;
    std::uint32_t line_end = 0;
  };
  std::vector<Candidate> candidates;
  std::vector<Cell> line_offsets;
};

// Interior cells of the grid line (0,0) -> (dx,dy), endpoints excluded.
std::vector<Cell> line_between(int dx, int dy) {
  std::vector<Cell> out;
  int x = 0, y = 0;
  const int sx = dx > 0 ? 1 : -1;
  const int sy = dy > 0 ? 1 : -1;
  const int adx = std::abs(dx);
  const int ady = std::abs(dy);
  int err = adx - ady;
  while (true) {
    const int e2 = 2 * err;
    if (e2 > -ady) {
      err -= ady;
      x += sx;
    }
    if (e2 < adx) {
      err += adx;
      y += sy;
    }
    if (x == dx && y == dy) break;
    out.push_back(Cell{x, y});
  }
  return out;
}

// Candidate offsets are enumerated by densely stepping each ray and keeping
// every touched cell within Euclidean range.  A 0.2-cell step leaves no gaps
// in the disk for the ray counts used here (checked by tests), so filtering
// candidates by their own line of sight makes the result independent of the
// enumeration.
RayTable build_ray_table(int range, int n_rays) {
  RayTable table;
  const int r = range;
  const long long r2 = static_cast<long long>(r) * r;
  const int side = 2 * r + 1;
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(side) * side, 0);
  auto mark = [&](int dx, int dy) {
    if (static_cast<long long>(dx) * dx + static_cast<long long>(dy) * dy > r2) return;
    const std::size_t idx =
        static_cast<std::size_t>(dy + r) * static_cast<std::size_t>(side) + static_cast<std::size_t>(dx + r);
    seen[idx] = 1;
  };
  mark(0, 0);
  const double step = 0.2;
  for (int i = 0; i < n_rays; ++i) {
    const double theta = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n_rays);
    const double cx = std::cos(theta);
    const double cy = std::sin(theta);
    for (double t = step; t <= static_cast<double>(r) + step * 0.5; t += step) {
      const double fx = cx * std::min(t, static_cast<double>(r));
      const double fy = cy * std::min(t, static_cast<double>(r));
      mark(static_cast<int>(std::lround(fx)), static_cast<int>(std::lround(fy)));
    }
  }
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      const std::size_t idx =
          static_cast<std::size_t>(dy + r) * static_cast<std::size_t>(side) + static_cast<std::size_t>(dx + r);
      if (!seen[idx]) continue;
      RayTable::Candidate c;
      c.offset = Cell{dx, dy};
      c.line_begin = static_cast<std::uint32_t>(table.line_offsets.size());
      for (Cell p : line_between(dx, dy)) table.line_offsets.push_back(p);
      c.line_end = static_cast<std::uint32_t>(table.line_offsets.size());
      table.candidates.push_back(c);
    }
  }
  return table;
}

const RayTable& ray_table(int range, int n_rays) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, RayTable> cache;
  std::scoped_lock lock(mu);
  auto key = std::make_pair(range, n_rays);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, build_ray_table(range, n_rays)).first;
  return it->second;
}

void check_ray_args(int range, int n_rays) {
  if (range < 0) throw std::invalid_argument("raycast range must be non-negative");
  if (n_rays < 1) throw std::invalid_argument("raycast needs at least one ray");
}

}  // namespace

int OccupancyGrid::known_count() const {
  int n = 0;
  for (CellState s : cells)
    if (s != CellState::Unknown) ++n;
  return n;
}

void CellSet::unite(const CellSet& o) {
  check_shape(o);
  for (std::size_t i = 0; i < mask_.size(); ++i) {
    if (o.mask_[i] && !mask_[i]) {
      mask_[i] = 1;
      ++count_;
    }
  }
}

void CellSet::subtract(const CellSet& o) {
  check_shape(o);
  for (std::size_t i = 0; i < mask_.size(); ++i) {
    if (o.mask_[i] && mask_[i]) {
      mask_[i] = 0;
      --count_;
    }
  }
}

void CellSet::intersect(const CellSet& o) {
  check_shape(o);
  for (std::size_t i = 0; i < mask_.size(); ++i) {
    if (!o.mask_[i] && mask_[i]) {
      mask_[i] = 0;
      --count_;
    }
  }
}

std::vector<Cell> CellSet::cells() const {
  std::vector<Cell> out;
  out.reserve(static_cast<std::size_t>(count_));
  for_each([&](Cell c) { out.push_back(c); });
  return out;
}

OccupancyGrid parse_map(const std::string& text, bool allow_unknown) {
  std::istringstream in(text);
  std::string header;
  if (!std::getline(in, header)) throw MapParseError("empty map text");
  std::istringstream hs(header);
  int width = 0, height = 0;
  double resolution = 0.0;
  if (!(hs >> width >> height >> resolution))
    throw MapParseError("map header must be: width height resolution");
  std::string trailing;
  if (hs >> trailing) throw MapParseError("map header has trailing tokens");
  if (width <= 0 || height <= 0) throw MapParseError("map dimensions must be positive");
  if (resolution <= 0.0) throw MapParseError("map resolution must be positive");

  OccupancyGrid grid(width, height, resolution);
  for (int y = 0; y < height; ++y) {
    std::string row;
    if (!std::getline(in, row))
      throw MapParseError("map row " + std::to_string(y + 1) + " missing");
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (static_cast<int>(row.size()) != width)
      throw MapParseError("map row " + std::to_string(y + 1) + " has width " +
                          std::to_string(row.size()) + ", expected " + std::to_string(width));
    for (int x = 0; x < width; ++x) {
      switch (row[static_cast<std::size_t>(x)]) {
        case '#': grid.at(Cell{x, y}) = CellState::Occupied; break;
        case '.': grid.at(Cell{x, y}) = CellState::Free; break;
        case '?':
          if (!allow_unknown)
            throw MapParseError("unknown cells not allowed in ground-truth maps (row " +
                                std::to_string(y + 1) + ")");
          grid.at(Cell{x, y}) = CellState::Unknown;
          break;
        default:
          throw MapParseError("bad glyph '" + std::string(1, row[static_cast<std::size_t>(x)]) +
                              "' at row " + std::to_string(y + 1) + " col " + std::to_string(x + 1));
      }
    }
  }
  std::string extra;
  while (std::getline(in, extra)) {
    if (!extra.empty() && extra.back() == '\r') extra.pop_back();
    if (!extra.empty()) throw MapParseError("map has trailing non-empty rows");
  }
  return grid;
}

OccupancyGrid load_map(const std::string& text) {
  OccupancyGrid grid = parse_map(text, false);
  for (const CellState s : grid.cells)
    if (s == CellState::Free) return grid;
  throw MapParseError("map has no Free cells");
}

OccupancyGrid load_map_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MapParseError("cannot open map file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_map(buf.str());
}

std::string format_map(const OccupancyGrid& grid, bool with_unknown) {
  std::ostringstream out;
  out << grid.width << ' ' << grid.height << ' ' << grid.resolution << '\n';
  for (int y = 0; y < grid.height; ++y) {
    for (int x = 0; x < grid.width; ++x) {
      switch (grid.at(Cell{x, y})) {
        case CellState::Occupied: out << '#'; break;
        case CellState::Free: out << '.'; break;
        case CellState::Unknown:
          if (!with_unknown) throw std::invalid_argument("grid has Unknown cells");
          out << '?';
          break;
      }
    }
    out << '\n';
  }
  return out.str();
}

CellSet raycast(const OccupancyGrid& world, Pose origin, int range, int n_rays,
                bool unknown_blocks) {
  check_ray_args(range, n_rays);
  if (!world.in_bounds(origin)) throw std::out_of_range("raycast origin outside grid");
  const RayTable& table = ray_table(range, n_rays);
  CellSet visible(world.width, world.height);
  for (const auto& cand : table.candidates) {
    const Cell cell{origin.x + cand.offset.x, origin.y + cand.offset.y};
    if (!world.in_bounds(cell)) continue;
    const CellState cs = world.at(cell);
    if (unknown_blocks && cs == CellState::Unknown) continue;
    bool clear = true;
    for (std::uint32_t k = cand.line_begin; k < cand.line_end; ++k) {
      const Cell mid{origin.x + table.line_offsets[k].x, origin.y + table.line_offsets[k].y};
      const CellState ms = world.at(mid);
      if (ms == CellState::Occupied || (unknown_blocks && ms == CellState::Unknown)) {
        clear = false;
        break;
      }
    }
    if (clear) visible.insert(cell);
  }
  return visible;
}

CellSet observe(OccupancyGrid& local, const OccupancyGrid& world, Pose pose,
                int range, int n_rays) {
  if (!local.same_shape(world)) throw std::invalid_argument("local/world shape mismatch");
  if (!world.in_bounds(pose)) throw std::out_of_range("observe pose outside grid");
  if (world.at(pose) != CellState::Free)
    throw std::invalid_argument("observe pose must be a free cell");
  check_ray_args(range, n_rays);
  const RayTable& table = ray_table(range, n_rays);
  CellSet newly(world.width, world.height);
  for (const auto& cand : table.candidates) {
    const Cell cell{pose.x + cand.offset.x, pose.y + cand.offset.y};
    if (!world.in_bounds(cell)) continue;
    if (local.at(cell) != CellState::Unknown) continue;
    bool clear = true;
    for (std::uint32_t k = cand.line_begin; k < cand.line_end; ++k) {
      const Cell mid{pose.x + table.line_offsets[k].x, pose.y + table.line_offsets[k].y};
      if (world.at(mid) == CellState::Occupied) {
        clear = false;
        break;
      }
    }
    if (clear) {
      local.at(cell) = world.at(cell);
      newly.insert(cell);
    }
  }
  return newly;
}

OccupancyGrid fuse(const OccupancyGrid& a, const OccupancyGrid& b, int* conflicts) {
  if (!a.same_shape(b)) throw std::invalid_argument("fuse shape mismatch");
  OccupancyGrid out = a;
  int conflict_count = 0;
  for (std::size_t i = 0; i < out.cells.size(); ++i) {
    const CellState sa = a.cells[i];
    const CellState sb = b.cells[i];
    if (sb == CellState::Unknown) continue;
    if (sa == CellState::Unknown) {
      out.cells[i] = sb;
    } else if (sa != sb) {
      out.cells[i] = CellState::Occupied;
      ++conflict_count;
    }
  }
  if (conflicts) *conflicts += conflict_count;
  return out;
}

CellSet flood_fill(const CellSet& seed, const OccupancyGrid& domain, bool unknown_blocks) {
  if (seed.width() != domain.width || seed.height() != domain.height)
    throw std::invalid_argument("flood fill seed/domain shape mismatch");
  auto traversable = [&](Cell c) {
    const CellState s = domain.at(c);
    if (s == CellState::Occupied) return false;
    if (unknown_blocks && s == CellState::Unknown) return false;
    return true;
  };
  CellSet out(domain.width, domain.height);
  std::deque<Cell> queue;
  seed.for_each([&](Cell c) {
    if (traversable(c) && out.insert(c)) queue.push_back(c);
  });
  const int dx[4] = {1, -1, 0, 0};
  const int dy[4] = {0, 0, 1, -1};
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    for (int k = 0; k < 4; ++k) {
      const Cell n{c.x + dx[k], c.y + dy[k]};
      if (!domain.in_bounds(n) || !traversable(n)) continue;
      if (out.insert(n)) queue.push_back(n);
    }
  }
  return out;
}

std::vector<FrontierCluster> extract_frontiers(const OccupancyGrid& local, int min_region) {
  if (min_region < 1) throw std::invalid_argument("min_region must be at least 1");
  const int w = local.width, h = local.height;
  std::vector<std::uint8_t> frontier(static_cast<std::size_t>(w) * h, 0);
  const int dx4[4] = {1, -1, 0, 0};
  const int dy4[4] = {0, 0, 1, -1};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Cell c{x, y};
      if (local.at(c) != CellState::Free) continue;
      for (int k = 0; k < 4; ++k) {
        const Cell n{x + dx4[k], y + dy4[k]};
        if (local.in_bounds(n) && local.at(n) == CellState::Unknown) {
          frontier[local.index(c)] = 1;
          break;
        }
      }
    }
  }

  std::vector<FrontierCluster> clusters;
  std::vector<std::uint8_t> visited(static_cast<std::size_t>(w) * h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      if (!frontier[idx] || visited[idx]) continue;
      FrontierCluster cluster;
      std::deque<Cell> queue{Cell{x, y}};
      visited[idx] = 1;
      while (!queue.empty()) {
        const Cell c = queue.front();
        queue.pop_front();
        cluster.cells.push_back(c);
        for (int ddy = -1; ddy <= 1; ++ddy) {
          for (int ddx = -1; ddx <= 1; ++ddx) {
            if (ddx == 0 && ddy == 0) continue;
            const Cell n{c.x + ddx, c.y + ddy};
            if (!local.in_bounds(n)) continue;
            const std::size_t nidx = local.index(n);
            if (!frontier[nidx] || visited[nidx]) continue;
            visited[nidx] = 1;
            queue.push_back(n);
          }
        }
      }
      if (static_cast<int>(cluster.cells.size()) < min_region) continue;
      std::sort(cluster.cells.begin(), cluster.cells.end(), cell_less);
      double mx = 0.0, my = 0.0;
      for (Cell c : cluster.cells) {
        mx += c.x;
        my += c.y;
      }
      mx /= static_cast<double>(cluster.cells.size());
      my /= static_cast<double>(cluster.cells.size());
      Cell best = cluster.cells.front();
      double best_d = 1e300;
      for (Cell c : cluster.cells) {
        const double d = (c.x - mx) * (c.x - mx) + (c.y - my) * (c.y - my);
        if (d < best_d - 1e-12 || (std::abs(d - best_d) <= 1e-12 && cell_less(c, best))) {
          best = c;
          best_d = d;
        }
      }
      cluster.centroid = best;
      clusters.push_back(std::move(cluster));
    }
  }
  return clusters;
}

std::optional<Path> astar(const OccupancyGrid& plan_map, Pose start, Pose goal) {
  if (!plan_map.in_bounds(start) || !plan_map.in_bounds(goal))
    throw std::out_of_range("astar endpoints outside grid");
  if (plan_map.at(start) == CellState::Occupied || plan_map.at(goal) == CellState::Occupied)
    throw std::invalid_argument("astar endpoints must be traversable");

  const int w = plan_map.width, h = plan_map.height;
  const std::size_t n = static_cast<std::size_t>(w) * h;
  constexpr int kUnset = -1;
  std::vector<int> g(n, -1);
  std::vector<int> parent(n, kUnset);

  auto heuristic = [&](Cell c) { return std::abs(c.x - goal.x) + std::abs(c.y - goal.y); };

  // Priority key packs (f, h, y, x) so pops are fully ordered.
  using Key = std::uint64_t;
  auto make_key = [&](int f, int hh, Cell c) {
    return (static_cast<Key>(f) << 44) | (static_cast<Key>(hh) << 24) |
           (static_cast<Key>(c.y) << 12) | static_cast<Key>(c.x);
  };
  using Entry = std::pair<Key, Cell>;
  auto cmp = [](const Entry& a, const Entry& b) { return a.first > b.first; };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> open(cmp);

  g[plan_map.index(start)] = 0;
  open.emplace(make_key(heuristic(start), heuristic(start), start), start);
  const int dx[4] = {1, -1, 0, 0};
  const int dy[4] = {0, 0, 1, -1};

  while (!open.empty()) {
    const auto [key, c] = open.top();
    open.pop();
    const std::size_t ci = plan_map.index(c);
    const int cg = g[ci];
    const int key_f = static_cast<int>(key >> 44);
    if (key_f > cg + heuristic(c)) continue;
    if (c == goal) break;
    for (int k = 0; k < 4; ++k) {
      const Cell nb{c.x + dx[k], c.y + dy[k]};
      if (!plan_map.in_bounds(nb) || plan_map.at(nb) == CellState::Occupied) continue;
      const std::size_t ni = plan_map.index(nb);
      const int ng = cg + 1;
      if (g[ni] != -1 && g[ni] <= ng) continue;
      g[ni] = ng;
      parent[ni] = static_cast<int>(ci);
      const int hh = heuristic(nb);
      open.emplace(make_key(ng + hh, hh, nb), nb);
    }
  }

  if (g[plan_map.index(goal)] == -1) return std::nullopt;
  Path path;
  std::size_t cur = plan_map.index(goal);
  while (true) {
    path.push_back(Cell{static_cast<int>(cur % static_cast<std::size_t>(w)),
                        static_cast<int>(cur / static_cast<std::size_t>(w))});
    if (parent[cur] == kUnset) break;
    cur = static_cast<std::size_t>(parent[cur]);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

long travel_time(const Path& path, double v) {
  if (v <= 0.0) throw std::invalid_argument("speed must be positive");
  if (path.size() <= 1) return 0;
  const double steps = static_cast<double>(path.size() - 1);
  return static_cast<long>(std::ceil(steps / v - 1e-12));
}

std::vector<Pose> path_sample(const Path& path, int interval) {
  if (interval < 1) throw std::invalid_argument("sample interval must be at least 1");
  std::vector<Pose> out;
  if (path.empty()) return out;
  for (std::size_t i = 0; i < path.size(); i += static_cast<std::size_t>(interval))
    out.push_back(path[i]);
  if (out.back() != path.back()) out.push_back(path.back());
  return out;
}

}  // namespace mrer
