#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mrer {

enum class CellState : std::uint8_t { Unknown = 0, Free = 1, Occupied = 2 };

struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

using Pose = Cell;
using Path = std::vector<Pose>;

inline long long distance_sq(Cell a, Cell b) {
  const long long dx = a.x - b.x;
  const long long dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// Row-major ordering used for all deterministic tie-breaks.
inline bool cell_less(Cell a, Cell b) {
  return a.y != b.y ? a.y < b.y : a.x < b.x;
}

struct MapParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OccupancyGrid {
  int width = 0;
  int height = 0;
  double resolution = 1.0;
  std::vector<CellState> cells;

  OccupancyGrid() = default;
  OccupancyGrid(int w, int h, double res = 1.0, CellState fill = CellState::Unknown)
      : width(w), height(h), resolution(res),
        cells(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("grid dimensions must be positive");
    if (res <= 0.0) throw std::invalid_argument("grid resolution must be positive");
  }

  bool in_bounds(Cell c) const {
    return c.x >= 0 && c.x < width && c.y >= 0 && c.y < height;
  }
  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(c.x);
  }
  CellState at(Cell c) const { return cells[index(c)]; }
  CellState& at(Cell c) { return cells[index(c)]; }
  int known_count() const;
  bool same_shape(const OccupancyGrid& o) const {
    return width == o.width && height == o.height && resolution == o.resolution;
  }
  friend bool operator==(const OccupancyGrid&, const OccupancyGrid&) = default;
};

// Fixed-capacity set of cells over a grid of known dimensions.  Iteration is
// always row-major, so every consumer sees the same order.
class CellSet {
 public:
  CellSet() = default;
  CellSet(int width, int height)
      : width_(width), height_(height),
        mask_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0) {
    if (width <= 0 || height <= 0) throw std::invalid_argument("cell set dimensions must be positive");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int size() const { return count_; }
  bool empty() const { return count_ == 0; }

  bool contains(Cell c) const {
    return in_bounds(c) && mask_[index(c)] != 0;
  }
  bool insert(Cell c) {
    check_bounds(c);
    auto& m = mask_[index(c)];
    if (m) return false;
    m = 1;
    ++count_;
    return true;
  }
  bool erase(Cell c) {
    check_bounds(c);
    auto& m = mask_[index(c)];
    if (!m) return false;
    m = 0;
    --count_;
    return true;
  }
  void clear() {
    std::fill(mask_.begin(), mask_.end(), 0);
    count_ = 0;
  }

  void unite(const CellSet& o);
  void subtract(const CellSet& o);
  void intersect(const CellSet& o);

  std::vector<Cell> cells() const;

  template <class F>
  void for_each(F&& f) const {
    std::size_t i = 0;
    for (int y = 0; y < height_; ++y)
      for (int x = 0; x < width_; ++x, ++i)
        if (mask_[i]) f(Cell{x, y});
  }

  friend bool operator==(const CellSet&, const CellSet&) = default;

 private:
  bool in_bounds(Cell c) const {
    return c.x >= 0 && c.x < width_ && c.y >= 0 && c.y < height_;
  }
  void check_bounds(Cell c) const {
    if (!in_bounds(c)) throw std::out_of_range("cell outside set bounds");
  }
  void check_shape(const CellSet& o) const {
    if (width_ != o.width_ || height_ != o.height_)
      throw std::invalid_argument("cell set dimension mismatch");
  }
  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(c.x);
  }

  int width_ = 0;
  int height_ = 0;
  int count_ = 0;
  std::vector<std::uint8_t> mask_;
};

// Map text format: first line "width height resolution", then height rows of
// glyphs ('#' occupied, '.' free, '?' unknown when allow_unknown).
OccupancyGrid parse_map(const std::string& text, bool allow_unknown);
OccupancyGrid load_map(const std::string& text);
OccupancyGrid load_map_file(const std::string& path);
std::string format_map(const OccupancyGrid& grid, bool with_unknown = true);

// Visible set from origin: cells within Euclidean `range` whose straight grid
// line back to the origin contains no blocking interior cell.  Blocking cells
// are themselves visible (walls are observable).  When unknown_blocks is set,
// Unknown cells both block and are excluded, which is the behaviour wanted on
// partial maps.
CellSet raycast(const OccupancyGrid& world, Pose origin, int range, int n_rays,
                bool unknown_blocks = false);

// Stamps raycast-visible ground-truth labels into `local`; returns the cells
// that changed from Unknown.
CellSet observe(OccupancyGrid& local, const OccupancyGrid& world, Pose pose,
                int range, int n_rays);

// Cell-wise merge of two partial maps.  Free/Occupied disagreement resolves
// to Occupied; the count of such conflicts is added to *conflicts if given.
OccupancyGrid fuse(const OccupancyGrid& a, const OccupancyGrid& b,
                   int* conflicts = nullptr);

// 4-connected reachable closure of `seed` through non-Occupied cells of
// `domain` (through Free cells only when unknown_blocks is set).  Occupied
// seed cells are dropped.
CellSet flood_fill(const CellSet& seed, const OccupancyGrid& domain,
                   bool unknown_blocks = false);

struct FrontierCluster {
  Pose centroid;
  std::vector<Cell> cells;
};

// Frontier cells (Free with a 4-adjacent Unknown) grouped into 8-connected
// clusters; clusters smaller than min_region are dropped.  The centroid is
// the cluster cell nearest the cluster's mean position.
std::vector<FrontierCluster> extract_frontiers(const OccupancyGrid& local, int min_region);

// Shortest 4-connected path (unit step cost) from start to goal; Unknown is
// traversable, Occupied is not.  Returns poses start..goal inclusive, or
// nullopt when disconnected.
std::optional<Path> astar(const OccupancyGrid& plan_map, Pose start, Pose goal);

// Ticks to traverse `path` at v cells/tick.
long travel_time(const Path& path, double v);

// Every interval-th pose plus always the first and the last.
std::vector<Pose> path_sample(const Path& path, int interval);

}  // namespace mrer
