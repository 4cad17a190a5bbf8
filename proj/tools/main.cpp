#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "mrer/harness.hpp"
#include "mrer/mapgen.hpp"
#include "mrer/sim.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

struct RunFlags {
  std::string config_path;
  std::string map;
  std::string out;
  std::string log;
  std::uint64_t gen_seed = 0;
  std::uint64_t seed = 0;
  std::string strategy;
  int n = 0;
  double alpha = 0.0;
  long period = 0;
  double lambda = 0.0;
  double k = 0.0;
  long ticks = 0;
};

int cmd_run(const RunFlags& f, const CLI::App& sub) {
  mrer::RunConfig cfg;
  if (!f.config_path.empty()) cfg = mrer::parse_config_file(f.config_path);
  if (sub.count("--map")) {
    cfg.map_path = f.map;
  } else if (sub.count("--gen-seed")) {
    cfg.map_path.clear();
    cfg.gen_seed = f.gen_seed;
  }
  if (sub.count("--strategy")) cfg.strategy = mrer::parse_strategy(f.strategy);
  if (sub.count("--n")) cfg.n_robots = f.n;
  if (sub.count("--alpha")) cfg.alpha = f.alpha;
  if (sub.count("--period")) cfg.period = f.period;
  if (sub.count("--lambda")) {
    cfg.failures_enabled = true;
    cfg.weibull_lambda = f.lambda;
  }
  if (sub.count("--k")) cfg.weibull_k = f.k;
  if (sub.count("--seed")) cfg.seed = f.seed;
  if (sub.count("--ticks")) cfg.ticks = f.ticks;
  cfg.validate();

  const mrer::MissionResult res = mrer::run(cfg, cfg.seed);

  std::cout << "coverage " << res.coverage << "\n"
            << "relays " << res.relay_count << "\n"
            << "handoffs " << res.handoff_count << "\n"
            << "failures " << res.failure_count << "\n"
            << "ticks "
            << (res.coverage_series.empty() ? 0 : res.coverage_series.size() - 1) << "\n";

  if (!f.out.empty()) {
    std::ostringstream csv;
    csv << "tick,coverage\n";
    for (std::size_t i = 0; i < res.coverage_series.size(); ++i)
      csv << i << ',' << res.coverage_series[i] << '\n';
    write_file(f.out, csv.str());
  }
  if (!f.log.empty()) {
    std::ostringstream lines;
    for (const std::string& rec : res.event_log) lines << rec << '\n';
    write_file(f.log, lines.str());
  }
  return 0;
}

int cmd_sweep(const std::string& spec_path, int workers, const std::string& out_dir) {
  const mrer::SweepSpec spec = mrer::parse_sweep_file(spec_path);
  std::cout << "sweep cells: " << spec.cell_count() << "\n";
  const mrer::SweepOutcome outcome = mrer::run_sweep(spec, workers);

  fs::create_directories(out_dir);
  write_file((fs::path(out_dir) / "results.csv").string(), mrer::rows_to_csv(outcome.rows));
  if (!outcome.rows.empty())
    write_file((fs::path(out_dir) / "aggregate.csv").string(),
               mrer::aggregate_to_csv(mrer::aggregate(outcome.rows)));
  if (!outcome.errors.empty())
    write_file((fs::path(out_dir) / "errors.csv").string(),
               mrer::errors_to_csv(outcome.errors));

  std::cout << "completed " << outcome.rows.size() << ", failed " << outcome.errors.size()
            << "\n";
  if (!outcome.rows.empty()) std::cout << mrer::report(outcome.rows);
  return 0;
}

int cmd_genmap(std::uint64_t seed, int width, int height, const std::string& out) {
  const mrer::GeneratedMap gen = mrer::generate_map_detailed(seed, width, height);
  const std::string text = mrer::format_map(gen.grid);
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file(out, text);
    std::cout << "rooms " << gen.rooms << ", corridors " << gen.corridors << ", door width "
              << gen.min_door << ".." << gen.max_door << " -> " << out << "\n";
  }
  return 0;
}

char cell_glyph(mrer::CellState s) {
  switch (s) {
    case mrer::CellState::Free:
      return '.';
    case mrer::CellState::Occupied:
      return '#';
    default:
      return '?';
  }
}

int cmd_render(const std::string& log_path, long every, const std::string& out_dir) {
  std::ifstream in(log_path);
  if (!in) throw std::runtime_error("cannot open event log: " + log_path);

  fs::create_directories(out_dir);
  mrer::OccupancyGrid truth;
  mrer::Pose base{};
  bool have_meta = false;
  long frames = 0;

  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json rec = json::parse(line);
    const std::string type = rec.at("type").get<std::string>();
    if (type == "meta") {
      truth = mrer::parse_map(rec.at("map").get<std::string>(), true);
      base = mrer::Pose{rec.at("base")[0].get<int>(), rec.at("base")[1].get<int>()};
      have_meta = true;
      continue;
    }
    if (type != "tick") continue;
    if (!have_meta) throw std::runtime_error("event log has no meta record before ticks");
    const long t = rec.at("tick").get<long>();
    if (every > 1 && t % every != 0) continue;

    std::vector<std::string> rows(static_cast<std::size_t>(truth.height),
                                  std::string(static_cast<std::size_t>(truth.width), ' '));
    for (int y = 0; y < truth.height; ++y)
      for (int x = 0; x < truth.width; ++x)
        rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] =
            cell_glyph(truth.at(mrer::Cell{x, y}));
    rows[static_cast<std::size_t>(base.y)][static_cast<std::size_t>(base.x)] = 'B';

    std::ostringstream svg;
    const int cell_px = 8;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << truth.width * cell_px
        << "' height='" << truth.height * cell_px + 16 << "'>\n"
        << "<rect width='100%' height='100%' fill='white'/>\n";
    for (int y = 0; y < truth.height; ++y)
      for (int x = 0; x < truth.width; ++x)
        if (truth.at(mrer::Cell{x, y}) == mrer::CellState::Occupied)
          svg << "<rect x='" << x * cell_px << "' y='" << y * cell_px << "' width='"
              << cell_px << "' height='" << cell_px << "' fill='#444'/>\n";
    svg << "<rect x='" << base.x * cell_px << "' y='" << base.y * cell_px << "' width='"
        << cell_px << "' height='" << cell_px << "' fill='#2b8a3e'/>\n";

    for (const json& robot : rec.at("robots")) {
      const int id = robot.at("id").get<int>();
      const int x = robot.at("pos")[0].get<int>();
      const int y = robot.at("pos")[1].get<int>();
      const bool alive = robot.at("alive").get<bool>();
      const std::string mode = robot.at("mode").get<std::string>();
      char glyph = static_cast<char>('0' + id % 10);
      if (!alive) glyph = 'x';
      rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] = glyph;
      const char* fill = !alive ? "#999" : (mode == "relay" ? "#d9480f" : "#1971c2");
      svg << "<circle cx='" << x * cell_px + cell_px / 2 << "' cy='"
          << y * cell_px + cell_px / 2 << "' r='" << cell_px / 2 << "' fill='" << fill
          << "'/>\n";
    }

    const double coverage = rec.at("coverage").get<double>();
    svg << "<text x='2' y='" << truth.height * cell_px + 12
        << "' font-family='monospace' font-size='10'>t=" << t << " coverage=" << coverage
        << "</text>\n</svg>\n";

    std::ostringstream frame;
    frame << "t=" << t << " coverage=" << coverage << "\n";
    for (const std::string& r : rows) frame << r << '\n';

    char name[32];
    std::snprintf(name, sizeof name, "frame_%06ld", t);
    write_file((fs::path(out_dir) / (std::string(name) + ".txt")).string(), frame.str());
    write_file((fs::path(out_dir) / (std::string(name) + ".svg")).string(), svg.str());
    ++frames;
  }
  std::cout << "frames " << frames << " -> " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-robot exploration and relay simulator"};
  app.require_subcommand(1);

  RunFlags rf;
  CLI::App* run_cmd = app.add_subcommand("run", "single mission");
  run_cmd->add_option("--config", rf.config_path, "key = value config file");
  auto* map_opt = run_cmd->add_option("--map", rf.map, "map file (ground truth)");
  run_cmd->add_option("--gen-seed", rf.gen_seed, "generate the map from this seed")
      ->excludes(map_opt);
  run_cmd->add_option("--strategy", rf.strategy, "proid | proid_safe | periodic | final_only");
  run_cmd->add_option("--n", rf.n, "team size");
  run_cmd->add_option("--alpha", rf.alpha, "relay criterion bias");
  run_cmd->add_option("--period", rf.period, "periodic relay interval");
  run_cmd->add_option("--lambda", rf.lambda, "weibull scale; enables failures");
  run_cmd->add_option("--k", rf.k, "weibull shape");
  run_cmd->add_option("--seed", rf.seed, "run seed");
  run_cmd->add_option("--ticks", rf.ticks, "mission horizon");
  run_cmd->add_option("--out", rf.out, "per-tick coverage CSV path");
  run_cmd->add_option("--log", rf.log, "event log path (one record per line)");

  std::string sweep_spec;
  int sweep_workers = 1;
  std::string sweep_out = "sweep_out";
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "cross-product experiment sweep");
  sweep_cmd->add_option("--spec", sweep_spec, "sweep spec file")->required();
  sweep_cmd->add_option("--workers", sweep_workers, "parallel runs");
  sweep_cmd->add_option("--out-dir", sweep_out, "output directory");

  std::uint64_t gm_seed = 1;
  int gm_width = 60;
  int gm_height = 40;
  std::string gm_out;
  CLI::App* genmap_cmd = app.add_subcommand("genmap", "generate a floorplan map");
  genmap_cmd->add_option("--seed", gm_seed, "generator seed");
  genmap_cmd->add_option("--width", gm_width, "map width in cells");
  genmap_cmd->add_option("--height", gm_height, "map height in cells");
  genmap_cmd->add_option("--out", gm_out, "output path (stdout when omitted)");

  std::string render_log;
  long render_every = 1;
  std::string render_out = "frames";
  CLI::App* render_cmd = app.add_subcommand("render", "emit per-tick frames from an event log");
  render_cmd->add_option("--log", render_log, "event log to render")->required();
  render_cmd->add_option("--every", render_every, "render every K-th tick");
  render_cmd->add_option("--out-dir", render_out, "frame output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(rf, *run_cmd);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_spec, sweep_workers, sweep_out);
    if (genmap_cmd->parsed()) return cmd_genmap(gm_seed, gm_width, gm_height, gm_out);
    if (render_cmd->parsed()) return cmd_render(render_log, render_every, render_out);
  } catch (const std::logic_error& e) {
    std::cerr << "invariant breach: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
