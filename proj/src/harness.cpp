#include "mrer/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <tuple>

namespace mrer {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  for (const std::string& part : split(value, ',')) {
    const std::string t = trim(part);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

template <class T>
T parse_int_token(const std::string& token, const char* what) {
  T v{};
  const auto* begin = token.data();
  const auto* end = token.data() + token.size();
  auto [p, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || p != end)
    throw SweepError(std::string("bad ") + what + " value: " + token);
  return v;
}

double parse_double_token(const std::string& token, const char* what) {
  double v{};
  const auto* begin = token.data();
  const auto* end = token.data() + token.size();
  auto [p, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || p != end)
    throw SweepError(std::string("bad ") + what + " value: " + token);
  return v;
}

// "a..b" expands to the inclusive range; a single value is itself.
template <class T>
std::vector<T> expand_range(const std::string& token, const char* what) {
  const auto dots = token.find("..");
  if (dots == std::string::npos) return {parse_int_token<T>(token, what)};
  const T lo = parse_int_token<T>(trim(token.substr(0, dots)), what);
  const T hi = parse_int_token<T>(trim(token.substr(dots + 2)), what);
  if (hi < lo) throw SweepError(std::string("empty ") + what + " range: " + token);
  std::vector<T> out;
  for (T v = lo;; ++v) {
    out.push_back(v);
    if (v == hi) break;
  }
  return out;
}

bool parse_switch(const std::string& token) {
  if (token == "on" || token == "true" || token == "1") return true;
  if (token == "off" || token == "false" || token == "0") return false;
  throw SweepError("bad switch value: " + token);
}

std::string fmt_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw SweepError("unrepresentable number");
  return std::string(buf, p);
}

std::string fmt_param(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

constexpr const char* kCsvHeader =
    "run_id,strategy,n,lambda,k,alpha,seed,map_id,coverage,relay_count,handoff_count,"
    "failure_count,wall_time_ms";

}  // namespace

void SweepSpec::validate() const {
  base.validate();
  if (maps.empty()) throw SweepError("sweep needs at least one map");
  if (strategies.empty()) throw SweepError("sweep needs at least one strategy");
  if (n_robots.empty()) throw SweepError("sweep needs at least one team size");
  if (weibulls.empty()) throw SweepError("sweep needs at least one weibull setting");
  if (alphas.empty()) throw SweepError("sweep needs at least one alpha");
  if (handoff.empty() || sharing.empty()) throw SweepError("sweep ablation lists are empty");
  if (seeds.empty()) throw SweepError("sweep needs at least one seed");
  for (int n : n_robots)
    if (n < 1) throw SweepError("team size must be at least 1");
  for (double a : alphas)
    if (a < 1.0) throw SweepError("alpha must be at least 1");
  for (const WeibullSetting& w : weibulls)
    if (w.enabled) WeibullParams{w.lambda, w.k}.validate();
  for (const MapRef& m : maps)
    if (m.id.empty()) throw SweepError("map entry has no id");
}

std::size_t SweepSpec::cell_count() const {
  return maps.size() * strategies.size() * n_robots.size() * weibulls.size() *
         alphas.size() * handoff.size() * sharing.size() * seeds.size();
}

SweepSpec parse_sweep_text(const std::string& text) {
  SweepSpec spec;
  int line_no = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw SweepError("sweep spec line " + std::to_string(line_no) + " is not key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto tokens = split_list(value);
    if (key == "maps") {
      for (const std::string& t : tokens) {
        if (t.rfind("gen:", 0) == 0) {
          for (std::uint64_t s : expand_range<std::uint64_t>(t.substr(4), "map seed")) {
            MapRef m;
            m.id = "gen:" + std::to_string(s);
            m.gen_seed = s;
            spec.maps.push_back(std::move(m));
          }
        } else {
          MapRef m;
          m.id = t;
          m.path = t;
          spec.maps.push_back(std::move(m));
        }
      }
    } else if (key == "strategies") {
      try {
        for (const std::string& t : tokens) spec.strategies.push_back(parse_strategy(t));
      } catch (const ConfigError& e) {
        throw SweepError(e.what());
      }
    } else if (key == "n_robots") {
      for (const std::string& t : tokens)
        for (int n : expand_range<int>(t, "team size")) spec.n_robots.push_back(n);
    } else if (key == "weibull") {
      for (const std::string& t : tokens) {
        WeibullSetting w;
        if (t != "none") {
          const auto colon = t.find(':');
          if (colon == std::string::npos)
            throw SweepError("weibull entry must be none or lambda:k, got " + t);
          w.enabled = true;
          w.lambda = parse_double_token(trim(t.substr(0, colon)), "weibull lambda");
          w.k = parse_double_token(trim(t.substr(colon + 1)), "weibull k");
        }
        spec.weibulls.push_back(w);
      }
    } else if (key == "alphas") {
      for (const std::string& t : tokens)
        spec.alphas.push_back(parse_double_token(t, "alpha"));
    } else if (key == "seeds") {
      for (const std::string& t : tokens)
        for (std::uint64_t s : expand_range<std::uint64_t>(t, "seed"))
          spec.seeds.push_back(s);
    } else if (key == "handoff") {
      spec.handoff.clear();
      for (const std::string& t : tokens) spec.handoff.push_back(parse_switch(t));
    } else if (key == "sharing") {
      spec.sharing.clear();
      for (const std::string& t : tokens) spec.sharing.push_back(parse_switch(t));
    } else {
      try {
        apply_config_kv(spec.base, key, value);
      } catch (const ConfigError& e) {
        throw SweepError("sweep spec line " + std::to_string(line_no) + ": " + e.what());
      }
    }
  }
  if (spec.weibulls.empty()) spec.weibulls.push_back(WeibullSetting{});
  if (spec.alphas.empty()) spec.alphas.push_back(spec.base.alpha);
  if (spec.seeds.empty()) spec.seeds.push_back(spec.base.seed);
  spec.validate();
  return spec;
}

SweepSpec parse_sweep_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SweepError("cannot open sweep spec: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_sweep_text(buf.str());
}

RunConfig cell_config(const SweepSpec& spec, std::size_t index, std::string* map_id,
                      std::uint64_t* seed) {
  if (index >= spec.cell_count()) throw SweepError("sweep cell index out of range");
  std::size_t rest = index;
  const std::size_t i_seed = rest % spec.seeds.size();
  rest /= spec.seeds.size();
  const std::size_t i_sharing = rest % spec.sharing.size();
  rest /= spec.sharing.size();
  const std::size_t i_handoff = rest % spec.handoff.size();
  rest /= spec.handoff.size();
  const std::size_t i_alpha = rest % spec.alphas.size();
  rest /= spec.alphas.size();
  const std::size_t i_weibull = rest % spec.weibulls.size();
  rest /= spec.weibulls.size();
  const std::size_t i_n = rest % spec.n_robots.size();
  rest /= spec.n_robots.size();
  const std::size_t i_strategy = rest % spec.strategies.size();
  rest /= spec.strategies.size();
  const std::size_t i_map = rest;

  RunConfig cfg = spec.base;
  const MapRef& m = spec.maps[i_map];
  cfg.map_path = m.path;
  if (m.path.empty()) cfg.gen_seed = m.gen_seed;
  cfg.strategy = spec.strategies[i_strategy];
  cfg.n_robots = spec.n_robots[i_n];
  const WeibullSetting& w = spec.weibulls[i_weibull];
  cfg.failures_enabled = w.enabled;
  if (w.enabled) {
    cfg.weibull_lambda = w.lambda;
    cfg.weibull_k = w.k;
  }
  cfg.alpha = spec.alphas[i_alpha];
  cfg.handoff_enabled = spec.handoff[i_handoff];
  cfg.sharing_enabled = spec.sharing[i_sharing];
  cfg.seed = spec.seeds[i_seed];
  if (map_id) *map_id = m.id;
  if (seed) *seed = spec.seeds[i_seed];
  return cfg;
}

std::string strategy_label(const RunConfig& cfg) {
  std::string label = strategy_name(cfg.strategy);
  switch (cfg.strategy) {
    case StrategyKind::Proid:
    case StrategyKind::ProidSafe:
      label += ":a=" + fmt_param(cfg.alpha);
      break;
    case StrategyKind::Periodic:
      label += ":p=" + std::to_string(cfg.period);
      break;
    case StrategyKind::FinalOnly:
      break;
  }
  if (!cfg.handoff_enabled) label += ";handoff=off";
  if (!cfg.sharing_enabled) label += ";sharing=off";
  return label;
}

SweepOutcome run_sweep(const SweepSpec& spec, int workers) {
  spec.validate();
  if (workers < 1) throw SweepError("worker count must be at least 1");
  const std::size_t total = spec.cell_count();
  std::vector<std::optional<ResultRow>> slots(total);
  std::vector<std::optional<ErrorRow>> errors(total);

#pragma omp parallel for schedule(dynamic) num_threads(workers)
  for (long idx = 0; idx < static_cast<long>(total); ++idx) {
    const auto i = static_cast<std::size_t>(idx);
    std::string map_id;
    std::uint64_t seed = 0;
    try {
      const RunConfig cfg = cell_config(spec, i, &map_id, &seed);
      const auto t0 = std::chrono::steady_clock::now();
      const MissionResult res = run(cfg, seed);
      const auto t1 = std::chrono::steady_clock::now();
      ResultRow row;
      row.run_id = idx;
      row.strategy = strategy_label(cfg);
      row.n = cfg.n_robots;
      row.lambda = cfg.failures_enabled ? cfg.weibull_lambda : 0.0;
      row.k = cfg.failures_enabled ? cfg.weibull_k : 0.0;
      row.alpha = cfg.alpha;
      row.seed = seed;
      row.map_id = map_id;
      row.coverage = res.coverage;
      row.relay_count = res.relay_count;
      row.handoff_count = res.handoff_count;
      row.failure_count = res.failure_count;
      row.wall_time_ms =
          std::chrono::duration<double, std::milli>(t1 - t0).count();
      slots[i] = std::move(row);
    } catch (const std::exception& e) {
      errors[i] = ErrorRow{idx, e.what()};
    }
  }

  SweepOutcome out;
  for (std::size_t i = 0; i < total; ++i) {
    if (slots[i]) out.rows.push_back(std::move(*slots[i]));
    if (errors[i]) out.errors.push_back(std::move(*errors[i]));
  }
  return out;
}

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const ResultRow& r : rows) {
    out += std::to_string(r.run_id);
    out += ',';
    out += r.strategy;
    out += ',';
    out += std::to_string(r.n);
    out += ',';
    out += fmt_double(r.lambda);
    out += ',';
    out += fmt_double(r.k);
    out += ',';
    out += fmt_double(r.alpha);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += r.map_id;
    out += ',';
    out += fmt_double(r.coverage);
    out += ',';
    out += std::to_string(r.relay_count);
    out += ',';
    out += std::to_string(r.handoff_count);
    out += ',';
    out += std::to_string(r.failure_count);
    out += ',';
    out += fmt_double(r.wall_time_ms);
    out += '\n';
  }
  return out;
}

std::vector<ResultRow> parse_rows_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCsvHeader)
    throw SweepError("result CSV header mismatch");
  std::vector<ResultRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split(trim(line), ',');
    if (f.size() != 13)
      throw SweepError("result CSV line " + std::to_string(line_no) + " has " +
                       std::to_string(f.size()) + " fields, expected 13");
    ResultRow r;
    r.run_id = parse_int_token<long>(f[0], "run_id");
    r.strategy = f[1];
    r.n = parse_int_token<int>(f[2], "n");
    r.lambda = parse_double_token(f[3], "lambda");
    r.k = parse_double_token(f[4], "k");
    r.alpha = parse_double_token(f[5], "alpha");
    r.seed = parse_int_token<std::uint64_t>(f[6], "seed");
    r.map_id = f[7];
    r.coverage = parse_double_token(f[8], "coverage");
    r.relay_count = parse_int_token<long>(f[9], "relay_count");
    r.handoff_count = parse_int_token<long>(f[10], "handoff_count");
    r.failure_count = parse_int_token<long>(f[11], "failure_count");
    r.wall_time_ms = parse_double_token(f[12], "wall_time_ms");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string errors_to_csv(const std::vector<ErrorRow>& errors) {
  std::string out = "run_id,message\n";
  for (const ErrorRow& e : errors) {
    out += std::to_string(e.run_id);
    out += ',';
    out += csv_quote(e.message);
    out += '\n';
  }
  return out;
}

std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows) {
  if (rows.empty()) throw SweepError("nothing to aggregate");
  using Key = std::tuple<std::string, int, double, double>;
  std::map<Key, std::vector<double>> groups;
  for (const ResultRow& r : rows)
    groups[Key{r.strategy, r.n, r.lambda, r.k}].push_back(r.coverage);
  std::vector<AggregateRow> out;
  out.reserve(groups.size());
  for (const auto& [key, values] : groups) {
    AggregateRow a;
    a.strategy = std::get<0>(key);
    a.n = std::get<1>(key);
    a.lambda = std::get<2>(key);
    a.k = std::get<3>(key);
    a.runs = static_cast<int>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    a.mean_coverage = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) sq += (v - a.mean_coverage) * (v - a.mean_coverage);
    a.std_coverage =
        values.size() > 1 ? std::sqrt(sq / static_cast<double>(values.size() - 1)) : 0.0;
    out.push_back(std::move(a));
  }
  return out;
}

std::string aggregate_to_csv(const std::vector<AggregateRow>& rows) {
  std::string out = "strategy,n,lambda,k,mean_coverage,std_coverage,runs\n";
  for (const AggregateRow& a : rows) {
    out += a.strategy;
    out += ',';
    out += std::to_string(a.n);
    out += ',';
    out += fmt_double(a.lambda);
    out += ',';
    out += fmt_double(a.k);
    out += ',';
    out += fmt_double(a.mean_coverage);
    out += ',';
    out += fmt_double(a.std_coverage);
    out += ',';
    out += std::to_string(a.runs);
    out += '\n';
  }
  return out;
}

std::string report(const std::vector<ResultRow>& rows) {
  const auto agg = aggregate(rows);

  struct Scenario {
    double lambda;
    double k;
    int n;
    bool operator<(const Scenario& o) const {
      return std::tie(lambda, k, n) < std::tie(o.lambda, o.k, o.n);
    }
    bool operator==(const Scenario& o) const {
      return lambda == o.lambda && k == o.k && n == o.n;
    }
  };

  std::vector<Scenario> scenarios;
  std::vector<std::string> strategies;
  for (const AggregateRow& a : agg) {
    const Scenario s{a.lambda, a.k, a.n};
    if (std::find(scenarios.begin(), scenarios.end(), s) == scenarios.end())
      scenarios.push_back(s);
    if (std::find(strategies.begin(), strategies.end(), a.strategy) == strategies.end())
      strategies.push_back(a.strategy);
  }
  std::sort(scenarios.begin(), scenarios.end());
  std::sort(strategies.begin(), strategies.end());

  auto scenario_header = [](const Scenario& s) {
    std::string h;
    if (s.lambda > 0.0)
      h = "lam=" + fmt_param(s.lambda) + " k=" + fmt_param(s.k) + " ";
    h += "n=" + std::to_string(s.n);
    return h;
  };
  auto cell_text = [&](const std::string& strategy, const Scenario& s) -> std::string {
    for (const AggregateRow& a : agg) {
      if (a.strategy == strategy && Scenario{a.lambda, a.k, a.n} == s) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3f +- %.3f", a.mean_coverage, a.std_coverage);
        return buf;
      }
    }
    return "-";
  };

  std::size_t name_w = std::string("strategy").size();
  for (const std::string& s : strategies) name_w = std::max(name_w, s.size());
  std::vector<std::size_t> col_w(scenarios.size());
  for (std::size_t c = 0; c < scenarios.size(); ++c) {
    col_w[c] = scenario_header(scenarios[c]).size();
    for (const std::string& s : strategies)
      col_w[c] = std::max(col_w[c], cell_text(s, scenarios[c]).size());
  }

  std::ostringstream os;
  auto pad = [&os](const std::string& s, std::size_t w) {
    os << s;
    for (std::size_t i = s.size(); i < w; ++i) os << ' ';
  };
  pad("strategy", name_w);
  for (std::size_t c = 0; c < scenarios.size(); ++c) {
    os << "  ";
    pad(scenario_header(scenarios[c]), col_w[c]);
  }
  os << '\n';
  for (const std::string& s : strategies) {
    pad(s, name_w);
    for (std::size_t c = 0; c < scenarios.size(); ++c) {
      os << "  ";
      pad(cell_text(s, scenarios[c]), col_w[c]);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace mrer
