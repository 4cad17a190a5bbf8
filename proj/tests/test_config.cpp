#include "doctest.h"
#include "mrer/config.hpp"

using namespace mrer;

TEST_CASE("default configuration is valid") {
  RunConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.strategy == StrategyKind::Proid);
  CHECK(cfg.alpha == 2.0);
  CHECK(cfg.n_robots == 3);
  CHECK(cfg.ticks == 600);
  CHECK(cfg.comm_range == 10.0);
  CHECK(cfg.sensor_range == 20);
  CHECK(cfg.n_rays == 250);
  CHECK(cfg.vote_threshold == 0.5);
  CHECK(cfg.min_frontier_region == 10);
  CHECK(cfg.sample_interval == 25);
  CHECK(cfg.penalty == 1e6);
  CHECK_FALSE(cfg.failures_enabled);
  CHECK(cfg.handoff_enabled);
  CHECK(cfg.sharing_enabled);
}

TEST_CASE("strategy and predictor names round-trip") {
  for (StrategyKind k : {StrategyKind::Proid, StrategyKind::ProidSafe,
                         StrategyKind::Periodic, StrategyKind::FinalOnly})
    CHECK(parse_strategy(strategy_name(k)) == k);
  for (PredictorType t :
       {PredictorType::Null, PredictorType::Oracle, PredictorType::Heuristic})
    CHECK(parse_predictor(predictor_name(t)) == t);
  CHECK_THROWS_AS(parse_strategy("bogus"), ConfigError);
  CHECK_THROWS_AS(parse_predictor("bogus"), ConfigError);
}

TEST_CASE("key value application covers every field") {
  RunConfig cfg;
  apply_config_kv(cfg, "strategy", "periodic");
  CHECK(cfg.strategy == StrategyKind::Periodic);
  apply_config_kv(cfg, "ALPHA", "1.5");
  CHECK(cfg.alpha == 1.5);
  apply_config_kv(cfg, "period", "250");
  CHECK(cfg.period == 250);
  apply_config_kv(cfg, "n_robots", "5");
  CHECK(cfg.n_robots == 5);
  apply_config_kv(cfg, "ticks", "1000");
  CHECK(cfg.ticks == 1000);
  apply_config_kv(cfg, "failures_enabled", "true");
  CHECK(cfg.failures_enabled);
  apply_config_kv(cfg, "failures_enabled", "off");
  CHECK_FALSE(cfg.failures_enabled);
  apply_config_kv(cfg, "weibull_lambda", "900");
  CHECK(cfg.weibull_lambda == 900.0);
  apply_config_kv(cfg, "predictor", "heuristic");
  CHECK(cfg.predictor == PredictorType::Heuristic);
  apply_config_kv(cfg, "map", "floor.map");
  CHECK(cfg.map_path == "floor.map");
  apply_config_kv(cfg, "seed", "12345");
  CHECK(cfg.seed == 12345);
  apply_config_kv(cfg, "vote_threshold", "0.7");
  CHECK(cfg.vote_threshold == 0.7);
  apply_config_kv(cfg, "handoff_enabled", "0");
  CHECK_FALSE(cfg.handoff_enabled);
  apply_config_kv(cfg, "sharing_enabled", "false");
  CHECK_FALSE(cfg.sharing_enabled);

  CHECK_THROWS_AS(apply_config_kv(cfg, "warp_speed", "9"), ConfigError);
  CHECK_THROWS_AS(apply_config_kv(cfg, "ticks", "soon"), ConfigError);
  CHECK_THROWS_AS(apply_config_kv(cfg, "alpha", "two"), ConfigError);
  CHECK_THROWS_AS(apply_config_kv(cfg, "handoff_enabled", "maybe"), ConfigError);
  CHECK_THROWS_AS(apply_config_kv(cfg, "ticks", "12x"), ConfigError);
}

TEST_CASE("config text parsing handles comments and overrides") {
  const std::string text =
      "# mission setup\n"
      "strategy = proid_safe\n"
      "alpha = 1.2   # overrides the default\n"
      "\n"
      "ticks = 400\n"
      "failures_enabled = on\n";
  const RunConfig cfg = parse_config_text(text);
  CHECK(cfg.strategy == StrategyKind::ProidSafe);
  CHECK(cfg.alpha == 1.2);
  CHECK(cfg.ticks == 400);
  CHECK(cfg.failures_enabled);

  RunConfig base;
  base.n_robots = 7;
  const RunConfig merged = parse_config_text("ticks = 50\n", base);
  CHECK(merged.n_robots == 7);
  CHECK(merged.ticks == 50);

  CHECK_THROWS_AS(parse_config_text("strategy proid\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_file("/nonexistent/config.txt"), ConfigError);
}

TEST_CASE("validation rejects out-of-range settings") {
  auto broken = [](auto&& tweak) {
    RunConfig cfg;
    tweak(cfg);
    return cfg;
  };
  CHECK_THROWS_AS(broken([](RunConfig& c) { c.n_robots = 0; }).validate(), ConfigError);
  CHECK_THROWS_AS(broken([](RunConfig& c) { c.ticks = -1; }).validate(), ConfigError);
  CHECK_THROWS_AS(broken([](RunConfig& c) { c.speed = 0.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(broken([](RunConfig& c) { c.comm_range = -2.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(broken([](RunConfig& c) { c.alpha = 0.9; }).validate(), ConfigError);
  CHECK_THROWS_AS(broken([](RunConfig& c) { c.period = 0; }).validate(), ConfigError);
  CHECK_THROWS_AS(broken([](RunConfig& c) { c.final_margin = -1; }).validate(), ConfigError);
  CHECK_THROWS_AS(broken([](RunConfig& c) { c.gen_width = 10; }).validate(), ConfigError);
  CHECK_THROWS_AS(broken([](RunConfig& c) { c.weibull_k = 0.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(broken([](RunConfig& c) { c.vote_threshold = 0.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(broken([](RunConfig& c) { c.vote_threshold = 1.5; }).validate(), ConfigError);
  CHECK_THROWS_AS(broken([](RunConfig& c) { c.ensemble_size = 0; }).validate(), ConfigError);
  CHECK_THROWS_AS(broken([](RunConfig& c) { c.sample_interval = 0; }).validate(), ConfigError);
  CHECK_THROWS_AS(broken([](RunConfig& c) { c.penalty = -1.0; }).validate(), ConfigError);

  RunConfig small_map;
  small_map.map_path = "some.map";
  small_map.gen_width = 5;
  CHECK_NOTHROW(small_map.validate());
}

TEST_CASE("config accessors bundle strategy parameters") {
  RunConfig cfg;
  cfg.strategy = StrategyKind::ProidSafe;
  cfg.alpha = 1.5;
  cfg.period = 300;
  cfg.weibull_lambda = 660.0;
  cfg.weibull_k = 1.5;
  const RelayStrategy s = cfg.relay_strategy();
  CHECK(s.kind == StrategyKind::ProidSafe);
  CHECK(s.alpha == 1.5);
  CHECK(s.period == 300);
  CHECK(s.weibull.lambda == 660.0);

  cfg.predictor = PredictorType::Oracle;
  cfg.reveal_radius = 12;
  const PredictorKind k = cfg.predictor_kind();
  CHECK(k.type == PredictorType::Oracle);
  CHECK(k.reveal_radius == 12);
}
