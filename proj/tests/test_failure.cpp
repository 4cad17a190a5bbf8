#include <cmath>
#include <random>

#include "doctest.h"
#include "mrer/failure.hpp"
#include "mrer/rng.hpp"
#include "oracles.hpp"

using namespace mrer;

TEST_CASE("weibull cdf fixed points") {
  const WeibullParams p{1100.0, 1.5};
  CHECK(weibull_cdf(p, 0.0) == 0.0);
  CHECK(weibull_cdf(p, p.lambda) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  CHECK(weibull_cdf(p, 1000.0) ==
        doctest::Approx(oracles::weibull_cdf(1100.0, 1.5, 1000.0)).epsilon(1e-13));
}

TEST_CASE("weibull survival fixed points and complement identity") {
  const WeibullParams p{900.0, 1.5};
  CHECK(weibull_survival(p, 0.0) == 1.0);
  CHECK(weibull_survival(p, p.lambda) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  for (int i = 0; i < 1000; ++i) {
    const double t = 3.3 * static_cast<double>(i);
    CHECK(weibull_cdf(p, t) + weibull_survival(p, t) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(weibull_survival(p, t) ==
          doctest::Approx(oracles::weibull_survival(900.0, 1.5, t)).epsilon(1e-12));
  }
}

TEST_CASE("weibull hazard sentinels and shape behaviour") {
  CHECK(weibull_hazard(WeibullParams{1100.0, 1.5}, 0.0) == 0.0);
  CHECK(weibull_hazard(WeibullParams{500.0, 1.0}, 0.0) == doctest::Approx(1.0 / 500.0));
  CHECK(std::isinf(weibull_hazard(WeibullParams{500.0, 0.5}, 0.0)));

  const WeibullParams p{1100.0, 1.5};
  CHECK(weibull_hazard(p, p.lambda) == doctest::Approx(p.k / p.lambda).epsilon(1e-12));

  const WeibullParams expo{500.0, 1.0};
  for (double t : {1.0, 10.0, 400.0, 2000.0})
    CHECK(weibull_hazard(expo, t) == doctest::Approx(1.0 / 500.0).epsilon(1e-12));

  double prev = 0.0;
  for (double t = 0.0; t <= 3000.0; t += 10.0) {
    const double h = weibull_hazard(p, t);
    CHECK(h >= prev);
    prev = h;
  }
}

TEST_CASE("weibull domain errors") {
  const WeibullParams p{1100.0, 1.5};
  CHECK_THROWS_AS(weibull_cdf(p, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(weibull_survival(p, -0.5), std::invalid_argument);
  CHECK_THROWS_AS(weibull_hazard(p, -2.0), std::invalid_argument);
  CHECK_THROWS_AS(weibull_cdf(WeibullParams{0.0, 1.5}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(weibull_cdf(WeibullParams{1100.0, 0.0}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(sample_failure_time(p, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(sample_failure_time(p, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(sample_failure_time(p, -0.2), std::invalid_argument);
}

TEST_CASE("inverse transform sampling round-trips") {
  const WeibullParams p{1100.0, 1.5};
  CHECK(sample_failure_time(p, 1.0 - std::exp(-1.0)) ==
        doctest::Approx(p.lambda).epsilon(1e-12));

  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u01(1e-9, 1.0 - 1e-9);
  for (int i = 0; i < 1000; ++i) {
    const double u = u01(rng);
    const double t = sample_failure_time(p, u);
    CHECK(std::abs(weibull_cdf(p, t) - u) < 1e-10);
  }
}

TEST_CASE("sample mean approaches the analytic mean") {
  const WeibullParams p{1100.0, 1.5};
  const double expected = p.lambda * std::tgamma(1.0 + 1.0 / p.k);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i)
    sum += sample_failure_time(p, uniform01(mix_seed(9001, static_cast<std::uint64_t>(i))));
  const double mean = sum / n;
  CHECK(std::abs(mean - expected) / expected < 0.02);
}

TEST_CASE("survival weights evaluate the two completion horizons") {
  const WeibullParams p{1100.0, 1.5};

  const SurvivalWeights still = survival_weights(p, 250.0, 0.0, 0.0, 0.0);
  CHECK(still.s_now == doctest::Approx(weibull_survival(p, 250.0)));
  CHECK(still.s_pred == still.s_now);

  const SurvivalWeights base = survival_weights(p, 0.0, p.lambda, 0.0, 0.0);
  CHECK(base.s_now == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

  const SurvivalWeights w = survival_weights(p, 300.0, 80.0, 60.0, 140.0);
  CHECK(w.s_now == doctest::Approx(oracles::weibull_survival(1100.0, 1.5, 380.0)).epsilon(1e-12));
  CHECK(w.s_pred == doctest::Approx(oracles::weibull_survival(1100.0, 1.5, 500.0)).epsilon(1e-12));
  CHECK(w.s_pred <= w.s_now);

  CHECK_THROWS_AS(survival_weights(p, 10.0, -1.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("longer horizons never survive better") {
  const WeibullParams p{900.0, 1.5};
  for (int i = 0; i < 200; ++i) {
    const double t = 7.0 * i;
    const SurvivalWeights w = survival_weights(p, t, 30.0, 20.0 + i, 40.0);
    CHECK(w.s_pred <= w.s_now);
  }
}
