#pragma once

#include <limits>
#include <stdexcept>

namespace mrer {

struct WeibullParams {
  double lambda = 1100.0;
  double k = 1.5;

  void validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("weibull scale must be positive");
    if (!(k > 0.0)) throw std::invalid_argument("weibull shape must be positive");
  }
};

// F(t) = 1 - exp(-(t/lambda)^k), t >= 0.
double weibull_cdf(const WeibullParams& p, double t);

// S(t) = 1 - F(t).
double weibull_survival(const WeibullParams& p, double t);

// h(t) = (k/lambda) * (t/lambda)^(k-1); h(0) = +inf when k < 1, 1/lambda when
// k == 1, 0 when k > 1.
double weibull_hazard(const WeibullParams& p, double t);

// Inverse-transform sample: t = lambda * (-ln(1-u))^(1/k), u in (0,1).
double sample_failure_time(const WeibullParams& p, double u);

struct SurvivalWeights {
  double s_now = 1.0;
  double s_pred = 1.0;
};

// Survival probabilities at the completion horizons of the two candidate
// actions: relaying now (done at t + t_to_base) versus finishing the waypoint
// first (done at t + t_to_front + t_front_to_base).
SurvivalWeights survival_weights(const WeibullParams& p, double t, double t_to_base,
                                 double t_to_front, double t_front_to_base);

}  // namespace mrer
