#include "mrer/failure.hpp"

#include <cmath>

namespace mrer {

namespace {
void check_time(double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("time must be non-negative");
}
}  // namespace

double weibull_cdf(const WeibullParams& p, double t) {
  p.validate();
  check_time(t);
  return -std::expm1(-std::pow(t / p.lambda, p.k));
}

double weibull_survival(const WeibullParams& p, double t) {
  p.validate();
  check_time(t);
  return std::exp(-std::pow(t / p.lambda, p.k));
}

double weibull_hazard(const WeibullParams& p, double t) {
  p.validate();
  check_time(t);
  if (t == 0.0) {
    if (p.k < 1.0) return std::numeric_limits<double>::infinity();
    if (p.k == 1.0) return 1.0 / p.lambda;
    return 0.0;
  }
  return (p.k / p.lambda) * std::pow(t / p.lambda, p.k - 1.0);
}

double sample_failure_time(const WeibullParams& p, double u) {
  p.validate();
  if (!(u > 0.0) || !(u < 1.0)) throw std::invalid_argument("u must lie in (0,1)");
  return p.lambda * std::pow(-std::log1p(-u), 1.0 / p.k);
}

SurvivalWeights survival_weights(const WeibullParams& p, double t, double t_to_base,
                                 double t_to_front, double t_front_to_base) {
  p.validate();
  check_time(t);
  if (t_to_base < 0.0 || t_to_front < 0.0 || t_front_to_base < 0.0)
    throw std::invalid_argument("travel times must be non-negative");
  SurvivalWeights w;
  w.s_now = weibull_survival(p, t + t_to_base);
  w.s_pred = weibull_survival(p, t + t_to_front + t_front_to_base);
  return w;
}

}  // namespace mrer
