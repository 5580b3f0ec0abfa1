#include "emdpe/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace emdpe {

const char* bound_name(BoundName name) {
  switch (name) {
    case BoundName::T2Separation: return "t2_separation";
    case BoundName::T2Offbound: return "t2_offbound";
    case BoundName::T3Separation: return "t3_separation";
    case BoundName::T3ThresholdFeasibility: return "t3_threshold_feasibility";
  }
  return "?";
}

BoundReport make_report(BoundName name, double required, double observed, const BoundInputs& inputs) {
  return {name, required, observed, observed >= required - 1e-12, inputs};
}

namespace {

double sigma_ratio(const CorrelationProfile& profile, double sigma, std::size_t k, double r) {
  if (!(sigma > 0.0)) throw std::invalid_argument("theorem 2 bound: sigma must be positive");
  if (k == 0) throw std::invalid_argument("theorem 2 bound: K must be positive");
  if (!(r >= 1.0)) throw std::invalid_argument("theorem 2 bound: r must be at least 1");
  const double l0 = profile.cumulative_zero();
  if (!(l0 > 0.0)) throw std::domain_error("theorem 2 bound: Lambda(0) vanishes");
  return profile.cumulative_at(sigma) / l0;
}

double checked_inverse(const CorrelationProfile& profile, double arg) {
  const double tol = 1e-12 * profile.total;
  if (arg < -tol || arg > profile.total + tol) {
    throw std::domain_error("theorem 2 bound: argument outside the range of Lambda");
  }
  return inverse_cumulative(profile, std::clamp(arg, 0.0, profile.total));
}

}  // namespace

double t2_min_separation(const CorrelationProfile& profile, double sigma, std::size_t k, double r) {
  const double ratio = sigma_ratio(profile, sigma, k, r);
  const double denom = (2.0 * static_cast<double>(k) - 2.0) * r + 1.0;
  const double arg = 2.0 * profile.cumulative_zero() * (1.0 - (ratio - 1.0) / denom);
  return 2.0 * checked_inverse(profile, arg) + 2.0 * sigma;
}

double t2_min_offbound(const CorrelationProfile& profile, double sigma, std::size_t k, double r) {
  const double ratio = sigma_ratio(profile, sigma, k, r);
  const double denom = 2.0 * static_cast<double>(k) * r;
  const double arg = 2.0 * profile.cumulative_zero() * (1.0 - (ratio - 1.0) / denom);
  return checked_inverse(profile, arg);
}

double t3_min_separation(double a, double t, double r, double c_min, double sigma) {
  if (!(a > 0.0)) throw std::invalid_argument("t3_min_separation: a must be positive");
  if (!(c_min > 0.0) || !(r > 0.0)) throw std::invalid_argument("t3_min_separation: r and c_min must be positive");
  const double denom = t * t / ((r * c_min) * (r * c_min)) - std::exp(-2.0 * a * sigma);
  if (!(denom > 0.0)) throw std::domain_error("t3_min_separation: threshold too small for this sigma");
  return std::log(std::sqrt(8.0 * r * r / denom) + 1.0) / a;
}

bool t3_threshold_feasible(double a, double zeta, double r, double c_max, double t) {
  if (!(a > 0.0) || !(zeta > 0.0)) throw std::invalid_argument("t3_threshold_feasible: a and zeta must be positive");
  const double rhs = 2.0 * c_max * std::sqrt((r + r * r) / std::expm1(a * zeta));
  return t >= rhs;
}

double fit_decay(const CorrelationProfile& profile) {
  const double l0 = profile.at_zero();
  if (!(l0 > 0.0)) throw std::domain_error("fit_decay: lambda(0) vanishes");
  const std::size_t c = profile.center();
  double a = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < profile.lambda.size(); ++i) {
    if (i == c || !(profile.lambda[i] > 0.0)) continue;
    const double w = std::abs(profile.offsets[i]);
    a = std::min(a, -std::log(profile.lambda[i] / l0) / w);
  }
  return a;
}

}  // namespace emdpe
