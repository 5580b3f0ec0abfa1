#pragma once

#include <string>

#include "emdpe/signal_models.hpp"

namespace emdpe {

enum class BoundName { T2Separation, T2Offbound, T3Separation, T3ThresholdFeasibility };

const char* bound_name(BoundName name);

struct BoundInputs {
  std::size_t k = 0;
  double r = 1.0;
  double sigma = 0.0;
  double a = 0.0;
  double t = 0.0;
  double c_min = 0.0;
  double c_max = 0.0;
};

struct BoundReport {
  BoundName name = BoundName::T2Separation;
  double required = 0.0;
  double observed = 0.0;
  bool satisfied = false;
  BoundInputs inputs;
};

/// satisfied = observed >= required - 1e-12.
BoundReport make_report(BoundName name, double required, double observed, const BoundInputs& inputs);

/// 2 Lambda^-1(2 Lambda(0) (1 - (Lambda(sigma)/Lambda(0) - 1) / ((2K-2) r + 1))) + 2 sigma.
/// Throws std::domain_error when the argument of Lambda^-1 leaves [0, Lambda(inf)].
double t2_min_separation(const CorrelationProfile& profile, double sigma, std::size_t k, double r);

/// Lambda^-1(2 Lambda(0) (1 - (Lambda(sigma)/Lambda(0) - 1) / (2 K r))).
double t2_min_offbound(const CorrelationProfile& profile, double sigma, std::size_t k, double r);

/// (1/a) ln(sqrt(8 r^2 / (t^2/(r c_min)^2 - exp(-2 a sigma))) + 1).
/// Throws std::domain_error when the denominator is not positive.
double t3_min_separation(double a, double t, double r, double c_min, double sigma);

/// t >= 2 c_max sqrt((r + r^2) / (exp(a zeta) - 1)).
bool t3_threshold_feasible(double a, double zeta, double r, double c_max, double t);

/// Largest a with exp(-a |k delta|) >= lambda[k] / lambda[0] at every offset;
/// zero samples impose nothing. Throws std::domain_error if lambda[0] = 0.
double fit_decay(const CorrelationProfile& profile);

}  // namespace emdpe
