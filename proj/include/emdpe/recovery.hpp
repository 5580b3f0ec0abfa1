#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "emdpe/clustering.hpp"
#include "emdpe/measurement.hpp"
#include "emdpe/signal_models.hpp"

namespace emdpe {

enum class Algorithm { CSP, BSP, KMedianOnly, ThresholdOnly };

const char* algorithm_name(Algorithm a);
/// Parses "csp", "bsp", "kmedian", "threshold" (case-insensitive).
Algorithm parse_algorithm(std::string_view name);

struct RecoveryConfig {
  std::size_t k = 4;
  double threshold = 0.0;  // t, CSP and KMedianOnly only
  int max_outer_iter = 20;
  double nu = 1.0;         // BSP only
  Algorithm algorithm = Algorithm::CSP;
  KMedianOptions kmedian;

  /// Throws std::invalid_argument on K = 0, t < 0, nu outside [0, 1] or a
  /// non-positive iteration budget.
  void validate() const;
};

struct EstimationResult {
  std::vector<double> theta_hat;      // sorted
  std::vector<std::size_t> support;   // grid indices, sorted
  cvec coefs;
  double residual_norm = 0.0;
  int iterations = 0;
  std::vector<double> residual_trace;  // residual after every outer iteration
};

inline constexpr double kNoiseless = std::numeric_limits<double>::infinity();

cvec measure(const MeasurementOperator& op, const cvec& x);

/// y + n, n complex white Gaussian with per-entry variance
/// |y|^2 / (M 10^(snr/10)). snr_db = +inf returns y unchanged.
/// Throws std::invalid_argument on a zero signal.
cvec add_awgn(const cvec& y, double snr_db, std::uint64_t seed);

/// (Phi Psi)^H y evaluated as Psi^H (Phi^T y).
cvec proxy(const cvec& y, const MeasurementOperator& op, const Dictionary& dict);

/// Keeps entries with |v_i| > t.
cvec hard_threshold(const cvec& v, double t);

/// Greedy selection by decreasing |v|, skipping indices whose atom has
/// normalized coherence above nu with any already selected atom. Throws
/// std::runtime_error if fewer than K indices are admissible.
std::vector<std::size_t> band_excluded_select(const cvec& v, const Dictionary& dict, std::size_t k,
                                              double nu);

/// Least-squares coefficients of y on the columns Phi Psi_S, ridge 1e-10 on
/// the Gram matrix.
cvec least_squares(const cvec& y, const MeasurementOperator& op, const Dictionary& dict,
                   std::span<const std::size_t> support);

/// Clustering subspace pursuit.
EstimationResult csp(const cvec& y, const MeasurementOperator& op, const Dictionary& dict,
                     const RecoveryConfig& config, std::uint64_t seed);

/// Subspace pursuit with band-excluded selection and pruning.
EstimationResult bsp(const cvec& y, const MeasurementOperator& op, const Dictionary& dict,
                     const RecoveryConfig& config);

/// Dispatches on config.algorithm. KMedianOnly clusters the thresholded
/// proxy of y once; ThresholdOnly keeps the K largest proxy entries. Both
/// refit coefficients by least squares.
EstimationResult recover(const cvec& y, const MeasurementOperator& op, const Dictionary& dict,
                         const RecoveryConfig& config, std::uint64_t seed);

}  // namespace emdpe
