#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "emdpe/grid.hpp"

namespace emdpe {

/// Smallest element m of `indices` (sorted ascending) whose weight balance
/// satisfies sum_{j<m} w_j <= T/2 and sum_{j>m} w_j <= T/2, T the total.
/// All-zero weights return the middle element. Throws on empty input.
std::size_t weighted_median(std::span<const std::size_t> indices, std::span<const double> weights);

struct KMedianOptions {
  int max_iter = 100;
  int restarts = 20;
};

/// Lloyd state on a weighted point set. `medians` are positions, `labels`
/// hold the cluster number of every point.
struct ClusterState {
  std::vector<std::size_t> medians;
  std::vector<std::size_t> labels;
  int iteration = 0;
};

struct LloydRun {
  ClusterState state;
  std::vector<double> objective_trace;  // objective after every labeling + update
  bool converged = false;
};

/// One Lloyd alternation from a given sorted, distinct set of initial medians
/// (each must be one of `positions`). Positions must be strictly increasing.
LloydRun lloyd(std::span<const std::size_t> positions, std::span<const double> weights,
               std::span<const std::size_t> initial_medians, int max_iter);

struct KMedianResult {
  std::vector<std::size_t> support;  // sorted positions
  std::vector<double> theta_hat;     // grid values at support (grid version only)
  double objective = 0.0;
  int iterations = 0;
  std::vector<double> objective_trace;  // of the kept restart
};

/// Weighted K-median over arbitrary sorted positions with restarts. Each
/// restart seeds K distinct medians: the first with probability proportional
/// to weight, the rest proportional to weight times distance to the closest
/// median drawn so far. Throws std::invalid_argument if K exceeds the point count or
/// all weights vanish.
KMedianResult kmedian_points(std::span<const std::size_t> positions, std::span<const double> weights,
                             std::size_t k, std::uint64_t seed, const KMedianOptions& options = {});

/// K-median of a nonnegative grid vector (Algorithm 1 of the estimator).
/// Zero entries are ignored; K must not exceed the nonzero count.
KMedianResult kmedian(std::span<const double> v, const ParameterGrid& grid, std::size_t k,
                      std::uint64_t seed, const KMedianOptions& options = {});

/// sum_j v_j |j - nearest median|, ties to the lower median.
double kmedian_objective(std::span<const double> v, std::span<const std::size_t> support);

}  // namespace emdpe
