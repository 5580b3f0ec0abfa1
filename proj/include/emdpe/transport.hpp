#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace emdpe {

/// Nonnegative sparse vector of a given length: strictly increasing support
/// (zero-based grid indices) with one magnitude per support entry.
struct SparseCoefVector {
  std::size_t length = 0;
  std::vector<std::size_t> support;
  std::vector<double> weights;

  /// Throws std::invalid_argument if the invariants do not hold.
  void validate() const;
  double mass() const;
  std::vector<double> dense() const;
};

/// Builds a sparse vector from unsorted (index, weight) pairs; equal indices
/// are merged and zero weights dropped.
SparseCoefVector make_sparse(std::size_t length, std::span<const std::size_t> indices,
                             std::span<const double> weights);

struct Flow {
  std::size_t source;  // grid index in the first vector
  std::size_t sink;    // grid index in the second vector
  double mass;
};
using FlowPlan = std::vector<Flow>;

struct EmdResult {
  double cost = 0.0;
  FlowPlan plan;
};

/// Earth mover's distance with ground distance |i - j| on grid indices.
/// Equal masses use the exact 1-D CDF formula. Unequal masses transport the
/// smaller mass optimally and add |mass(c) - mass(chat)| * length.
EmdResult emd(const SparseCoefVector& c, const SparseCoefVector& chat);

/// Transportation LP solved with a dense simplex. Test-scale validation only:
/// supports are capped at 8 entries each.
double emd_lp_oracle(const SparseCoefVector& c, const SparseCoefVector& chat);

/// Minimum-cost one-to-one assignment between two equal-size parameter sets
/// under |theta_i - theta_hat_j|, via sorted matching.
double pee(std::span<const double> theta, std::span<const double> theta_hat);

/// Largest |theta_i - theta_hat_j| within the sorted (optimal) matching.
double max_matched_error(std::span<const double> theta, std::span<const double> theta_hat);

/// EMD-optimal approximation of v supported on S: each index sends its mass
/// to the nearest support point (ties to the lower one).
SparseCoefVector emd_sparse_approx(std::span<const double> v, std::span<const std::size_t> support);

struct Theorem1Check {
  double lhs = 0.0;  // PEE of the two supports in parameter units
  double rhs = 0.0;  // (delta / c_min) * EMD
  bool holds = false;
};

/// Evaluates PEE <= (delta / c_min) EMD for two K-sparse vectors on a shared
/// grid with step delta; c_min is the smallest nonzero weight of both.
Theorem1Check theorem1_check(const SparseCoefVector& c, const SparseCoefVector& chat, double delta);

}  // namespace emdpe
