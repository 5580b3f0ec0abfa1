#include "emdpe/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "emdpe/rng.hpp"

namespace emdpe {

namespace {

double distance(std::size_t a, std::size_t b) {
  return a > b ? static_cast<double>(a - b) : static_cast<double>(b - a);
}

// First point index assigned to cluster c+1; points up to the midpoint of two
// medians (inclusive) belong to the lower one.
std::vector<std::size_t> cluster_bounds(std::span<const std::size_t> positions,
                                        std::span<const std::size_t> medians) {
  std::vector<std::size_t> bounds(medians.size() + 1, 0);
  bounds.back() = positions.size();
  for (std::size_t c = 0; c + 1 < medians.size(); ++c) {
    const std::size_t twice_mid = medians[c] + medians[c + 1];
    const auto it = std::upper_bound(positions.begin(), positions.end(), twice_mid,
                                     [](std::size_t t, std::size_t p) { return t < 2 * p; });
    bounds[c + 1] = static_cast<std::size_t>(it - positions.begin());
  }
  return bounds;
}

double objective_of(std::span<const std::size_t> positions, std::span<const double> weights,
                    std::span<const std::size_t> medians, std::span<const std::size_t> bounds) {
  double total = 0.0;
  for (std::size_t c = 0; c < medians.size(); ++c) {
    for (std::size_t i = bounds[c]; i < bounds[c + 1]; ++i) {
      total += weights[i] * distance(positions[i], medians[c]);
    }
  }
  return total;
}

// Mass-times-distance seeding: the first median is drawn with probability
// proportional to weight, later ones proportional to weight times distance to
// the nearest median already drawn. Falls back to plain mass, then to a
// uniform pick, when every remaining score is zero.
std::vector<std::size_t> initial_medians(std::span<const std::size_t> positions,
                                         std::span<const double> weights, std::size_t k, Rng& rng) {
  const std::size_t n = positions.size();
  std::vector<char> taken(n, 0);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> out;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto draw = [&](auto score) -> std::size_t {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) if (!taken[i]) total += score(i);
    if (!(total > 0.0)) return n;
    const double target = unit(rng) * total;
    double acc = 0.0;
    std::size_t chosen = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i] || !(score(i) > 0.0)) continue;
      acc += score(i);
      chosen = i;
      if (acc > target) break;
    }
    return chosen;
  };

  for (std::size_t pick = 0; pick < k; ++pick) {
    std::size_t chosen = n;
    if (pick > 0) chosen = draw([&](std::size_t i) { return weights[i] * nearest[i]; });
    if (chosen == n) chosen = draw([&](std::size_t i) { return weights[i]; });
    if (chosen == n) {
      std::vector<std::size_t> free;
      for (std::size_t i = 0; i < n; ++i) if (!taken[i]) free.push_back(i);
      chosen = free[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng)];
    }
    taken[chosen] = 1;
    out.push_back(positions[chosen]);
    for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], distance(positions[i], positions[chosen]));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::size_t weighted_median(std::span<const std::size_t> indices, std::span<const double> weights) {
  if (indices.empty() || indices.size() != weights.size()) {
    throw std::invalid_argument("weighted_median: empty or mismatched input");
  }
  double total = 0.0;
  for (double w : weights) total += w;
  if (total <= 0.0) return indices[(indices.size() - 1) / 2];
  double prefix = 0.0;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    prefix += weights[i];
    if (2.0 * prefix >= total) return indices[i];
  }
  return indices.back();
}

LloydRun lloyd(std::span<const std::size_t> positions, std::span<const double> weights,
               std::span<const std::size_t> initial, int max_iter) {
  if (positions.size() != weights.size()) throw std::invalid_argument("lloyd: size mismatch");
  if (initial.empty()) throw std::invalid_argument("lloyd: no initial medians");
  if (max_iter < 1) throw std::invalid_argument("lloyd: max_iter must be positive");
  for (std::size_t i = 1; i < initial.size(); ++i) {
    if (initial[i] <= initial[i - 1]) throw std::invalid_argument("lloyd: medians must be sorted and distinct");
  }

  LloydRun run;
  std::vector<std::size_t> medians(initial.begin(), initial.end());
  const std::size_t k = medians.size();
  std::vector<std::size_t> bounds;
  for (int iter = 1; iter <= max_iter; ++iter) {
    bounds = cluster_bounds(positions, medians);
    std::vector<std::size_t> next(k);
    for (std::size_t c = 0; c < k; ++c) {
      const std::size_t lo = bounds[c];
      const std::size_t hi = bounds[c + 1];
      if (lo == hi) {
        next[c] = medians[c];  // empty cluster, resolved below
        continue;
      }
      next[c] = weighted_median(positions.subspan(lo, hi - lo), weights.subspan(lo, hi - lo));
    }
    // Clusters are disjoint intervals, so medians stay distinct unless a
    // cluster was empty. Re-seed duplicates at the heaviest unclaimed point.
    std::sort(next.begin(), next.end());
    for (std::size_t c = 1; c < k; ++c) {
      if (next[c] != next[c - 1]) continue;
      std::size_t best = positions.size();
      for (std::size_t i = 0; i < positions.size(); ++i) {
        if (std::find(next.begin(), next.end(), positions[i]) != next.end()) continue;
        if (best == positions.size() || weights[i] > weights[best]) best = i;
      }
      if (best == positions.size()) throw std::invalid_argument("lloyd: fewer points than medians");
      next[c] = positions[best];
      std::sort(next.begin(), next.end());
      c = 0;
    }
    const bool unchanged = next == medians;
    medians = std::move(next);
    bounds = cluster_bounds(positions, medians);
    run.objective_trace.push_back(objective_of(positions, weights, medians, bounds));
    run.state.iteration = iter;
    if (unchanged) {
      run.converged = true;
      break;
    }
  }
  run.state.medians = medians;
  run.state.labels.assign(positions.size(), 0);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = bounds[c]; i < bounds[c + 1]; ++i) run.state.labels[i] = c;
  }
  return run;
}

KMedianResult kmedian_points(std::span<const std::size_t> positions, std::span<const double> weights,
                             std::size_t k, std::uint64_t seed, const KMedianOptions& options) {
  if (positions.size() != weights.size()) throw std::invalid_argument("kmedian: size mismatch");
  if (k == 0) throw std::invalid_argument("kmedian: K must be positive");
  if (k > positions.size()) throw std::invalid_argument("kmedian: K exceeds the number of candidate points");
  if (options.restarts < 1) throw std::invalid_argument("kmedian: restarts must be positive");
  for (std::size_t i = 1; i < positions.size(); ++i) {
    if (positions[i] <= positions[i - 1]) throw std::invalid_argument("kmedian: positions must be increasing");
  }
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("kmedian: weights must be nonnegative");
  }

  KMedianResult best;
  bool have = false;
  for (int r = 0; r < options.restarts; ++r) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(r)}));
    const auto init = initial_medians(positions, weights, k, rng);
    LloydRun run = lloyd(positions, weights, init, options.max_iter);
    const double obj = run.objective_trace.back();
    if (!have || obj < best.objective) {
      best.support = run.state.medians;
      best.objective = obj;
      best.iterations = run.state.iteration;
      best.objective_trace = std::move(run.objective_trace);
      have = true;
    }
  }
  return best;
}

KMedianResult kmedian(std::span<const double> v, const ParameterGrid& grid, std::size_t k,
                      std::uint64_t seed, const KMedianOptions& options) {
  if (v.size() != grid.size()) throw std::invalid_argument("kmedian: vector and grid sizes differ");
  std::vector<std::size_t> pos;
  std::vector<double> w;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] >= 0.0)) throw std::invalid_argument("kmedian: weights must be nonnegative");
    if (v[i] > 0.0) {
      pos.push_back(i);
      w.push_back(v[i]);
    }
  }
  if (pos.empty()) throw std::invalid_argument("kmedian: empty proxy");
  if (k > pos.size()) throw std::invalid_argument("kmedian: K exceeds the number of nonzero entries");
  KMedianResult out = kmedian_points(pos, w, k, seed, options);
  for (std::size_t s : out.support) out.theta_hat.push_back(grid.at(s));
  return out;
}

double kmedian_objective(std::span<const double> v, std::span<const std::size_t> support) {
  if (support.empty()) throw std::invalid_argument("kmedian_objective: empty support");
  double total = 0.0;
  std::size_t cell = 0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    while (cell + 1 < support.size() && distance(j, support[cell + 1]) < distance(j, support[cell])) ++cell;
    total += v[j] * distance(j, support[cell]);
  }
  return total;
}

}  // namespace emdpe
