#include "emdpe/recovery.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "emdpe/rng.hpp"

namespace emdpe {

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::CSP: return "csp";
    case Algorithm::BSP: return "bsp";
    case Algorithm::KMedianOnly: return "kmedian";
    case Algorithm::ThresholdOnly: return "threshold";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (s == "csp") return Algorithm::CSP;
  if (s == "bsp") return Algorithm::BSP;
  if (s == "kmedian") return Algorithm::KMedianOnly;
  if (s == "threshold") return Algorithm::ThresholdOnly;
  throw std::invalid_argument("unknown algorithm: " + s);
}

void RecoveryConfig::validate() const {
  if (k == 0) throw std::invalid_argument("RecoveryConfig: K must be positive");
  if (!(threshold >= 0.0)) throw std::invalid_argument("RecoveryConfig: threshold must be nonnegative");
  if (!(nu >= 0.0 && nu <= 1.0)) throw std::invalid_argument("RecoveryConfig: nu must lie in [0, 1]");
  if (max_outer_iter < 1) throw std::invalid_argument("RecoveryConfig: max_outer_iter must be positive");
}

cvec measure(const MeasurementOperator& op, const cvec& x) { return op.apply(x); }

cvec add_awgn(const cvec& y, double snr_db, std::uint64_t seed) {
  if (std::isinf(snr_db) && snr_db > 0) return y;
  const double energy = y.squaredNorm();
  if (energy <= 0.0) throw std::invalid_argument("add_awgn: zero signal");
  const double var = energy / (static_cast<double>(y.size()) * std::pow(10.0, snr_db / 10.0));
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(var / 2.0));
  cvec out = y;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    out(i) += std::complex<double>(re, im);
  }
  return out;
}

cvec proxy(const cvec& y, const MeasurementOperator& op, const Dictionary& dict) {
  if (op.cols() != dict.signal_length()) throw std::invalid_argument("proxy: operator/dictionary mismatch");
  return dict.correlate(op.apply_adjoint(y));
}

cvec hard_threshold(const cvec& v, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("hard_threshold: negative threshold");
  cvec out = v;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (!(std::abs(out(i)) > t)) out(i) = 0.0;
  }
  return out;
}

namespace {

std::vector<double> magnitudes(const cvec& v) {
  std::vector<double> out(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = std::abs(v(i));
  return out;
}

// Greedy band-excluded pick among candidate indices ranked by `score`.
// Returns fewer than k entries when admissibility runs out.
std::vector<std::size_t> exclusion_pick(std::span<const std::size_t> candidates, std::span<const double> score,
                                        const Dictionary& dict, std::size_t k, double nu) {
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  std::vector<std::size_t> chosen;
  for (std::size_t o : order) {
    if (chosen.size() == k) break;
    const std::size_t idx = candidates[o];
    bool ok = true;
    for (std::size_t c : chosen) {
      // 1e-12 absorbs rounding for atoms that are orthogonal in exact arithmetic
      if (c == idx || dict.normalized_coherence(c, idx) > nu + 1e-12) {
        ok = false;
        break;
      }
    }
    if (ok) chosen.push_back(idx);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

std::vector<std::size_t> sorted_union(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  std::vector<std::size_t> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

cmat measured_columns(const MeasurementOperator& op, const Dictionary& dict, std::span<const std::size_t> s) {
  return op.apply(dict.columns(s));
}

struct Fit {
  cvec coefs;
  double residual = 0.0;
};

Fit fit_support(const cvec& y, const MeasurementOperator& op, const Dictionary& dict,
                std::span<const std::size_t> s) {
  const cmat a = measured_columns(op, dict, s);
  cmat gram = a.adjoint() * a;
  gram.diagonal().array() += 1e-10;
  Fit f;
  f.coefs = gram.ldlt().solve(a.adjoint() * y);
  f.residual = (y - a * f.coefs).norm();
  return f;
}

EstimationResult finish(const Dictionary& dict, std::vector<std::size_t> support, const Fit& fit) {
  EstimationResult r;
  r.support = std::move(support);
  for (std::size_t s : r.support) r.theta_hat.push_back(dict.grid().at(s));
  r.coefs = fit.coefs;
  r.residual_norm = fit.residual;
  return r;
}

bool stalled(double previous, double current) { return !(current < previous * (1.0 - 1e-6)); }

void check_inputs(const cvec& y, const MeasurementOperator& op, const Dictionary& dict,
                  const RecoveryConfig& config) {
  config.validate();
  if (y.size() != op.rows()) throw std::invalid_argument("recovery: measurement length mismatch");
  if (op.cols() != dict.signal_length()) throw std::invalid_argument("recovery: operator/dictionary mismatch");
  if (config.k > dict.size()) throw std::invalid_argument("recovery: K exceeds the dictionary size");
}

}  // namespace

std::vector<std::size_t> band_excluded_select(const cvec& v, const Dictionary& dict, std::size_t k, double nu) {
  if (!(nu >= 0.0 && nu <= 1.0)) throw std::invalid_argument("band_excluded_select: nu must lie in [0, 1]");
  if (static_cast<std::size_t>(v.size()) != dict.size()) {
    throw std::invalid_argument("band_excluded_select: proxy length mismatch");
  }
  std::vector<std::size_t> all(dict.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto score = magnitudes(v);
  auto chosen = exclusion_pick(all, score, dict, k, nu);
  if (chosen.size() < k) throw std::runtime_error("band_excluded_select: fewer than K admissible indices");
  return chosen;
}

cvec least_squares(const cvec& y, const MeasurementOperator& op, const Dictionary& dict,
                   std::span<const std::size_t> support) {
  if (support.empty()) throw std::invalid_argument("least_squares: empty support");
  return fit_support(y, op, dict, support).coefs;
}

EstimationResult csp(const cvec& y, const MeasurementOperator& op, const Dictionary& dict,
                     const RecoveryConfig& config, std::uint64_t seed) {
  check_inputs(y, op, dict, config);
  const std::size_t k = config.k;
  const double y_norm = y.norm();

  std::vector<std::size_t> support;
  cvec residual_vec = y;
  EstimationResult best;
  bool have_best = false;
  std::vector<double> trace;
  double previous = std::numeric_limits<double>::infinity();

  for (int iter = 1; iter <= config.max_outer_iter; ++iter) {
    const cvec v = hard_threshold(proxy(residual_vec, op, dict), config.threshold);
    const auto mags = magnitudes(v);
    const auto nonzero = static_cast<std::size_t>(std::count_if(mags.begin(), mags.end(), [](double m) { return m > 0.0; }));
    if (nonzero < k) {
      if (iter == 1) throw std::invalid_argument("csp: thresholded proxy has fewer than K nonzero entries");
      break;
    }
    const auto fresh = kmedian(mags, dict.grid(), k, derive_seed(seed, {static_cast<std::uint64_t>(iter), 0}),
                               config.kmedian);
    const auto merged = sorted_union(support, fresh.support);
    const Fit wide = fit_support(y, op, dict, merged);

    std::vector<std::size_t> pruned;
    if (merged.size() == k) {
      pruned = merged;
    } else {
      std::vector<double> w(merged.size());
      for (std::size_t i = 0; i < merged.size(); ++i) w[i] = std::abs(wide.coefs(static_cast<Eigen::Index>(i)));
      pruned = kmedian_points(merged, w, k, derive_seed(seed, {static_cast<std::uint64_t>(iter), 1}),
                              config.kmedian)
                   .support;
    }
    const Fit fit = fit_support(y, op, dict, pruned);
    trace.push_back(fit.residual);
    support = pruned;
    residual_vec = y - measured_columns(op, dict, support) * fit.coefs;

    if (!have_best || fit.residual < best.residual_norm) {
      best = finish(dict, support, fit);
      best.iterations = iter;
      have_best = true;
    }
    if (fit.residual <= 1e-12 * y_norm || stalled(previous, fit.residual)) break;
    previous = fit.residual;
  }
  best.residual_trace = std::move(trace);
  return best;
}

EstimationResult bsp(const cvec& y, const MeasurementOperator& op, const Dictionary& dict,
                     const RecoveryConfig& config) {
  check_inputs(y, op, dict, config);
  const std::size_t k = config.k;
  const double y_norm = y.norm();

  std::vector<std::size_t> support;
  cvec residual_vec = y;
  EstimationResult best;
  bool have_best = false;
  std::vector<double> trace;
  double previous = std::numeric_limits<double>::infinity();

  for (int iter = 1; iter <= config.max_outer_iter; ++iter) {
    const cvec v = proxy(residual_vec, op, dict);
    std::vector<std::size_t> fresh;
    try {
      fresh = band_excluded_select(v, dict, k, config.nu);
    } catch (const std::runtime_error&) {
      if (iter == 1) throw;
      break;
    }
    const auto merged = sorted_union(support, fresh);
    const Fit wide = fit_support(y, op, dict, merged);
    std::vector<double> w(merged.size());
    for (std::size_t i = 0; i < merged.size(); ++i) w[i] = std::abs(wide.coefs(static_cast<Eigen::Index>(i)));
    auto pruned = exclusion_pick(merged, w, dict, k, config.nu);
    if (pruned.size() < k) {
      if (iter == 1) throw std::runtime_error("bsp: pruning found fewer than K admissible indices");
      break;
    }
    const Fit fit = fit_support(y, op, dict, pruned);
    trace.push_back(fit.residual);
    support = std::move(pruned);
    residual_vec = y - measured_columns(op, dict, support) * fit.coefs;

    if (!have_best || fit.residual < best.residual_norm) {
      best = finish(dict, support, fit);
      best.iterations = iter;
      have_best = true;
    }
    if (fit.residual <= 1e-12 * y_norm || stalled(previous, fit.residual)) break;
    previous = fit.residual;
  }
  best.residual_trace = std::move(trace);
  return best;
}

EstimationResult recover(const cvec& y, const MeasurementOperator& op, const Dictionary& dict,
                         const RecoveryConfig& config, std::uint64_t seed) {
  switch (config.algorithm) {
    case Algorithm::CSP: return csp(y, op, dict, config, seed);
    case Algorithm::BSP: return bsp(y, op, dict, config);
    case Algorithm::KMedianOnly: {
      check_inputs(y, op, dict, config);
      const auto mags = magnitudes(hard_threshold(proxy(y, op, dict), config.threshold));
      auto km = kmedian(mags, dict.grid(), config.k, seed, config.kmedian);
      const Fit fit = fit_support(y, op, dict, km.support);
      EstimationResult r = finish(dict, std::move(km.support), fit);
      r.iterations = 1;
      r.residual_trace = {fit.residual};
      return r;
    }
    case Algorithm::ThresholdOnly: {
      check_inputs(y, op, dict, config);
      const auto mags = magnitudes(proxy(y, op, dict));
      std::vector<std::size_t> order(mags.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mags[a] > mags[b]; });
      order.resize(config.k);
      std::sort(order.begin(), order.end());
      const Fit fit = fit_support(y, op, dict, order);
      EstimationResult r = finish(dict, std::move(order), fit);
      r.iterations = 1;
      r.residual_trace = {fit.residual};
      return r;
    }
  }
  throw std::invalid_argument("recover: unknown algorithm");
}

}  // namespace emdpe
