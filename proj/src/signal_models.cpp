#include "emdpe/signal_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "emdpe/rng.hpp"

namespace emdpe {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void fill_chirp(const ParametricModel& m, double theta, cvec& out) {
  const double scale = std::sqrt(2.0 / (3.0 * m.chirp_length * m.sample_rate));
  const double ts = 1.0 / m.sample_rate;
  constexpr double kEdgeTol = 1e-9;
  for (Eigen::Index n = 0; n < m.n; ++n) {
    double u = (static_cast<double>(n) * ts - theta) / m.chirp_length;
    if (u < -kEdgeTol || u > 1.0 + kEdgeTol) {
      out(n) = 0.0;
      continue;
    }
    u = std::clamp(u, 0.0, 1.0);
    const double tau = u * m.chirp_length;
    const double phase = kTwoPi * (m.start_freq + u * m.sweep) * tau;
    const double c = std::cos(kTwoPi * u);
    const double window = m.window == ChirpWindow::Hann ? 1.0 - c : 1.0 + c;
    out(n) = std::polar(scale * window, phase);
  }
}

void fill_exponential(const ParametricModel& m, double theta, cvec& out) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(m.n));
  const double nn = static_cast<double>(m.n);
  for (Eigen::Index n = 0; n < m.n; ++n) {
    // Reduce theta*n mod N before scaling to keep the phase accurate.
    const double cycles = std::fmod(theta * static_cast<double>(n), nn);
    out(n) = std::polar(scale, kTwoPi * cycles / nn);
  }
}

void validate(const ParametricModel& m) {
  if (m.n <= 0) throw std::invalid_argument("ParametricModel: N must be positive");
  if (m.kind == ModelKind::ChirpTDE) {
    if (!(m.chirp_length > 0.0) || !(m.sample_rate > 0.0)) {
      throw std::invalid_argument("ParametricModel: chirp length and sample rate must be positive");
    }
  }
}

}  // namespace

ParametricModel ParametricModel::chirp(Eigen::Index n, double chirp_length, double start_freq,
                                       double sweep, double sample_rate, ChirpWindow window) {
  ParametricModel m;
  m.kind = ModelKind::ChirpTDE;
  m.n = n;
  m.chirp_length = chirp_length;
  m.start_freq = start_freq;
  m.sweep = sweep;
  m.sample_rate = sample_rate;
  m.window = window;
  validate(m);
  return m;
}

ParametricModel ParametricModel::complex_exponential(Eigen::Index n) {
  ParametricModel m;
  m.kind = ModelKind::ComplexExponentialFE;
  m.n = n;
  validate(m);
  return m;
}

cvec synthesize_atom(const ParametricModel& model, double theta) {
  validate(model);
  cvec out(model.n);
  if (model.kind == ModelKind::ChirpTDE) {
    fill_chirp(model, theta, out);
  } else {
    fill_exponential(model, theta, out);
  }
  return out;
}

Dictionary::Dictionary(ParametricModel model, ParameterGrid grid, std::size_t entry_cap)
    : model_(model), grid_(grid) {
  validate(model_);
  const auto n = static_cast<std::size_t>(model_.n);
  if (grid_.size() > entry_cap / n) {
    throw std::length_error("Dictionary: N*L = " + std::to_string(n * grid_.size()) +
                            " exceeds the entry cap " + std::to_string(entry_cap));
  }
  const auto l = static_cast<Eigen::Index>(grid_.size());
  atoms_.resize(model_.n, l);
  norms_.resize(l);
  cvec col(model_.n);
  for (Eigen::Index i = 0; i < l; ++i) {
    if (model_.kind == ModelKind::ChirpTDE) {
      fill_chirp(model_, grid_.at(static_cast<std::size_t>(i)), col);
    } else {
      fill_exponential(model_, grid_.at(static_cast<std::size_t>(i)), col);
    }
    atoms_.col(i) = col;
    norms_(i) = col.norm();
  }
}

cmat Dictionary::columns(std::span<const std::size_t> indices) const {
  cmat out(atoms_.rows(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= size()) throw std::out_of_range("Dictionary::columns: index out of range");
    out.col(static_cast<Eigen::Index>(k)) = atoms_.col(static_cast<Eigen::Index>(indices[k]));
  }
  return out;
}

cvec Dictionary::correlate(const cvec& x) const {
  if (x.size() != atoms_.rows()) throw std::invalid_argument("Dictionary::correlate: dimension mismatch");
  return atoms_.adjoint() * x;
}

double Dictionary::normalized_coherence(std::size_t i, std::size_t j) const {
  const auto a = static_cast<Eigen::Index>(i);
  const auto b = static_cast<Eigen::Index>(j);
  const double denom = norms_(a) * norms_(b);
  if (denom == 0.0) return 0.0;
  return std::abs(atoms_.col(a).dot(atoms_.col(b))) / denom;
}

Dictionary build_dictionary(const ParametricModel& model, const ParameterGrid& grid,
                            std::size_t entry_cap) {
  return Dictionary(model, grid, entry_cap);
}

double coherence(const cmat& columns) {
  if (columns.cols() < 2) throw std::invalid_argument("coherence: need at least two columns");
  const Eigen::VectorXd norms = columns.colwise().norm().transpose();
  if ((norms.array() == 0.0).any()) throw std::invalid_argument("coherence: zero-norm column");
  const cmat gram = columns.adjoint() * columns;
  double mu = 0.0;
  for (Eigen::Index j = 0; j < gram.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      mu = std::max(mu, std::abs(gram(i, j)) / (norms(i) * norms(j)));
    }
  }
  return std::min(mu, 1.0);
}

double coherence(const Dictionary& dict) { return coherence(dict.atoms()); }

double CorrelationProfile::cumulative_at(double theta) const {
  const double u = theta / delta + static_cast<double>(center());
  if (u < 0.0) return 0.0;
  const double last = static_cast<double>(offsets.size() - 1);
  if (u > last) return total;
  const auto k = static_cast<std::size_t>(std::floor(u));
  if (k + 1 >= offsets.size()) return cumulative.back();
  const double frac = u - static_cast<double>(k);
  return cumulative[k] + frac * (cumulative[k + 1] - cumulative[k]);
}

CorrelationProfile make_profile(double delta, std::vector<double> lambda) {
  if (!(delta > 0.0)) throw std::invalid_argument("make_profile: delta must be positive");
  if (lambda.empty() || lambda.size() % 2 == 0) {
    throw std::invalid_argument("make_profile: need an odd number of samples centred on zero");
  }
  CorrelationProfile p;
  p.delta = delta;
  const auto half = static_cast<long>(lambda.size() / 2);
  p.offsets.resize(lambda.size());
  p.cumulative.resize(lambda.size());
  double running = 0.0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (!(lambda[i] >= 0.0)) throw std::invalid_argument("make_profile: samples must be nonnegative");
    p.offsets[i] = static_cast<double>(static_cast<long>(i) - half) * delta;
    p.cumulative[i] = running + 0.5 * lambda[i];
    running += lambda[i];
  }
  p.total = running;
  p.lambda = std::move(lambda);
  return p;
}

CorrelationProfile correlation_profile(const ParametricModel& model, const ParameterGrid& grid,
                                       const MeasurementOperator* op) {
  validate(model);
  if (op != nullptr && op->cols() != model.n) {
    throw std::invalid_argument("correlation_profile: operator column count differs from N");
  }
  const std::size_t l = grid.size();
  const double ref = grid.at((l - 1) / 2);
  const cvec ref_atom = synthesize_atom(model, ref);
  const cvec probe = op ? op->apply_adjoint(op->apply(ref_atom)) : ref_atom;

  const std::size_t count = 2 * l - 1;
  std::vector<double> raw(count);
  cvec atom(model.n);
  for (std::size_t i = 0; i < count; ++i) {
    const double offset = (static_cast<double>(i) - static_cast<double>(l - 1)) * grid.delta();
    atom = synthesize_atom(model, ref + offset);
    raw[i] = std::abs(probe.dot(atom));
  }
  std::vector<double> lambda(count);
  for (std::size_t i = 0; i < count; ++i) lambda[i] = 0.5 * (raw[i] + raw[count - 1 - i]);
  return make_profile(grid.delta(), std::move(lambda));
}

double inverse_cumulative(const CorrelationProfile& profile, double value) {
  const double tol = 1e-12 * std::max(1.0, profile.total);
  if (!(value >= -tol) || !(value <= profile.total + tol)) {
    throw std::domain_error("inverse_cumulative: value outside [0, total]");
  }
  const auto it = std::lower_bound(profile.cumulative.begin(), profile.cumulative.end(), value);
  if (it == profile.cumulative.end()) return profile.offsets.back();
  return profile.offsets[static_cast<std::size_t>(it - profile.cumulative.begin())];
}

cvec compose_signal(const Dictionary& dict, std::span<const double> params,
                    std::span<const std::complex<double>> coefs) {
  if (params.empty()) throw std::invalid_argument("compose_signal: no components");
  if (params.size() != coefs.size()) {
    throw std::invalid_argument("compose_signal: parameter and coefficient counts differ");
  }
  cvec x = cvec::Zero(dict.signal_length());
  for (std::size_t i = 0; i < params.size(); ++i) {
    x += coefs[i] * synthesize_atom(dict.model(), params[i]);
  }
  return x;
}

double min_separation(std::span<const double> params) {
  std::vector<double> sorted(params.begin(), params.end());
  std::sort(sorted.begin(), sorted.end());
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < sorted.size(); ++i) gap = std::min(gap, sorted[i] - sorted[i - 1]);
  return gap;
}

double off_bound_distance(const ParameterGrid& grid, std::span<const double> params) {
  double eps = std::numeric_limits<double>::infinity();
  for (double p : params) {
    eps = std::min({eps, p - grid.theta_min(), grid.theta_max() - p});
  }
  return eps;
}

namespace {

// Sorted offsets u_i; parameter i sits at lo + u_i + i * gap. With an exact
// separation one random adjacent pair shares its offset, so that pair is
// exactly one gap apart.
template <class Draw>
auto offsets(const SceneSpec& spec, Rng& rng, Draw draw) {
  using T = decltype(draw());
  const bool pin = spec.exact_separation && spec.k >= 2;
  std::vector<T> w(pin ? spec.k - 1 : spec.k);
  for (auto& v : w) v = draw();
  std::sort(w.begin(), w.end());
  if (!pin) return w;
  const std::size_t g = std::uniform_int_distribution<std::size_t>(0, spec.k - 2)(rng);
  std::vector<T> u(spec.k);
  for (std::size_t i = 0; i < spec.k; ++i) u[i] = w[i <= g ? i : i - 1];
  return u;
}

}  // namespace

Scene draw_random_scene(const ParameterGrid& grid, const SceneSpec& spec, std::uint64_t seed) {
  if (spec.k == 0) throw std::invalid_argument("draw_random_scene: K must be positive");
  if (spec.min_separation < 0.0 || spec.off_bound < 0.0) {
    throw std::invalid_argument("draw_random_scene: separation and off-bound must be nonnegative");
  }
  if (!(spec.dynamic_range >= 1.0)) {
    throw std::invalid_argument("draw_random_scene: dynamic range must be >= 1");
  }
  const double range = grid.theta_max() - grid.theta_min();
  const double km1 = static_cast<double>(spec.k - 1);
  if (!(km1 * spec.min_separation + 2.0 * spec.off_bound < range)) {
    throw std::invalid_argument("draw_random_scene: infeasible separation/off-bound constraints");
  }

  Rng rng(seed);
  Scene scene;
  scene.params.resize(spec.k);

  if (spec.on_grid) {
    const double d = grid.delta();
    const auto lo = static_cast<long>(std::ceil(spec.off_bound / d - 1e-9));
    const auto hi = static_cast<long>(std::floor((range - spec.off_bound) / d + 1e-9));
    const auto gap = static_cast<long>(std::ceil(spec.min_separation / d - 1e-9));
    const long slack = hi - lo - static_cast<long>(spec.k - 1) * gap;
    if (slack < 0) throw std::invalid_argument("draw_random_scene: no on-grid configuration fits");
    std::uniform_int_distribution<long> pick(0, slack);
    const auto u = offsets(spec, rng, [&] { return pick(rng); });
    for (std::size_t i = 0; i < spec.k; ++i) {
      scene.params[i] = grid.at(static_cast<std::size_t>(lo + u[i] + static_cast<long>(i) * gap));
    }
  } else {
    const double lo = grid.theta_min() + spec.off_bound;
    const double slack = range - 2.0 * spec.off_bound - km1 * spec.min_separation;
    std::uniform_real_distribution<double> pick(0.0, slack);
    const auto u = offsets(spec, rng, [&] { return pick(rng); });
    for (std::size_t i = 0; i < spec.k; ++i) {
      scene.params[i] = lo + u[i] + static_cast<double>(i) * spec.min_separation;
    }
  }

  std::vector<double> mags(spec.k, 1.0);
  if (spec.magnitudes == MagnitudeMode::Range && spec.dynamic_range > 1.0) {
    const double log_r = std::log(spec.dynamic_range);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (auto& m : mags) m = std::exp(unit(rng) * log_r);
    if (spec.k >= 2) {
      std::uniform_int_distribution<std::size_t> which(0, spec.k - 1);
      const std::size_t lo_idx = which(rng);
      std::size_t hi_idx = which(rng);
      while (hi_idx == lo_idx) hi_idx = which(rng);
      mags[lo_idx] = 1.0;
      mags[hi_idx] = spec.dynamic_range;
    }
  }

  scene.coefs.resize(spec.k);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (std::size_t i = 0; i < spec.k; ++i) {
    const double phase = spec.phases == PhaseMode::Uniform ? angle(rng) : 0.0;
    scene.coefs[i] = std::polar(mags[i], phase);
  }
  return scene;
}

}  // namespace emdpe
