#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "emdpe/grid.hpp"
#include "emdpe/measurement.hpp"

namespace emdpe {

enum class ModelKind { ChirpTDE, ComplexExponentialFE };

/// Amplitude window of the chirp. Hann is 1 - cos(2 pi tau/T), vanishing at
/// both pulse ends; EdgePeaked is 1 + cos(2 pi tau/T), maximal at the ends.
enum class ChirpWindow { Hann, EdgePeaked };

/// Parametric signal model psi(theta) in C^N.
///
/// ChirpTDE: windowed linear chirp delayed by theta seconds,
///   psi[n] = sqrt(2/(3 T fs)) exp(j 2 pi (fc + fa tau/T) tau) w(tau),
///   tau = n/fs - theta, zero outside tau in [0, T].
/// ComplexExponentialFE: psi[n] = exp(j 2 pi theta n / N) / sqrt(N).
struct ParametricModel {
  ModelKind kind = ModelKind::ComplexExponentialFE;
  Eigen::Index n = 1000;
  double chirp_length = 1e-6;    // T, seconds
  double start_freq = 1e6;       // fc, Hz
  double sweep = 20e6;           // fa, Hz
  double sample_rate = 50e6;     // fs, Hz
  ChirpWindow window = ChirpWindow::Hann;

  static ParametricModel chirp(Eigen::Index n, double chirp_length, double start_freq, double sweep,
                               double sample_rate, ChirpWindow window = ChirpWindow::Hann);
  static ParametricModel complex_exponential(Eigen::Index n);

  bool operator==(const ParametricModel&) const = default;
};

cvec synthesize_atom(const ParametricModel& model, double theta);

/// Atoms psi(theta_i) for every grid point, stored column-wise. Immutable.
class Dictionary {
 public:
  static constexpr std::size_t kDefaultEntryCap = 200'000'000;

  /// Throws std::length_error when N*L exceeds entry_cap.
  Dictionary(ParametricModel model, ParameterGrid grid, std::size_t entry_cap = kDefaultEntryCap);

  const ParametricModel& model() const { return model_; }
  const ParameterGrid& grid() const { return grid_; }
  const cmat& atoms() const { return atoms_; }
  Eigen::Index signal_length() const { return atoms_.rows(); }
  std::size_t size() const { return grid_.size(); }
  const Eigen::VectorXd& column_norms() const { return norms_; }

  /// Psi_S for a list of grid indices.
  cmat columns(std::span<const std::size_t> indices) const;
  /// Psi^H x.
  cvec correlate(const cvec& x) const;
  /// |<psi_i, psi_j>| / (|psi_i| |psi_j|); 0 when either column vanishes.
  double normalized_coherence(std::size_t i, std::size_t j) const;

 private:
  ParametricModel model_;
  ParameterGrid grid_;
  cmat atoms_;
  Eigen::VectorXd norms_;
};

Dictionary build_dictionary(const ParametricModel& model, const ParameterGrid& grid,
                            std::size_t entry_cap = Dictionary::kDefaultEntryCap);

/// Largest normalized inner product between distinct columns.
/// Throws on fewer than two columns or a zero-norm column.
double coherence(const Dictionary& dict);
double coherence(const cmat& columns);

/// |lambda| sampled at offsets k*delta, k = -(L-1)..(L-1), and its cumulative sum.
///
/// The cumulative value at offset k counts lambda[k] with half weight,
///   cumulative[k] = sum_{j<k} lambda[j] + lambda[k]/2,
/// so that Lambda(theta) + Lambda(-theta) = total holds exactly for an even
/// profile and 2 Lambda(0) = total.
struct CorrelationProfile {
  double delta = 1.0;
  std::vector<double> offsets;
  std::vector<double> lambda;
  std::vector<double> cumulative;
  double total = 0.0;

  std::size_t center() const { return offsets.size() / 2; }
  double at_zero() const { return lambda[center()]; }
  /// Lambda(0).
  double cumulative_zero() const { return cumulative[center()]; }
  /// Lambda at an arbitrary offset, piecewise linear between grid offsets;
  /// 0 left of the first offset and total right of the last one.
  double cumulative_at(double theta) const;
};

/// Builds a profile from 2L-1 nonnegative samples centred on offset zero.
CorrelationProfile make_profile(double delta, std::vector<double> lambda);

/// lambda[k] = |psi(ref)^H Phi^H Phi psi(ref + k delta)| with ref the grid
/// midpoint, symmetrized as (lambda[k] + lambda[-k]) / 2.
CorrelationProfile correlation_profile(const ParametricModel& model, const ParameterGrid& grid,
                                       const MeasurementOperator* op = nullptr);

/// Smallest grid offset theta with Lambda(theta) >= value; the last offset if
/// none reaches it. Throws std::domain_error when value is outside [0, total].
double inverse_cumulative(const CorrelationProfile& profile, double value);

/// x = sum_i c_i psi(theta_i), atoms synthesized at the exact (possibly
/// off-grid) parameters.
cvec compose_signal(const Dictionary& dict, std::span<const double> params,
                    std::span<const std::complex<double>> coefs);

enum class MagnitudeMode { Unit, Range };
enum class PhaseMode { Uniform, Zero };

struct SceneSpec {
  std::size_t k = 4;
  double min_separation = 0.0;  // zeta
  double off_bound = 0.0;       // epsilon
  double dynamic_range = 1.0;   // r
  MagnitudeMode magnitudes = MagnitudeMode::Unit;
  PhaseMode phases = PhaseMode::Uniform;
  bool on_grid = false;
  bool exact_separation = false;  // one adjacent pair exactly zeta apart
};

struct Scene {
  std::vector<double> params;  // sorted ascending
  std::vector<std::complex<double>> coefs;
};

/// Draws K parameters with pairwise gaps >= zeta and distance >= epsilon from
/// both ends of the grid, uniformly over the feasible set. With
/// exact_separation the closest pair is exactly zeta apart. Range magnitudes
/// pin one component at 1 and one at r and draw the others log-uniformly.
/// Throws std::invalid_argument when (K-1) zeta + 2 epsilon does not fit.
Scene draw_random_scene(const ParameterGrid& grid, const SceneSpec& spec, std::uint64_t seed);

double min_separation(std::span<const double> params);
double off_bound_distance(const ParameterGrid& grid, std::span<const double> params);

}  // namespace emdpe
