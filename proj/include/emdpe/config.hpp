#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "emdpe/recovery.hpp"
#include "emdpe/signal_models.hpp"

namespace emdpe {

enum class ExperimentKind { Separation, Decay, Compression, Snr, Single };

const char* experiment_name(ExperimentKind kind);
ExperimentKind parse_experiment(const std::string& name);

/// Declarative description of one experiment run. Loaded from an INI file
/// with sections [experiment], [model], [grid], [scene], [recovery], [sweep].
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Single;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency
  bool timing = false;

  ParametricModel model;
  double theta_min = 0.0;
  double theta_max = 1.0;
  double delta = 0.01;

  std::size_t k = 4;
  double zeta = 0.0;
  double epsilon = 0.0;
  double r = 1.0;
  MagnitudeMode magnitudes = MagnitudeMode::Unit;
  PhaseMode phases = PhaseMode::Uniform;
  bool on_grid = false;
  bool exact_separation = false;

  std::vector<Algorithm> algorithms{Algorithm::CSP, Algorithm::BSP};
  double threshold = 0.0;
  double nu = 1.0;
  int max_outer_iter = 20;
  KMedianOptions kmedian;
  OperatorKind sensing = OperatorKind::GaussianDense;  // used when kappa < 1
  double kappa = 1.0;            // fixed compression for snr/single
  double snr_db = kNoiseless;    // fixed noise level for compression/single

  // Axis of the main sweep: zeta (separation), f_a (decay), kappa
  // (compression) or SNR in dB (snr).
  std::vector<double> values;
  // Decay sweep extras.
  std::vector<double> r_values;
  std::vector<double> t_values;
  double fixed_sweep = 10e6;     // f_a used by the r and t sweeps
  double fixed_threshold = 0.9;  // t used by the f_a and r sweeps
  double fixed_r = 1.0;          // r used by the f_a and t sweeps
  int zeta_min_steps = 1;        // bisection range for zeta / delta
  int zeta_max_steps = 120;
  int zeta_subdivision = 1;      // bisection tick = delta / subdivision

  ParameterGrid grid() const;
  SceneSpec scene() const;
  RecoveryConfig recovery(Algorithm algorithm) const;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Comma- or whitespace-separated list of reals; "inf" is accepted.
std::vector<double> parse_list(const std::string& text);

}  // namespace emdpe
