#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "emdpe/config.hpp"
#include "emdpe/records.hpp"

namespace emdpe {

struct SeparationPoint {
  double zeta = 0.0;
  double sigma = 0.0;         // max over trials of the largest matched error
  double lambda_sigma = 0.0;  // Lambda(sigma) / Lambda(0)
  double lambda_zeta = 0.0;   // Lambda(zeta) / Lambda(inf)
  std::size_t failures = 0;
};

struct DecayPoint {
  std::string series;  // "fa", "r" or "t"
  double axis = 0.0;
  double a = 0.0;             // fitted decay, 1 / parameter unit
  double zeta_steps = 0.0;    // minimal zeta / delta with sigma <= delta; NaN if unresolved
  double t3_steps = 0.0;      // closed-form separation bound / delta; NaN if infeasible
};

struct MeanPoint {
  double axis = 0.0;
  std::string algorithm;
  double mean_pee_avg = 0.0;  // over successful trials
  std::size_t failures = 0;
};

struct RunOutput {
  std::vector<TrialRecord> records;
  Table summary;
  std::vector<Series> series;
  std::vector<SeparationPoint> separation;
  std::vector<DecayPoint> decay;
  std::vector<MeanPoint> means;
};

/// Seed of one trial: hash(master, experiment, axis index, trial index).
std::uint64_t trial_seed(std::uint64_t master, const std::string& experiment, std::size_t axis, std::size_t trial);

/// Runs fn(i) for i in [0, count) on up to `threads` workers (0: hardware
/// concurrency). The first exception thrown by a worker is rethrown.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

RunOutput run_separation_sweep(const ExperimentConfig& cfg);
RunOutput run_decay_sweep(const ExperimentConfig& cfg);
RunOutput run_compression_sweep(const ExperimentConfig& cfg);
RunOutput run_snr_sweep(const ExperimentConfig& cfg);
RunOutput run_single(const ExperimentConfig& cfg);
RunOutput run_experiment(const ExperimentConfig& cfg);

/// records.csv, summary.csv and plot/<series>.dat under `dir`.
void write_outputs(const RunOutput& out, const std::filesystem::path& dir);

}  // namespace emdpe
