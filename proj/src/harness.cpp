#include "emdpe/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "emdpe/rng.hpp"
#include "emdpe/theory.hpp"
#include "emdpe/transport.hpp"

namespace emdpe {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum Stream : std::uint64_t { kScene = 1, kPhi = 2, kNoise = 3, kSolver = 4 };

std::uint64_t stream(std::uint64_t trial, Stream s) { return derive_seed(trial, {static_cast<std::uint64_t>(s)}); }

struct Outcome {
  std::vector<double> theta_hat;
  cvec coefs;
  double runtime_ms = 0.0;
  bool failed = false;
};

double emd_metric(const ParameterGrid& grid, const Scene& scene, const Outcome& o) {
  std::vector<std::size_t> ti;
  std::vector<double> tw;
  for (std::size_t i = 0; i < scene.params.size(); ++i) {
    ti.push_back(grid.nearest_index(scene.params[i]));
    tw.push_back(std::abs(scene.coefs[i]));
  }
  std::vector<std::size_t> ei;
  std::vector<double> ew;
  for (std::size_t i = 0; i < o.theta_hat.size(); ++i) {
    ei.push_back(grid.nearest_index(o.theta_hat[i]));
    ew.push_back(std::abs(o.coefs(static_cast<Eigen::Index>(i))));
  }
  const auto a = make_sparse(grid.size(), ti, tw);
  const auto b = make_sparse(grid.size(), ei, ew);
  if (a.support.empty() || b.support.empty()) return kNaN;
  return emd(a, b).cost;
}

TrialRecord make_record(const std::string& experiment, double axis, std::size_t trial, std::uint64_t seed,
                        const std::string& algorithm, const ParameterGrid& grid, const Scene& scene,
                        const Outcome& o) {
  TrialRecord r;
  r.experiment = experiment;
  r.axis_value = axis;
  r.trial = trial;
  r.seed = seed;
  r.algorithm = algorithm;
  r.runtime_ms = o.runtime_ms;
  if (o.failed || o.theta_hat.size() != scene.params.size()) {
    r.pee_total = r.pee_avg = r.max_component_error = r.emd = kNaN;
    r.failed = 1;
    return r;
  }
  r.pee_total = pee(scene.params, o.theta_hat);
  r.pee_avg = r.pee_total / static_cast<double>(scene.params.size());
  r.max_component_error = max_matched_error(scene.params, o.theta_hat);
  r.emd = emd_metric(grid, scene, o);
  return r;
}

template <class F>
Outcome timed(bool timing, F&& run) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    EstimationResult est = run();
    o.theta_hat = std::move(est.theta_hat);
    o.coefs = std::move(est.coefs);
  } catch (const std::invalid_argument&) {
    o.failed = true;
  } catch (const std::runtime_error&) {
    o.failed = true;
  }
  if (timing) {
    o.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return o;
}

MeasurementOperator make_operator(OperatorKind kind, Eigen::Index m, Eigen::Index n, std::uint64_t seed) {
  if (m >= n) return MeasurementOperator::identity(n);
  m = std::max<Eigen::Index>(m, 1);
  if (kind == OperatorKind::RowSubsampledIdentity) return MeasurementOperator::row_subsampled(m, n, seed);
  return MeasurementOperator::gaussian(m, n, seed);
}

// Largest zeta / delta step count that still admits K components.
int feasible_steps(const ExperimentConfig& cfg, const ParameterGrid& grid) {
  if (cfg.k < 2) return cfg.zeta_max_steps;
  const double room = grid.theta_max() - grid.theta_min() - 2.0 * cfg.epsilon;
  const double steps = room / (static_cast<double>(cfg.k - 1) * grid.delta());
  return static_cast<int>(std::ceil(steps)) - 1;
}

Table mean_table(const std::vector<MeanPoint>& means, const char* axis_name) {
  Table t;
  t.columns = {axis_name, "algorithm", "mean_pee_avg", "failures"};
  for (const auto& m : means) {
    t.rows.push_back({format_number(m.axis), m.algorithm, format_number(m.mean_pee_avg), std::to_string(m.failures)});
  }
  return t;
}

// Trials of a recovery experiment at every axis point. `point` maps an axis
// value to (kappa, snr_db).
RunOutput recovery_sweep(const ExperimentConfig& cfg, const std::string& name, const std::vector<double>& axis,
                         const std::function<std::pair<double, double>(double)>& point, const char* axis_name) {
  const ParameterGrid grid = cfg.grid();
  const Dictionary dict = build_dictionary(cfg.model, grid);
  const Eigen::Index n = cfg.model.n;
  const std::size_t n_alg = cfg.algorithms.size();

  RunOutput out;
  out.records.resize(axis.size() * cfg.trials * n_alg);
  for (std::size_t ai = 0; ai < axis.size(); ++ai) {
    const auto [kappa, snr] = point(axis[ai]);
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t trial) {
      const std::uint64_t seed = trial_seed(cfg.seed, name, ai, trial);
      const Scene scene = draw_random_scene(grid, cfg.scene(), stream(seed, kScene));
      const cvec x = compose_signal(dict, scene.params, scene.coefs);
      const auto m = static_cast<Eigen::Index>(std::lround(kappa * static_cast<double>(n)));
      const MeasurementOperator op = make_operator(cfg.sensing, m, n, stream(seed, kPhi));
      const cvec y = add_awgn(measure(op, x), snr, stream(seed, kNoise));
      for (std::size_t alg = 0; alg < n_alg; ++alg) {
        const RecoveryConfig rc = cfg.recovery(cfg.algorithms[alg]);
        const Outcome o = timed(cfg.timing, [&] { return recover(y, op, dict, rc, stream(seed, kSolver)); });
        out.records[(ai * cfg.trials + trial) * n_alg + alg] =
            make_record(name, axis[ai], trial, seed, algorithm_name(cfg.algorithms[alg]), grid, scene, o);
      }
    });
  }

  for (std::size_t ai = 0; ai < axis.size(); ++ai) {
    for (std::size_t alg = 0; alg < n_alg; ++alg) {
      MeanPoint mp;
      mp.axis = axis[ai];
      mp.algorithm = algorithm_name(cfg.algorithms[alg]);
      double sum = 0.0;
      std::size_t ok = 0;
      for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
        const auto& r = out.records[(ai * cfg.trials + trial) * n_alg + alg];
        if (r.failed) {
          ++mp.failures;
        } else {
          sum += r.pee_avg;
          ++ok;
        }
      }
      mp.mean_pee_avg = ok ? sum / static_cast<double>(ok) : kNaN;
      out.means.push_back(mp);
    }
  }
  out.summary = mean_table(out.means, axis_name);
  for (std::size_t alg = 0; alg < n_alg; ++alg) {
    Series s;
    s.name = std::string("pee_vs_") + axis_name + "_" + algorithm_name(cfg.algorithms[alg]);
    for (const auto& m : out.means) {
      if (m.algorithm == algorithm_name(cfg.algorithms[alg])) {
        s.x.push_back(m.axis);
        s.y.push_back(m.mean_pee_avg);
      }
    }
    out.series.push_back(std::move(s));
  }
  return out;
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t master, const std::string& experiment, std::size_t axis, std::size_t trial) {
  return derive_seed(master, {hash_name(experiment), static_cast<std::uint64_t>(axis), static_cast<std::uint64_t>(trial)});
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

RunOutput run_separation_sweep(const ExperimentConfig& cfg) {
  const std::string name = "separation";
  const ParameterGrid grid = cfg.grid();
  const Dictionary dict = build_dictionary(cfg.model, grid);
  const CorrelationProfile profile = correlation_profile(cfg.model, grid);
  const auto op = MeasurementOperator::identity(cfg.model.n);
  RecoveryConfig rc = cfg.recovery(Algorithm::KMedianOnly);

  RunOutput out;
  out.records.resize(cfg.values.size() * cfg.trials);
  for (std::size_t ai = 0; ai < cfg.values.size(); ++ai) {
    SceneSpec spec = cfg.scene();
    spec.min_separation = cfg.values[ai];
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t trial) {
      // common random scenes across the axis: trial t sees the same draws at every zeta
      const std::uint64_t seed = trial_seed(cfg.seed, name, 0, trial);
      const Scene scene = draw_random_scene(grid, spec, stream(seed, kScene));
      const cvec y = compose_signal(dict, scene.params, scene.coefs);
      const Outcome o = timed(cfg.timing, [&] { return recover(y, op, dict, rc, stream(seed, kSolver)); });
      out.records[ai * cfg.trials + trial] =
          make_record(name, cfg.values[ai], trial, seed, algorithm_name(Algorithm::KMedianOnly), grid, scene, o);
    });
  }

  Series linear{"lambda_sigma_vs_lambda_zeta", {}, {}};
  Series raw{"sigma_vs_zeta", {}, {}};
  out.summary.columns = {"zeta", "zeta_over_delta", "sigma", "sigma_over_delta", "lambda_sigma_over_lambda0",
                         "lambda_zeta_over_total", "failures"};
  for (std::size_t ai = 0; ai < cfg.values.size(); ++ai) {
    SeparationPoint p;
    p.zeta = cfg.values[ai];
    for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
      const auto& r = out.records[ai * cfg.trials + trial];
      if (r.failed) {
        ++p.failures;
        p.sigma = std::numeric_limits<double>::infinity();
      } else {
        p.sigma = std::max(p.sigma, r.max_component_error);
      }
    }
    p.lambda_sigma = profile.cumulative_at(p.sigma) / profile.cumulative_zero();
    p.lambda_zeta = profile.cumulative_at(p.zeta) / profile.total;
    out.separation.push_back(p);
    out.summary.rows.push_back({format_number(p.zeta), format_number(p.zeta / grid.delta()), format_number(p.sigma),
                                format_number(p.sigma / grid.delta()), format_number(p.lambda_sigma),
                                format_number(p.lambda_zeta), std::to_string(p.failures)});
    linear.x.push_back(p.lambda_zeta);
    linear.y.push_back(p.lambda_sigma);
    raw.x.push_back(p.zeta / grid.delta());
    raw.y.push_back(p.sigma / grid.delta());
  }
  out.series = {linear, raw};
  return out;
}

RunOutput run_decay_sweep(const ExperimentConfig& cfg) {
  const ParameterGrid grid = cfg.grid();
  const double delta = grid.delta();
  const auto op = MeasurementOperator::identity(cfg.model.n);
  const int max_steps = std::min(cfg.zeta_max_steps, feasible_steps(cfg, grid));
  if (max_steps <= cfg.zeta_min_steps) throw std::invalid_argument("decay sweep: zeta range is infeasible");
  // bisection runs on ticks of delta / subdivision
  const int sub = cfg.zeta_subdivision;
  const double tick = delta / sub;

  struct Job {
    std::string series;
    double axis;
    double sweep;
    double t;
    double r;
  };
  std::vector<Job> jobs;
  for (double v : cfg.values) jobs.push_back({"fa", v, v, cfg.fixed_threshold, cfg.fixed_r});
  for (double v : cfg.r_values) jobs.push_back({"r", v, cfg.fixed_sweep, cfg.fixed_threshold, v});
  for (double v : cfg.t_values) jobs.push_back({"t", v, cfg.fixed_sweep, v, cfg.fixed_r});

  RunOutput out;
  out.summary.columns = {"series", "axis", "a", "zeta_over_delta", "t3_bound_over_delta"};
  for (const Job& job : jobs) {
    const std::string name = "decay_" + job.series;
    ParametricModel model = cfg.model;
    model.sweep = job.sweep;
    const Dictionary dict = build_dictionary(model, grid);
    const CorrelationProfile profile = correlation_profile(model, grid);
    RecoveryConfig rc = cfg.recovery(Algorithm::KMedianOnly);
    rc.threshold = job.t;
    SceneSpec spec = cfg.scene();
    spec.dynamic_range = job.r;
    spec.magnitudes = job.r > 1.0 ? MagnitudeMode::Range : MagnitudeMode::Unit;

    // sigma <= delta over all trials at zeta = steps * delta; trials reuse their
    // scene seeds across step counts and across the points of a series.
    std::vector<TrialRecord> records(cfg.trials);
    auto passes = [&](int ticks) {
      spec.min_separation = ticks * tick;
      std::atomic<bool> ok{true};
      parallel_for(cfg.trials, cfg.threads, [&](std::size_t trial) {
        const std::uint64_t seed = trial_seed(cfg.seed, name, 0, trial);
        const Scene scene = draw_random_scene(grid, spec, stream(seed, kScene));
        const cvec y = compose_signal(dict, scene.params, scene.coefs);
        const Outcome o = timed(cfg.timing, [&] { return recover(y, op, dict, rc, stream(seed, kSolver)); });
        records[trial] = make_record(name, job.axis, trial, seed, algorithm_name(Algorithm::KMedianOnly), grid, scene, o);
        if (records[trial].failed || !(records[trial].max_component_error <= delta * (1.0 + 1e-9))) ok = false;
      });
      return ok.load();
    };

    double found = kNaN;
    if (passes(cfg.zeta_min_steps * sub)) {
      found = cfg.zeta_min_steps;
    } else if (passes(max_steps * sub)) {
      int lo = cfg.zeta_min_steps * sub;
      int hi = max_steps * sub;
      while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        if (passes(mid)) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      found = static_cast<double>(hi) / sub;
      passes(hi);  // leave the records of the reported separation
    }
    out.records.insert(out.records.end(), records.begin(), records.end());

    DecayPoint p;
    p.series = job.series;
    p.axis = job.axis;
    p.a = fit_decay(profile);
    p.zeta_steps = found;
    try {
      p.t3_steps = t3_min_separation(p.a, job.t, job.r, 1.0, delta) / delta;
    } catch (const std::exception&) {
      p.t3_steps = kNaN;
    }
    out.decay.push_back(p);
    out.summary.rows.push_back({p.series, format_number(p.axis), format_number(p.a), format_number(p.zeta_steps),
                                format_number(p.t3_steps)});
  }

  for (const char* s : {"fa", "r", "t"}) {
    Series series{s == std::string("fa") ? "zeta_vs_a" : std::string("zeta_vs_") + s, {}, {}};
    for (const auto& p : out.decay) {
      if (p.series != s || std::isnan(p.zeta_steps)) continue;
      series.x.push_back(p.series == "fa" ? p.a : p.axis);
      series.y.push_back(p.zeta_steps);
    }
    if (!series.x.empty()) out.series.push_back(std::move(series));
  }
  return out;
}

RunOutput run_compression_sweep(const ExperimentConfig& cfg) {
  const double snr = cfg.snr_db;
  return recovery_sweep(cfg, "compression", cfg.values, [snr](double kappa) { return std::pair{kappa, snr}; },
                        "kappa");
}

RunOutput run_snr_sweep(const ExperimentConfig& cfg) {
  const double kappa = cfg.kappa;
  return recovery_sweep(cfg, "snr", cfg.values, [kappa](double snr) { return std::pair{kappa, snr}; }, "snr");
}

RunOutput run_single(const ExperimentConfig& cfg) {
  const double kappa = cfg.kappa;
  const double snr = cfg.snr_db;
  return recovery_sweep(cfg, "single", {cfg.zeta}, [kappa, snr](double) { return std::pair{kappa, snr}; }, "zeta");
}

RunOutput run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case ExperimentKind::Separation: return run_separation_sweep(cfg);
    case ExperimentKind::Decay: return run_decay_sweep(cfg);
    case ExperimentKind::Compression: return run_compression_sweep(cfg);
    case ExperimentKind::Snr: return run_snr_sweep(cfg);
    case ExperimentKind::Single: return run_single(cfg);
  }
  throw std::invalid_argument("unknown experiment");
}

void write_outputs(const RunOutput& out, const std::filesystem::path& dir) {
  emit_csv(out.records, dir / "records.csv");
  emit_table(out.summary, dir / "summary.csv");
  std::vector<Series> nonempty;
  for (const auto& s : out.series) {
    if (!s.x.empty()) nonempty.push_back(s);
  }
  if (!nonempty.empty()) emit_plotdata(nonempty, dir / "plot");
}

}  // namespace emdpe
