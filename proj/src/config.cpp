#include "emdpe/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <type_traits>
#include <sstream>
#include <stdexcept>

#include <boost/algorithm/string/case_conv.hpp>
#include <boost/algorithm/string/classification.hpp>
#include <boost/algorithm/string/split.hpp>
#include <boost/algorithm/string/trim.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace emdpe {

namespace pt = boost::property_tree;

const char* experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Separation: return "separation";
    case ExperimentKind::Decay: return "decay";
    case ExperimentKind::Compression: return "compression";
    case ExperimentKind::Snr: return "snr";
    case ExperimentKind::Single: return "single";
  }
  return "?";
}

ExperimentKind parse_experiment(const std::string& name) {
  const std::string s = boost::algorithm::to_lower_copy(name);
  if (s == "separation") return ExperimentKind::Separation;
  if (s == "decay") return ExperimentKind::Decay;
  if (s == "compression") return ExperimentKind::Compression;
  if (s == "snr") return ExperimentKind::Snr;
  if (s == "single") return ExperimentKind::Single;
  throw std::invalid_argument("unknown experiment: " + name);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(", \t"), boost::token_compress_on);
  std::vector<double> out;
  for (auto& p : parts) {
    boost::algorithm::trim(p);
    if (p.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(p, &used);
    if (used != p.size()) throw std::invalid_argument("not a number: " + p);
    out.push_back(v);
  }
  return out;
}

namespace {

double real_or(const pt::ptree& t, const char* key, double fallback) {
  const auto v = t.get_optional<std::string>(key);
  if (!v) return fallback;
  const auto list = parse_list(*v);
  if (list.size() != 1) throw std::invalid_argument(std::string("expected one number for ") + key);
  return list[0];
}

template <class T>
T int_or(const pt::ptree& t, const char* key, T fallback) {
  const auto v = t.get_optional<std::string>(key);
  if (!v) return fallback;
  const std::string s = boost::algorithm::trim_copy(*v);
  const auto bad = [&] { return std::invalid_argument(std::string("expected an integer for ") + key + ": " + s); };
  if (s.empty() || (std::is_unsigned_v<T> && s[0] == '-')) throw bad();
  std::size_t used = 0;
  try {
    if constexpr (std::is_unsigned_v<T>) {
      const unsigned long long x = std::stoull(s, &used);
      if (used != s.size() || x > std::numeric_limits<T>::max()) throw bad();
      return static_cast<T>(x);
    } else {
      const long long x = std::stoll(s, &used);
      if (used != s.size() || x < std::numeric_limits<T>::min() || x > std::numeric_limits<T>::max()) throw bad();
      return static_cast<T>(x);
    }
  } catch (const std::logic_error&) {
    throw bad();
  }
}

bool bool_or(const pt::ptree& t, const char* key, bool fallback) {
  const auto v = t.get_optional<std::string>(key);
  if (!v) return fallback;
  const std::string s = boost::algorithm::to_lower_copy(boost::algorithm::trim_copy(*v));
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument(std::string("expected a boolean for ") + key);
}

std::string lower_or(const pt::ptree& t, const char* key, const std::string& fallback) {
  return boost::algorithm::to_lower_copy(boost::algorithm::trim_copy(t.get<std::string>(key, fallback)));
}

void reject_unknown(const pt::ptree& root) {
  static const std::vector<std::pair<std::string, std::vector<std::string>>> known = {
      {"experiment", {"kind", "trials", "seed", "threads"}},
      {"model", {"kind", "n", "chirp_length", "start_freq", "sweep", "sample_rate", "window"}},
      {"grid", {"theta_min", "theta_max", "delta"}},
      {"scene", {"k", "zeta", "epsilon", "r", "magnitudes", "phases", "on_grid", "exact_separation"}},
      {"recovery", {"algorithms", "threshold", "nu", "max_outer_iter", "kmedian_restarts", "kmedian_max_iter",
                    "kappa", "snr", "operator"}},
      {"sweep", {"values", "r_values", "t_values", "fixed_sweep", "fixed_threshold", "fixed_r", "zeta_min_steps",
                 "zeta_max_steps", "zeta_subdivision"}},
  };
  for (const auto& [section, body] : root) {
    const auto it = std::find_if(known.begin(), known.end(), [&](const auto& k) { return k.first == section; });
    if (it == known.end()) throw std::invalid_argument("unknown config section [" + section + "]");
    for (const auto& [key, unused] : body) {
      (void)unused;
      if (std::find(it->second.begin(), it->second.end(), key) == it->second.end()) {
        throw std::invalid_argument("unknown key " + section + "." + key);
      }
    }
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree root;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  reject_unknown(root);
  const pt::ptree empty;
  const auto& ex = root.get_child("experiment", empty);
  const auto& mo = root.get_child("model", empty);
  const auto& gr = root.get_child("grid", empty);
  const auto& sc = root.get_child("scene", empty);
  const auto& re = root.get_child("recovery", empty);
  const auto& sw = root.get_child("sweep", empty);

  ExperimentConfig c;
  c.experiment = parse_experiment(ex.get<std::string>("kind", "single"));
  c.trials = int_or<std::size_t>(ex, "trials", c.trials);
  c.seed = int_or<std::uint64_t>(ex, "seed", c.seed);
  c.threads = int_or<unsigned>(ex, "threads", c.threads);

  const std::string model = lower_or(mo, "kind", "fe");
  if (model == "tde" || model == "chirp") {
    const std::string window = lower_or(mo, "window", "hann");
    if (window != "hann" && window != "edge") throw std::invalid_argument("model.window must be hann or edge");
    c.model = ParametricModel::chirp(int_or<Eigen::Index>(mo, "n", 500), real_or(mo, "chirp_length", 1e-6),
                                     real_or(mo, "start_freq", 1e6), real_or(mo, "sweep", 20e6),
                                     real_or(mo, "sample_rate", 50e6),
                                     window == "hann" ? ChirpWindow::Hann : ChirpWindow::EdgePeaked);
  } else if (model == "fe" || model == "exponential") {
    c.model = ParametricModel::complex_exponential(int_or<Eigen::Index>(mo, "n", 1000));
  } else {
    throw std::invalid_argument("model.kind must be tde or fe");
  }

  c.theta_min = real_or(gr, "theta_min", c.theta_min);
  c.theta_max = real_or(gr, "theta_max", c.theta_max);
  c.delta = real_or(gr, "delta", c.delta);

  c.k = int_or<std::size_t>(sc, "k", c.k);
  c.zeta = real_or(sc, "zeta", c.zeta);
  c.epsilon = real_or(sc, "epsilon", c.epsilon);
  c.r = real_or(sc, "r", c.r);
  const std::string mags = lower_or(sc, "magnitudes", "unit");
  if (mags == "unit") {
    c.magnitudes = MagnitudeMode::Unit;
  } else if (mags == "range") {
    c.magnitudes = MagnitudeMode::Range;
  } else {
    throw std::invalid_argument("scene.magnitudes must be unit or range");
  }
  const std::string phases = lower_or(sc, "phases", "uniform");
  if (phases == "uniform") {
    c.phases = PhaseMode::Uniform;
  } else if (phases == "zero") {
    c.phases = PhaseMode::Zero;
  } else {
    throw std::invalid_argument("scene.phases must be uniform or zero");
  }
  c.on_grid = bool_or(sc, "on_grid", c.on_grid);
  c.exact_separation = bool_or(sc, "exact_separation", c.exact_separation);

  if (const auto algs = re.get_optional<std::string>("algorithms")) {
    std::vector<std::string> parts;
    boost::split(parts, *algs, boost::is_any_of(", \t"), boost::token_compress_on);
    c.algorithms.clear();
    for (auto& p : parts) {
      boost::algorithm::trim(p);
      if (!p.empty()) c.algorithms.push_back(parse_algorithm(p));
    }
  }
  c.threshold = real_or(re, "threshold", c.threshold);
  c.nu = real_or(re, "nu", c.nu);
  c.max_outer_iter = int_or<int>(re, "max_outer_iter", c.max_outer_iter);
  c.kmedian.restarts = int_or<int>(re, "kmedian_restarts", c.kmedian.restarts);
  c.kmedian.max_iter = int_or<int>(re, "kmedian_max_iter", c.kmedian.max_iter);
  const std::string sensing = lower_or(re, "operator", "gaussian");
  if (sensing == "gaussian") {
    c.sensing = OperatorKind::GaussianDense;
  } else if (sensing == "subsample") {
    c.sensing = OperatorKind::RowSubsampledIdentity;
  } else {
    throw std::invalid_argument("recovery.operator must be gaussian or subsample");
  }
  c.kappa = real_or(re, "kappa", c.kappa);
  c.snr_db = real_or(re, "snr", c.snr_db);

  if (const auto v = sw.get_optional<std::string>("values")) c.values = parse_list(*v);
  if (const auto v = sw.get_optional<std::string>("r_values")) c.r_values = parse_list(*v);
  if (const auto v = sw.get_optional<std::string>("t_values")) c.t_values = parse_list(*v);
  c.fixed_sweep = real_or(sw, "fixed_sweep", c.fixed_sweep);
  c.fixed_threshold = real_or(sw, "fixed_threshold", c.fixed_threshold);
  c.fixed_r = real_or(sw, "fixed_r", c.fixed_r);
  c.zeta_min_steps = int_or<int>(sw, "zeta_min_steps", c.zeta_min_steps);
  c.zeta_max_steps = int_or<int>(sw, "zeta_max_steps", c.zeta_max_steps);
  c.zeta_subdivision = int_or<int>(sw, "zeta_subdivision", c.zeta_subdivision);

  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

ParameterGrid ExperimentConfig::grid() const { return build_grid(theta_min, theta_max, delta); }

SceneSpec ExperimentConfig::scene() const {
  SceneSpec s;
  s.k = k;
  s.min_separation = zeta;
  s.off_bound = epsilon;
  s.dynamic_range = r;
  s.magnitudes = magnitudes;
  s.phases = phases;
  s.on_grid = on_grid;
  s.exact_separation = exact_separation;
  return s;
}

RecoveryConfig ExperimentConfig::recovery(Algorithm algorithm) const {
  RecoveryConfig rc;
  rc.k = k;
  rc.threshold = threshold;
  rc.nu = nu;
  rc.max_outer_iter = max_outer_iter;
  rc.algorithm = algorithm;
  rc.kmedian = kmedian;
  return rc;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument("config: " + m); };
  if (trials < 1) fail("trials must be at least 1");
  if (!(delta > 0.0)) fail("grid.delta must be positive");
  if (!(theta_max - theta_min >= delta)) fail("grid range must cover at least one step");
  if (k < 1) fail("scene.k must be at least 1");
  if (!(r >= 1.0)) fail("scene.r must be at least 1");
  if (zeta < 0.0 || epsilon < 0.0) fail("scene.zeta and scene.epsilon must be nonnegative");
  if (algorithms.empty()) fail("recovery.algorithms must not be empty");
  recovery(algorithms.front()).validate();
  if (!(kappa > 0.0 && kappa <= 1.0)) fail("recovery.kappa must lie in (0, 1]");
  if (kmedian.restarts < 1 || kmedian.max_iter < 1) fail("k-median restarts and iterations must be positive");
  const bool needs_axis = experiment == ExperimentKind::Separation || experiment == ExperimentKind::Compression ||
                          experiment == ExperimentKind::Snr;
  if (needs_axis && values.empty()) fail("sweep.values must not be empty");
  if (experiment == ExperimentKind::Decay) {
    if (model.kind != ModelKind::ChirpTDE) fail("the decay sweep needs the tde model");
    if (values.empty() && r_values.empty() && t_values.empty()) fail("decay sweep has no axis");
    if (zeta_min_steps < 1 || zeta_max_steps <= zeta_min_steps) fail("invalid zeta bisection range");
    if (zeta_subdivision < 1) fail("sweep.zeta_subdivision must be >= 1");
  }
  if (experiment == ExperimentKind::Compression) {
    for (double v : values) {
      if (!(v > 0.0 && v <= 1.0)) fail("compression rates must lie in (0, 1]");
    }
  }
  if (experiment == ExperimentKind::Separation) {
    for (double v : values) {
      if (!(v >= 0.0)) fail("separations must be nonnegative");
    }
  }
}

}  // namespace emdpe
