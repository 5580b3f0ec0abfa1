// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance [config_dir] [output_dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "emdpe/clustering.hpp"
#include "emdpe/harness.hpp"
#include "emdpe/rng.hpp"
#include "emdpe/transport.hpp"

#ifndef EMDPE_CONFIG_DIR
#define EMDPE_CONFIG_DIR "configs"
#endif

using namespace emdpe;
namespace fs = std::filesystem;

namespace {

fs::path g_configs = EMDPE_CONFIG_DIR;
fs::path g_out = "acceptance_out";
std::map<std::string, std::string> g_bytes;  // config -> csv bytes of the first run
int g_failed = 0;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("criterion %d %-28s %s  %s\n", id, name, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failed;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string output_bytes(const fs::path& dir) {
  return slurp(dir / "records.csv") + slurp(dir / "summary.csv");
}

// Runs a config, writes its outputs and keeps the bytes for the determinism check.
RunOutput run_config(const std::string& name) {
  const ExperimentConfig cfg = load_config(g_configs / (name + ".ini"));
  RunOutput out = run_experiment(cfg);
  const fs::path dir = g_out / name;
  fs::remove_all(dir);
  write_outputs(out, dir);
  g_bytes[name] = output_bytes(dir);
  return out;
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t q = i; q <= j; ++q) r[idx[q]] = avg;
    i = j + 1;
  }
  return r;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) { return pearson(ranks(x), ranks(y)); }

SparseCoefVector random_sparse(Rng& rng, std::size_t length, std::size_t k, double r) {
  std::uniform_int_distribution<std::size_t> pick(0, length - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::size_t> idx;
  while (idx.size() < k) {
    const std::size_t i = pick(rng);
    if (std::find(idx.begin(), idx.end(), i) == idx.end()) idx.push_back(i);
  }
  std::vector<double> w(k);
  for (auto& x : w) x = std::pow(r, u(rng));
  return make_sparse(length, idx, w);
}

void scale_to(SparseCoefVector& v, double mass) {
  const double s = mass / v.mass();
  for (auto& w : v.weights) w *= s;
}

// ---------------------------------------------------------------------------

void oracle_equivalence() {
  Stopwatch sw;
  Rng rng(derive_seed(1, {1}));
  std::uniform_int_distribution<std::size_t> count(1, 8);
  double worst_emd = 0.0;
  for (int i = 0; i < 500; ++i) {
    auto a = random_sparse(rng, 30, count(rng), 10.0);
    auto b = random_sparse(rng, 30, count(rng), 10.0);
    scale_to(b, a.mass());
    const double e = emd(a, b).cost;
    const double lp = emd_lp_oracle(a, b);
    worst_emd = std::max(worst_emd, std::abs(e - lp) / std::max(1.0, lp));
  }

  std::uniform_real_distribution<double> u(0.0, 100.0);
  double worst_pee = 0.0;
  for (int i = 0; i < 500; ++i) {
    const std::size_t k = 1 + static_cast<std::size_t>(i % 6);
    std::vector<double> t(k), h(k);
    for (auto& x : t) x = u(rng);
    for (auto& x : h) x = u(rng);
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best = INFINITY;
    do {
      double s = 0.0;
      for (std::size_t j = 0; j < k; ++j) s += std::abs(t[j] - h[perm[j]]);
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    worst_pee = std::max(worst_pee, std::abs(pee(t, h) - best) / std::max(1.0, best));
  }
  const double secs = sw.seconds();
  const bool ok = worst_emd <= 1e-9 && worst_pee <= 1e-9 && secs < 10.0;
  report(1, "oracle equivalence", ok,
         "max |emd-lp| " + fmt("%.2e", worst_emd) + ", max |pee-brute| " + fmt("%.2e", worst_pee) + ", " +
             fmt("%.1f s", secs));
}

void theorem1_suite() {
  Stopwatch sw;
  Rng rng(derive_seed(1, {2}));
  const std::vector<double> ranges{1.0, 2.0, 5.0, 10.0, 100.0};
  std::map<double, int> violations;
  int total = 0;
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const std::size_t k = 1 + static_cast<std::size_t>(i % 6);
    const double r = ranges[static_cast<std::size_t>(i / 6) % ranges.size()];
    const auto c = random_sparse(rng, 200, k, r);
    const auto ch = random_sparse(rng, 200, k, r);
    const auto t = theorem1_check(c, ch, 0.02);
    if (!t.holds) {
      ++violations[r];
      ++total;
      worst = std::max(worst, t.lhs / t.rhs);
    }
  }

  bool equality = true;
  for (std::size_t i = 0; i < 200; i += 7) {
    for (std::size_t j = 0; j < 200; j += 11) {
      const auto t = theorem1_check(make_sparse(200, std::vector<std::size_t>{i}, std::vector<double>{2.5}),
                                    make_sparse(200, std::vector<std::size_t>{j}, std::vector<double>{2.5}), 0.02);
      equality = equality && std::abs(t.lhs - t.rhs) <= 1e-12 * std::max(1.0, t.rhs);
    }
  }
  const double secs = sw.seconds();
  std::string detail = std::to_string(total) + "/10000 violations (by r:";
  for (double r : ranges) detail += " " + fmt("%g", r) + "=" + std::to_string(violations[r]);
  detail += "), worst lhs/rhs " + fmt("%.3f", worst) + ", single-component equality " + (equality ? "yes" : "no") +
            ", " + fmt("%.1f s", secs);
  report(2, "theorem 1 property suite", total == 0 && equality && secs < 30.0, detail);
}

void clustering_correctness() {
  Rng rng(derive_seed(1, {3}));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> kk(1, 6);
  int monotone_violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 20 + static_cast<std::size_t>(i % 80);
    std::vector<std::size_t> pos(n);
    std::iota(pos.begin(), pos.end(), std::size_t{0});
    std::vector<double> w(n);
    for (auto& x : w) x = u(rng) < 0.3 ? u(rng) * 5.0 : u(rng) * 0.1;
    const std::size_t k = kk(rng);
    std::vector<std::size_t> init;
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    while (init.size() < k) {
      const auto p = pick(rng);
      if (std::find(init.begin(), init.end(), p) == init.end()) init.push_back(p);
    }
    std::sort(init.begin(), init.end());
    const auto run = lloyd(pos, w, init, 100);
    for (std::size_t t = 1; t < run.objective_trace.size(); ++t) {
      if (run.objective_trace[t] > run.objective_trace[t - 1] + 1e-12 * std::max(1.0, run.objective_trace[t - 1])) {
        ++monotone_violations;
        break;
      }
    }
  }

  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 10 + static_cast<std::size_t>(i % 90);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng) < 0.5 ? u(rng) : 0.0;
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::vector<std::size_t> s;
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    const std::size_t k = kk(rng);
    while (s.size() < k) {
      const auto p = pick(rng);
      if (std::find(s.begin(), s.end(), p) == s.end()) s.push_back(p);
    }
    std::sort(s.begin(), s.end());
    const double obj = kmedian_objective(v, s);
    const double e = emd(make_sparse(n, all, v), emd_sparse_approx(v, s)).cost;
    worst = std::max(worst, std::abs(obj - e) / std::max(1.0, e));
  }
  report(3, "clustering correctness", monotone_violations == 0 && worst <= 1e-9,
         std::to_string(monotone_violations) + "/1000 non-monotone Lloyd runs, max |objective-emd| " +
             fmt("%.2e", worst));
}

void noiseless_recovery() {
  Stopwatch sw;
  const auto out = run_config("noiseless_tde");
  const double delta = load_config(g_configs / "noiseless_tde.ini").delta;
  std::map<std::string, int> exact;
  for (const auto& r : out.records) {
    if (!r.failed && r.pee_total <= 1e-6 * delta) ++exact[r.algorithm];
  }
  const double secs = sw.seconds();
  const bool ok = exact["csp"] >= 95 && exact["bsp"] >= 95 && secs < 300.0;
  report(4, "noiseless recovery", ok,
         "PEE = 0 in csp " + std::to_string(exact["csp"]) + "/100, bsp " + std::to_string(exact["bsp"]) +
             "/100, " + fmt("%.1f s", secs));
}

struct Linearity {
  double r2 = NAN;
  std::size_t points = 0;
  double min_steps = INFINITY;  // minimal zeta / delta with sigma <= delta
  double axis_max = 0.0;        // largest zeta / delta tested
};

Linearity linearity(const std::string& name) {
  const auto out = run_config(name);
  const double delta = load_config(g_configs / (name + ".ini")).delta;
  Linearity l;
  std::vector<double> x, y;
  for (const auto& p : out.separation) {
    l.axis_max = std::max(l.axis_max, p.zeta / delta);
    if (p.sigma > delta) {
      x.push_back(p.lambda_zeta);
      y.push_back(p.lambda_sigma);
    } else {
      l.min_steps = std::min(l.min_steps, p.zeta / delta);
    }
  }
  l.points = x.size();
  if (x.size() >= 3) {
    const double r = pearson(x, y);
    l.r2 = r * r;
  }
  return l;
}

void separation_linearity() {
  Stopwatch sw;
  const Linearity tde = linearity("separation_tde");
  const Linearity fe = linearity("separation_fe");
  const double secs = sw.seconds();
  // an FE curve that never reaches sigma <= delta has its minimum beyond the axis
  const double fe_min = std::isfinite(fe.min_steps) ? fe.min_steps : fe.axis_max;
  const bool order = std::isfinite(tde.min_steps) && fe_min > tde.min_steps;
  const bool ok = tde.r2 >= 0.9 && fe.r2 >= 0.9 && order && secs < 1800.0;
  std::string fe_min_text = std::isfinite(fe.min_steps) ? fmt("%g", fe.min_steps) : "> " + fmt("%g", fe.axis_max);
  report(5, "separation linearity", ok,
         "R2 tde " + fmt("%.3f", tde.r2) + " (" + std::to_string(tde.points) + " pts), fe " + fmt("%.3f", fe.r2) +
             " (" + std::to_string(fe.points) + " pts); min zeta/delta tde " + fmt("%g", tde.min_steps) + ", fe " +
             fe_min_text + ", " + fmt("%.1f s", secs));
}

void decay_trends() {
  Stopwatch sw;
  const auto out = run_config("decay_tde");
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> s;
  for (const auto& p : out.decay) {
    if (std::isnan(p.zeta_steps)) continue;
    auto& [x, y] = s[p.series];
    x.push_back(p.series == "fa" ? p.a : p.axis);
    y.push_back(p.zeta_steps);
  }
  auto rho = [&](const std::string& k) {
    const auto& [x, y] = s[k];
    return x.size() >= 5 ? spearman(x, y) : NAN;
  };
  const double ra = rho("fa"), rr = rho("r"), rt = rho("t");
  const double secs = sw.seconds();
  const bool ok = ra <= -0.9 && rr >= 0.9 && rt <= -0.9 && secs < 1800.0;
  report(6, "decay trends", ok,
         "spearman a " + fmt("%.3f", ra) + " (" + std::to_string(s["fa"].first.size()) + " pts), r " +
             fmt("%.3f", rr) + " (" + std::to_string(s["r"].first.size()) + "), t " + fmt("%.3f", rt) + " (" +
             std::to_string(s["t"].first.size()) + "), " + fmt("%.1f s", secs));
}

void parity() {
  Stopwatch sw;
  bool ok = true;
  std::string detail;
  for (const char* name : {"compression_tde", "snr_tde", "compression_fe", "snr_fe"}) {
    const auto out = run_config(name);
    std::map<double, std::map<std::string, MeanPoint>> by_axis;
    for (const auto& m : out.means) by_axis[m.axis][m.algorithm] = m;
    double worst = 1.0;
    for (auto& [axis, algs] : by_axis) {
      const auto& c = algs["csp"];
      const auto& b = algs["bsp"];
      double ratio = INFINITY;
      if (c.failures == 0 && b.failures == 0 && std::isfinite(c.mean_pee_avg) && std::isfinite(b.mean_pee_avg)) {
        const double hi = std::max(c.mean_pee_avg, b.mean_pee_avg);
        const double lo = std::min(c.mean_pee_avg, b.mean_pee_avg);
        ratio = hi == 0.0 ? 1.0 : hi / lo;
      }
      worst = std::max(worst, ratio);
    }
    ok = ok && worst <= 2.0;
    detail += std::string(name) + " " + fmt("%.3g", worst) + "x; ";
  }
  const double secs = sw.seconds();
  report(7, "compression/snr parity", ok, "worst csp/bsp ratio: " + detail + fmt("%.1f s", secs));
}

void determinism() {
  bool ok = !g_bytes.empty();
  std::string detail;
  for (const auto& [name, bytes] : g_bytes) {
    ExperimentConfig cfg = load_config(g_configs / (name + ".ini"));
    cfg.threads = 3;  // a different worker count must not change the output
    const fs::path dir = g_out / (name + "_rerun");
    fs::remove_all(dir);
    write_outputs(run_experiment(cfg), dir);
    const bool same = output_bytes(dir) == bytes;
    ok = ok && same;
    if (!same) detail += name + " differs; ";
  }
  report(8, "determinism", ok,
         std::to_string(g_bytes.size()) + " configs rerun, " + (detail.empty() ? "all byte-identical" : detail));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_configs = argv[1];
  if (argc > 2) g_out = argv[2];
  fs::create_directories(g_out);

  oracle_equivalence();
  theorem1_suite();
  clustering_correctness();
  noiseless_recovery();
  separation_linearity();
  decay_trends();
  parity();
  determinism();

  std::printf("%d of 8 criteria failed\n", g_failed);
  return g_failed == 0 ? 0 : 1;
}
