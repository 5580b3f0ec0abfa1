#include "emdpe/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "emdpe/simplex.hpp"

namespace emdpe {

void SparseCoefVector::validate() const {
  if (support.size() != weights.size()) {
    throw std::invalid_argument("SparseCoefVector: support and weight counts differ");
  }
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i] >= length) throw std::invalid_argument("SparseCoefVector: index out of range");
    if (i > 0 && support[i] <= support[i - 1]) {
      throw std::invalid_argument("SparseCoefVector: support must be strictly increasing");
    }
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      throw std::invalid_argument("SparseCoefVector: weights must be finite and nonnegative");
    }
  }
}

double SparseCoefVector::mass() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

std::vector<double> SparseCoefVector::dense() const {
  std::vector<double> out(length, 0.0);
  for (std::size_t i = 0; i < support.size(); ++i) out[support[i]] = weights[i];
  return out;
}

SparseCoefVector make_sparse(std::size_t length, std::span<const std::size_t> indices,
                             std::span<const double> weights) {
  if (indices.size() != weights.size()) throw std::invalid_argument("make_sparse: size mismatch");
  std::vector<std::size_t> order(indices.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return indices[a] < indices[b]; });
  SparseCoefVector out;
  out.length = length;
  for (std::size_t o : order) {
    if (!out.support.empty() && out.support.back() == indices[o]) {
      out.weights.back() += weights[o];
    } else {
      out.support.push_back(indices[o]);
      out.weights.push_back(weights[o]);
    }
  }
  std::size_t keep = 0;
  for (std::size_t i = 0; i < out.support.size(); ++i) {
    if (out.weights[i] != 0.0) {
      out.support[keep] = out.support[i];
      out.weights[keep] = out.weights[i];
      ++keep;
    }
  }
  out.support.resize(keep);
  out.weights.resize(keep);
  out.validate();
  return out;
}

namespace {

bool masses_match(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max({1.0, a, b}); }

double index_distance(std::size_t a, std::size_t b) {
  return a > b ? static_cast<double>(a - b) : static_cast<double>(b - a);
}

// Balanced 1-D transport: cost from the CDF difference, plan from the
// monotone (north-west corner) coupling of the sorted supports.
EmdResult emd_balanced(const SparseCoefVector& c, const SparseCoefVector& chat) {
  EmdResult out;
  std::size_t i = 0;
  std::size_t j = 0;
  double diff = 0.0;  // CDF_c - CDF_chat just after the current position
  std::size_t pos = 0;
  bool started = false;
  while (i < c.support.size() || j < chat.support.size()) {
    std::size_t next = std::numeric_limits<std::size_t>::max();
    if (i < c.support.size()) next = std::min(next, c.support[i]);
    if (j < chat.support.size()) next = std::min(next, chat.support[j]);
    if (started) out.cost += std::abs(diff) * static_cast<double>(next - pos);
    while (i < c.support.size() && c.support[i] == next) diff += c.weights[i++];
    while (j < chat.support.size() && chat.support[j] == next) diff -= chat.weights[j++];
    pos = next;
    started = true;
  }

  std::vector<double> src(c.weights);
  std::vector<double> dst(chat.weights);
  i = 0;
  j = 0;
  while (i < src.size() && j < dst.size()) {
    const double f = std::min(src[i], dst[j]);
    if (f > 0.0) out.plan.push_back({c.support[i], chat.support[j], f});
    src[i] -= f;
    dst[j] -= f;
    if (src[i] <= dst[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

// Successive shortest paths on a small transportation network. Supplies and
// demands must balance; the dummy node absorbs the mass mismatch at zero cost.
class MinCostFlow {
 public:
  explicit MinCostFlow(std::size_t nodes) : graph_(nodes) {}

  std::size_t add_edge(std::size_t from, std::size_t to, double cap, double cost) {
    graph_[from].push_back({to, graph_[to].size(), cap, cost, 0.0});
    graph_[to].push_back({from, graph_[from].size() - 1, 0.0, -cost, 0.0});
    return graph_[from].size() - 1;
  }

  double flow_on(std::size_t from, std::size_t edge) const { return graph_[from][edge].flow; }

  void run(std::size_t s, std::size_t t, double required) {
    const std::size_t n = graph_.size();
    const double tol = 1e-13 * std::max(1.0, required);
    double pushed = 0.0;
    while (pushed < required - tol) {
      std::vector<double> dist(n, std::numeric_limits<double>::infinity());
      std::vector<std::size_t> prev_node(n, n);
      std::vector<std::size_t> prev_edge(n, 0);
      dist[s] = 0.0;
      // Bellman-Ford; the residual graph has negative reverse costs.
      for (std::size_t round = 0; round + 1 < n; ++round) {
        bool relaxed = false;
        for (std::size_t u = 0; u < n; ++u) {
          if (dist[u] == std::numeric_limits<double>::infinity()) continue;
          for (std::size_t e = 0; e < graph_[u].size(); ++e) {
            const Edge& ed = graph_[u][e];
            if (ed.cap - ed.flow <= tol) continue;
            const double nd = dist[u] + ed.cost;
            if (nd < dist[ed.to] - 1e-12) {
              dist[ed.to] = nd;
              prev_node[ed.to] = u;
              prev_edge[ed.to] = e;
              relaxed = true;
            }
          }
        }
        if (!relaxed) break;
      }
      if (prev_node[t] == n) throw std::runtime_error("emd: transport network is infeasible");
      double bottleneck = required - pushed;
      for (std::size_t v = t; v != s; v = prev_node[v]) {
        const Edge& ed = graph_[prev_node[v]][prev_edge[v]];
        bottleneck = std::min(bottleneck, ed.cap - ed.flow);
      }
      for (std::size_t v = t; v != s; v = prev_node[v]) {
        Edge& ed = graph_[prev_node[v]][prev_edge[v]];
        ed.flow += bottleneck;
        graph_[v][ed.rev].flow -= bottleneck;
      }
      pushed += bottleneck;
    }
  }

 private:
  struct Edge {
    std::size_t to;
    std::size_t rev;
    double cap;
    double cost;
    double flow;
  };
  std::vector<std::vector<Edge>> graph_;
};

EmdResult emd_unbalanced(const SparseCoefVector& c, const SparseCoefVector& chat) {
  const std::size_t n = c.support.size();
  const std::size_t m = chat.support.size();
  const double mc = c.mass();
  const double mh = chat.mass();
  const double moved = std::min(mc, mh);
  const double excess = std::abs(mc - mh);
  const bool dummy_sink = mc > mh;
  // Layout: 0 = super source, 1..n sources, n+1..n+m sinks, n+m+1 dummy, n+m+2 super sink.
  const std::size_t s = 0;
  const std::size_t dummy = n + m + 1;
  const std::size_t t = n + m + 2;
  const double big = mc + mh + 1.0;
  MinCostFlow net(n + m + 3);
  std::vector<std::vector<std::size_t>> edge_id(n, std::vector<std::size_t>(m));
  for (std::size_t i = 0; i < n; ++i) net.add_edge(s, 1 + i, c.weights[i], 0.0);
  for (std::size_t j = 0; j < m; ++j) net.add_edge(n + 1 + j, t, chat.weights[j], 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      edge_id[i][j] = net.add_edge(1 + i, n + 1 + j, big, index_distance(c.support[i], chat.support[j]));
    }
  }
  if (dummy_sink) {
    for (std::size_t i = 0; i < n; ++i) net.add_edge(1 + i, dummy, big, 0.0);
    net.add_edge(dummy, t, excess, 0.0);
  } else {
    net.add_edge(s, dummy, excess, 0.0);
    for (std::size_t j = 0; j < m; ++j) net.add_edge(dummy, n + 1 + j, big, 0.0);
  }
  net.run(s, t, std::max(mc, mh));

  EmdResult out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double f = net.flow_on(1 + i, edge_id[i][j]);
      if (f > 1e-15 * std::max(1.0, moved)) {
        out.plan.push_back({c.support[i], chat.support[j], f});
        out.cost += f * index_distance(c.support[i], chat.support[j]);
      }
    }
  }
  out.cost += excess * static_cast<double>(c.length);
  return out;
}

void check_pair(const SparseCoefVector& c, const SparseCoefVector& chat, const char* who) {
  c.validate();
  chat.validate();
  if (c.length != chat.length) throw std::invalid_argument(std::string(who) + ": length mismatch");
  if (c.support.empty() || chat.support.empty()) {
    throw std::invalid_argument(std::string(who) + ": empty vector");
  }
}

}  // namespace

EmdResult emd(const SparseCoefVector& c, const SparseCoefVector& chat) {
  check_pair(c, chat, "emd");
  if (masses_match(c.mass(), chat.mass())) return emd_balanced(c, chat);
  return emd_unbalanced(c, chat);
}

double emd_lp_oracle(const SparseCoefVector& c, const SparseCoefVector& chat) {
  check_pair(c, chat, "emd_lp_oracle");
  const std::size_t n = c.support.size();
  const std::size_t m = chat.support.size();
  if (n > 8 || m > 8) throw std::invalid_argument("emd_lp_oracle: supports limited to 8 entries");
  const double mc = c.mass();
  const double mh = chat.mass();

  // Variables: f_ij (n*m), then one slack per source and per sink.
  const auto nv = static_cast<Eigen::Index>(n * m + n + m);
  const auto nc = static_cast<Eigen::Index>(n + m + 1);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nc, nv);
  Eigen::VectorXd b(nc);
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(nv);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const auto v = static_cast<Eigen::Index>(i * m + j);
      a(static_cast<Eigen::Index>(i), v) = 1.0;
      a(static_cast<Eigen::Index>(n + j), v) = 1.0;
      a(nc - 1, v) = 1.0;
      cost(v) = index_distance(c.support[i], chat.support[j]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n * m + i)) = 1.0;
    b(static_cast<Eigen::Index>(i)) = c.weights[i];
  }
  for (std::size_t j = 0; j < m; ++j) {
    a(static_cast<Eigen::Index>(n + j), static_cast<Eigen::Index>(n * m + n + j)) = 1.0;
    b(static_cast<Eigen::Index>(n + j)) = chat.weights[j];
  }
  b(nc - 1) = std::min(mc, mh);
  const lp::Solution sol = lp::solve_standard_form(a, b, cost);
  if (!sol.feasible) throw std::runtime_error("emd_lp_oracle: LP infeasible");
  const double penalty = masses_match(mc, mh) ? 0.0 : std::abs(mc - mh) * static_cast<double>(c.length);
  return sol.objective + penalty;
}

double pee(std::span<const double> theta, std::span<const double> theta_hat) {
  if (theta.size() != theta_hat.size()) throw std::invalid_argument("pee: cardinality mismatch");
  if (theta.empty()) throw std::invalid_argument("pee: empty parameter sets");
  std::vector<double> a(theta.begin(), theta.end());
  std::vector<double> b(theta_hat.begin(), theta_hat.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += std::abs(a[i] - b[i]);
  return total;
}

double max_matched_error(std::span<const double> theta, std::span<const double> theta_hat) {
  if (theta.size() != theta_hat.size()) {
    throw std::invalid_argument("max_matched_error: cardinality mismatch");
  }
  std::vector<double> a(theta.begin(), theta.end());
  std::vector<double> b(theta_hat.begin(), theta_hat.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

SparseCoefVector emd_sparse_approx(std::span<const double> v, std::span<const std::size_t> support) {
  if (support.empty()) throw std::invalid_argument("emd_sparse_approx: empty support");
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i] >= v.size()) throw std::invalid_argument("emd_sparse_approx: index out of range");
    if (i > 0 && support[i] <= support[i - 1]) {
      throw std::invalid_argument("emd_sparse_approx: support must be strictly increasing");
    }
  }
  SparseCoefVector out;
  out.length = v.size();
  out.support.assign(support.begin(), support.end());
  out.weights.assign(support.size(), 0.0);
  std::size_t cell = 0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (!(v[j] >= 0.0)) throw std::invalid_argument("emd_sparse_approx: v must be nonnegative");
    // Move on while the next support point is strictly closer.
    while (cell + 1 < support.size() &&
           index_distance(j, support[cell + 1]) < index_distance(j, support[cell])) {
      ++cell;
    }
    out.weights[cell] += v[j];
  }
  return out;
}

Theorem1Check theorem1_check(const SparseCoefVector& c, const SparseCoefVector& chat, double delta) {
  check_pair(c, chat, "theorem1_check");
  if (c.support.size() != chat.support.size()) {
    throw std::invalid_argument("theorem1_check: unequal sparsity");
  }
  if (!(delta > 0.0)) throw std::invalid_argument("theorem1_check: delta must be positive");
  double c_min = std::numeric_limits<double>::infinity();
  for (double w : c.weights) if (w > 0.0) c_min = std::min(c_min, w);
  for (double w : chat.weights) if (w > 0.0) c_min = std::min(c_min, w);
  if (!std::isfinite(c_min)) throw std::invalid_argument("theorem1_check: no nonzero entries");

  std::vector<double> a(c.support.size());
  std::vector<double> b(chat.support.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = static_cast<double>(c.support[i]);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = static_cast<double>(chat.support[i]);

  Theorem1Check out;
  out.lhs = delta * pee(a, b);
  out.rhs = delta / c_min * emd(c, chat).cost;
  out.holds = out.lhs <= out.rhs + 1e-9 * std::max(1.0, out.rhs);
  return out;
}

}  // namespace emdpe
