#include "emdpe/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace emdpe::lp {

namespace {

constexpr double kTol = 1e-11;

void pivot(Eigen::MatrixXd& t, std::vector<Eigen::Index>& basis, Eigen::Index row, Eigen::Index col) {
  t.row(row) /= t(row, col);
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    if (i != row && t(i, col) != 0.0) t.row(i) -= t(i, col) * t.row(row);
  }
  basis[static_cast<std::size_t>(row)] = col;
}

// Bland's rule: lowest-index improving column, lowest-index basic variable on ratio ties.
void iterate(Eigen::MatrixXd& t, std::vector<Eigen::Index>& basis, Eigen::Index allowed_cols) {
  const Eigen::Index m = t.rows() - 1;
  const Eigen::Index rhs = t.cols() - 1;
  for (;;) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < allowed_cols; ++j) {
      if (t(m, j) < -kTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return;
    Eigen::Index leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (t(i, enter) > kTol) {
        const double ratio = t(i, rhs) / t(i, enter);
        if (ratio < best - kTol ||
            (std::abs(ratio - best) <= kTol && basis[static_cast<std::size_t>(i)] <
                                                   basis[static_cast<std::size_t>(leave)])) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) throw std::runtime_error("lp: unbounded problem");
    pivot(t, basis, leave, enter);
  }
}

}  // namespace

Solution solve_standard_form(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                             const Eigen::VectorXd& c) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (b.size() != m || c.size() != n) throw std::invalid_argument("lp: dimension mismatch");

  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
  const Eigen::Index rhs = n + m;
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    const double sign = b(i) < 0.0 ? -1.0 : 1.0;
    t.row(i).head(n) = sign * a.row(i);
    t(i, n + i) = 1.0;
    t(i, rhs) = sign * b(i);
    basis[static_cast<std::size_t>(i)] = n + i;
  }

  // Phase 1: minimize the sum of artificials.
  for (Eigen::Index j = 0; j < n; ++j) t(m, j) = -t.col(j).head(m).sum();
  t(m, rhs) = -t.col(rhs).head(m).sum();
  iterate(t, basis, n + m);

  Solution sol;
  const double scale = 1.0 + b.cwiseAbs().sum();
  if (-t(m, rhs) > 1e-9 * scale) return sol;

  for (Eigen::Index i = 0; i < m; ++i) {
    if (basis[static_cast<std::size_t>(i)] < n) continue;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(t(i, j)) > kTol) {
        pivot(t, basis, i, j);
        break;
      }
    }
  }

  // Phase 2 on the original columns only.
  t.row(m).setZero();
  t.row(m).head(n) = c.transpose();
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index bi = basis[static_cast<std::size_t>(i)];
    if (bi < n && c(bi) != 0.0) t.row(m) -= c(bi) * t.row(i);
  }
  iterate(t, basis, n);

  sol.feasible = true;
  sol.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index bi = basis[static_cast<std::size_t>(i)];
    if (bi < n) sol.x(bi) = t(i, rhs);
  }
  sol.objective = c.dot(sol.x);
  return sol;
}

}  // namespace emdpe::lp
