#pragma once

#include <vector>

#include <Eigen/Dense>

namespace emdpe::lp {

struct Solution {
  bool feasible = false;
  double objective = 0.0;
  Eigen::VectorXd x;
};

/// min c^T x  s.t.  A x = b, x >= 0. Dense two-phase tableau simplex with
/// Bland's rule; meant for small problems.
Solution solve_standard_form(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                             const Eigen::VectorXd& c);

}  // namespace emdpe::lp
