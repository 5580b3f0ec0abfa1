#include "emdpe/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace emdpe {

ParameterGrid::ParameterGrid(double theta_min, double delta, std::size_t count)
    : theta_min_(theta_min), delta_(delta), count_(count) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("ParameterGrid: delta must be positive and finite");
  }
  if (count == 0) {
    throw std::invalid_argument("ParameterGrid: empty grid");
  }
}

std::vector<double> ParameterGrid::points() const {
  std::vector<double> out(count_);
  for (std::size_t i = 0; i < count_; ++i) out[i] = at(i);
  return out;
}

std::size_t ParameterGrid::nearest_index(double theta) const {
  const double u = (theta - theta_min_) / delta_;
  if (u <= 0.0) return 0;
  const double last = static_cast<double>(count_ - 1);
  if (u >= last) return count_ - 1;
  // Ties go down: ceil(u - 0.5).
  return static_cast<std::size_t>(std::ceil(u - 0.5));
}

bool ParameterGrid::contains(double theta) const {
  const double tol = 1e-9 * delta_;
  return theta >= theta_min_ - tol && theta <= theta_max() + tol;
}

ParameterGrid build_grid(double theta_min, double theta_max, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("build_grid: delta must be positive");
  }
  if (!(theta_max - theta_min >= delta * (1.0 - 1e-9))) {
    throw std::invalid_argument("build_grid: range must span at least one step");
  }
  const double steps = std::round((theta_max - theta_min) / delta);
  return ParameterGrid(theta_min, delta, static_cast<std::size_t>(steps) + 1);
}

}  // namespace emdpe
