#pragma once

#include <cstddef>
#include <vector>

namespace emdpe {

/// Uniform sampling theta_min + i*delta, i = 0..size()-1, of a 1-D parameter
/// interval. Indices are zero-based throughout the library.
class ParameterGrid {
 public:
  /// Throws std::invalid_argument unless delta > 0 and count >= 1.
  ParameterGrid(double theta_min, double delta, std::size_t count);

  double theta_min() const { return theta_min_; }
  double theta_max() const { return at(count_ - 1); }
  double delta() const { return delta_; }
  std::size_t size() const { return count_; }

  double at(std::size_t i) const { return theta_min_ + static_cast<double>(i) * delta_; }
  std::vector<double> points() const;

  /// Nearest grid index, clamped to the grid. Ties round toward the lower index.
  std::size_t nearest_index(double theta) const;
  bool contains(double theta) const;

  bool operator==(const ParameterGrid&) const = default;

 private:
  double theta_min_;
  double delta_;
  std::size_t count_;
};

/// Grid over [theta_min, theta_max] with step delta; the point count is
/// round((theta_max - theta_min) / delta) + 1, so at least two points.
ParameterGrid build_grid(double theta_min, double theta_max, double delta);

}  // namespace emdpe
