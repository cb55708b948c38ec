#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pilotwave {

/// Uniform 1D mesh including both end points.
class Grid1D {
 public:
  static constexpr std::size_t kMinPoints = 8;

  Grid1D(double x_min, double x_max, std::size_t n_points);

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  std::size_t size() const noexcept { return n_; }
  double dx() const noexcept { return dx_; }
  double length() const noexcept { return x_max_ - x_min_; }

  double x(std::size_t i) const noexcept { return x_min_ + static_cast<double>(i) * dx_; }
  std::vector<double> points() const;

  bool contains(double x) const noexcept { return x >= x_min_ && x <= x_max_; }

  /// Index of the cell [x_i, x_{i+1}] holding x, clamped to [0, n-2].
  std::size_t cell_of(double x) const noexcept;

  friend bool operator==(const Grid1D&, const Grid1D&) = default;

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
  double dx_;
};

/// Trapezoid rule over uniformly spaced samples.
double trapezoid(std::span<const double> values, double dx) noexcept;

}  // namespace pilotwave
