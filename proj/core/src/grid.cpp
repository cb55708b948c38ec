#include "pilotwave/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pilotwave/error.hpp"

namespace pilotwave {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::GridTooNarrow: return "GridTooNarrow";
    case ErrorKind::ZeroNorm: return "ZeroNorm";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::UnsupportedState: return "UnsupportedState";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::EmptyEnsemble: return "EmptyEnsemble";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::Nonconvergence: return "Nonconvergence";
    case ErrorKind::BoundaryLeak: return "BoundaryLeak";
    case ErrorKind::ConditionViolation: return "ConditionViolation";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

Grid1D::Grid1D(double x_min, double x_max, std::size_t n_points)
    : x_min_(x_min), x_max_(x_max), n_(n_points), dx_(0.0) {
  require(std::isfinite(x_min) && std::isfinite(x_max) && x_min < x_max, ErrorKind::InvalidArgument,
          "grid requires finite x_min < x_max");
  require(n_points >= kMinPoints, ErrorKind::InvalidArgument,
          "grid requires at least " + std::to_string(kMinPoints) + " points");
  dx_ = (x_max - x_min) / static_cast<double>(n_points - 1);
}

std::vector<double> Grid1D::points() const {
  std::vector<double> xs(n_);
  for (std::size_t i = 0; i < n_; ++i) xs[i] = x(i);
  return xs;
}

std::size_t Grid1D::cell_of(double x) const noexcept {
  const double s = (x - x_min_) / dx_;
  if (!(s > 0.0)) return 0;
  const auto i = static_cast<std::size_t>(s);
  return std::min(i, n_ - 2);
}

double trapezoid(std::span<const double> values, double dx) noexcept {
  if (values.size() < 2) return 0.0;
  double sum = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) sum += values[i];
  return sum * dx;
}

}  // namespace pilotwave
