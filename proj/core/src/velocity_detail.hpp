#pragma once

#include <algorithm>
#include <complex>
#include <span>

#include "pilotwave/bohm.hpp"

namespace pilotwave::detail {

inline double max_density(std::span<const Complex> a) {
  double m = 0.0;
  for (const auto& v : a) m = std::max(m, std::norm(v));
  return m;
}

inline double guarded_velocity(Complex psi, Complex dpsi, double hbar_over_m, double max_rho,
                               NodeGuard guard) noexcept {
  const double rho = std::norm(psi);
  if (rho == 0.0) return 0.0;
  const double v = hbar_over_m * std::imag(dpsi * std::conj(psi)) / rho;
  if (rho < guard.node_epsilon * max_rho) return std::clamp(v, -guard.max_speed, guard.max_speed);
  return v;
}

}  // namespace pilotwave::detail
