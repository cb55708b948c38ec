#pragma once

#include <vector>

#include "pilotwave/wavefunction.hpp"

namespace pilotwave {

/// Ordered single-particle states psi_1..psi_N on one shared grid, each unit norm.
class SingleParticleBasis {
 public:
  explicit SingleParticleBasis(std::vector<WaveFunction1D> states);

  std::size_t size() const noexcept { return states_.size(); }
  const WaveFunction1D& operator[](std::size_t i) const noexcept { return states_[i]; }
  const std::vector<WaveFunction1D>& states() const noexcept { return states_; }
  const Grid1D& grid() const noexcept { return states_.front().grid(); }
  double mass() const noexcept { return states_.front().mass(); }
  double hbar() const noexcept { return states_.front().hbar(); }

 private:
  std::vector<WaveFunction1D> states_;
};

}  // namespace pilotwave
