#pragma once

#include <complex>
#include <span>
#include <vector>

#include "pilotwave/grid.hpp"

namespace pilotwave {

using Complex = std::complex<double>;

/// psi(x) = (sigma sqrt(pi))^{-1/2} exp(-(x-x0)^2 / (2 sigma^2)) exp(i k0 x).
struct GaussianPacketSpec {
  double sigma = 1.0;
  double x0 = 0.0;
  double k0 = 0.0;
};

/// Complex amplitudes sampled on a Grid1D together with the particle mass
/// and hbar that set the scale of every derived field.
class WaveFunction1D {
 public:
  WaveFunction1D(Grid1D grid, std::vector<Complex> amplitudes, double mass = 1.0, double hbar = 1.0);

  const Grid1D& grid() const noexcept { return grid_; }
  std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
  const Complex& operator[](std::size_t i) const noexcept { return amplitudes_[i]; }
  std::size_t size() const noexcept { return amplitudes_.size(); }
  double mass() const noexcept { return mass_; }
  double hbar() const noexcept { return hbar_; }

  /// Same grid, mass and hbar; new samples.
  WaveFunction1D with_amplitudes(std::vector<Complex> amplitudes) const {
    return WaveFunction1D(grid_, std::move(amplitudes), mass_, hbar_);
  }
  std::vector<Complex> release() && { return std::move(amplitudes_); }

 private:
  Grid1D grid_;
  std::vector<Complex> amplitudes_;
  double mass_;
  double hbar_;
};

/// Throws GridTooNarrow when |psi| at either boundary exceeds 1e-10 of its peak.
WaveFunction1D make_gaussian(const GaussianPacketSpec& spec, const Grid1D& grid, double mass = 1.0,
                             double hbar = 1.0);

/// Builds psi from an analytic profile and normalizes it on the grid.
template <class F>
WaveFunction1D sample_function(const Grid1D& grid, F&& f, double mass = 1.0, double hbar = 1.0) {
  std::vector<Complex> amps(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) amps[i] = f(grid.x(i));
  return WaveFunction1D(grid, std::move(amps), mass, hbar);
}

double norm(const WaveFunction1D& wf);
WaveFunction1D normalize(const WaveFunction1D& wf);
WaveFunction1D scale(const WaveFunction1D& wf, Complex factor);

std::vector<double> density(const WaveFunction1D& wf);
std::vector<double> modulus(const WaveFunction1D& wf);

/// J = (hbar/m) |psi|^2 dS/dx, with dS/dx from the phase of psi_{i+1} conj(psi_{i-1}).
/// The phase-difference stencil is exact for linear and quadratic phases.
std::vector<double> probability_current(const WaveFunction1D& wf);
double current_integral(const WaveFunction1D& wf);

double mean_position(const WaveFunction1D& wf);
/// Standard deviation of |psi|^2.
double position_width(const WaveFunction1D& wf);

/// <H> for H = -hbar^2/(2m) d^2/dx^2 + V on the grid (used as a CN phase reference).
double mean_kinetic_energy(const WaveFunction1D& wf);

enum class NodeRule {
  /// Points with R < epsilon * max R take Q from the nearest valid point.
  NearestValid,
  /// R is replaced by max(R, epsilon * max R) inside the ratio.
  FloorAmplitude,
};

struct QuantumPotentialOptions {
  NodeRule rule = NodeRule::NearestValid;
  double epsilon = 1e-8;
};

/// Q = -(hbar^2 / 2m) R''/R on the grid, R'' by second central differences.
std::vector<double> quantum_potential(const WaveFunction1D& wf, QuantumPotentialOptions options = {});
std::vector<double> quantum_potential(std::span<const double> amplitude, double dx, double mass, double hbar,
                                      QuantumPotentialOptions options = {});

struct LocalAmplitude {
  Complex value;
  Complex derivative;
};

/// psi and dpsi/dx at an arbitrary x. The local carrier exp(i k_c x) of the
/// enclosing cell is divided out, the smooth remainder is interpolated with a
/// four-point cubic, and the carrier is restored.
LocalAmplitude interpolate(std::span<const Complex> amplitudes, const Grid1D& grid, double x) noexcept;
inline LocalAmplitude interpolate(const WaveFunction1D& wf, double x) noexcept {
  return interpolate(wf.amplitudes(), wf.grid(), x);
}

}  // namespace pilotwave
