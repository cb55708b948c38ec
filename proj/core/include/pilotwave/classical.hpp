#pragma once

#include <span>
#include <vector>

#include "pilotwave/bohm.hpp"
#include "pilotwave/tdse.hpp"

namespace pilotwave {

struct ClassicalOptions {
  /// Phase is unwrapped where R >= node_epsilon * max R and continued linearly
  /// beyond.
  double node_epsilon = 1e-12;
  /// Largest phase error (rad) tolerated from an unconverged departure point.
  double phase_tolerance = 1e-3;
  /// Caustics and convergence failures are reported only where R is at least
  /// this fraction of max R.
  double support_fraction = 1e-4;
  /// Largest estimated interpolation error of R relative to max R (from the
  /// sixth difference) before the packet counts as under-resolved.
  double resolution_tolerance = 1e-6;
};

/// i hbar psi_t = (-hbar^2/2M d_xx + V - Q) psi with Q = -(hbar^2/2M) R''/R.
/// Writing psi = R exp(iS/hbar), the -Q term cancels the quantum pressure and
/// what remains is the Hamilton-Jacobi equation for S and the continuity
/// equation for R^2. Each step follows the characteristics of that flow.
class ClassicalPropagator {
 public:
  ClassicalPropagator(Grid1D grid, double dt, PotentialSpec potential, double mass = 1.0, double hbar = 1.0,
                      ClassicalOptions options = {});

  const Grid1D& grid() const noexcept { return grid_; }
  double dt() const noexcept { return dt_; }
  double mass() const noexcept { return mass_; }
  double hbar() const noexcept { return hbar_; }
  const PotentialSpec& potential() const noexcept { return potential_; }
  const ClassicalOptions& options() const noexcept { return options_; }

  /// Semi-Lagrangian step: every node is traced back along its Newton
  /// trajectory x = x_d + v dt + a dt^2/2 (v = S'/M), R and S are interpolated
  /// at x_d (quintic), S gains the action of the path and R is divided by
  /// sqrt(dx/dx_d). Then renormalization. Throws Nonconvergence when
  /// characteristics cross inside the support (a caustic), the packet is too
  /// narrow for the grid, or the departure point does not converge.
  void step_inplace(std::vector<Complex>& psi) const;

 private:
  Grid1D grid_;
  double dt_;
  PotentialSpec potential_;
  double mass_;
  double hbar_;
  ClassicalOptions options_;
};

WaveFunction1D classical_step(const ClassicalPropagator& prop, const WaveFunction1D& wf);

/// Observables of the classical wave function, recorded like tdse::evolve.
EvolveResult evolve_classical(const ClassicalPropagator& prop, const WaveFunction1D& wf, std::size_t n_steps,
                              EvolveOptions options = {});

TrajectoryRun classical_trajectories(const ClassicalPropagator& prop, const WaveFunction1D& wf0,
                                     std::span<const double> initial_positions, std::size_t n_steps,
                                     TrajectoryOptions options = {});

// ---------------------------------------------------------------------------

/// Amplitude R(x_cm, y) on a tensor grid, stored row-major: r[ix * ny + iy].
struct PlaneField {
  Grid1D x;
  Grid1D y;
  std::vector<double> r;
};

enum class IdentityTestFunction { SeparableGaussian, CorrelatedGaussian, AsymmetricBimodal };

PlaneField make_identity_test_field(IdentityTestFunction kind, std::size_t points_per_axis);

struct IdentityResidual {
  double absolute = 0.0;  // |int int R^2 d(Q_cm + Q_y)/dx_cm|
  double scale = 0.0;     // int int R^2 |d(Q_cm + Q_y)/dx_cm|
  double relative() const noexcept { return scale > 0.0 ? absolute / scale : 0.0; }
};

/// Q_cm = -hbar^2/(2 M) R_xx/R, Q_y = -hbar^2/(2 m) R_yy/R, all derivatives by
/// central differences. Throws BoundaryLeak when R on the boundary exceeds
/// 1e-6 of its maximum.
IdentityResidual quantum_potential_gradient_identity(const PlaneField& field, double mass_cm = 1.0,
                                                     double mass = 1.0, double hbar = 1.0);

}  // namespace pilotwave
