#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pilotwave/basis.hpp"
#include "pilotwave/bohm.hpp"
#include "pilotwave/permanent.hpp"
#include "pilotwave/potential.hpp"

namespace pilotwave {

/// Two Gaussian packets of common width at x_left/x_right with momenta
/// k_left/k_right, summed and normalized on the grid.
struct TwoPacketSpec {
  double x_left = -300.0;
  double x_right = 300.0;
  double k_left = 0.1;
  double k_right = -0.1;
  double sigma = 15.0;
};

WaveFunction1D make_two_packet(const TwoPacketSpec& spec, const Grid1D& grid, double mass = 1.0, double hbar = 1.0);

struct ManyBodyValue {
  Complex value;
  std::vector<Complex> gradient;  // dPsi/dx_i
};

/// Psi = perm(A), A_kj = psi_j(x_k); dPsi/dx_i = perm(A with row i -> psi_j'(x_i)).
ManyBodyValue symmetrized_value_and_gradient(const SingleParticleBasis& basis, std::span<const double> positions,
                                             std::size_t threads = 1);

/// v_i = (hbar/m) Im[(dPsi/dx_i)/Psi] for the bosonic permanent state.
std::vector<double> bosonic_velocities(const SingleParticleBasis& basis, std::span<const double> positions,
                                       NodeGuard guard = {}, std::size_t threads = 1);

/// v_i = (hbar/m) Im[psi_i'(x_i)/psi_i(x_i)] for the product state without exchange.
std::vector<double> distinguishable_velocities(const SingleParticleBasis& basis, std::span<const double> positions,
                                               NodeGuard guard = {});

/// Orbital amplitudes at two solver times; velocities are taken from the
/// linear blend (1-s) a + s b, as in the single-particle RK4 driver.
struct BasisInterval {
  const Grid1D* grid = nullptr;
  double hbar_over_m = 1.0;
  std::span<const std::vector<Complex>> a;
  std::span<const std::vector<Complex>> b;
  std::vector<double> max_density;  // per orbital, over both times
};

std::vector<double> bosonic_velocities(const BasisInterval& interval, double s, std::span<const double> positions,
                                       NodeGuard guard, std::size_t threads = 1);
std::vector<double> distinguishable_velocities(const BasisInterval& interval, double s,
                                               std::span<const double> positions, NodeGuard guard);

/// Positions drawn from |perm A|^2 by an independence Metropolis chain whose
/// proposals come from the exclusion sampler (density proportional to perm(|A|^2)).
/// With disjoint orbitals every proposal has the same weight and is accepted.
struct BosonicSample {
  std::vector<double> positions;
  std::size_t accepted = 0;
  double log_weight = 0.0;  // log |perm A|^2 / perm(|A|^2) of the returned state
};

BosonicSample bosonic_equilibrium_sample(const SingleParticleBasis& basis, std::uint64_t seed, std::size_t steps);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct ComConvergenceConfig {
  std::vector<std::size_t> particle_counts{1, 4, 8, 12, 16, 20};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  bool exchange = true;
  bool distinguishable = true;

  // Lengths in nm, times in fs, wavenumbers in 1/nm.
  Range x_left{-400.0, -200.0};
  Range x_right{200.0, 400.0};
  Range k_left{0.05, 0.15};
  Range k_right{-0.15, -0.05};
  double sigma = 15.0;

  double field_volt_per_meter = 3.3e5;
  double charge_coulomb = -1.602176634e-19;
  double particle_mass_kg = 9.1093837015e-31;

  double x_min = -3000.0;
  double x_max = 3000.0;
  std::size_t grid_points = 4096;
  /// Trajectory (RK4) step; the orbitals are advanced with wave_substeps CN steps per dt.
  double dt = 300.0;
  std::size_t wave_substeps = 3;
  double t_max = 30000.0;
  std::size_t record_stride = 5;
  /// Metropolis steps for the bosonic initial positions; 0 keeps the raw exclusion draw.
  std::size_t equilibration_steps = 200;
  /// Denominator of the relative error, fixed for all N.
  double error_length = 300.0;

  std::size_t threads = 1;
  /// Keep the trajectories of the first seed of the largest N.
  bool keep_example_trajectories = true;
};

struct ComConvergenceSeries {
  std::size_t n_particles = 0;
  std::vector<double> times;
  /// Seed-averaged relative error; empty when the mode was disabled.
  std::vector<double> mean_error_exchange;
  std::vector<double> mean_error_distinguishable;
  /// Relative error at t_max for each seed.
  std::vector<double> final_error_exchange;
  std::vector<double> final_error_distinguishable;
  /// Count of (seed, pair) ordering swaps seen in the exchange runs.
  std::size_t exchange_crossings = 0;
};

struct ComExample {
  std::size_t n_particles = 0;
  std::vector<double> times;
  std::vector<std::vector<double>> exchange_paths;        // [particle][time]
  std::vector<std::vector<double>> distinguishable_paths;  // [particle][time]
  std::vector<double> exchange_com, distinguishable_com;
  std::vector<double> exchange_newton, distinguishable_newton;
};

struct ComConvergenceResult {
  std::vector<ComConvergenceSeries> series;  // one per particle count
  ComExample example;
};

/// One single experiment per (N, seed): N random two-packet orbitals, one
/// conditional sample of positions shared by both dynamics, Bohmian
/// integration with and without exchange, and the deviation of the quantum
/// centre of mass from a Newton trajectory launched with its initial position
/// and velocity.
ComConvergenceResult run_com_convergence(const ComConvergenceConfig& config);

}  // namespace pilotwave
