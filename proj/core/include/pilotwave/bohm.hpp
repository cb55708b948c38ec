#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "pilotwave/basis.hpp"
#include "pilotwave/sampling.hpp"
#include "pilotwave/tdse.hpp"

namespace pilotwave {

/// Positions and velocities indexed by experiment j, particle i and time index t.
class TrajectoryEnsemble {
 public:
  TrajectoryEnsemble() = default;
  TrajectoryEnsemble(std::vector<double> times, std::size_t experiments, std::size_t particles);

  std::size_t experiments() const noexcept { return experiments_; }
  std::size_t particles() const noexcept { return particles_; }
  std::size_t time_count() const noexcept { return times_.size(); }
  const std::vector<double>& times() const noexcept { return times_; }

  double& position(std::size_t j, std::size_t i, std::size_t t) noexcept { return positions_[index(j, i, t)]; }
  double position(std::size_t j, std::size_t i, std::size_t t) const noexcept { return positions_[index(j, i, t)]; }
  double& velocity(std::size_t j, std::size_t i, std::size_t t) noexcept { return velocities_[index(j, i, t)]; }
  double velocity(std::size_t j, std::size_t i, std::size_t t) const noexcept { return velocities_[index(j, i, t)]; }

  std::span<const double> trajectory(std::size_t j, std::size_t i) const noexcept {
    return {positions_.data() + index(j, i, 0), times_.size()};
  }
  /// All positions at time index t.
  std::vector<double> positions_at(std::size_t t) const;

  std::vector<std::uint64_t>& labels() noexcept { return labels_; }
  const std::vector<std::uint64_t>& labels() const noexcept { return labels_; }

  void flag_escape(std::size_t j, std::size_t i) { escaped_[j * particles_ + i] = 1; }
  bool escaped(std::size_t j, std::size_t i) const noexcept { return escaped_[j * particles_ + i] != 0; }
  std::size_t escape_count() const noexcept;

  /// Concatenates experiments of two ensembles sharing time axis and particle count.
  static TrajectoryEnsemble join(const TrajectoryEnsemble& a, const TrajectoryEnsemble& b);

 private:
  std::size_t index(std::size_t j, std::size_t i, std::size_t t) const noexcept {
    return (j * particles_ + i) * times_.size() + t;
  }

  std::vector<double> times_;
  std::size_t experiments_ = 0;
  std::size_t particles_ = 0;
  std::vector<double> positions_;
  std::vector<double> velocities_;
  std::vector<std::uint64_t> labels_;
  std::vector<char> escaped_;
};

/// Velocity clamp applied where |psi|^2 < node_epsilon * max |psi|^2.
struct NodeGuard {
  double node_epsilon = 1e-8;
  double max_speed = std::numeric_limits<double>::infinity();
};

/// v = (hbar/m) Im(psi'/psi) at x. Throws OutOfDomain outside the grid.
double velocity_field(const WaveFunction1D& wf, double x, NodeGuard guard = {});

/// Velocity from two states blended linearly in time: (1-s) a + s b.
double blended_velocity(const WaveFunction1D& a, const WaveFunction1D& b, double s, double x, double max_density,
                        NodeGuard guard) noexcept;

struct TrajectoryOptions {
  std::size_t record_stride = 1;
  /// Defaults to dx/dt of the propagator when left infinite.
  NodeGuard guard{};
  std::size_t threads = 1;
};

struct TrajectoryRun {
  TrajectoryEnsemble ensemble;  // one experiment, one particle per initial position
  WaveFunction1D final_state;
  std::vector<double> wave_mean;  // <x> of the wave function at each recorded time
};

/// Advances the state one step in place; the trajectory driver calls it in lockstep.
using Stepper = std::function<void(std::vector<Complex>&)>;

/// RK4 on dx/dt = v(x,t), psi interpolated linearly in time between solver steps.
TrajectoryRun integrate_guided(const Stepper& stepper, const WaveFunction1D& wf0, std::span<const double> initial,
                               double dt, std::size_t n_steps, TrajectoryOptions options = {});

TrajectoryRun integrate_trajectories(const PropagatorCN& propagator, const WaveFunction1D& wf0,
                                     std::span<const double> initial_positions, std::size_t n_steps,
                                     TrajectoryOptions options = {});

/// KS distance between positions and the |psi|^2 law of wf. Requires >= 500 positions.
double equivariance_check(std::span<const double> positions, const WaveFunction1D& wf);

// ---------------------------------------------------------------------------
// Sequential conditional sampling of one experiment.

/// Superposition of two separated product packets, prod phi_L + prod phi_R.
struct CatStateSpec {
  GaussianPacketSpec packet;  // shape of phi; x0 is ignored
  double x_left = -10.0;
  double x_right = 10.0;
  std::size_t n_particles = 10;
};

/// N particles sharing one single-particle state.
struct ProductState {
  WaveFunction1D psi;
  std::size_t n_particles;
};

/// Bosonic permanent state built from orbitals with (nearly) disjoint supports.
struct SymmetrizedState {
  SingleParticleBasis basis;
};

struct CatState {
  CatStateSpec spec;
  WaveFunction1D left;
  WaveFunction1D right;

  CatState(CatStateSpec spec, const Grid1D& grid, double mass = 1.0, double hbar = 1.0);
};

using StateDescriptor = std::variant<ProductState, SymmetrizedState, CatState>;

struct ExperimentSample {
  std::vector<double> positions;
  /// For symmetrized states: the orbital each draw was attributed to.
  std::vector<std::size_t> orbital;
  /// For cat states: 0 = left branch, 1 = right branch.
  int branch = -1;
};

std::size_t particle_count(const StateDescriptor& state);
const Grid1D& state_grid(const StateDescriptor& state);

ExperimentSample sequential_conditional_sample(const StateDescriptor& state, std::uint64_t seed);

/// Single-particle marginal D(x) of the state on its grid (integrates to 1).
std::vector<double> marginal_density(const StateDescriptor& state);

struct MarginalDistance {
  std::vector<double> ks;  // per experiment
  /// Cat state only: marginal mass on the branch the experiment did not populate.
  std::vector<double> missing_mass;
};

MarginalDistance marginal_vs_experiment_distance(const StateDescriptor& state, std::size_t n_experiments,
                                                 std::uint64_t seed);

}  // namespace pilotwave
