#include "pilotwave/bohm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pilotwave/error.hpp"
#include "pilotwave/parallel.hpp"
#include "velocity_detail.hpp"

namespace pilotwave {

SingleParticleBasis::SingleParticleBasis(std::vector<WaveFunction1D> states) : states_(std::move(states)) {
  require(!states_.empty(), ErrorKind::InvalidArgument, "basis needs at least one state");
  for (const auto& s : states_) {
    require(s.grid() == states_.front().grid(), ErrorKind::GridMismatch, "basis states must share one grid");
    require(s.mass() == states_.front().mass() && s.hbar() == states_.front().hbar(), ErrorKind::GridMismatch,
            "basis states must share mass and hbar");
    require(std::abs(norm(s) - 1.0) < 1e-8, ErrorKind::InvalidArgument, "basis states must be normalized");
  }
}

TrajectoryEnsemble::TrajectoryEnsemble(std::vector<double> times, std::size_t experiments, std::size_t particles)
    : times_(std::move(times)),
      experiments_(experiments),
      particles_(particles),
      positions_(experiments * particles * times_.size(), 0.0),
      velocities_(experiments * particles * times_.size(), 0.0),
      labels_(experiments, 0),
      escaped_(experiments * particles, 0) {
  for (std::size_t t = 1; t < times_.size(); ++t) {
    require(times_[t] > times_[t - 1], ErrorKind::InvalidArgument, "ensemble times must be strictly increasing");
  }
}

std::vector<double> TrajectoryEnsemble::positions_at(std::size_t t) const {
  std::vector<double> out;
  out.reserve(experiments_ * particles_);
  for (std::size_t j = 0; j < experiments_; ++j)
    for (std::size_t i = 0; i < particles_; ++i) out.push_back(position(j, i, t));
  return out;
}

std::size_t TrajectoryEnsemble::escape_count() const noexcept {
  return static_cast<std::size_t>(std::count(escaped_.begin(), escaped_.end(), char{1}));
}

TrajectoryEnsemble TrajectoryEnsemble::join(const TrajectoryEnsemble& a, const TrajectoryEnsemble& b) {
  require(a.times_ == b.times_ && a.particles_ == b.particles_, ErrorKind::InvalidArgument,
          "joined ensembles need identical time axes and particle counts");
  TrajectoryEnsemble out(a.times_, a.experiments_ + b.experiments_, a.particles_);
  std::copy(a.positions_.begin(), a.positions_.end(), out.positions_.begin());
  std::copy(b.positions_.begin(), b.positions_.end(), out.positions_.begin() + a.positions_.size());
  std::copy(a.velocities_.begin(), a.velocities_.end(), out.velocities_.begin());
  std::copy(b.velocities_.begin(), b.velocities_.end(), out.velocities_.begin() + a.velocities_.size());
  std::copy(a.labels_.begin(), a.labels_.end(), out.labels_.begin());
  std::copy(b.labels_.begin(), b.labels_.end(), out.labels_.begin() + a.labels_.size());
  std::copy(a.escaped_.begin(), a.escaped_.end(), out.escaped_.begin());
  std::copy(b.escaped_.begin(), b.escaped_.end(), out.escaped_.begin() + a.escaped_.size());
  return out;
}

namespace {

using detail::guarded_velocity;
using detail::max_density;

double blended_velocity_raw(std::span<const Complex> a, std::span<const Complex> b, const Grid1D& grid,
                            double hbar_over_m, double s, double x, double max_rho, NodeGuard guard) noexcept {
  const LocalAmplitude la = interpolate(a, grid, x);
  if (s == 0.0) return guarded_velocity(la.value, la.derivative, hbar_over_m, max_rho, guard);
  const LocalAmplitude lb = interpolate(b, grid, x);
  const Complex psi = (1.0 - s) * la.value + s * lb.value;
  const Complex dpsi = (1.0 - s) * la.derivative + s * lb.derivative;
  return guarded_velocity(psi, dpsi, hbar_over_m, max_rho, guard);
}

}  // namespace

double velocity_field(const WaveFunction1D& wf, double x, NodeGuard guard) {
  require(wf.grid().contains(x), ErrorKind::OutOfDomain, "velocity requested outside the grid");
  const LocalAmplitude l = interpolate(wf, x);
  return guarded_velocity(l.value, l.derivative, wf.hbar() / wf.mass(), max_density(wf.amplitudes()), guard);
}

double blended_velocity(const WaveFunction1D& a, const WaveFunction1D& b, double s, double x, double max_rho,
                        NodeGuard guard) noexcept {
  return blended_velocity_raw(a.amplitudes(), b.amplitudes(), a.grid(), a.hbar() / a.mass(), s, x, max_rho, guard);
}

TrajectoryRun integrate_guided(const Stepper& stepper, const WaveFunction1D& wf0, std::span<const double> initial,
                               double dt, std::size_t n_steps, TrajectoryOptions options) {
  const Grid1D& grid = wf0.grid();
  for (double x : initial) {
    require(grid.contains(x), ErrorKind::OutOfDomain, "initial trajectory position outside the grid");
  }
  const std::size_t stride = std::max<std::size_t>(1, options.record_stride);
  NodeGuard guard = options.guard;
  if (!std::isfinite(guard.max_speed)) guard.max_speed = grid.dx() / dt;
  const double hm = wf0.hbar() / wf0.mass();

  std::vector<double> times;
  for (std::size_t s = 0; s <= n_steps; ++s) {
    if (s % stride == 0 || s == n_steps) times.push_back(static_cast<double>(s) * dt);
  }
  const std::size_t m = initial.size();
  TrajectoryRun run{TrajectoryEnsemble(times, 1, m), wf0, {}};
  auto& ens = run.ensemble;

  std::vector<Complex> psi_a(wf0.amplitudes().begin(), wf0.amplitudes().end());
  std::vector<Complex> psi_b = psi_a;
  std::vector<double> x(initial.begin(), initial.end());
  std::vector<double> v(m);

  double rho_a = max_density(psi_a);
  for (std::size_t i = 0; i < m; ++i) {
    v[i] = blended_velocity_raw(psi_a, psi_a, grid, hm, 0.0, x[i], rho_a, guard);
    ens.position(0, i, 0) = x[i];
    ens.velocity(0, i, 0) = v[i];
  }
  run.wave_mean.push_back(mean_position(wf0));

  std::size_t record = 1;
  for (std::size_t s = 1; s <= n_steps; ++s) {
    psi_b = psi_a;
    stepper(psi_b);
    const double rho = std::max(rho_a, max_density(psi_b));
    parallel_for(m, options.threads, [&](std::size_t i) {
      auto vel = [&](double frac, double pos) {
        return blended_velocity_raw(psi_a, psi_b, grid, hm, frac, std::clamp(pos, grid.x_min(), grid.x_max()),
                                    rho, guard);
      };
      const double x0 = x[i];
      const double k1 = vel(0.0, x0);
      const double k2 = vel(0.5, x0 + 0.5 * dt * k1);
      const double k3 = vel(0.5, x0 + 0.5 * dt * k2);
      const double k4 = vel(1.0, x0 + dt * k3);
      double xn = x0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!grid.contains(xn)) {
        xn = std::clamp(xn, grid.x_min(), grid.x_max());
        ens.flag_escape(0, i);
      }
      x[i] = xn;
      v[i] = vel(1.0, xn);
    });
    if (s % stride == 0 || s == n_steps) {
      for (std::size_t i = 0; i < m; ++i) {
        ens.position(0, i, record) = x[i];
        ens.velocity(0, i, record) = v[i];
      }
      run.wave_mean.push_back(mean_position(wf0.with_amplitudes(psi_b)));
      ++record;
    }
    std::swap(psi_a, psi_b);
    rho_a = max_density(psi_a);
  }
  run.final_state = wf0.with_amplitudes(std::move(psi_a));
  return run;
}

TrajectoryRun integrate_trajectories(const PropagatorCN& propagator, const WaveFunction1D& wf0,
                                     std::span<const double> initial_positions, std::size_t n_steps,
                                     TrajectoryOptions options) {
  require(wf0.grid() == propagator.grid(), ErrorKind::GridMismatch, "state grid differs from propagator grid");
  const Stepper stepper = [&](std::vector<Complex>& psi) { propagator.step_inplace(psi); };
  return integrate_guided(stepper, wf0, initial_positions, propagator.dt(), n_steps, options);
}

double equivariance_check(std::span<const double> positions, const WaveFunction1D& wf) {
  require(positions.size() >= 500, ErrorKind::TooFewSamples, "equivariance check needs at least 500 trajectories");
  const DensityCdf cdf(wf);
  return ks_statistic({positions.begin(), positions.end()}, [&](double x) { return cdf(x); });
}

// ---------------------------------------------------------------------------

CatState::CatState(CatStateSpec s, const Grid1D& grid, double mass, double hbar)
    : spec(s),
      left(make_gaussian({s.packet.sigma, s.x_left, s.packet.k0}, grid, mass, hbar)),
      right(make_gaussian({s.packet.sigma, s.x_right, s.packet.k0}, grid, mass, hbar)) {
  require(std::abs(s.x_right - s.x_left) > 10.0 * s.packet.sigma, ErrorKind::InvalidArgument,
          "cat-state branches must be separated by more than 10 sigma");
  require(s.n_particles >= 1, ErrorKind::InvalidArgument, "cat state needs at least one particle");
}

std::size_t particle_count(const StateDescriptor& state) {
  struct {
    std::size_t operator()(const ProductState& p) const { return p.n_particles; }
    std::size_t operator()(const SymmetrizedState& s) const { return s.basis.size(); }
    std::size_t operator()(const CatState& c) const { return c.spec.n_particles; }
  } visitor;
  return std::visit(visitor, state);
}

const Grid1D& state_grid(const StateDescriptor& state) {
  struct {
    const Grid1D& operator()(const ProductState& p) const { return p.psi.grid(); }
    const Grid1D& operator()(const SymmetrizedState& s) const { return s.basis.grid(); }
    const Grid1D& operator()(const CatState& c) const { return c.left.grid(); }
  } visitor;
  return std::visit(visitor, state);
}

namespace {

ExperimentSample sample_product(const ProductState& p, Rng& rng) {
  const DensityCdf cdf(p.psi);
  ExperimentSample out;
  out.positions = sample_positions(cdf, p.n_particles, rng);
  return out;
}

// Orbitals with disjoint supports: once a draw lands on orbital i, the
// remaining coordinates can only occupy the other orbitals, so the m-th
// conditional is the sum of |psi_i|^2 over orbitals not yet taken.
ExperimentSample sample_symmetrized(const SymmetrizedState& s, Rng& rng) {
  const auto& basis = s.basis;
  const std::size_t n = basis.size();
  const Grid1D& grid = basis.grid();
  std::vector<std::vector<double>> rho(n);
  for (std::size_t i = 0; i < n; ++i) rho[i] = density(basis[i]);

  std::vector<char> used(n, 0);
  ExperimentSample out;
  std::vector<double> mix(grid.size());
  for (std::size_t m = 0; m < n; ++m) {
    std::fill(mix.begin(), mix.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      for (std::size_t g = 0; g < grid.size(); ++g) mix[g] += rho[i][g];
    }
    const DensityCdf cdf(grid, mix);
    const double x = cdf.quantile(uniform01(rng));

    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!used[i]) w[i] = std::norm(interpolate(basis[i], x).value);
    }
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    std::size_t pick = n;
    if (total > 0.0) {
      double u = uniform01(rng) * total;
      for (std::size_t i = 0; i < n; ++i) {
        if (w[i] <= 0.0) continue;
        pick = i;
        if (u < w[i]) break;
        u -= w[i];
      }
    } else {
      for (std::size_t i = 0; i < n && pick == n; ++i)
        if (!used[i]) pick = i;
    }
    used[pick] = 1;
    out.positions.push_back(x);
    out.orbital.push_back(pick);
  }
  return out;
}

ExperimentSample sample_cat(const CatState& c, Rng& rng) {
  // Joint density prod|phi_L|^2 + prod|phi_R|^2 (cross terms vanish for
  // disjoint branches). Branch weights are tracked in log form.
  const double sigma = c.spec.packet.sigma;
  auto log_rho = [&](double x, double center) {
    const double d = (x - center) / sigma;
    return -d * d;
  };
  const DensityCdf left(c.left), right(c.right);
  double log_wl = 0.0, log_wr = 0.0;
  ExperimentSample out;
  for (std::size_t m = 0; m < c.spec.n_particles; ++m) {
    const double diff = log_wr - log_wl;
    const double p_left = diff > 700.0 ? 0.0 : 1.0 / (1.0 + std::exp(diff));
    const bool go_left = uniform01(rng) < p_left;
    const double x = go_left ? left.quantile(uniform01(rng)) : right.quantile(uniform01(rng));
    log_wl += log_rho(x, c.spec.x_left);
    log_wr += log_rho(x, c.spec.x_right);
    out.positions.push_back(x);
  }
  out.branch = log_wl >= log_wr ? 0 : 1;
  return out;
}

}  // namespace

ExperimentSample sequential_conditional_sample(const StateDescriptor& state, std::uint64_t seed) {
  Rng rng(seed);
  struct {
    Rng& rng;
    ExperimentSample operator()(const ProductState& p) const { return sample_product(p, rng); }
    ExperimentSample operator()(const SymmetrizedState& s) const { return sample_symmetrized(s, rng); }
    ExperimentSample operator()(const CatState& c) const { return sample_cat(c, rng); }
  } visitor{rng};
  return std::visit(visitor, state);
}

std::vector<double> marginal_density(const StateDescriptor& state) {
  struct {
    std::vector<double> operator()(const ProductState& p) const { return density(p.psi); }
    std::vector<double> operator()(const SymmetrizedState& s) const {
      std::vector<double> d(s.basis.grid().size(), 0.0);
      const double w = 1.0 / static_cast<double>(s.basis.size());
      for (const auto& psi : s.basis.states()) {
        const auto r = density(psi);
        for (std::size_t g = 0; g < d.size(); ++g) d[g] += w * r[g];
      }
      return d;
    }
    std::vector<double> operator()(const CatState& c) const {
      auto d = density(c.left);
      const auto r = density(c.right);
      for (std::size_t g = 0; g < d.size(); ++g) d[g] = 0.5 * (d[g] + r[g]);
      return d;
    }
  } visitor;
  return std::visit(visitor, state);
}

MarginalDistance marginal_vs_experiment_distance(const StateDescriptor& state, std::size_t n_experiments,
                                                 std::uint64_t seed) {
  require(particle_count(state) >= 1, ErrorKind::InvalidArgument, "state needs at least one particle");
  const Grid1D& grid = state_grid(state);
  const auto marginal = marginal_density(state);
  const DensityCdf cdf(grid, marginal);
  const auto* cat = std::get_if<CatState>(&state);

  MarginalDistance out;
  for (std::size_t e = 0; e < n_experiments; ++e) {
    const auto sample = sequential_conditional_sample(state, derive_seed(seed, e));
    out.ks.push_back(ks_statistic(sample.positions, [&](double x) { return cdf(x); }));
    if (cat) {
      // Marginal mass carried by the branch that holds no particle.
      const auto& empty = sample.branch == 0 ? cat->right : cat->left;
      const auto rho = density(empty);
      out.missing_mass.push_back(0.5 * trapezoid(rho, grid.dx()) / cdf.total_mass());
    }
  }
  return out;
}

}  // namespace pilotwave
