#include "pilotwave/manybody.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "pilotwave/error.hpp"
#include "pilotwave/units.hpp"
#include "velocity_detail.hpp"

namespace pilotwave {

WaveFunction1D make_two_packet(const TwoPacketSpec& spec, const Grid1D& grid, double mass, double hbar) {
  require(spec.sigma > 0.0, ErrorKind::InvalidArgument, "packet width must be positive");
  const double pre = 1.0 / (2.0 * std::pow(std::numbers::pi * spec.sigma * spec.sigma, 0.25));
  auto packet = [&](double x, double center, double k) {
    const double d = (x - center) / spec.sigma;
    return pre * std::exp(-0.5 * d * d) * std::polar(1.0, k * x);
  };
  auto envelope = [&](double x) {
    const double dl = (x - spec.x_left) / spec.sigma, dr = (x - spec.x_right) / spec.sigma;
    return pre * (std::exp(-0.5 * dl * dl) + std::exp(-0.5 * dr * dr));
  };
  require(std::max(envelope(grid.x_min()), envelope(grid.x_max())) <= 1e-10 * pre, ErrorKind::GridTooNarrow,
          "two-packet state is not contained in the grid");
  auto wf = sample_function(
      grid, [&](double x) { return packet(x, spec.x_left, spec.k_left) + packet(x, spec.x_right, spec.k_right); },
      mass, hbar);
  return normalize(wf);
}

namespace {

struct RowData {
  ComplexMatrix a;
  ComplexMatrix b;
  double log_scale = 0.0;  // sum_k log max_j |A_kj|
  // max_j |A_kj|^2 / max|psi_j|^2: how far particle k sits into the tails of every orbital
  std::vector<double> tail_ratio;
};

template <class Amp>
RowData build_rows(std::size_t n, std::span<const double> positions, std::span<const double> max_density, Amp&& amp) {
  RowData rows{ComplexMatrix(n), ComplexMatrix(n), 0.0, std::vector<double>(n, 0.0)};
  for (std::size_t k = 0; k < n; ++k) {
    double row_max = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const LocalAmplitude l = amp(j, positions[k]);
      rows.a(k, j) = l.value;
      rows.b(k, j) = l.derivative;
      row_max = std::max(row_max, std::abs(l.value));
      if (max_density[j] > 0.0) rows.tail_ratio[k] = std::max(rows.tail_ratio[k], std::norm(l.value) / max_density[j]);
    }
    rows.log_scale += row_max > 0.0 ? std::log(row_max) : -1e300;
  }
  return rows;
}

// Node tests: (a) |Psi|^2 below eps times the squared product of the largest
// entry of each row flags destructive interference between permutations and
// clamps every particle; (b) a particle whose position lies below eps of the
// peak density of every orbital is clamped on its own, which is the
// single-particle rule for N = 1.
std::vector<double> velocities_from_rows(const RowData& rows, double hbar_over_m, NodeGuard guard,
                                         std::size_t threads) {
  const std::size_t n = rows.a.order();
  const PermanentWithRows p = permanent_with_row_replacements(rows.a, rows.b, threads);
  std::vector<double> v(n, 0.0);
  const double rho = std::norm(p.value);
  if (rho == 0.0) return v;
  const bool interference_node = std::log(rho) < std::log(guard.node_epsilon) + 2.0 * rows.log_scale;
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = hbar_over_m * std::imag(p.rows[i] * std::conj(p.value)) / rho;
    if (interference_node || rows.tail_ratio[i] < guard.node_epsilon)
      v[i] = std::clamp(v[i], -guard.max_speed, guard.max_speed);
  }
  return v;
}

void check_positions(const Grid1D& grid, std::size_t n, std::span<const double> positions) {
  require(positions.size() == n, ErrorKind::InvalidArgument, "one position per orbital is required");
  for (double x : positions) require(grid.contains(x), ErrorKind::OutOfDomain, "position outside the grid");
}

LocalAmplitude blend(const LocalAmplitude& a, const LocalAmplitude& b, double s) {
  return {(1.0 - s) * a.value + s * b.value, (1.0 - s) * a.derivative + s * b.derivative};
}

}  // namespace

ManyBodyValue symmetrized_value_and_gradient(const SingleParticleBasis& basis, std::span<const double> positions,
                                             std::size_t threads) {
  check_positions(basis.grid(), basis.size(), positions);
  const std::vector<double> no_guard(basis.size(), 0.0);
  const RowData rows = build_rows(basis.size(), positions, no_guard, [&](std::size_t j, double x) {
    return interpolate(basis[j], x);
  });
  PermanentWithRows p = permanent_with_row_replacements(rows.a, rows.b, threads);
  return {p.value, std::move(p.rows)};
}

std::vector<double> bosonic_velocities(const SingleParticleBasis& basis, std::span<const double> positions,
                                       NodeGuard guard, std::size_t threads) {
  check_positions(basis.grid(), basis.size(), positions);
  std::vector<double> max_density;
  for (const auto& psi : basis.states()) max_density.push_back(detail::max_density(psi.amplitudes()));
  const RowData rows = build_rows(basis.size(), positions, max_density, [&](std::size_t j, double x) {
    return interpolate(basis[j], x);
  });
  return velocities_from_rows(rows, basis.hbar() / basis.mass(), guard, threads);
}

std::vector<double> distinguishable_velocities(const SingleParticleBasis& basis, std::span<const double> positions,
                                               NodeGuard guard) {
  check_positions(basis.grid(), basis.size(), positions);
  std::vector<double> v(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) v[i] = velocity_field(basis[i], positions[i], guard);
  return v;
}

std::vector<double> bosonic_velocities(const BasisInterval& iv, double s, std::span<const double> positions,
                                       NodeGuard guard, std::size_t threads) {
  const std::size_t n = iv.a.size();
  check_positions(*iv.grid, n, positions);
  const RowData rows = build_rows(n, positions, iv.max_density, [&](std::size_t j, double x) {
    const LocalAmplitude la = interpolate(iv.a[j], *iv.grid, x);
    if (s == 0.0) return la;
    return blend(la, interpolate(iv.b[j], *iv.grid, x), s);
  });
  return velocities_from_rows(rows, iv.hbar_over_m, guard, threads);
}

std::vector<double> distinguishable_velocities(const BasisInterval& iv, double s,
                                               std::span<const double> positions, NodeGuard guard) {
  const std::size_t n = iv.a.size();
  check_positions(*iv.grid, n, positions);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    LocalAmplitude l = interpolate(iv.a[i], *iv.grid, positions[i]);
    if (s != 0.0) l = blend(l, interpolate(iv.b[i], *iv.grid, positions[i]), s);
    v[i] = detail::guarded_velocity(l.value, l.derivative, iv.hbar_over_m, iv.max_density[i], guard);
  }
  return v;
}

BosonicSample bosonic_equilibrium_sample(const SingleParticleBasis& basis, std::uint64_t seed, std::size_t steps) {
  const std::size_t n = basis.size();
  const SymmetrizedState state{basis};
  auto log_weight = [&](std::span<const double> x) {
    ComplexMatrix a(n), b(n);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) {
        a(k, j) = interpolate(basis[j], x[k]).value;
        b(k, j) = std::norm(a(k, j));
      }
    const double num = std::norm(permanent(a)), den = permanent(b).real();
    if (!(num > 0.0) || !(den > 0.0)) return -std::numeric_limits<double>::infinity();
    return std::log(num) - std::log(den);
  };

  Rng rng(derive_seed(seed, 0));
  BosonicSample out;
  out.positions = sequential_conditional_sample(state, derive_seed(seed, 1)).positions;
  out.log_weight = log_weight(out.positions);
  for (std::size_t s = 1; s <= steps; ++s) {
    auto proposal = sequential_conditional_sample(state, derive_seed(seed, s + 1)).positions;
    const double lw = log_weight(proposal);
    const double u = uniform01(rng);
    if (lw == -std::numeric_limits<double>::infinity()) continue;
    if (out.log_weight == -std::numeric_limits<double>::infinity() || std::log(u) < lw - out.log_weight) {
      out.positions = std::move(proposal);
      out.log_weight = lw;
      ++out.accepted;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

double uniform(Rng& rng, Range r) { return r.lo + (r.hi - r.lo) * uniform01(rng); }

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

struct SingleRun {
  std::vector<double> times;
  std::vector<double> error_exchange, error_distinguishable;
  std::vector<double> com_exchange, com_distinguishable;
  std::vector<double> newton_exchange, newton_distinguishable;
  std::vector<std::vector<double>> paths_exchange, paths_distinguishable;
  std::size_t crossings = 0;
};

using VelocityFn = std::function<std::vector<double>(double s, std::span<const double> x)>;

void rk4_step(std::vector<double>& x, double dt, const Grid1D& grid, const VelocityFn& vel) {
  const std::size_t n = x.size();
  auto shifted = [&](const std::vector<double>& k, double h) {
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = std::clamp(x[i] + h * k[i], grid.x_min(), grid.x_max());
    return y;
  };
  const auto k1 = vel(0.0, x);
  const auto k2 = vel(0.5, shifted(k1, 0.5 * dt));
  const auto k3 = vel(0.5, shifted(k2, 0.5 * dt));
  const auto k4 = vel(1.0, shifted(k3, dt));
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::clamp(x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]), grid.x_min(), grid.x_max());
  }
}

SingleRun run_single(const ComConvergenceConfig& cfg, std::size_t n, std::uint64_t seed, bool keep_paths) {
  const si::NanoFemtoUnits units{cfg.particle_mass_kg};
  const double hbar = units.hbar();
  const double slope = units.field_slope(cfg.charge_coulomb, cfg.field_volt_per_meter);
  const double accel = -slope;  // particle mass is the mass unit
  const Grid1D grid(cfg.x_min, cfg.x_max, cfg.grid_points);

  Rng rng(derive_seed(seed, n));
  std::vector<WaveFunction1D> orbitals;
  for (std::size_t i = 0; i < n; ++i) {
    TwoPacketSpec spec{uniform(rng, cfg.x_left), uniform(rng, cfg.x_right), uniform(rng, cfg.k_left),
                       uniform(rng, cfg.k_right), cfg.sigma};
    orbitals.push_back(make_two_packet(spec, grid, 1.0, hbar));
  }
  const SingleParticleBasis basis(orbitals);
  const auto sample = sequential_conditional_sample(SymmetrizedState{basis}, derive_seed(seed, 1000 + n));

  // Without exchange, particle i starts where the draw attributed to orbital i landed.
  std::vector<double> x0(n);
  for (std::size_t k = 0; k < n; ++k) x0[sample.orbital[k]] = sample.positions[k];
  std::vector<double> x0b = x0;
  if (cfg.exchange && cfg.equilibration_steps > 0)
    x0b = bosonic_equilibrium_sample(basis, derive_seed(seed, 2000 + n), cfg.equilibration_steps).positions;

  // The uniform field is handled in the freely falling frame: psi_lab(x, t)
  // equals psi_free(x - a t^2 / 2, t) up to a phase linear in x, so lab
  // velocities are v_free + a t. The orbitals are propagated free.
  const PotentialSpec free = PotentialSpec::constant(0.0);
  const std::size_t substeps = std::max<std::size_t>(1, cfg.wave_substeps);
  std::vector<PropagatorCN> props;
  for (const auto& o : orbitals) {
    PropagatorOptions opts;
    opts.energy_reference = energy_expectation(o, free);
    props.emplace_back(grid, cfg.dt / static_cast<double>(substeps), free, 1.0, hbar, opts);
  }

  const auto n_steps = static_cast<std::size_t>(std::llround(cfg.t_max / cfg.dt));
  require(n_steps >= 1, ErrorKind::InvalidArgument, "t_max must cover at least one time step");
  const std::size_t stride = std::max<std::size_t>(1, cfg.record_stride);

  std::vector<std::vector<Complex>> psi_a(n), psi_b(n);
  for (std::size_t i = 0; i < n; ++i) psi_a[i].assign(orbitals[i].amplitudes().begin(), orbitals[i].amplitudes().end());

  NodeGuard guard;
  guard.max_speed = grid.dx() / cfg.dt;
  BasisInterval iv;
  iv.grid = &grid;
  iv.hbar_over_m = hbar;
  iv.max_density.resize(n);

  std::vector<double> xb = x0b, xd = x0;
  SingleRun out;
  if (keep_paths) {
    out.paths_exchange.assign(n, {});
    out.paths_distinguishable.assign(n, {});
  }

  double vb0 = 0.0, vd0 = 0.0;
  const double xcm0b = mean(x0b), xcm0d = mean(x0);
  auto record = [&](std::size_t step) {
    const double t = static_cast<double>(step) * cfg.dt;
    const double shift = 0.5 * accel * t * t;
    out.times.push_back(t);
    const double cb = mean(xb) + shift, cd = mean(xd) + shift;
    out.com_exchange.push_back(cb);
    out.com_distinguishable.push_back(cd);
    out.newton_exchange.push_back(xcm0b + vb0 * t + shift);
    out.newton_distinguishable.push_back(xcm0d + vd0 * t + shift);
    out.error_exchange.push_back(std::abs(cb - out.newton_exchange.back()) / cfg.error_length);
    out.error_distinguishable.push_back(std::abs(cd - out.newton_distinguishable.back()) / cfg.error_length);
    if (keep_paths) {
      for (std::size_t i = 0; i < n; ++i) {
        out.paths_exchange[i].push_back(xb[i] + shift);
        out.paths_distinguishable[i].push_back(xd[i] + shift);
      }
    }
    if (cfg.exchange) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          if ((x0b[i] < x0b[j]) != (xb[i] < xb[j]) && x0b[i] != x0b[j]) ++out.crossings;
    }
  };

  for (std::size_t i = 0; i < n; ++i) iv.max_density[i] = detail::max_density(psi_a[i]);
  iv.a = psi_a;
  iv.b = psi_a;
  // Newton launch: centre-of-mass velocity at t = 0 (frame velocity is zero then).
  if (cfg.exchange) vb0 = mean(bosonic_velocities(iv, 0.0, xb, guard, cfg.threads));
  if (cfg.distinguishable) vd0 = mean(distinguishable_velocities(iv, 0.0, xd, guard));
  record(0);

  for (std::size_t s = 1; s <= n_steps; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      psi_b[i] = psi_a[i];
      for (std::size_t k = 0; k < substeps; ++k) props[i].step_inplace(psi_b[i]);
      iv.max_density[i] = std::max(detail::max_density(psi_a[i]), detail::max_density(psi_b[i]));
    }
    iv.a = psi_a;
    iv.b = psi_b;
    if (cfg.exchange) {
      rk4_step(xb, cfg.dt, grid, [&](double f, std::span<const double> x) {
        return bosonic_velocities(iv, f, x, guard, cfg.threads);
      });
    }
    if (cfg.distinguishable) {
      rk4_step(xd, cfg.dt, grid, [&](double f, std::span<const double> x) {
        return distinguishable_velocities(iv, f, x, guard);
      });
    }
    std::swap(psi_a, psi_b);
    if (s % stride == 0 || s == n_steps) record(s);
  }
  return out;
}

}  // namespace

ComConvergenceResult run_com_convergence(const ComConvergenceConfig& cfg) {
  require(!cfg.particle_counts.empty() && !cfg.seeds.empty(), ErrorKind::InvalidArgument,
          "convergence run needs particle counts and seeds");
  require(cfg.exchange || cfg.distinguishable, ErrorKind::InvalidArgument, "enable at least one dynamics");
  require(cfg.dt > 0.0 && cfg.t_max > 0.0 && cfg.error_length > 0.0, ErrorKind::InvalidArgument,
          "dt, t_max and error length must be positive");
  for (std::size_t n : cfg.particle_counts) {
    require(n >= 1 && n <= kMaxPermanentOrder, ErrorKind::TooLarge, "particle count must lie in [1, 24]");
  }
  const std::size_t n_keep = *std::max_element(cfg.particle_counts.begin(), cfg.particle_counts.end());

  ComConvergenceResult result;
  for (std::size_t n : cfg.particle_counts) {
    ComConvergenceSeries series;
    series.n_particles = n;
    for (std::size_t k = 0; k < cfg.seeds.size(); ++k) {
      const bool keep = cfg.keep_example_trajectories && n == n_keep && k == 0 && result.example.n_particles == 0;
      SingleRun run = run_single(cfg, n, cfg.seeds[k], keep);
      if (series.times.empty()) {
        series.times = run.times;
        if (cfg.exchange) series.mean_error_exchange.assign(run.times.size(), 0.0);
        if (cfg.distinguishable) series.mean_error_distinguishable.assign(run.times.size(), 0.0);
      }
      const double w = 1.0 / static_cast<double>(cfg.seeds.size());
      for (std::size_t t = 0; t < run.times.size(); ++t) {
        if (cfg.exchange) series.mean_error_exchange[t] += w * run.error_exchange[t];
        if (cfg.distinguishable) series.mean_error_distinguishable[t] += w * run.error_distinguishable[t];
      }
      if (cfg.exchange) series.final_error_exchange.push_back(run.error_exchange.back());
      if (cfg.distinguishable) series.final_error_distinguishable.push_back(run.error_distinguishable.back());
      series.exchange_crossings += run.crossings;
      if (keep) {
        auto& ex = result.example;
        ex.n_particles = n;
        ex.times = run.times;
        if (cfg.exchange) {
          ex.exchange_paths = std::move(run.paths_exchange);
          ex.exchange_com = std::move(run.com_exchange);
          ex.exchange_newton = std::move(run.newton_exchange);
        }
        if (cfg.distinguishable) {
          ex.distinguishable_paths = std::move(run.paths_distinguishable);
          ex.distinguishable_com = std::move(run.com_distinguishable);
          ex.distinguishable_newton = std::move(run.newton_distinguishable);
        }
      }
    }
    result.series.push_back(std::move(series));
  }
  return result;
}

}  // namespace pilotwave
