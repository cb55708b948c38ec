#include "pilotwave/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>

#include "json.hpp"

#include "pilotwave/classical.hpp"
#include "pilotwave/com_analysis.hpp"
#include "pilotwave/coords.hpp"
#include "pilotwave/csv.hpp"
#include "pilotwave/error.hpp"
#include "pilotwave/manybody.hpp"
#include "pilotwave/tdse.hpp"

#ifndef PILOTWAVE_VERSION
#define PILOTWAVE_VERSION "unknown"
#endif
#ifndef PILOTWAVE_REVISION
#define PILOTWAVE_REVISION ""
#endif

namespace pilotwave {
namespace {

using json = nlohmann::ordered_json;

Check gate(std::string name, int criterion, double value, std::string relation, double threshold,
           std::string detail = {}, double upper = 0.0) {
  Check c{std::move(name), criterion, value, threshold, std::move(relation), upper, false, std::move(detail)};
  if (std::isfinite(value)) {
    if (c.relation == "<") c.passed = value < threshold;
    else if (c.relation == "<=") c.passed = value <= threshold;
    else if (c.relation == ">") c.passed = value > threshold;
    else if (c.relation == ">=") c.passed = value >= threshold;
    else if (c.relation == "in") c.passed = value >= threshold && value <= upper;
  }
  return c;
}

Check failed_gate(std::string name, int criterion, std::string relation, double threshold, std::string detail) {
  Check c = gate(std::move(name), criterion, std::nan(""), std::move(relation), threshold, std::move(detail));
  c.passed = false;
  return c;
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

/// Collects output files; a no-op when the directory is empty.
class Output {
 public:
  Output(std::filesystem::path dir, bool svg, std::vector<std::filesystem::path>& files)
      : dir_(std::move(dir)), svg_(svg), files_(files) {
    if (!dir_.empty()) {
      std::error_code ec;
      std::filesystem::create_directories(dir_, ec);
      require(!ec, ErrorKind::IoError, "cannot create output directory " + dir_.string() + ": " + ec.message());
    }
  }
  bool enabled() const { return !dir_.empty(); }
  void table(const std::string& stem, const Table& t, const PlotStyle& style = {}) {
    if (!enabled()) return;
    emit_csv(t, dir_ / (stem + ".csv"));
    files_.push_back(dir_ / (stem + ".csv"));
    if (svg_) {
      PlotStyle s = style;
      if (s.title.empty()) s.title = stem;
      emit_svg(t, dir_ / (stem + ".svg"), s);
      files_.push_back(dir_ / (stem + ".svg"));
    }
  }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  bool svg_;
  std::vector<std::filesystem::path>& files_;
};

struct Stepping {
  double dt;
  std::size_t steps;
  std::size_t stride;
};

Stepping stepping(const ExperimentConfig& c, double auto_dt) {
  const double target = c.dt > 0.0 ? c.dt : auto_dt;
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::round(c.t_max / target)));
  const std::size_t stride = c.record_stride > 0 ? c.record_stride : std::max<std::size_t>(1, steps / 200);
  return {c.t_max / static_cast<double>(steps), steps, stride};
}

WaveFunction1D initial_state(const ExperimentConfig& c, const Grid1D& grid, const PotentialSpec& v) {
  WaveFunction1D psi = make_gaussian(c.packet, grid, c.mass, c.hbar);
  if (c.refine_ground_state) psi = ground_state(psi, v);
  return psi;
}

Table trajectory_table(const TrajectoryEnsemble& e, std::size_t count) {
  Table t;
  t.add("t", e.times());
  const std::size_t k = std::min(count, e.particles());
  for (std::size_t i = 0; i < k; ++i) {
    const auto path = e.trajectory(0, i);
    t.add("x" + std::to_string(i), std::vector<double>(path.begin(), path.end()));
  }
  return t;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// <x>(t) of a packet in a potential with constant force -slope.
double linear_parabola(const ExperimentConfig& c, double slope, double t) {
  return c.packet.x0 + c.hbar * c.packet.k0 / c.mass * t - 0.5 * slope / c.mass * t * t;
}

double linear_slope(const PotentialSpec& v) {
  if (const auto* p = std::get_if<LinearPotential>(&v.external())) return p->slope;
  if (const auto* p = std::get_if<UniformFieldPotential>(&v.external())) return -p->charge * p->field_strength;
  if (std::holds_alternative<ConstantPotential>(v.external())) return 0.0;
  return std::nan("");
}

// ---------------------------------------------------------------------------

void run_fig1(const ExperimentConfig& c, Output& out, std::vector<Check>& checks) {
  const Grid1D grid = c.grid.build();
  const PotentialSpec v = c.potential.build();
  const WaveFunction1D psi0 = initial_state(c, grid, v);
  const double eref = c.center_energy ? energy_expectation(psi0, v) : 0.0;
  const Stepping s = stepping(c, default_time_step(grid, v, c.mass, c.hbar, eref));
  const PropagatorCN prop(grid, s.dt, v, c.mass, c.hbar, {LaplacianStencil::Numerov, eref});

  const auto x0 = sample_positions(psi0, c.trajectories, derive_seed(c.seed, 1), c.sampling);
  TrajectoryOptions opts;
  opts.record_stride = s.stride;
  opts.threads = c.threads;
  const TrajectoryRun run = integrate_trajectories(prop, psi0, x0, s.steps, opts);
  const ComSeries mean = ensemble_com(run.ensemble);

  const double slope = linear_slope(v);
  std::vector<double> parabola;
  for (double t : mean.times) parabola.push_back(linear_parabola(c, slope, t));

  Table t;
  t.add("t", mean.times);
  t.add("ensemble_mean", mean.x_cm);
  t.add("wave_mean", run.wave_mean);
  if (std::isfinite(slope)) t.add("ehrenfest", parabola);
  out.table("fig1_mean", t, {"Ensemble mean position", "t", "<x>"});
  out.table("fig1_trajectories", trajectory_table(run.ensemble, c.plotted_trajectories),
            {"Bohmian trajectories", "t", "x"});

  if (std::isfinite(slope)) {
    checks.push_back(gate("ensemble mean vs Ehrenfest parabola (max abs)", 2, max_abs_diff(mean.x_cm, parabola), "<",
                          3e-2, std::to_string(c.trajectories) + " trajectories, dt " + fmt("%.3g", s.dt)));
  }
  checks.push_back(gate("norm drift", 0, std::abs(norm(run.final_state) - norm(psi0)), "<", 1e-10));
  checks.push_back(gate("escaped trajectories", 0, static_cast<double>(run.ensemble.escape_count()), "<=", 0.0));
}

void run_fig2(const ExperimentConfig& c, Output& out, std::vector<Check>& checks) {
  const Grid1D grid = c.grid.build();
  const PotentialSpec v = c.potential.build();
  const WaveFunction1D psi0 = initial_state(c, grid, v);
  const double eref = c.center_energy ? energy_expectation(psi0, v) : 0.0;
  const Stepping s = stepping(c, default_time_step(grid, v, c.mass, c.hbar, eref));
  const PropagatorCN prop(grid, s.dt, v, c.mass, c.hbar, {LaplacianStencil::Numerov, eref});

  const auto x0 = sample_positions(psi0, c.trajectories, derive_seed(c.seed, 1), c.sampling);
  TrajectoryOptions opts;
  opts.record_stride = s.stride;
  opts.threads = c.threads;
  const TrajectoryRun run = integrate_trajectories(prop, psi0, x0, s.steps, opts);

  // Interior: grid points away from the walls where the density is resolved.
  const NodeGuard guard{1e-8};
  auto interior_speed = [&](const WaveFunction1D& wf, std::vector<double>* profile) {
    const auto rho = density(wf);
    const double cut = guard.node_epsilon * *std::max_element(rho.begin(), rho.end());
    double vmax = 0.0;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
      const double vel = rho[i] >= cut ? velocity_field(wf, grid.x(i), guard) : 0.0;
      vmax = std::max(vmax, std::abs(vel));
      if (profile) profile->push_back(vel);
    }
    return vmax;
  };
  std::vector<double> v_final;
  const double v0max = interior_speed(psi0, nullptr);
  const double v1max = interior_speed(run.final_state, &v_final);

  double disp = 0.0;
  const auto& e = run.ensemble;
  for (std::size_t i = 0; i < e.particles(); ++i) {
    const auto path = e.trajectory(0, i);
    for (double x : path) disp = std::max(disp, std::abs(x - path.front()));
  }

  Table prof;
  std::vector<double> xs;
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) xs.push_back(grid.x(i));
  prof.add("x", xs);
  prof.add("velocity_final", v_final);
  out.table("fig2_velocity", prof, {"Velocity field at t_max", "x", "v"});
  out.table("fig2_trajectories", trajectory_table(e, c.plotted_trajectories), {"Bohmian trajectories", "t", "x"});

  checks.push_back(gate("max interior |v|", 1, std::max(v0max, v1max), "<", 1e-8,
                        "t=0: " + fmt("%.3g", v0max) + ", t_max: " + fmt("%.3g", v1max)));
  checks.push_back(gate("max trajectory displacement", 1, disp, "<", 1e-6,
                        std::to_string(e.particles()) + " trajectories, dt " + fmt("%.3g", s.dt)));
  checks.push_back(gate("norm drift", 0, std::abs(norm(run.final_state) - norm(psi0)), "<", 1e-10));
}

void run_custom(const ExperimentConfig& c, Output& out, std::vector<Check>& checks) {
  const Grid1D grid = c.grid.build();
  const PotentialSpec v = c.potential.build();
  const WaveFunction1D psi0 = initial_state(c, grid, v);
  const double eref = c.center_energy ? energy_expectation(psi0, v) : 0.0;
  const Stepping s = stepping(c, default_time_step(grid, v, c.mass, c.hbar, eref));
  const PropagatorCN prop(grid, s.dt, v, c.mass, c.hbar, {LaplacianStencil::Numerov, eref});

  EvolveOptions eo;
  eo.record_stride = s.stride;
  const EvolveResult ev = evolve(prop, psi0, s.steps, eo);

  Table wt;
  wt.add("t", ev.times);
  wt.add("width", ev.width);
  wt.add("mean", ev.mean_position);
  const bool free = std::holds_alternative<ConstantPotential>(v.external()) && !c.refine_ground_state;
  if (free) {
    // Density standard deviation sigma/sqrt(2) for the sampled Gaussian.
    const double w0 = c.packet.sigma / std::numbers::sqrt2;
    const double t_double = std::sqrt(3.0) * 2.0 * c.mass * w0 * w0 / c.hbar;
    std::vector<double> analytic;
    double worst = 0.0;
    for (std::size_t k = 0; k < ev.times.size(); ++k) {
      analytic.push_back(free_packet_sigma(w0, c.mass, c.hbar, ev.times[k]));
      if (ev.times[k] <= t_double * (1.0 + 1e-12))
        worst = std::max(worst, std::abs(ev.width[k] / analytic.back() - 1.0));
    }
    wt.add("analytic_width", analytic);
    std::string detail = "up to t = " + fmt("%.4g", t_double);
    if (t_double > c.t_max) detail += " (t_max " + fmt("%.4g", c.t_max) + " ends earlier)";
    checks.push_back(gate("free width vs analytic (max rel)", 3, worst, "<", 5e-3, detail));
  }
  out.table("custom_width", wt, {"Packet width", "t", "width"});

  // Equivariance: evolve |psi|^2-distributed initial positions, and as a
  // control positions uniform over +-5 widths of the packet.
  const double t_eq = c.equivariance.time;
  const auto n_eq = static_cast<std::size_t>(std::max(1.0, std::round(t_eq / s.dt)));
  const PropagatorCN prop_eq(grid, t_eq / static_cast<double>(n_eq), v, c.mass, c.hbar,
                             {LaplacianStencil::Numerov, eref});
  TrajectoryOptions opts;
  opts.record_stride = std::max<std::size_t>(1, n_eq / 100);
  opts.threads = c.threads;
  const auto born = sample_positions(psi0, c.equivariance.trajectories, derive_seed(c.seed, 2), c.sampling);
  const TrajectoryRun run = integrate_trajectories(prop_eq, psi0, born, n_eq, opts);
  const double ks = equivariance_check(run.ensemble.positions_at(run.ensemble.time_count() - 1), run.final_state);

  const double w0 = position_width(psi0);
  const double m0 = mean_position(psi0);
  Rng rng(derive_seed(c.seed, 3));
  std::vector<double> uniform(c.equivariance.trajectories);
  for (double& x : uniform) x = m0 + w0 * 5.0 * (2.0 * uniform01(rng) - 1.0);
  const TrajectoryRun ctrl = integrate_trajectories(prop_eq, psi0, uniform, n_eq, opts);
  const double ks_ctrl =
      equivariance_check(ctrl.ensemble.positions_at(ctrl.ensemble.time_count() - 1), ctrl.final_state);

  out.table("custom_trajectories", trajectory_table(run.ensemble, c.plotted_trajectories),
            {"Bohmian trajectories", "t", "x"});
  checks.push_back(gate("equivariance KS at t = " + fmt("%.4g", t_eq), 4, ks, "<", 0.05,
                        std::to_string(born.size()) + " Born-distributed trajectories"));
  checks.push_back(gate("negative control KS (uniform initials)", 4, ks_ctrl, ">", 0.2));
  checks.push_back(gate("norm drift", 0, std::abs(norm(ev.final_state) - norm(psi0)), "<", 1e-10));
}

// ---------------------------------------------------------------------------

struct ClassicalRecord {
  std::vector<double> times, mean, width;
  double failed_at = -1.0;
  std::string failure;
};

ClassicalRecord classical_record(const ClassicalPropagator& prop, const WaveFunction1D& psi0, const Stepping& s) {
  ClassicalRecord r;
  std::vector<Complex> psi(psi0.amplitudes().begin(), psi0.amplitudes().end());
  auto record = [&](double t) {
    const WaveFunction1D wf = psi0.with_amplitudes(psi);
    r.times.push_back(t);
    r.mean.push_back(mean_position(wf));
    r.width.push_back(position_width(wf));
  };
  record(0.0);
  for (std::size_t n = 1; n <= s.steps; ++n) {
    try {
      prop.step_inplace(psi);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Nonconvergence) throw;
      r.failed_at = static_cast<double>(n) * s.dt;
      r.failure = e.what();
      record(r.failed_at);
      return r;
    }
    if (n % s.stride == 0 || n == s.steps) record(static_cast<double>(n) * s.dt);
  }
  return r;
}

void classical_plot(const ExperimentConfig& c, const ClassicalPropagator& prop, const WaveFunction1D& psi0,
                    const Stepping& s, const ClassicalRecord& rec, const std::string& stem, Output& out) {
  if (!out.enabled() || rec.failed_at >= 0.0 || c.plotted_trajectories == 0) return;
  const auto x0 = sample_positions(psi0, c.plotted_trajectories, derive_seed(c.seed, 1), SamplingScheme::Stratified);
  TrajectoryOptions opts;
  opts.record_stride = s.stride;
  opts.threads = c.threads;
  const TrajectoryRun run = classical_trajectories(prop, psi0, x0, s.steps, opts);
  out.table(stem + "_trajectories", trajectory_table(run.ensemble, c.plotted_trajectories),
            {"Classical trajectories", "t", "x"});
}

void identity_checks(const ExperimentConfig& c, Output& out, std::vector<Check>& checks) {
  auto refine = [&](IdentityTestFunction kind, const std::vector<std::size_t>& points, const std::string& name) {
    std::vector<double> dx, rel;
    for (std::size_t p : points) {
      const PlaneField f = make_identity_test_field(kind, p);
      dx.push_back(f.x.dx());
      rel.push_back(quantum_potential_gradient_identity(f, c.identity.mass_cm, c.identity.mass, c.hbar).relative());
    }
    Table t;
    t.add("dx", dx);
    t.add("relative_residual", rel);
    out.table(name, t, {"Quantum-potential identity residual", "dx", "relative", true});
    return std::pair{dx, rel};
  };
  const auto [gdx, grel] = refine(IdentityTestFunction::CorrelatedGaussian, c.identity.points, "identity_gaussian");
  checks.push_back(gate("identity residual, correlated Gaussian", 11, grel.back(), "<", 1e-6,
                        std::to_string(c.identity.points.back()) + "^2 points"));
  const auto [bdx, brel] =
      refine(IdentityTestFunction::AsymmetricBimodal, c.identity.bimodal_points, "identity_bimodal");
  checks.push_back(gate("identity residual, asymmetric bimodal", 11, brel.back(), "<", 1e-5,
                        std::to_string(c.identity.bimodal_points.back()) + "^2 points"));
  const std::size_t k = brel.size() - 1;
  const double order = std::log(brel[k - 1] / brel[k]) / std::log(bdx[k - 1] / bdx[k]);
  checks.push_back(gate("identity convergence order (bimodal)", 11, order, "in", 1.8, "O(dx^2) expected", 2.2));
}

void run_fig4(const ExperimentConfig& c, Output& out, std::vector<Check>& checks) {
  const Grid1D grid = c.grid.build();
  const PotentialSpec v = c.potential.build();
  const WaveFunction1D psi0 = initial_state(c, grid, v);
  const Stepping s = stepping(c, default_time_step(grid, v, c.mass, c.hbar, energy_expectation(psi0, v)));
  const ClassicalPropagator prop(grid, s.dt, v, c.mass, c.hbar, c.classical);
  const ClassicalRecord rec = classical_record(prop, psi0, s);

  const double slope = linear_slope(v);
  std::vector<double> parabola;
  for (double t : rec.times) parabola.push_back(linear_parabola(c, slope, t));
  Table t;
  t.add("t", rec.times);
  t.add("mean", rec.mean);
  t.add("width", rec.width);
  if (std::isfinite(slope)) t.add("parabola", parabola);
  out.table("fig4_classical", t, {"Classical wave packet", "t", "x"});
  classical_plot(c, prop, psi0, s, rec, "fig4", out);

  if (rec.failed_at >= 0.0) {
    checks.push_back(failed_gate("classical linear run", 7, "<", 0.0,
                                 "stopped at t = " + fmt("%.4g", rec.failed_at) + ": " + rec.failure));
  } else {
    double drift = 0.0;
    for (double w : rec.width) drift = std::max(drift, std::abs(w / rec.width.front() - 1.0));
    checks.push_back(gate("linear width drift (max rel)", 7, drift, "<", 1e-2));
    if (std::isfinite(slope))
      checks.push_back(gate("linear <x> vs parabola (max abs)", 7, max_abs_diff(rec.mean, parabola), "<", 1e-3,
                            "dt " + fmt("%.3g", s.dt)));
  }
  identity_checks(c, out, checks);
}

void run_fig5(const ExperimentConfig& c, Output& out, std::vector<Check>& checks) {
  const Grid1D grid = c.grid.build();
  const PotentialSpec v = c.potential.build();
  require(c.potential.kind == "harmonic", ErrorKind::InvalidArgument, "fig5 needs a harmonic potential");
  const WaveFunction1D psi0 = initial_state(c, grid, v);
  const Stepping s = stepping(c, default_time_step(grid, v, c.mass, c.hbar, energy_expectation(psi0, v)));
  const ClassicalPropagator prop(grid, s.dt, v, c.mass, c.hbar, c.classical);
  const ClassicalRecord rec = classical_record(prop, psi0, s);

  const double omega = std::sqrt(c.potential.stiffness / c.mass);
  const double period = 2.0 * std::numbers::pi / omega;
  const double x0 = c.packet.x0 - c.potential.center;
  const double v0 = c.hbar * c.packet.k0 / c.mass;
  std::vector<double> newton;
  for (double t : rec.times)
    newton.push_back(c.potential.center + x0 * std::cos(omega * t) + v0 / omega * std::sin(omega * t));
  Table t;
  t.add("t", rec.times);
  t.add("mean", rec.mean);
  t.add("width", rec.width);
  t.add("newton", newton);
  out.table("fig5_classical", t, {"Classical wave packet", "t", "x"});
  classical_plot(c, prop, psi0, s, rec, "fig5", out);

  const double covered = rec.times.back();
  std::string note = "dt " + fmt("%.3g", s.dt);
  if (rec.failed_at >= 0.0) note = "stopped at t = " + fmt("%.4g", rec.failed_at) + ": " + rec.failure;
  if (covered + 1e-9 < std::min(period, c.t_max) || rec.failed_at >= 0.0) {
    checks.push_back(failed_gate("harmonic center vs Newton (one period)", 7, "<", 1e-2, note));
    checks.push_back(failed_gate("harmonic width drift (one period)", 7, "<", 2e-2, note));
    return;
  }
  double dev = 0.0, drift = 0.0;
  for (std::size_t k = 0; k < rec.times.size() && rec.times[k] <= period + 1e-9; ++k) {
    dev = std::max(dev, std::abs(rec.mean[k] - newton[k]));
    drift = std::max(drift, std::abs(rec.width[k] / rec.width.front() - 1.0));
  }
  checks.push_back(gate("harmonic center vs Newton (one period)", 7, dev, "<", 1e-2, note));
  checks.push_back(gate("harmonic width drift (one period)", 7, drift, "<", 2e-2, note));
}

// ---------------------------------------------------------------------------

void run_fig3(const ExperimentConfig& c, Output& out, std::vector<Check>& checks) {
  ComConvergenceConfig m = c.com_convergence;
  m.threads = c.threads;
  const ComConvergenceResult r = run_com_convergence(m);

  std::vector<double> ns, mean_ex, mean_di;
  std::size_t wins = 0, pairs = 0;
  for (const auto& s : r.series) {
    Table t;
    t.add("t", s.times);
    if (m.exchange) t.add("err_exchange", s.mean_error_exchange);
    if (m.distinguishable) t.add("err_distinguishable", s.mean_error_distinguishable);
    out.table("fig3_N" + std::to_string(s.n_particles), t,
              {"Relative CoM error, N = " + std::to_string(s.n_particles), "t [fs]", "error", true});
    ns.push_back(static_cast<double>(s.n_particles));
    auto mean = [](const std::vector<double>& v) {
      return v.empty() ? std::nan("") : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    mean_ex.push_back(mean(s.final_error_exchange));
    mean_di.push_back(mean(s.final_error_distinguishable));
    if (m.exchange && m.distinguishable) {
      for (std::size_t k = 0; k < s.final_error_exchange.size(); ++k) {
        wins += s.final_error_exchange[k] <= s.final_error_distinguishable[k];
        ++pairs;
      }
    }
  }
  Table fin;
  fin.add("N", ns);
  if (m.exchange) fin.add("final_err_exchange", mean_ex);
  if (m.distinguishable) fin.add("final_err_distinguishable", mean_di);
  out.table("fig3_final", fin, {"Seed-averaged final relative CoM error", "N", "error", true});

  const auto& ex = r.example;
  if (out.enabled() && ex.n_particles > 0) {
    auto paths = [&](const std::vector<std::vector<double>>& p, const std::vector<double>& com,
                     const std::vector<double>& newton) {
      Table t;
      t.add("t", ex.times);
      for (std::size_t i = 0; i < p.size(); ++i) t.add("x" + std::to_string(i), p[i]);
      t.add("x_cm", com);
      t.add("newton", newton);
      return t;
    };
    const std::string n = std::to_string(ex.n_particles);
    if (!ex.exchange_paths.empty())
      out.table("fig3_example_exchange", paths(ex.exchange_paths, ex.exchange_com, ex.exchange_newton),
                {"Trajectories with exchange, N = " + n, "t [fs]", "x [nm]"});
    if (!ex.distinguishable_paths.empty())
      out.table("fig3_example_distinguishable",
                paths(ex.distinguishable_paths, ex.distinguishable_com, ex.distinguishable_newton),
                {"Trajectories without exchange, N = " + n, "t [fs]", "x [nm]"});
  }

  const std::vector<double>& primary = m.exchange ? mean_ex : mean_di;
  bool strict = true;
  for (std::size_t k = 1; k < primary.size(); ++k) strict = strict && primary[k] < primary[k - 1];
  std::string detail = "means:";
  for (std::size_t k = 0; k < primary.size(); ++k) detail += " N" + fmt("%g", ns[k]) + "=" + fmt("%.4g", primary[k]);
  detail += strict ? " (strictly decreasing)" : " (not strictly decreasing)";
  if (ns.size() >= 3)
    checks.push_back(gate("Spearman(N, seed-averaged final error)", 6, spearman(ns, primary), "<", -0.8, detail));
  if (pairs > 0)
    checks.push_back(gate("fraction of runs with exchange error <= distinguishable", 6,
                          static_cast<double>(wins) / static_cast<double>(pairs), ">=", 0.7,
                          std::to_string(wins) + " of " + std::to_string(pairs)));
}

// ---------------------------------------------------------------------------

void run_appendix_a(const ExperimentConfig& c, Output& out, std::vector<Check>& checks) {
  const auto& a = c.appendix_a;
  const double nf = required_particles(a.err_over_sigma, a.probability);
  const double err = required_error(a.n_particles, a.n_experiments);
  const WorkedExample w = worked_example();

  Table t;
  std::vector<double> ratio, need;
  for (double r = 0.001; r <= 0.1 + 1e-12; r *= 1.2) {
    ratio.push_back(r);
    need.push_back(required_particles(r, a.probability));
  }
  t.add("err_over_sigma", ratio);
  t.add("required_particles", need);
  out.table("appendix_a_particles", t, {"Particles for p = " + fmt("%g", a.probability), "err/sigma", "N_F", true});

  checks.push_back(gate("required_particles", 8, nf, "in", 1.9e5, {}, 2.4e5));
  checks.push_back(gate("required_error (9e-12 +- 5%)", 8, err, "in", 0.95 * 9e-12, {}, 1.05 * 9e-12));
  checks.push_back(gate("worked example error [m] (8 um +- 10%)", 8, w.err, "in", 0.9 * 8e-6,
                        "sigma(t) = " + fmt("%.6g", w.sigma_t) + " m", 1.1 * 8e-6));
}

void run_appendix_b(const ExperimentConfig& c, Output& out, std::vector<Check>& checks) {
  const auto& b = c.appendix_b;
  Table t;
  std::vector<double> ns, rs, rn, ro, beta, gamma;
  double coef = 0.0, cancel = 0.0;
  for (std::size_t n : b.coefficient_n) {
    const CoordChange cc = build_coord_change(n);
    const auto r = cc.residuals();
    const auto [fb, fg] = cancellation_factors(static_cast<double>(n));
    ns.push_back(static_cast<double>(n));
    rs.push_back(r.row_sum);
    rn.push_back(r.row_norm);
    ro.push_back(r.orthogonal);
    beta.push_back(fb);
    gamma.push_back(fg);
    coef = std::max(coef, r.max());
    cancel = std::max({cancel, std::abs(fb), std::abs(fg)});
  }
  t.add("N", ns);
  t.add("row_sum", rs);
  t.add("row_norm", rn);
  t.add("orthogonal", ro);
  t.add("beta_factor", beta);
  t.add("gamma_factor", gamma);
  out.table("appendix_b_coefficients", t, {"Coefficient conditions", "N", "residual"});

  double lap = 0.0;
  std::string lap_detail;
  for (std::size_t n : b.laplacian_n) {
    for (auto fam : {LaplacianTestFunction::Gaussian, LaplacianTestFunction::AnisotropicGaussian,
                     LaplacianTestFunction::Constant}) {
      const auto rep = laplacian_identity_residual(n, fam, b.laplacian_points, b.h, derive_seed(c.seed, n));
      lap = std::max(lap, rep.max_residual);
    }
    lap_detail += (lap_detail.empty() ? "N in {" : ", ") + std::to_string(n);
  }
  lap_detail += "}";
  const auto red = v_cm_reduction(QuadraticPotential{0.3, -1.2, 0.7}, b.reduction_n, b.reduction_configurations,
                                  derive_seed(c.seed, 99));

  checks.push_back(gate("coefficient conditions (max)", 9, coef, "<", 1e-12));
  checks.push_back(gate("cancellation factors (max)", 9, cancel, "<", 1e-12));
  checks.push_back(gate("Laplacian identity residual", 9, lap, "<", 1e-5, lap_detail));
  checks.push_back(gate("quadratic V_cm reduction residual", 9, red.max_residual, "<", 1e-9,
                        "N = " + std::to_string(b.reduction_n)));
}

void run_cat(const ExperimentConfig& c, Output& out, std::vector<Check>& checks) {
  const Grid1D grid = c.grid.build();
  const CatState cat(c.cat.spec, grid, c.mass, c.hbar);
  const double mid = 0.5 * (c.cat.spec.x_left + c.cat.spec.x_right);
  std::size_t one_sided = 0, left = 0;
  std::vector<double> index, branch, cm;
  for (std::size_t j = 0; j < c.cat.experiments; ++j) {
    const ExperimentSample s = sequential_conditional_sample(cat, derive_seed(c.seed, j));
    const bool all_left = std::all_of(s.positions.begin(), s.positions.end(), [&](double x) { return x < mid; });
    const bool all_right = std::all_of(s.positions.begin(), s.positions.end(), [&](double x) { return x > mid; });
    one_sided += all_left || all_right;
    left += all_left;
    index.push_back(static_cast<double>(j));
    branch.push_back(s.branch);
    cm.push_back(std::accumulate(s.positions.begin(), s.positions.end(), 0.0) /
                 static_cast<double>(s.positions.size()));
  }
  const StateDescriptor cat_state = cat;
  const MarginalDistance cat_ks = marginal_vs_experiment_distance(cat_state, c.cat.experiments,
                                                                  derive_seed(c.seed, 1u << 20));
  const StateDescriptor product = ProductState{
      make_gaussian({c.cat.spec.packet.sigma, 0.0, c.cat.spec.packet.k0}, grid, c.mass, c.hbar),
      c.cat.product_particles};
  const MarginalDistance prod_ks = marginal_vs_experiment_distance(product, c.cat.product_experiments,
                                                                   derive_seed(c.seed, 1u << 21));

  Table t;
  t.add("experiment", index);
  t.add("branch", branch);
  t.add("x_cm", cm);
  t.add("ks_to_marginal", cat_ks.ks);
  t.add("missing_mass", cat_ks.missing_mass);
  out.table("cat_experiments", t, {"Cat-state experiments", "experiment", "value"});
  Table mt;
  mt.add("x", grid.points());
  mt.add("marginal", marginal_density(cat_state));
  out.table("cat_marginal", mt, {"Cat-state marginal", "x", "D(x)"});

  const double n = static_cast<double>(c.cat.experiments);
  checks.push_back(gate("one-sided experiments (fraction)", 10, static_cast<double>(one_sided) / n, ">=", 1.0,
                        std::to_string(one_sided) + " of " + std::to_string(c.cat.experiments)));
  checks.push_back(gate("left-branch fraction", 10, static_cast<double>(left) / n, "in", 0.45, {}, 0.55));
  checks.push_back(gate("cat single-experiment KS (min)", 10,
                        *std::min_element(cat_ks.ks.begin(), cat_ks.ks.end()), ">=", 0.45));
  checks.push_back(gate("product single-experiment KS (max)", 10,
                        *std::max_element(prod_ks.ks.begin(), prod_ks.ks.end()), "<", 0.05,
                        "N = " + std::to_string(c.cat.product_particles)));
}

json check_json(const Check& c) {
  json j;
  j["name"] = c.name;
  j["criterion"] = c.criterion;
  j["value"] = std::isfinite(c.value) ? json(c.value) : json(nullptr);
  j["relation"] = c.relation;
  j["threshold"] = c.threshold;
  if (c.relation == "in") j["upper"] = c.upper;
  j["passed"] = c.passed;
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

std::string strip_kind(const Error& e) {
  const std::string what = e.what();
  const std::string prefix = std::string(to_string(e.kind())) + ": ";
  return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
}

}  // namespace

bool RunArtifacts::passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::string code_version() {
  std::string v = "pilotwave " PILOTWAVE_VERSION;
  const std::string rev = PILOTWAVE_REVISION;
  if (!rev.empty()) v += " (" + rev + ")";
  return v;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorKind::InvalidArgument, "spearman needs two equal series");
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nan("");
  return sxy / std::sqrt(sxx * syy);
}

RunArtifacts run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  RunArtifacts art;
  art.config = config;
  if (!out_dir.empty()) art.config.output_dir = out_dir.string();
  const auto start = std::chrono::steady_clock::now();
  Output out(out_dir, config.svg, art.files);

  using Runner = void (*)(const ExperimentConfig&, Output&, std::vector<Check>&);
  Runner runner = nullptr;
  switch (config.experiment) {
    case ExperimentId::Fig1: runner = run_fig1; break;
    case ExperimentId::Fig2: runner = run_fig2; break;
    case ExperimentId::Fig3: runner = run_fig3; break;
    case ExperimentId::Fig4: runner = run_fig4; break;
    case ExperimentId::Fig5: runner = run_fig5; break;
    case ExperimentId::AppendixA: runner = run_appendix_a; break;
    case ExperimentId::AppendixB: runner = run_appendix_b; break;
    case ExperimentId::CatState: runner = run_cat; break;
    case ExperimentId::Custom: runner = run_custom; break;
  }
  try {
    runner(config, out, art.checks);
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(to_string(config.experiment)) + ": " + strip_kind(e));
  }
  art.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json meta;
  meta["experiment"] = std::string(to_string(config.experiment));
  meta["code_version"] = code_version();
  meta["wall_time_seconds"] = art.wall_seconds;
  meta["passed"] = art.passed();
  meta["config"] = json::parse(to_json(art.config));
  json checks = json::array();
  for (const auto& c : art.checks) checks.push_back(check_json(c));
  meta["checks"] = checks;
  json files = json::array();
  for (const auto& f : art.files) files.push_back(f.filename().string());
  meta["files"] = files;
  art.metadata = meta.dump(2) + "\n";
  if (out.enabled()) {
    const auto path = out.dir() / "run.json";
    std::FILE* fp = std::fopen(path.string().c_str(), "wb");
    require(fp != nullptr, ErrorKind::IoError, "cannot write " + path.string());
    const bool ok = std::fwrite(art.metadata.data(), 1, art.metadata.size(), fp) == art.metadata.size();
    std::fclose(fp);
    require(ok, ErrorKind::IoError, "short write to " + path.string());
    art.files.push_back(path);
  }
  return art;
}

}  // namespace pilotwave
