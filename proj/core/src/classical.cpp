#include "pilotwave/classical.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "pilotwave/error.hpp"

namespace pilotwave {

ClassicalPropagator::ClassicalPropagator(Grid1D grid, double dt, PotentialSpec potential, double mass, double hbar,
                                         ClassicalOptions options)
    : grid_(std::move(grid)),
      dt_(dt),
      potential_(std::move(potential)),
      mass_(mass),
      hbar_(hbar),
      options_(options) {
  require(dt > 0.0 && std::isfinite(dt), ErrorKind::InvalidArgument, "time step must be positive");
  require(mass > 0.0 && hbar > 0.0, ErrorKind::InvalidArgument, "mass and hbar must be positive");
  require(options.node_epsilon > 0.0 && options.phase_tolerance > 0.0 && options.resolution_tolerance > 0.0,
          ErrorKind::InvalidArgument,
          "classical propagator tolerances must be positive");
}

namespace {

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

/// Quintic Lagrange interpolation on a uniform grid: value and first derivative.
class Interpolator {
 public:
  Interpolator(const Grid1D& grid, const std::vector<double>& y) : grid_(grid), y_(y) {}

  void eval(double x, double& value, double& slope) const {
    const std::size_t n = y_.size();
    const double s = (x - grid_.x_min()) / grid_.dx();
    const auto base = static_cast<std::ptrdiff_t>(std::floor(s)) - 2;
    const std::size_t j0 = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(base, 0, static_cast<std::ptrdiff_t>(n) - 6));
    const double u = s - static_cast<double>(j0);
    value = 0.0;
    slope = 0.0;
    for (int k = 0; k < 6; ++k) {
      double w = 1.0, dw = 0.0;
      for (int l = 0; l < 6; ++l) {
        if (l == k) continue;
        const double f = (u - l) / (k - l);
        dw = dw * f + w / (k - l);
        w *= f;
      }
      value += w * y_[j0 + k];
      slope += dw * y_[j0 + k];
    }
    slope /= grid_.dx();
  }

 private:
  const Grid1D& grid_;
  const std::vector<double>& y_;
};

}  // namespace

void ClassicalPropagator::step_inplace(std::vector<Complex>& psi) const {
  require(psi.size() == grid_.size(), ErrorKind::GridMismatch, "state size differs from the grid");
  const std::size_t n = psi.size();
  require(n >= 8, ErrorKind::InvalidArgument, "classical propagation needs at least 8 grid points");

  std::vector<double> r(n), phase(n);
  double r_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = std::abs(psi[i]);
    r_max = std::max(r_max, r[i]);
  }
  require(r_max > 0.0, ErrorKind::ZeroNorm, "classical state has zero norm");

  double sixth = 0.0;
  for (std::size_t i = 3; i + 3 < n; ++i) {
    if (r[i] < options_.support_fraction * r_max) continue;
    const double d6 = r[i - 3] - 6.0 * r[i - 2] + 15.0 * r[i - 1] - 20.0 * r[i] + 15.0 * r[i + 1] - 6.0 * r[i + 2] +
                      r[i + 3];
    sixth = std::max(sixth, std::abs(d6));
  }
  const double interp_error = 0.005 * sixth / r_max;
  if (interp_error > options_.resolution_tolerance) {
    fail(ErrorKind::Nonconvergence, "packet under-resolved (interpolation error " + short_number(interp_error) +
                                        " of max R); refine the grid");
  }

  // Unwrapped phase on the support, continued linearly into the tails where
  // arg(psi) is roundoff.
  const double floor = options_.node_epsilon * r_max;
  std::size_t lo = 0, hi = n - 1;
  while (lo < hi && r[lo] < floor) ++lo;
  while (hi > lo && r[hi] < floor) --hi;
  phase[lo] = std::arg(psi[lo]);
  for (std::size_t i = lo + 1; i <= hi; ++i) phase[i] = phase[i - 1] + std::arg(psi[i] * std::conj(psi[i - 1]));
  const double left_slope = hi > lo ? phase[lo + 1] - phase[lo] : 0.0;
  const double right_slope = hi > lo ? phase[hi] - phase[hi - 1] : 0.0;
  for (std::size_t i = lo; i-- > 0;) phase[i] = phase[i + 1] - left_slope;
  for (std::size_t i = hi + 1; i < n; ++i) phase[i] = phase[i - 1] + right_slope;

  const Interpolator amp(grid_, r), ph(grid_, phase);
  const double h = grid_.dx();
  const double x_lo = grid_.x_min(), x_hi = grid_.x_max();
  const double k_scale = hbar_ / mass_;
  std::vector<Complex> out(n, Complex{});

  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double x = grid_.x(i);
    // Departure point of the characteristic x = x_d + v dt + a dt^2 / 2 that
    // ends on the node, by Newton iteration.
    double xd = x, rd = 0.0, sd = 0.0, v = 0.0, dv = 0.0, a = 0.0, da = 0.0, jac = 1.0;
    double step = 0.0;
    bool converged = false;
    for (int it = 0; it < 30; ++it) {
      double s_val, s_slope;
      ph.eval(xd, s_val, s_slope);
      double dummy, s_slope_plus, s_slope_minus;
      ph.eval(xd + 0.5 * h, dummy, s_slope_plus);
      ph.eval(xd - 0.5 * h, dummy, s_slope_minus);
      v = k_scale * s_slope;
      dv = k_scale * (s_slope_plus - s_slope_minus) / h;
      a = -potential_.gradient(xd) / mass_;
      da = -(potential_.gradient(xd + h) - potential_.gradient(xd - h)) / (2.0 * h * mass_);
      const double arrival = xd + v * dt_ + 0.5 * a * dt_ * dt_;
      jac = 1.0 + dv * dt_ + 0.5 * da * dt_ * dt_;
      if (!(jac > 0.0)) break;
      step = (arrival - x) / jac;
      xd -= step;
      if (std::abs(step) <= 1e-13 * (1.0 + std::abs(x))) {
        converged = true;
        break;
      }
    }
    if (xd < x_lo || xd > x_hi) continue;
    double dummy;
    amp.eval(xd, rd, dummy);
    ph.eval(xd, sd, dummy);
    const bool supported = rd >= options_.support_fraction * r_max;
    if (!(jac > 0.0)) {
      if (supported) {
        fail(ErrorKind::Nonconvergence, "characteristics cross at x = " + short_number(x) +
                                            " (caustic); the classical wave is no longer single valued");
      }
      continue;
    }
    if (!converged && supported) {
      // Residual phase error of the unconverged departure point.
      const double err = std::abs(step) * mass_ * std::abs(v) / hbar_;
      if (err > options_.phase_tolerance) {
        fail(ErrorKind::Nonconvergence, "departure point did not converge (phase error " + short_number(err) +
                                            " rad); reduce dt");
      }
    }
    // Action along the path, Simpson rule (exact for linear V).
    auto lagrangian = [&](double tau) {
      const double vt = v + a * tau;
      return 0.5 * mass_ * vt * vt - potential_.value(xd + v * tau + 0.5 * a * tau * tau);
    };
    const double action = dt_ / 6.0 * (lagrangian(0.0) + 4.0 * lagrangian(0.5 * dt_) + lagrangian(dt_));
    out[i] = std::polar(std::max(rd, 0.0) / std::sqrt(jac), sd + action / hbar_);
  }

  double total = 0.0;
  for (const auto& z : out) total += std::norm(z);
  total *= grid_.dx();
  require(total > 1e-300, ErrorKind::ZeroNorm, "classical state lost its norm");
  const double scale = 1.0 / std::sqrt(total);
  for (std::size_t i = 0; i < n; ++i) psi[i] = out[i] * scale;
}

WaveFunction1D classical_step(const ClassicalPropagator& prop, const WaveFunction1D& wf) {
  require(wf.grid() == prop.grid() && wf.mass() == prop.mass() && wf.hbar() == prop.hbar(),
          ErrorKind::GridMismatch, "state does not match the classical propagator");
  std::vector<Complex> psi(wf.amplitudes().begin(), wf.amplitudes().end());
  prop.step_inplace(psi);
  return wf.with_amplitudes(std::move(psi));
}

EvolveResult evolve_classical(const ClassicalPropagator& prop, const WaveFunction1D& wf, std::size_t n_steps,
                              EvolveOptions options) {
  require(wf.grid() == prop.grid(), ErrorKind::GridMismatch, "state grid differs from propagator grid");
  const std::size_t stride = std::max<std::size_t>(1, options.record_stride);
  const std::size_t snap = std::max<std::size_t>(1, options.snapshot_stride);
  EvolveResult out(wf);
  std::vector<Complex> psi(wf.amplitudes().begin(), wf.amplitudes().end());
  auto record = [&](std::size_t s) {
    const WaveFunction1D cur = wf.with_amplitudes(psi);
    const double t = static_cast<double>(s) * prop.dt();
    if (s % stride == 0 || s == n_steps) {
      out.times.push_back(t);
      out.mean_position.push_back(mean_position(cur));
      out.width.push_back(position_width(cur));
      out.current_integral.push_back(current_integral(cur));
      out.norm.push_back(norm(cur));
      out.boundary_warning = out.boundary_warning || touches_boundary(cur);
    }
    if (options.record_snapshots && (s % snap == 0 || s == n_steps)) {
      out.snapshot_times.push_back(t);
      out.snapshots.push_back(cur);
    }
  };
  record(0);
  for (std::size_t s = 1; s <= n_steps; ++s) {
    prop.step_inplace(psi);
    record(s);
  }
  out.final_state = wf.with_amplitudes(std::move(psi));
  return out;
}

TrajectoryRun classical_trajectories(const ClassicalPropagator& prop, const WaveFunction1D& wf0,
                                     std::span<const double> initial_positions, std::size_t n_steps,
                                     TrajectoryOptions options) {
  require(wf0.grid() == prop.grid(), ErrorKind::GridMismatch, "state grid differs from propagator grid");
  const Stepper stepper = [&](std::vector<Complex>& psi) { prop.step_inplace(psi); };
  return integrate_guided(stepper, wf0, initial_positions, prop.dt(), n_steps, options);
}

// ---------------------------------------------------------------------------

PlaneField make_identity_test_field(IdentityTestFunction kind, std::size_t points) {
  PlaneField f{Grid1D(-10.0, 10.0, points), Grid1D(-10.0, 10.0, points), {}};
  f.r.resize(points * points);
  auto gauss = [](double x, double y, double cx, double cy, double sxx, double syy, double sxy) {
    // Inverse covariance entries given directly.
    const double dx = x - cx, dy = y - cy;
    return std::exp(-0.5 * (sxx * dx * dx + 2.0 * sxy * dx * dy + syy * dy * dy));
  };
  for (std::size_t i = 0; i < points; ++i) {
    const double x = f.x.x(i);
    for (std::size_t j = 0; j < points; ++j) {
      const double y = f.y.x(j);
      double v = 0.0;
      switch (kind) {
        case IdentityTestFunction::SeparableGaussian:
          v = gauss(x, y, 0.3, -0.2, 1.0, 0.5, 0.0);
          break;
        case IdentityTestFunction::CorrelatedGaussian:
          v = gauss(x, y, 0.4, -0.3, 1.0, 0.8, 0.5);
          break;
        case IdentityTestFunction::AsymmetricBimodal:
          v = gauss(x, y, -1.5, 0.5, 1.2, 0.9, 0.4) + 0.6 * gauss(x, y, 1.8, -0.7, 2.0, 1.5, -0.6);
          break;
      }
      f.r[i * points + j] = v;
    }
  }
  return f;
}

IdentityResidual quantum_potential_gradient_identity(const PlaneField& field, double mass_cm, double mass,
                                                     double hbar) {
  const std::size_t nx = field.x.size(), ny = field.y.size();
  require(field.r.size() == nx * ny, ErrorKind::InvalidArgument, "field size differs from its grid");
  auto r = [&](std::size_t i, std::size_t j) { return field.r[i * ny + j]; };
  double r_max = 0.0;
  for (double v : field.r) r_max = std::max(r_max, std::abs(v));
  require(r_max > 0.0, ErrorKind::ZeroNorm, "test amplitude vanishes");
  double edge = 0.0;
  for (std::size_t i = 0; i < nx; ++i) edge = std::max({edge, std::abs(r(i, 0)), std::abs(r(i, ny - 1))});
  for (std::size_t j = 0; j < ny; ++j) edge = std::max({edge, std::abs(r(0, j)), std::abs(r(nx - 1, j))});
  require(edge <= 1e-6 * r_max, ErrorKind::BoundaryLeak, "test amplitude does not decay at the boundary");

  const double hx = field.x.dx(), hy = field.y.dx();
  const double cx = -hbar * hbar / (2.0 * mass_cm), cy = -hbar * hbar / (2.0 * mass);
  // Q on interior points; NaN where R underflowed.
  std::vector<double> q(nx * ny, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 1; i + 1 < nx; ++i)
    for (std::size_t j = 1; j + 1 < ny; ++j) {
      const double c = r(i, j);
      if (c <= 0.0) continue;
      const double rxx = (r(i + 1, j) - 2.0 * c + r(i - 1, j)) / (hx * hx);
      const double ryy = (r(i, j + 1) - 2.0 * c + r(i, j - 1)) / (hy * hy);
      q[i * ny + j] = cx * rxx / c + cy * ryy / c;
    }

  IdentityResidual out;
  double sum = 0.0;
  for (std::size_t i = 2; i + 2 < nx; ++i)
    for (std::size_t j = 1; j + 1 < ny; ++j) {
      const double qp = q[(i + 1) * ny + j], qm = q[(i - 1) * ny + j];
      if (std::isnan(qp) || std::isnan(qm)) continue;
      const double w = r(i, j) * r(i, j);
      const double g = (qp - qm) / (2.0 * hx);
      sum += w * g;
      out.scale += w * std::abs(g);
    }
  out.absolute = std::abs(sum) * hx * hy;
  out.scale *= hx * hy;
  return out;
}

}  // namespace pilotwave
