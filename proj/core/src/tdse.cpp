#include "pilotwave/tdse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pilotwave/error.hpp"

namespace pilotwave {

PropagatorCN::PropagatorCN(Grid1D grid, double dt, PotentialSpec potential, double mass, double hbar,
                           PropagatorOptions options)
    : grid_(std::move(grid)),
      dt_(dt),
      potential_(std::move(potential)),
      mass_(mass),
      hbar_(hbar),
      options_(options) {
  require(dt > 0.0 && std::isfinite(dt), ErrorKind::InvalidArgument, "time step must be positive");
  require(mass > 0.0 && hbar > 0.0, ErrorKind::InvalidArgument, "mass and hbar must be positive");
  factorize();
}

PropagatorCN::PropagatorCN(const PropagatorCN& forward, bool reversed)
    : grid_(forward.grid_),
      dt_(forward.dt_),
      potential_(forward.potential_),
      mass_(forward.mass_),
      hbar_(forward.hbar_),
      options_(forward.options_),
      reversed_(reversed) {
  factorize();
}

PropagatorCN PropagatorCN::time_reversed() const { return PropagatorCN(*this, !reversed_); }

void PropagatorCN::factorize() {
  const std::size_t n = grid_.size();
  const std::size_t m = n - 2;
  const double dx = grid_.dx();
  const double signed_dt = reversed_ ? -dt_ : dt_;
  const Complex ia(0.0, signed_dt / (2.0 * hbar_));
  const double kin = hbar_ * hbar_ / (2.0 * mass_ * dx * dx);
  const bool numerov = options_.stencil == LaplacianStencil::Numerov;
  const double m_off = numerov ? 1.0 / 12.0 : 0.0;
  const double m_diag = numerov ? 10.0 / 12.0 : 1.0;

  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = potential_.value(grid_.x(i)) - options_.energy_reference;

  lhs_lower_.assign(m, {});
  lhs_diag_.assign(m, {});
  lhs_upper_.assign(m, {});
  rhs_lower_.assign(m, {});
  rhs_diag_.assign(m, {});
  rhs_upper_.assign(m, {});
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = k + 1;
    // H row i (times the mass matrix): off-diagonals -kin + m_off V_{j}, diagonal 2 kin + m_diag V_i.
    const double h_diag = 2.0 * kin + m_diag * v[i];
    const double h_lower = -kin + m_off * v[i - 1];
    const double h_upper = -kin + m_off * v[i + 1];
    lhs_diag_[k] = m_diag + ia * h_diag;
    lhs_lower_[k] = m_off + ia * h_lower;
    lhs_upper_[k] = m_off + ia * h_upper;
    rhs_diag_[k] = m_diag - ia * h_diag;
    rhs_lower_[k] = m_off - ia * h_lower;
    rhs_upper_[k] = m_off - ia * h_upper;
  }

  // Thomas factorization of the constant left-hand side.
  upper_prime_.assign(m, {});
  inv_pivot_.assign(m, {});
  Complex pivot = lhs_diag_[0];
  inv_pivot_[0] = 1.0 / pivot;
  upper_prime_[0] = lhs_upper_[0] * inv_pivot_[0];
  for (std::size_t k = 1; k < m; ++k) {
    pivot = lhs_diag_[k] - lhs_lower_[k] * upper_prime_[k - 1];
    inv_pivot_[k] = 1.0 / pivot;
    upper_prime_[k] = lhs_upper_[k] * inv_pivot_[k];
  }
}

void PropagatorCN::step_inplace(std::span<Complex> psi) const {
  const std::size_t n = grid_.size();
  require(psi.size() == n, ErrorKind::GridMismatch, "state size does not match propagator grid");
  const std::size_t m = n - 2;
  thread_local std::vector<Complex> d;
  d.resize(m);
  psi[0] = 0.0;
  psi[n - 1] = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = k + 1;
    d[k] = rhs_lower_[k] * psi[i - 1] + rhs_diag_[k] * psi[i] + rhs_upper_[k] * psi[i + 1];
  }
  d[0] *= inv_pivot_[0];
  for (std::size_t k = 1; k < m; ++k) d[k] = (d[k] - lhs_lower_[k] * d[k - 1]) * inv_pivot_[k];
  for (std::size_t k = m - 1; k-- > 0;) d[k] -= upper_prime_[k] * d[k + 1];
  for (std::size_t k = 0; k < m; ++k) psi[k + 1] = d[k];
}

WaveFunction1D ground_state(const WaveFunction1D& guess, const PotentialSpec& potential, LaplacianStencil stencil) {
  const Grid1D& grid = guess.grid();
  const std::size_t n = grid.size();
  const std::size_t m = n - 2;
  const double dx = grid.dx();
  const double kin = guess.hbar() * guess.hbar() / (2.0 * guess.mass() * dx * dx);
  const bool numerov = stencil == LaplacianStencil::Numerov;
  const double m_off = numerov ? 1.0 / 12.0 : 0.0;
  const double m_diag = numerov ? 10.0 / 12.0 : 1.0;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = potential.value(grid.x(i));

  std::vector<double> x(m);
  for (std::size_t k = 0; k < m; ++k) x[k] = std::abs(guess.amplitudes()[k + 1]);

  auto apply_h = [&](const std::vector<double>& u, std::size_t k) {
    const std::size_t i = k + 1;
    double r = (2.0 * kin + m_diag * v[i]) * u[k];
    if (k > 0) r += (-kin + m_off * v[i - 1]) * u[k - 1];
    if (k + 1 < m) r += (-kin + m_off * v[i + 1]) * u[k + 1];
    return r;
  };
  auto apply_m = [&](const std::vector<double>& u, std::size_t k) {
    double r = m_diag * u[k];
    if (k > 0) r += m_off * u[k - 1];
    if (k + 1 < m) r += m_off * u[k + 1];
    return r;
  };
  auto rayleigh = [&](const std::vector<double>& u) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      num += u[k] * apply_h(u, k);
      den += u[k] * apply_m(u, k);
    }
    return num / den;
  };
  auto solve_shifted = [&](double shift, const std::vector<double>& rhs_vec) {
    std::vector<double> lower(m), diag(m), upper(m), d(m);
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t i = k + 1;
      diag[k] = 2.0 * kin + m_diag * v[i] - shift * m_diag;
      lower[k] = -kin + m_off * v[i - 1] - shift * m_off;
      upper[k] = -kin + m_off * v[i + 1] - shift * m_off;
      d[k] = apply_m(rhs_vec, k);
    }
    for (std::size_t k = 1; k < m; ++k) {
      const double w = lower[k] / diag[k - 1];
      diag[k] -= w * upper[k - 1];
      d[k] -= w * d[k - 1];
    }
    d[m - 1] /= diag[m - 1];
    for (std::size_t k = m - 1; k-- > 0;) d[k] = (d[k] - upper[k] * d[k + 1]) / diag[k];
    return d;
  };

  double shift = rayleigh(x);
  for (int it = 0; it < 12; ++it) {
    auto y = solve_shifted(shift * (1.0 - 1e-13) - 1e-300, x);
    double s = 0.0;
    for (double c : y) s += c * c;
    if (!std::isfinite(s) || s == 0.0) {
      shift -= 1e-10 * std::max(1.0, std::abs(shift));
      continue;
    }
    const double inv = 1.0 / std::sqrt(s);
    for (std::size_t k = 0; k < m; ++k) x[k] = y[k] * inv;
    if (it < 4) shift = rayleigh(x);
  }
  const auto peak = std::max_element(x.begin(), x.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  const double sign = *peak < 0.0 ? -1.0 : 1.0;
  std::vector<Complex> amps(n, 0.0);
  for (std::size_t k = 0; k < m; ++k) amps[k + 1] = sign * x[k];
  return normalize(guess.with_amplitudes(std::move(amps)));
}

WaveFunction1D PropagatorCN::step(const WaveFunction1D& wf) const {
  require(wf.grid() == grid_, ErrorKind::GridMismatch, "state grid differs from propagator grid");
  require(wf.mass() == mass_ && wf.hbar() == hbar_, ErrorKind::GridMismatch,
          "state mass/hbar differ from propagator");
  std::vector<Complex> a(wf.amplitudes().begin(), wf.amplitudes().end());
  step_inplace(a);
  return wf.with_amplitudes(std::move(a));
}

double default_time_step(const Grid1D& grid, const PotentialSpec& potential, double mass, double hbar,
                         double energy_reference) {
  double vmax = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    vmax = std::max(vmax, std::abs(potential.value(grid.x(i)) - energy_reference));
  }
  const double kinetic_limit = 0.5 * 2.0 * mass * grid.dx() * grid.dx() / hbar;
  const double potential_limit = vmax > 0.0 ? 0.05 * hbar / vmax : std::numeric_limits<double>::infinity();
  return std::min(kinetic_limit, potential_limit);
}

double energy_expectation(const WaveFunction1D& wf, const PotentialSpec& potential) {
  const auto rho = density(wf);
  std::vector<double> vr(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) vr[i] = potential.value(wf.grid().x(i)) * rho[i];
  return mean_kinetic_energy(wf) + trapezoid(vr, wf.grid().dx()) / trapezoid(rho, wf.grid().dx());
}

bool touches_boundary(const WaveFunction1D& wf, double relative_threshold) {
  double peak = 0.0;
  for (const auto& a : wf.amplitudes()) peak = std::max(peak, std::abs(a));
  const double edge = std::max(std::abs(wf[0]), std::abs(wf[wf.size() - 1]));
  // The walls are pinned to zero by the scheme; look one point inside.
  const double inner = std::max(std::abs(wf[1]), std::abs(wf[wf.size() - 2]));
  return std::max(edge, inner) > relative_threshold * peak;
}

EvolveResult evolve(const PropagatorCN& prop, const WaveFunction1D& wf, std::size_t n_steps,
                    EvolveOptions options) {
  require(wf.grid() == prop.grid(), ErrorKind::GridMismatch, "state grid differs from propagator grid");
  const std::size_t stride = std::max<std::size_t>(1, options.record_stride);
  const std::size_t snap_stride = std::max<std::size_t>(1, options.snapshot_stride);

  EvolveResult out(wf);
  std::vector<Complex> psi(wf.amplitudes().begin(), wf.amplitudes().end());

  auto record = [&](std::size_t step) {
    const WaveFunction1D state = wf.with_amplitudes(psi);
    const double t = static_cast<double>(step) * prop.dt();
    out.times.push_back(t);
    out.mean_position.push_back(mean_position(state));
    out.width.push_back(position_width(state));
    out.current_integral.push_back(current_integral(state));
    out.norm.push_back(norm(state));
    out.boundary_warning = out.boundary_warning || touches_boundary(state);
  };
  auto snapshot = [&](std::size_t step) {
    out.snapshot_times.push_back(static_cast<double>(step) * prop.dt());
    out.snapshots.push_back(wf.with_amplitudes(psi));
  };

  record(0);
  if (options.record_snapshots) snapshot(0);
  for (std::size_t s = 1; s <= n_steps; ++s) {
    prop.step_inplace(psi);
    if (s % stride == 0 || s == n_steps) record(s);
    if (options.record_snapshots && (s % snap_stride == 0 || s == n_steps)) snapshot(s);
  }
  out.final_state = wf.with_amplitudes(std::move(psi));
  return out;
}

}  // namespace pilotwave
