#include "pilotwave/wavefunction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pilotwave/error.hpp"

namespace pilotwave {

WaveFunction1D::WaveFunction1D(Grid1D grid, std::vector<Complex> amplitudes, double mass, double hbar)
    : grid_(std::move(grid)), amplitudes_(std::move(amplitudes)), mass_(mass), hbar_(hbar) {
  require(amplitudes_.size() == grid_.size(), ErrorKind::GridMismatch,
          "amplitude count does not match grid size");
  require(mass > 0.0 && hbar > 0.0, ErrorKind::InvalidArgument, "mass and hbar must be positive");
}

WaveFunction1D make_gaussian(const GaussianPacketSpec& spec, const Grid1D& grid, double mass, double hbar) {
  require(spec.sigma > 0.0, ErrorKind::InvalidArgument, "Gaussian sigma must be positive");
  const double pref = 1.0 / std::sqrt(spec.sigma * std::sqrt(std::numbers::pi));
  auto envelope = [&](double x) {
    const double d = (x - spec.x0) / spec.sigma;
    return pref * std::exp(-0.5 * d * d);
  };
  const double peak = envelope(std::clamp(spec.x0, grid.x_min(), grid.x_max()));
  const double edge = std::max(envelope(grid.x_min()), envelope(grid.x_max()));
  require(peak > 0.0 && edge <= 1e-10 * pref, ErrorKind::GridTooNarrow,
          "Gaussian packet is not contained in the grid (boundary amplitude above 1e-10 of peak)");
  auto wf = sample_function(
      grid, [&](double x) { return envelope(x) * std::polar(1.0, spec.k0 * x); }, mass, hbar);
  return normalize(wf);
}

double norm(const WaveFunction1D& wf) { return trapezoid(density(wf), wf.grid().dx()); }

WaveFunction1D scale(const WaveFunction1D& wf, Complex factor) {
  std::vector<Complex> a(wf.amplitudes().begin(), wf.amplitudes().end());
  for (auto& v : a) v *= factor;
  return wf.with_amplitudes(std::move(a));
}

WaveFunction1D normalize(const WaveFunction1D& wf) {
  const double n = norm(wf);
  require(std::isfinite(n), ErrorKind::InvalidArgument, "wave function has non-finite amplitudes");
  require(n >= 1e-300, ErrorKind::ZeroNorm, "cannot normalize a wave function with zero norm");
  return scale(wf, 1.0 / std::sqrt(n));
}

std::vector<double> density(const WaveFunction1D& wf) {
  std::vector<double> rho(wf.size());
  for (std::size_t i = 0; i < wf.size(); ++i) rho[i] = std::norm(wf[i]);
  return rho;
}

std::vector<double> modulus(const WaveFunction1D& wf) {
  std::vector<double> r(wf.size());
  for (std::size_t i = 0; i < wf.size(); ++i) r[i] = std::abs(wf[i]);
  return r;
}

std::vector<double> probability_current(const WaveFunction1D& wf) {
  const std::size_t n = wf.size();
  const double dx = wf.grid().dx();
  const double c = wf.hbar() / wf.mass();
  std::vector<double> j(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Complex z = wf[i + 1] * std::conj(wf[i - 1]);
    if (z == Complex{}) continue;
    j[i] = c * std::norm(wf[i]) * std::arg(z) / (2.0 * dx);
  }
  return j;
}

double current_integral(const WaveFunction1D& wf) { return trapezoid(probability_current(wf), wf.grid().dx()); }

double mean_position(const WaveFunction1D& wf) {
  const auto rho = density(wf);
  std::vector<double> xr(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) xr[i] = wf.grid().x(i) * rho[i];
  return trapezoid(xr, wf.grid().dx()) / trapezoid(rho, wf.grid().dx());
}

double position_width(const WaveFunction1D& wf) {
  const auto rho = density(wf);
  const double mu = mean_position(wf);
  std::vector<double> m2(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double d = wf.grid().x(i) - mu;
    m2[i] = d * d * rho[i];
  }
  return std::sqrt(trapezoid(m2, wf.grid().dx()) / trapezoid(rho, wf.grid().dx()));
}

double mean_kinetic_energy(const WaveFunction1D& wf) {
  const std::size_t n = wf.size();
  const double dx = wf.grid().dx();
  std::vector<double> t(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Complex lap = (wf[i + 1] - 2.0 * wf[i] + wf[i - 1]) / (dx * dx);
    t[i] = std::real(std::conj(wf[i]) * lap);
  }
  return -wf.hbar() * wf.hbar() / (2.0 * wf.mass()) * trapezoid(t, dx) / norm(wf);
}

std::vector<double> quantum_potential(const WaveFunction1D& wf, QuantumPotentialOptions options) {
  return quantum_potential(modulus(wf), wf.grid().dx(), wf.mass(), wf.hbar(), options);
}

std::vector<double> quantum_potential(std::span<const double> r, double dx, double mass, double hbar,
                                      QuantumPotentialOptions options) {
  const std::size_t n = r.size();
  std::vector<double> q(n, 0.0);
  if (n < 3) return q;
  const double rmax = *std::max_element(r.begin(), r.end());
  if (!(rmax > 0.0)) return q;
  const double threshold = options.epsilon * rmax;
  const double c = -hbar * hbar / (2.0 * mass * dx * dx);

  if (options.rule == NodeRule::FloorAmplitude) {
    auto reg = [&](std::size_t i) { return std::max(r[i], threshold); };
    for (std::size_t i = 1; i + 1 < n; ++i) q[i] = c * (reg(i + 1) - 2.0 * reg(i) + reg(i - 1)) / reg(i);
    q[0] = q[1];
    q[n - 1] = q[n - 2];
    return q;
  }

  std::vector<char> valid(n, 0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (r[i] >= threshold) {
      valid[i] = 1;
      q[i] = c * (r[i + 1] - 2.0 * r[i] + r[i - 1]) / r[i];
    }
  }
  // Nearest valid neighbour fill: distance to the closest valid point on each side.
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> left(n, kNone), right(n, kNone);
  for (std::size_t i = 0, last = kNone; i < n; ++i) {
    if (valid[i]) last = i;
    left[i] = last;
  }
  for (std::size_t i = n, last = kNone; i-- > 0;) {
    if (valid[i]) last = i;
    right[i] = last;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (valid[i]) continue;
    const std::size_t l = left[i], rr = right[i];
    if (l == kNone && rr == kNone) continue;
    if (l == kNone) q[i] = q[rr];
    else if (rr == kNone) q[i] = q[l];
    else q[i] = (i - l <= rr - i) ? q[l] : q[rr];
  }
  return q;
}

LocalAmplitude interpolate(std::span<const Complex> a, const Grid1D& grid, double x) noexcept {
  const std::size_t n = grid.size();
  const double dx = grid.dx();
  const std::size_t cell = grid.cell_of(x);
  const std::size_t start = std::min(cell > 0 ? cell - 1 : 0, n - 4);

  const Complex link = a[cell + 1] * std::conj(a[cell]);
  const double kc = (link == Complex{}) ? 0.0 : std::arg(link) / dx;
  const double x_ref = grid.x(cell);

  Complex phi[4];
  for (std::size_t m = 0; m < 4; ++m) {
    const double off = grid.x(start + m) - x_ref;
    phi[m] = a[start + m] * std::polar(1.0, -kc * off);
  }
  const double u = (x - grid.x(start)) / dx;
  const double u0 = u, u1 = u - 1.0, u2 = u - 2.0, u3 = u - 3.0;
  const double l0 = -u1 * u2 * u3 / 6.0;
  const double l1 = u0 * u2 * u3 / 2.0;
  const double l2 = -u0 * u1 * u3 / 2.0;
  const double l3 = u0 * u1 * u2 / 6.0;
  const double d0 = -(u2 * u3 + u1 * u3 + u1 * u2) / 6.0;
  const double d1 = (u2 * u3 + u0 * u3 + u0 * u2) / 2.0;
  const double d2 = -(u1 * u3 + u0 * u3 + u0 * u1) / 2.0;
  const double d3 = (u1 * u2 + u0 * u2 + u0 * u1) / 6.0;

  const Complex value = l0 * phi[0] + l1 * phi[1] + l2 * phi[2] + l3 * phi[3];
  const Complex slope = (d0 * phi[0] + d1 * phi[1] + d2 * phi[2] + d3 * phi[3]) / dx;
  const Complex carrier = std::polar(1.0, kc * (x - x_ref));
  return {value * carrier, (slope + Complex(0.0, kc) * value) * carrier};
}

}  // namespace pilotwave
