#include "pilotwave/com_analysis.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "pilotwave/error.hpp"
#include "pilotwave/units.hpp"

namespace pilotwave {

ComSeries com_of_experiment(const TrajectoryEnsemble& ens, std::size_t j) {
  require(ens.experiments() > 0 && ens.particles() > 0 && ens.time_count() > 0, ErrorKind::EmptyEnsemble,
          "ensemble has no trajectories");
  require(j < ens.experiments(), ErrorKind::InvalidArgument, "experiment index out of range");
  ComSeries out;
  out.provenance = ComProvenance::SingleExperiment;
  out.times = ens.times();
  const double w = 1.0 / static_cast<double>(ens.particles());
  for (std::size_t t = 0; t < ens.time_count(); ++t) {
    double x = 0.0, v = 0.0;
    for (std::size_t i = 0; i < ens.particles(); ++i) {
      x += ens.position(j, i, t);
      v += ens.velocity(j, i, t);
    }
    out.x_cm.push_back(w * x);
    out.v_cm.push_back(w * v);
  }
  return out;
}

ComSeries ensemble_com(const TrajectoryEnsemble& ens) {
  require(ens.experiments() > 0 && ens.particles() > 0 && ens.time_count() > 0, ErrorKind::EmptyEnsemble,
          "ensemble has no trajectories");
  ComSeries out;
  out.provenance = ComProvenance::QuantumEnsemble;
  out.times = ens.times();
  out.x_cm.assign(ens.time_count(), 0.0);
  out.v_cm.assign(ens.time_count(), 0.0);
  const double w = 1.0 / static_cast<double>(ens.particles() * ens.experiments());
  for (std::size_t j = 0; j < ens.experiments(); ++j)
    for (std::size_t i = 0; i < ens.particles(); ++i)
      for (std::size_t t = 0; t < ens.time_count(); ++t) {
        out.x_cm[t] += w * ens.position(j, i, t);
        out.v_cm[t] += w * ens.velocity(j, i, t);
      }
  return out;
}

ComSeries newton_reference(const PotentialSpec& potential, double mass, double x0, double v0, double dt,
                           std::size_t n_steps) {
  require(mass > 0.0 && dt > 0.0, ErrorKind::InvalidArgument, "mass and dt must be positive");
  const double cbrt2 = std::cbrt(2.0);
  const double w1 = 1.0 / (2.0 - cbrt2);
  const std::array<double, 3> weights{w1, -cbrt2 * w1, w1};

  ComSeries out;
  out.provenance = ComProvenance::Newton;
  double x = x0, v = v0;
  double a = -potential.gradient(x) / mass;
  auto push = [&](std::size_t s) {
    out.times.push_back(static_cast<double>(s) * dt);
    out.x_cm.push_back(x);
    out.v_cm.push_back(v);
    out.energy.push_back(0.5 * mass * v * v + potential.value(x));
  };
  push(0);
  for (std::size_t s = 1; s <= n_steps; ++s) {
    for (double w : weights) {
      const double h = w * dt;
      v += 0.5 * h * a;
      x += h * v;
      a = -potential.gradient(x) / mass;
      v += 0.5 * h * a;
    }
    push(s);
  }
  return out;
}

double phi_normal(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace {

// Acklam's rational approximation, relative error ~1e-9.
double acklam(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  auto tail = [&](double q) {
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  };
  if (p < p_low) return tail(std::sqrt(-2.0 * std::log(p)));
  if (p > 1.0 - p_low) return -tail(std::sqrt(-2.0 * std::log1p(-p)));
  const double q = p - 0.5, r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double phi_normal_inv(double p) {
  require(p > 0.0 && p < 1.0, ErrorKind::DomainError, "probability must lie in (0, 1)");
  double x = acklam(p);
  // Newton polish against whichever tail keeps the residual exact.
  for (int it = 0; it < 2; ++it) {
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    if (pdf == 0.0) break;
    double residual;
    if (p > 0.5) {
      residual = (1.0 - p) - 0.5 * std::erfc(x / std::numbers::sqrt2);  // Phi(x) - p via upper tails
    } else {
      residual = phi_normal(x) - p;
    }
    x -= residual / pdf;
  }
  return x;
}

double particle_bound(double err_over_sigma, double probability) {
  require(probability > 0.0 && probability < 1.0, ErrorKind::DomainError, "probability must lie in (0, 1)");
  require(err_over_sigma > 0.0, ErrorKind::DomainError, "relative error must be positive");
  const double z = phi_normal_inv(0.5 * (1.0 + probability));
  return (z / err_over_sigma) * (z / err_over_sigma);
}

double required_particles(double err_over_sigma, double probability) {
  const double bound = particle_bound(err_over_sigma, probability);
  // Floating noise just above an integer must not cost an extra particle.
  const double nearest = std::round(bound);
  if (std::abs(bound - nearest) <= 1e-9 * std::max(1.0, nearest)) return std::max(1.0, nearest);
  return std::max(1.0, std::ceil(bound));
}

double required_error(double n_particles, double n_experiments) {
  require(n_particles >= 1.0, ErrorKind::DomainError, "N_F must be at least 1");
  require(n_experiments >= 2.0, ErrorKind::DomainError, "M_F must be at least 2");
  if (n_experiments == 2.0) return 0.0;
  return phi_normal_inv(1.0 - 1.0 / n_experiments) / std::sqrt(n_particles);
}

double coverage_probability(double n_particles, double err_over_sigma) {
  require(n_particles >= 1.0 && err_over_sigma >= 0.0, ErrorKind::DomainError, "invalid coverage arguments");
  return 2.0 * phi_normal(std::sqrt(n_particles) * err_over_sigma) - 1.0;
}

ErrorBudget make_error_budget(double n_particles, double n_experiments, double sigma) {
  require(sigma > 0.0, ErrorKind::DomainError, "sigma must be positive");
  ErrorBudget b;
  b.n_particles = n_particles;
  b.n_experiments = n_experiments;
  b.sigma = sigma;
  b.err = required_error(n_particles, n_experiments) * sigma;
  b.probability = 1.0 - 2.0 / n_experiments;
  return b;
}

double free_packet_sigma(double sigma0, double mass, double hbar, double t) {
  require(sigma0 > 0.0 && mass > 0.0, ErrorKind::DomainError, "sigma0 and mass must be positive");
  const double r = hbar * t / (2.0 * mass * sigma0 * sigma0);
  return sigma0 * std::sqrt(1.0 + r * r);
}

WorkedExample worked_example() {
  WorkedExample w;
  w.sigma_t = free_packet_sigma(w.sigma0, w.mass, si::hbar, w.time);
  w.err_over_sigma = required_error(w.n_particles, w.n_experiments);
  w.err = w.err_over_sigma * w.sigma_t;
  return w;
}

}  // namespace pilotwave
