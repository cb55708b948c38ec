#pragma once

#include <cstdint>
#include <vector>

#include "pilotwave/bohm.hpp"
#include "pilotwave/potential.hpp"

namespace pilotwave {

enum class ComProvenance { QuantumEnsemble, SingleExperiment, Newton };

struct ComSeries {
  std::vector<double> times;
  std::vector<double> x_cm;
  std::vector<double> v_cm;
  ComProvenance provenance = ComProvenance::SingleExperiment;
  /// Newton series only: kinetic plus potential energy at each time.
  std::vector<double> energy;
};

/// x_cm(t) = (1/N) sum_i x_i(t) of experiment j; v_cm likewise. Throws EmptyEnsemble.
ComSeries com_of_experiment(const TrajectoryEnsemble& ensemble, std::size_t j);

/// Average over all experiments and particles.
ComSeries ensemble_com(const TrajectoryEnsemble& ensemble);

/// M x'' = -V'(x), integrated with velocity Verlet substeps composed into a
/// fourth-order symplectic step (Yoshida triple jump).
ComSeries newton_reference(const PotentialSpec& potential, double mass_total, double x0, double v0, double dt,
                           std::size_t n_steps);

/// Standard normal CDF.
double phi_normal(double x);
/// Its inverse on (0, 1). Throws DomainError outside.
double phi_normal_inv(double p);

struct ErrorBudget {
  double n_particles = 1.0;   // N_F
  double n_experiments = 2.0;  // M_F
  double sigma = 1.0;
  double err = 0.0;
  double probability = 0.5;
};

/// Smallest N_F with |x_cm - <x>| <= err with probability p:
/// N_F = ceil((Phi^{-1}((1+p)/2) / (err/sigma))^2), at least 1.
double required_particles(double err_over_sigma, double probability);
/// The unrounded bound behind required_particles.
double particle_bound(double err_over_sigma, double probability);

/// err/sigma = Phi^{-1}(1 - 1/M_F) / sqrt(N_F).
double required_error(double n_particles, double n_experiments);

/// Probability that |x_cm - <x>| <= err for N_F independent draws: 2 Phi(sqrt(N) err/sigma) - 1.
double coverage_probability(double n_particles, double err_over_sigma);

ErrorBudget make_error_budget(double n_particles, double n_experiments, double sigma);

/// sigma(t) = sigma0 sqrt(1 + (hbar t / (2 m sigma0^2))^2).
double free_packet_sigma(double sigma0, double mass, double hbar, double t);

struct WorkedExample {
  double sigma0 = 100e-9;     // m
  double mass = 2e-26;        // kg
  double time = 3.15576e7;    // s, one Julian year
  double n_particles = 6e23;
  double n_experiments = 2e12;
  double sigma_t = 0.0;        // m
  double err_over_sigma = 0.0;
  double err = 0.0;            // m
};

/// Free-packet dispersion of a mole of carbon atoms after one year combined with required_error.
WorkedExample worked_example();

}  // namespace pilotwave
