#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "pilotwave/com_analysis.hpp"
#include "pilotwave/error.hpp"

using namespace pilotwave;

namespace {

// Inverse normal CDF by bisection on erfc, working in the smaller tail.
double inverse_by_bisection(double p) {
  const bool upper = p > 0.5;
  const double q = upper ? 1.0 - p : p;
  double lo = -40.0, hi = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (oracle::normal_cdf(mid) < q ? lo : hi) = mid;
  }
  const double x = 0.5 * (lo + hi);
  return upper ? -x : x;
}

}  // namespace

TEST_CASE("normal CDF and its inverse") {
  CHECK(phi_normal(0.0) == 0.5);
  for (double x : {-6.0, -1.3, 0.2, 1.959963984540054, 4.5})
    CHECK(phi_normal(x) == doctest::Approx(oracle::normal_cdf(x)).epsilon(1e-14));
  for (double p : {1e-12, 1e-5, 0.01, 0.3, 0.5, 0.77, 0.99, 1.0 - 1e-9})
    CHECK(phi_normal_inv(p) == doctest::Approx(inverse_by_bisection(p)).epsilon(1e-9));
  for (double p : {0.0, 1.0, -0.1, 1.5}) {
    bool threw = false;
    try {
      (void)phi_normal_inv(p);
    } catch (const Error& e) {
      threw = e.kind() == ErrorKind::DomainError;
    }
    CHECK(threw);
  }
}

TEST_CASE("required particles for a 0.5 percent error at 98 percent") {
  const double n = required_particles(0.005, 0.98);
  // about 2 x 10^5
  CHECK(n >= 1.9e5);
  CHECK(n <= 2.4e5);
  const double z = inverse_by_bisection(0.99);
  CHECK(n == std::ceil((z / 0.005) * (z / 0.005)));
  CHECK(coverage_probability(n, 0.005) >= 0.98);
  CHECK(coverage_probability(n - 1.0, 0.005) < 0.98);
}

TEST_CASE("required error for a mole of particles and 2 x 10^12 experiments") {
  const double e = required_error(6e23, 2e12);
  CHECK(std::abs(e / 9e-12 - 1.0) < 0.05);
  CHECK(e == doctest::Approx(inverse_by_bisection(1.0 - 1.0 / 2e12) / std::sqrt(6e23)).epsilon(1e-6));
}

TEST_CASE("required_error and particle_bound invert each other") {
  for (double n : {10.0, 1e4, 3.3e7}) {
    for (double m : {20.0, 1e3, 1e6}) {
      const double e = required_error(n, m);
      CHECK(particle_bound(e, 1.0 - 2.0 / m) == doctest::Approx(n).epsilon(1e-9));
    }
  }
}

TEST_CASE("required particles never drops below one") {
  CHECK(required_particles(10.0, 0.5) == 1.0);
}

TEST_CASE("error budget bundles the bound") {
  const auto b = make_error_budget(1e6, 1e4, 2.0);
  CHECK(b.err == doctest::Approx(2.0 * required_error(1e6, 1e4)));
  CHECK(b.probability == doctest::Approx(1.0 - 2.0 / 1e4));
}

TEST_CASE("free packet width") {
  CHECK(free_packet_sigma(1.0, 1.0, 1.0, 0.0) == 1.0);
  // doubling at t = sqrt(3) * 2 m sigma^2 / hbar
  CHECK(free_packet_sigma(0.5, 2.0, 1.0, std::sqrt(3.0) * 2.0 * 2.0 * 0.25) == doctest::Approx(1.0));
}

TEST_CASE("worked example: carbon mole after one year") {
  const auto w = worked_example();
  const double tau = 1.054571817e-34 * w.time / (2.0 * w.mass * w.sigma0 * w.sigma0);
  CHECK(w.sigma_t == doctest::Approx(w.sigma0 * std::sqrt(1.0 + tau * tau)).epsilon(1e-12));
  // about 8 micrometres
  CHECK(std::abs(w.err / 8e-6 - 1.0) < 0.1);
  CHECK(w.err == doctest::Approx(w.sigma_t * w.err_over_sigma).epsilon(1e-12));
}

TEST_CASE("Newton reference: harmonic oscillator and energy") {
  const auto s = newton_reference(PotentialSpec::harmonic(1.0), 1.0, -2.0, 0.0, 0.005, 2000);
  REQUIRE(s.times.size() == 2001);
  double drift = 0.0, dev = 0.0;
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    dev = std::max(dev, std::abs(s.x_cm[k] + 2.0 * std::cos(s.times[k])));
    drift = std::max(drift, std::abs(s.energy[k] - s.energy.front()));
  }
  CHECK(dev < 1e-8);
  CHECK(drift < 1e-9);
  CHECK(s.provenance == ComProvenance::Newton);
}

TEST_CASE("Newton reference: uniform force gives an exact parabola") {
  const auto s = newton_reference(PotentialSpec::linear(4.0), 2.0, 1.0, 3.0, 0.05, 100);
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    const double t = s.times[k];
    CHECK(s.x_cm[k] == doctest::Approx(1.0 + 3.0 * t - t * t).epsilon(1e-12));
    CHECK(s.v_cm[k] == doctest::Approx(3.0 - 2.0 * t).epsilon(1e-12));
  }
}

TEST_CASE("centre of mass of an ensemble") {
  TrajectoryEnsemble e({0.0, 1.0}, 2, 2);
  e.position(0, 0, 0) = 1.0;
  e.position(0, 1, 0) = 3.0;
  e.position(0, 0, 1) = 2.0;
  e.position(0, 1, 1) = 6.0;
  e.position(1, 0, 1) = -4.0;
  e.velocity(0, 1, 1) = 2.0;
  const auto one = com_of_experiment(e, 0);
  CHECK(one.x_cm[0] == 2.0);
  CHECK(one.x_cm[1] == 4.0);
  CHECK(one.v_cm[1] == 1.0);
  const auto all = ensemble_com(e);
  CHECK(all.x_cm[1] == 1.0);
  CHECK(all.provenance == ComProvenance::QuantumEnsemble);
  bool threw = false;
  try {
    (void)com_of_experiment(TrajectoryEnsemble{}, 0);
  } catch (const Error& err) {
    threw = err.kind() == ErrorKind::EmptyEnsemble;
  }
  CHECK(threw);
}
