#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pilotwave/classical.hpp"
#include "pilotwave/com_analysis.hpp"
#include "pilotwave/error.hpp"

using namespace pilotwave;

namespace {

std::vector<Complex> amps(const WaveFunction1D& wf) { return {wf.amplitudes().begin(), wf.amplitudes().end()}; }

}  // namespace

TEST_CASE("narrow packet at rest in zero potential is stationary") {
  const Grid1D g(-5.0, 5.0, 1024);
  const auto wf0 = make_gaussian({0.3, 0.0, 0.0}, g);
  const ClassicalPropagator p(g, 1e-3, PotentialSpec::constant(0.0));
  auto psi = amps(wf0);
  for (int s = 0; s < 1000; ++s) p.step_inplace(psi);
  const auto r0 = density(wf0), r1 = density(wf0.with_amplitudes(psi));
  double d = 0.0;
  for (std::size_t i = 0; i < r0.size(); ++i) d = std::max(d, std::abs(r1[i] - r0[i]));
  CHECK(d < 1e-6);
  CHECK(std::abs(norm(wf0.with_amplitudes(psi)) - 1.0) < 1e-12);
}

TEST_CASE("linear potential: rigid packet on the Newton parabola") {
  const Grid1D g(-40.0, 40.0, 4096);
  const auto wf0 = make_gaussian({1.0, -15.0, 10.0}, g);
  const ClassicalPropagator p(g, 5e-3, PotentialSpec::linear(2.0));
  const auto res = evolve_classical(p, wf0, 1000, {100});
  REQUIRE(res.times.size() == 11);
  for (std::size_t k = 0; k < res.times.size(); ++k) {
    const double t = res.times[k];
    CHECK(std::abs(res.mean_position[k] - (-15.0 + 10.0 * t - t * t)) < 1e-3);
    CHECK(std::abs(res.width[k] / res.width.front() - 1.0) < 1e-2);
    CHECK(std::abs(res.norm[k] - 1.0) < 1e-8);
  }
}

TEST_CASE("free classical packet does not spread") {
  const Grid1D g(-30.0, 30.0, 2048);
  const auto wf0 = make_gaussian({0.7, -8.0, 3.0}, g);
  const ClassicalPropagator p(g, 5e-3, PotentialSpec::constant(0.3));
  const auto res = evolve_classical(p, wf0, 1000, {1000});
  CHECK(std::abs(res.width.back() / res.width.front() - 1.0) < 1e-2);
  CHECK(res.mean_position.back() == doctest::Approx(7.0).epsilon(1e-4));
}

TEST_CASE("Galilean boost shifts the mean and keeps the width series") {
  const Grid1D g(-30.0, 30.0, 2048);
  const ClassicalPropagator p(g, 5e-3, PotentialSpec::linear(-1.0));
  const auto a = evolve_classical(p, make_gaussian({1.0, -5.0, 0.0}, g), 600, {100});
  const auto b = evolve_classical(p, make_gaussian({1.0, -5.0, 2.0}, g), 600, {100});
  for (std::size_t k = 0; k < a.times.size(); ++k) {
    CHECK(std::abs(b.mean_position[k] - a.mean_position[k] - 2.0 * a.times[k]) < 1e-3);
    CHECK(std::abs(b.width[k] - a.width[k]) < 1e-3);
  }
}

TEST_CASE("harmonic well: classical flow focuses the packet, then the caustic is reported") {
  // Every fluid element starts at rest, so x(t) = x(0) cos t: centre -2 cos t, width ~ |cos t|.
  const Grid1D g(-5.0, 5.0, 2048);
  const auto wf0 = make_gaussian({0.2, -2.0, 0.0}, g);
  const ClassicalPropagator p(g, 1e-3, PotentialSpec::harmonic(1.0));
  const double w0 = position_width(wf0);
  auto psi = amps(wf0);
  for (int s = 1; s <= 1000; ++s) {
    p.step_inplace(psi);
    if (s % 250 == 0) {
      const double t = s * 1e-3;
      const auto wf = wf0.with_amplitudes(psi);
      CHECK(std::abs(mean_position(wf) + 2.0 * std::cos(t)) < 1e-3);
      CHECK(std::abs(position_width(wf) / (w0 * std::cos(t)) - 1.0) < 1e-3);
    }
  }
  bool threw = false;
  try {
    for (int s = 1000; s < 1600; ++s) p.step_inplace(psi);
  } catch (const Error& e) {
    threw = e.kind() == ErrorKind::Nonconvergence;
  }
  CHECK(threw);
}

TEST_CASE("classical trajectories in a linear potential are congruent parabolas") {
  const Grid1D g(-40.0, 40.0, 4096);
  const auto wf0 = make_gaussian({1.0, -15.0, 4.0}, g);
  const ClassicalPropagator p(g, 5e-3, PotentialSpec::linear(2.0));
  const std::vector<double> start{-16.0, -15.5, -15.0, -14.2, -13.5};
  TrajectoryOptions o;
  o.record_stride = 50;
  const auto run = classical_trajectories(p, wf0, start, 1000, o);
  const auto& e = run.ensemble;
  const auto newton = newton_reference(PotentialSpec::linear(2.0), 1.0, start[2], 4.0, 5e-3, 1000);
  for (std::size_t t = 0; t < e.time_count(); ++t) {
    for (std::size_t i = 1; i < start.size(); ++i)
      CHECK(std::abs((e.position(0, i, t) - e.position(0, 0, t)) - (start[i] - start[0])) < 1e-3);
    CHECK(std::abs(e.position(0, 2, t) - newton.x_cm[t * 50]) < 1e-3);
  }
}

TEST_CASE("propagator rejects bad input") {
  const Grid1D g(-5.0, 5.0, 256);
  bool bad_dt = false, bad_size = false;
  try {
    ClassicalPropagator(g, 0.0, {});
  } catch (const Error& e) {
    bad_dt = e.kind() == ErrorKind::InvalidArgument;
  }
  try {
    std::vector<Complex> psi(100, 1.0);
    ClassicalPropagator(g, 1e-3, {}).step_inplace(psi);
  } catch (const Error& e) {
    bad_size = e.kind() == ErrorKind::GridMismatch;
  }
  CHECK(bad_dt);
  CHECK(bad_size);
}

TEST_CASE("quantum potential identity: separable and correlated Gaussians") {
  const auto sep = quantum_potential_gradient_identity(make_identity_test_field(IdentityTestFunction::SeparableGaussian, 201));
  CHECK(sep.relative() < 1e-8);
  const auto cor =
      quantum_potential_gradient_identity(make_identity_test_field(IdentityTestFunction::CorrelatedGaussian, 401));
  CHECK(cor.relative() < 1e-6);
  CHECK(cor.scale > 0.0);
}

TEST_CASE("quantum potential identity converges at second order") {
  double prev = 0.0, prev_dx = 0.0;
  for (std::size_t n : {251u, 501u, 1001u}) {
    const auto f = make_identity_test_field(IdentityTestFunction::AsymmetricBimodal, n);
    const double r = quantum_potential_gradient_identity(f).relative();
    if (prev > 0.0) {
      const double order = std::log(prev / r) / std::log(prev_dx / f.x.dx());
      CHECK(order > 1.8);
      CHECK(order < 2.2);
    }
    prev = r;
    prev_dx = f.x.dx();
  }
}

TEST_CASE("quantum potential identity rejects fields that leak through the boundary") {
  auto f = make_identity_test_field(IdentityTestFunction::SeparableGaussian, 101);
  std::fill(f.r.begin(), f.r.end(), 1.0);
  bool threw = false;
  try {
    (void)quantum_potential_gradient_identity(f);
  } catch (const Error& e) {
    threw = e.kind() == ErrorKind::BoundaryLeak;
  }
  CHECK(threw);
}
