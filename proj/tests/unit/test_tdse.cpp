#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "pilotwave/error.hpp"
#include "pilotwave/tdse.hpp"

using namespace pilotwave;

namespace {

double max_error_vs_free(const WaveFunction1D& wf, double t, double sigma, double x0, double k0) {
  double e = 0.0;
  for (std::size_t i = 0; i < wf.size(); ++i) {
    const double x = wf.grid().x(i);
    e = std::max(e, std::abs(wf[i] - oracle::free_gaussian(x, t, sigma, x0, k0)));
  }
  return e;
}

WaveFunction1D run(const PropagatorCN& p, WaveFunction1D wf, std::size_t steps) {
  for (std::size_t s = 0; s < steps; ++s) wf = p.step(wf);
  return wf;
}

}  // namespace

TEST_CASE("CN conserves the norm for both stencils") {
  const Grid1D g(-30.0, 30.0, 1024);
  const auto wf0 = make_gaussian({1.0, -3.0, 4.0}, g);
  for (auto stencil : {LaplacianStencil::ThreePoint, LaplacianStencil::Numerov}) {
    PropagatorOptions o;
    o.stencil = stencil;
    const PropagatorCN p(g, 2e-3, PotentialSpec::harmonic(0.3), 1.0, 1.0, o);
    const auto wf = run(p, wf0, 500);
    CHECK(std::abs(norm(wf) - 1.0) < 1e-12);
  }
}

TEST_CASE("time-reversed propagator undoes the forward steps") {
  const Grid1D g(-20.0, 20.0, 512);
  const auto wf0 = make_gaussian({0.8, 1.0, -3.0}, g);
  const PropagatorCN p(g, 5e-3, PotentialSpec::linear(1.5));
  const auto back = run(p.time_reversed(), run(p, wf0, 200), 200);
  double e = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) e = std::max(e, std::abs(back[i] - wf0[i]));
  CHECK(e < 1e-11);
}

TEST_CASE("free Gaussian follows the closed-form solution") {
  const Grid1D g(-30.0, 30.0, 2048);
  const auto wf0 = make_gaussian({1.0, -2.0, 2.0}, g);
  const PropagatorCN p(g, 1e-3, PotentialSpec::constant(0.0));
  const auto wf = run(p, wf0, 1000);
  CHECK(max_error_vs_free(wf, 1.0, 1.0, -2.0, 2.0) < 1e-5);
}

TEST_CASE("three-point error drops by about 4x when dx is halved") {
  double err[2];
  const std::size_t points[2] = {401, 801};
  for (int k = 0; k < 2; ++k) {
    const Grid1D g(-20.0, 20.0, points[k]);
    PropagatorOptions o;
    o.stencil = LaplacianStencil::ThreePoint;
    const PropagatorCN p(g, 2e-4, PotentialSpec::constant(0.0), 1.0, 1.0, o);
    err[k] = max_error_vs_free(run(p, make_gaussian({1.0, 0.0, 1.0}, g), 2500), 0.5, 1.0, 0.0, 1.0);
  }
  CHECK(err[0] / err[1] > 3.0);
  CHECK(err[0] / err[1] < 5.0);
}

TEST_CASE("Numerov beats the three-point stencil on the same grid") {
  const Grid1D g(-20.0, 20.0, 401);
  const auto wf0 = make_gaussian({1.0, 0.0, 1.0}, g);
  PropagatorOptions three;
  three.stencil = LaplacianStencil::ThreePoint;
  const double e3 = max_error_vs_free(run(PropagatorCN(g, 2e-4, {}, 1.0, 1.0, three), wf0, 2500), 0.5, 1.0, 0.0, 1.0);
  const double e4 = max_error_vs_free(run(PropagatorCN(g, 2e-4, {}), wf0, 2500), 0.5, 1.0, 0.0, 1.0);
  CHECK(e4 < 0.1 * e3);
}

TEST_CASE("harmonic ground state is stationary") {
  const Grid1D g(-10.0, 10.0, 1024);
  const PotentialSpec v = PotentialSpec::harmonic(1.0);
  const auto gs = ground_state(make_gaussian({1.3, 0.4, 0.0}, g), v);
  // <H> uses the three-point kinetic term: 1/2 - <p^4> dx^2 / 24 with <p^4> = 3/4.
  const double dx = g.dx();
  CHECK(std::abs(energy_expectation(gs, v) - (0.5 - 0.75 * dx * dx / 24.0)) < 1e-7);
  CHECK(std::abs(mean_position(gs)) < 1e-10);
  const PropagatorCN p(g, 5e-3, v);
  const auto wf = run(p, gs, 400);
  const auto r0 = density(gs), r1 = density(wf);
  double e = 0.0;
  for (std::size_t i = 0; i < r0.size(); ++i) e = std::max(e, std::abs(r1[i] - r0[i]));
  CHECK(e < 1e-10);
}

TEST_CASE("Ehrenfest: mean position in a linear potential is a parabola") {
  const Grid1D g(-40.0, 40.0, 4096);
  const auto wf0 = make_gaussian({1.0, -15.0, 10.0}, g);
  PropagatorOptions o;
  o.energy_reference = energy_expectation(wf0, PotentialSpec::linear(2.0));
  const PropagatorCN p(g, 1e-3, PotentialSpec::linear(2.0), 1.0, 1.0, o);
  const auto res = evolve(p, wf0, 1000, {100});
  REQUIRE(res.times.size() == 11);
  for (std::size_t k = 0; k < res.times.size(); ++k) {
    const double t = res.times[k];
    CHECK(std::abs(res.mean_position[k] - (-15.0 + 10.0 * t - t * t)) < 1e-3);
    CHECK(std::abs(res.norm[k] - 1.0) < 1e-12);
  }
}

TEST_CASE("kinetic energy of a Gaussian") {
  const Grid1D g(-30.0, 30.0, 8192);
  const auto wf = make_gaussian({1.2, 0.0, 1.0}, g);
  const double exact = 0.5 * (1.0 + 1.0 / (2.0 * 1.2 * 1.2));
  CHECK(mean_kinetic_energy(wf) == doctest::Approx(exact).epsilon(1e-5));
  CHECK(energy_expectation(wf, PotentialSpec::constant(2.0)) == doctest::Approx(exact + 2.0).epsilon(1e-5));
}

TEST_CASE("mass and hbar enter through hbar/m") {
  const Grid1D g(-30.0, 30.0, 2048);
  const auto a = make_gaussian({1.0, 0.0, 2.0}, g, 2.0, 1.0);
  const PropagatorCN p(g, 1e-3, {}, 2.0, 1.0);
  const auto wf = run(p, a, 1000);
  // v = hbar k / m = 1
  CHECK(mean_position(wf) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(position_width(wf) == doctest::Approx(oracle::free_gaussian_width(1.0, 1.0, 2.0, 1.0)).epsilon(1e-5));
}

TEST_CASE("default time step respects both limits") {
  const Grid1D g(-10.0, 10.0, 1000);
  const PotentialSpec v = PotentialSpec::harmonic(4.0);
  const double dt = default_time_step(g, v, 1.0, 1.0);
  CHECK(dt > 0.0);
  CHECK(dt * v.max_abs(g) <= 0.05 + 1e-12);
  CHECK(dt / (2.0 * g.dx() * g.dx()) <= 0.5 + 1e-12);
}

TEST_CASE("step rejects a state on another grid") {
  const Grid1D g(-10.0, 10.0, 256), h(-10.0, 10.0, 257);
  const PropagatorCN p(g, 1e-3, {});
  const auto wf = make_gaussian({1.0, 0.0, 0.0}, h);
  bool threw = false;
  try {
    (void)p.step(wf);
  } catch (const Error& e) {
    threw = e.kind() == ErrorKind::GridMismatch;
  }
  CHECK(threw);
}

TEST_CASE("boundary detection") {
  const Grid1D g(-10.0, 10.0, 512);
  CHECK_FALSE(touches_boundary(make_gaussian({1.0, 0.0, 0.0}, g)));
  const auto wide = sample_function(g, [](double x) { return Complex(std::exp(-x * x / 40.0), 0.0); });
  CHECK(touches_boundary(wide));
}

TEST_CASE("evolve with zero steps returns the input") {
  const Grid1D g(-10.0, 10.0, 256);
  const auto wf = make_gaussian({1.0, 0.0, 0.0}, g);
  const auto res = evolve(PropagatorCN(g, 1e-3, {}), wf, 0);
  CHECK(res.times.size() == 1);
  CHECK(res.final_state[100] == wf[100]);
}
