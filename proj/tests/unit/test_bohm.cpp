#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "pilotwave/bohm.hpp"
#include "pilotwave/error.hpp"

using namespace pilotwave;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("velocity field of a moving Gaussian is hbar k / m") {
  const Grid1D g(-20.0, 20.0, 1024);
  const auto wf = make_gaussian({1.0, 0.0, 3.0}, g, 2.0, 1.0);
  for (double x : {-2.0, -0.37, 0.0, 1.1, 2.5}) CHECK(velocity_field(wf, x) == doctest::Approx(1.5).epsilon(1e-10));
}

TEST_CASE("real state has zero velocity") {
  const Grid1D g(-20.0, 20.0, 1024);
  const auto wf = make_gaussian({1.0, 0.5, 0.0}, g);
  for (double x : {-1.0, 0.5, 2.0}) CHECK(std::abs(velocity_field(wf, x)) < 1e-12);
  CHECK(kind_of([&] { velocity_field(wf, 25.0); }) == ErrorKind::OutOfDomain);
}

TEST_CASE("free Bohmian trajectories scale with the packet width") {
  const Grid1D g(-40.0, 40.0, 4096);
  const double sigma = 1.0, x0 = -2.0, k0 = 1.5;
  const auto wf0 = make_gaussian({sigma, x0, k0}, g);
  const PropagatorCN p(g, 1e-3, {});
  const std::vector<double> start{-3.0, -2.5, -2.0, -1.2, 0.0};
  TrajectoryOptions o;
  o.record_stride = 100;
  const auto run = integrate_trajectories(p, wf0, start, 2000, o);
  const auto& e = run.ensemble;
  REQUIRE(e.time_count() == 21);
  for (std::size_t t = 0; t < e.time_count(); ++t) {
    const double time = e.times()[t];
    const double ratio = oracle::free_gaussian_width(time, sigma) / oracle::free_gaussian_width(0.0, sigma);
    for (std::size_t i = 0; i < start.size(); ++i) {
      const double exact = x0 + k0 * time + (start[i] - x0) * ratio;
      CHECK(std::abs(e.position(0, i, t) - exact) < 1e-4);
    }
  }
}

TEST_CASE("trajectories never cross") {
  const Grid1D g(-30.0, 30.0, 2048);
  const auto wf0 = make_gaussian({1.0, -1.0, 2.0}, g);
  const PropagatorCN p(g, 2e-3, PotentialSpec::harmonic(0.5));
  auto start = sample_positions(wf0, 200, 5);
  std::sort(start.begin(), start.end());
  TrajectoryOptions o;
  o.record_stride = 50;
  const auto run = integrate_trajectories(p, wf0, start, 1000, o);
  for (std::size_t t = 0; t < run.ensemble.time_count(); ++t) {
    const auto x = run.ensemble.positions_at(t);
    CHECK(std::is_sorted(x.begin(), x.end()));
  }
}

TEST_CASE("equivariance: |psi|^2 initial positions stay |psi|^2 distributed") {
  const Grid1D g(-30.0, 30.0, 2048);
  const auto wf0 = make_gaussian({1.0, 0.0, 0.0}, g);
  const PropagatorCN p(g, 2e-3, {});
  const auto start = sample_positions(wf0, 5000, 11);
  TrajectoryOptions o;
  o.record_stride = 1000;
  const auto run = integrate_trajectories(p, wf0, start, 1000, o);
  const auto final_x = run.ensemble.positions_at(run.ensemble.time_count() - 1);
  CHECK(equivariance_check(final_x, run.final_state) < 0.05);
  // independent oracle: the analytic width at t = 2
  const double s = oracle::free_gaussian_width(2.0, 1.0);
  CHECK(ks_statistic(final_x, [&](double x) { return oracle::normal_cdf(x, 0.0, s); }) < 0.05);
}

TEST_CASE("ground state trajectories stay put") {
  const Grid1D g(-10.0, 10.0, 1024);
  const PotentialSpec v = PotentialSpec::harmonic(1.0);
  const auto gs = ground_state(make_gaussian({1.0, 0.0, 0.0}, g), v);
  const PropagatorCN p(g, 5e-3, v);
  const std::vector<double> start{-1.5, -0.3, 0.0, 0.8, 2.0};
  const auto run = integrate_trajectories(p, gs, start, 400);
  for (std::size_t i = 0; i < start.size(); ++i)
    CHECK(std::abs(run.ensemble.position(0, i, run.ensemble.time_count() - 1) - start[i]) < 1e-6);
}

TEST_CASE("equivariance check needs enough samples") {
  const Grid1D g(-10.0, 10.0, 256);
  const auto wf = make_gaussian({1.0, 0.0, 0.0}, g);
  const std::vector<double> few(100, 0.0);
  CHECK(kind_of([&] { equivariance_check(few, wf); }) == ErrorKind::TooFewSamples);
}

TEST_CASE("blended velocity interpolates between two states") {
  const Grid1D g(-20.0, 20.0, 1024);
  const auto a = make_gaussian({1.0, 0.0, 1.0}, g);
  const auto b = make_gaussian({1.0, 0.0, 1.0}, g);
  const double vmax = 1.0;
  CHECK(blended_velocity(a, b, 0.3, 0.2, vmax, {}) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("cat state: every experiment populates one branch only") {
  const Grid1D g(-30.0, 30.0, 4096);
  const CatState cat({{1.0, 0.0, 0.0}, -10.0, 10.0, 10}, g);
  const StateDescriptor state = cat;
  std::size_t left = 0;
  const std::size_t m = 400;
  for (std::size_t j = 0; j < m; ++j) {
    const auto s = sequential_conditional_sample(state, derive_seed(3, j));
    REQUIRE(s.positions.size() == 10);
    const bool all_left = std::all_of(s.positions.begin(), s.positions.end(), [](double x) { return x < 0.0; });
    const bool all_right = std::all_of(s.positions.begin(), s.positions.end(), [](double x) { return x > 0.0; });
    CHECK((all_left || all_right));
    CHECK(s.branch == (all_left ? 0 : 1));
    left += all_left ? 1 : 0;
  }
  // binomial(400, 1/2): 4 standard deviations
  CHECK(std::abs(static_cast<double>(left) / m - 0.5) < 0.1);
}

TEST_CASE("cat marginal is the even mixture of both branches") {
  const Grid1D g(-30.0, 30.0, 2048);
  const StateDescriptor state = CatState({{1.0, 0.0, 0.0}, -10.0, 10.0, 4}, g);
  const auto d = marginal_density(state);
  CHECK(trapezoid(d, g.dx()) == doctest::Approx(1.0).epsilon(1e-10));
  double left = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.x(i) < 0.0) left += d[i] * g.dx();
  CHECK(left == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("product state fills the marginal; cat state does not") {
  const Grid1D g(-30.0, 30.0, 2048);
  const auto psi = make_gaussian({1.0, 0.0, 0.0}, g);
  const StateDescriptor product = ProductState{psi, 10000};
  const auto pd = marginal_vs_experiment_distance(product, 3, 9);
  for (double k : pd.ks) CHECK(k < 0.05);
  const StateDescriptor cat = CatState({{1.0, 0.0, 0.0}, -10.0, 10.0, 10}, g);
  const auto cd = marginal_vs_experiment_distance(cat, 20, 9);
  for (double k : cd.ks) CHECK(k >= 0.45);
  for (double m : cd.missing_mass) CHECK(m == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("sampling is reproducible in the seed") {
  const Grid1D g(-30.0, 30.0, 2048);
  const StateDescriptor cat = CatState({{1.0, 0.0, 0.0}, -10.0, 10.0, 6}, g);
  const auto a = sequential_conditional_sample(cat, 42);
  const auto b = sequential_conditional_sample(cat, 42);
  CHECK(a.positions == b.positions);
  CHECK(particle_count(cat) == 6);
}

TEST_CASE("ensemble bookkeeping") {
  TrajectoryEnsemble a({0.0, 1.0}, 2, 3), b({0.0, 1.0}, 1, 3);
  a.position(1, 2, 1) = 4.0;
  b.position(0, 0, 0) = -1.0;
  b.flag_escape(0, 1);
  const auto c = TrajectoryEnsemble::join(a, b);
  CHECK(c.experiments() == 3);
  CHECK(c.position(1, 2, 1) == 4.0);
  CHECK(c.position(2, 0, 0) == -1.0);
  CHECK(c.escape_count() == 1);
  CHECK(c.positions_at(1).size() == 9);
}
