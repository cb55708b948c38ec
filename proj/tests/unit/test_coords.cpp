#include "doctest.h"

#include <cmath>
#include <numeric>
#include <random>

#include "pilotwave/coords.hpp"
#include "pilotwave/error.hpp"

#ifdef PILOTWAVE_HAVE_BOOST_RATIONAL
#include <boost/rational.hpp>
#endif

using namespace pilotwave;

namespace {

// alpha^{(j)}_i written out from y_j = x_j - (sqrt(N) x_cm + x_1)/(sqrt(N) + 1), in long double.
long double alpha_ld(std::size_t n, std::size_t j, std::size_t i) {
  const long double s = std::sqrt(static_cast<long double>(n));
  long double a = -(s / n) / (s + 1.0L);
  if (i == j) a += 1.0L;
  if (i == 1) a -= 1.0L / (s + 1.0L);
  return a;
}

std::vector<double> random_config(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<double> x(n);
  for (auto& v : x) v = u(rng);
  return x;
}

}  // namespace

TEST_CASE("N = 2 coefficients match the hand-solved system") {
  const auto cc = build_coord_change(2);
  // y_2 = (x_2 - x_1)/sqrt(2): alpha = (-1/sqrt 2, 1/sqrt 2)
  CHECK(std::abs(cc.alpha(2, 1) + 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(cc.alpha(2, 2) - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(cc.residuals().max() < 1e-15);
  CHECK(cc.a() == 1.0);
}

TEST_CASE("alpha rows agree with an extended-precision evaluation") {
  for (std::size_t n : {3u, 17u, 100u, 1024u}) {
    const auto cc = build_coord_change(n);
    long double worst_sum = 0.0L, worst_norm = 0.0L, worst_cross = 0.0L;
    for (std::size_t j : {std::size_t{2}, std::size_t{3}, n}) {
      long double sum = 0.0L, sq = 0.0L, cross = 0.0L;
      for (std::size_t i = 1; i <= n; ++i) {
        const long double a = alpha_ld(n, j, i);
        CHECK(std::abs(cc.alpha(j, i) - static_cast<double>(a)) < 1e-15);
        sum += a;
        sq += a * a;
        if (j != 2) cross += a * alpha_ld(n, 2, i);
      }
      worst_sum = std::max(worst_sum, std::abs(sum));
      worst_norm = std::max(worst_norm, std::abs(sq - 1.0L));
      worst_cross = std::max(worst_cross, std::abs(cross));
    }
    CHECK(worst_sum < 1e-15L);
    CHECK(worst_norm < 1e-15L);
    CHECK(worst_cross < 1e-15L);
  }
}

TEST_CASE("library conditions and Gram matrix hold up to N = 1024") {
  for (std::size_t n : {2u, 5u, 64u, 333u, 1024u}) {
    const auto cc = build_coord_change(n);
    CHECK(cc.gram_residual() < 1e-12);
    if (n <= 333) CHECK(cc.residuals().max() < 1e-12);
  }
}

TEST_CASE("relative coordinates are orthogonal to the centre-of-mass direction") {
  const auto cc = build_coord_change(50);
  for (std::size_t j = 2; j <= 50; ++j) {
    const auto r = cc.row(j);
    CHECK(std::abs(std::accumulate(r.begin(), r.end(), 0.0) / std::sqrt(50.0)) < 1e-12);
  }
}

TEST_CASE("forward then inverse is the identity") {
  for (std::size_t n : {2u, 7u, 100u}) {
    const auto cc = build_coord_change(n);
    for (unsigned seed = 0; seed < 20; ++seed) {
      const auto x = random_config(n, seed);
      const auto back = cc.inverse(cc.forward(x));
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(back[i] - x[i]) < 1e-12);
    }
  }
}

TEST_CASE("forward map reproduces the closed form") {
  const std::size_t n = 9;
  const auto cc = build_coord_change(n);
  const auto x = random_config(n, 3);
  const double cm = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const auto y = cc.forward(x);
  CHECK(std::abs(y[0] - cm) < 1e-14);
  for (std::size_t j = 2; j <= n; ++j) CHECK(std::abs(y[j - 1] - (x[j - 1] - (3.0 * cm + x[0]) / 4.0)) < 1e-13);
}

TEST_CASE("N = 1 is rejected") {
  bool threw = false;
  try {
    (void)build_coord_change(1);
  } catch (const Error&) {
    threw = true;
  }
  CHECK(threw);
}

TEST_CASE("cancellation factors") {
  const auto one = cancellation_factors(1.0);
  CHECK(one.first == 0.0);
  CHECK(one.second == 0.0);
  const auto hundred = cancellation_factors(100.0);
  CHECK(std::abs(hundred.first) < 1e-14);
  CHECK(std::abs(hundred.second) < 1e-14);
  for (double n = 2.0; n <= 1024.0; n += 1.0) {
    const auto f = cancellation_factors(n);
    CHECK(std::abs(f.first) < 1e-12);
    CHECK(std::abs(f.second) < 1e-12);
  }
  const auto big = cancellation_factors(6e6);
  CHECK(std::abs(big.first) < 1e-10);
  CHECK(std::abs(big.second) < 1e-10);
}

#ifdef PILOTWAVE_HAVE_BOOST_RATIONAL
TEST_CASE("cancellation factors vanish exactly for perfect squares") {
  using Q = boost::rational<long long>;
  for (long long s : {1, 2, 3, 4}) {
    const Q n(s * s), r(s);
    const Q beta = Q(1) - Q(1) / r - (n - 1) / (r + n);
    const Q gamma = Q(1) / n + (n - 1) / ((r + n) * (r + n)) - Q(2) / (r + n);
    CHECK(beta == Q(0));
    CHECK(gamma == Q(0));
  }
}
#endif

TEST_CASE("Laplacian has no crossed terms in the new coordinates") {
  CHECK(laplacian_identity_residual(2, LaplacianTestFunction::Gaussian).max_residual < 1e-6);
  for (std::size_t n : {2u, 3u, 4u})
    CHECK(laplacian_identity_residual(n, LaplacianTestFunction::AnisotropicGaussian).max_residual < 1e-5);
  CHECK(laplacian_identity_residual(5, LaplacianTestFunction::Constant).max_residual < 1e-12);
  const auto rep = laplacian_identity_residual(3, LaplacianTestFunction::Gaussian, 10);
  CHECK(rep.points == 10);
  CHECK(rep.h == 1e-4);
}

TEST_CASE("external potential separates for quadratic V") {
  CHECK(v_cm_reduction({0.0, 2.0, 0.0}, 10).max_residual < 1e-10);
  CHECK(v_cm_reduction({3.5, 0.0, 0.0}, 37).max_residual < 1e-12);
  CHECK(v_cm_reduction({0.0, 0.0, 1.0}, 20).max_residual < 1e-9);
  CHECK(v_cm_reduction({-1.0, 0.4, 2.5}, 8).max_residual < 1e-9);
}
