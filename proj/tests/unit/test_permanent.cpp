#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "pilotwave/error.hpp"
#include "pilotwave/permanent.hpp"

using namespace pilotwave;

namespace {

double rel(Complex a, Complex b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("Glynn and Ryser equal the permutation sum for N <= 8") {
  double worst_glynn = 0.0, worst_ryser = 0.0;
  for (std::size_t n = 1; n <= 8; ++n) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto a = oracle::random_matrix(n, 1000 * n + seed);
      const Complex ref = oracle::permanent_bruteforce(a);
      worst_glynn = std::max(worst_glynn, rel(permanent(a), ref));
      worst_ryser = std::max(worst_ryser, rel(permanent_ryser(a), ref));
    }
  }
  CHECK(worst_glynn < 1e-10);
  CHECK(worst_ryser < 1e-10);
}

TEST_CASE("all-ones 20x20 permanent is 20!") {
  const auto ones = ComplexMatrix::ones(20);
  const Complex p = permanent(ones);
  CHECK(rel(p, oracle::factorial(20)) < 1e-8);
  CHECK(std::abs(p.imag()) < 1e-8 * oracle::factorial(20));
}

TEST_CASE("small closed forms") {
  ComplexMatrix a(2);
  a(0, 0) = 1.0;
  a(0, 1) = 2.0;
  a(1, 0) = 3.0;
  a(1, 1) = 4.0;
  CHECK(rel(permanent(a), 10.0) < 1e-15);
  CHECK(rel(permanent(ComplexMatrix::identity(7)), 1.0) < 1e-15);
  ComplexMatrix d(5);
  Complex prod = 1.0;
  for (std::size_t i = 0; i < 5; ++i) {
    d(i, i) = Complex(1.0 + i, -0.5 * i);
    prod *= d(i, i);
  }
  CHECK(rel(permanent(d), prod) < 1e-14);
}

TEST_CASE("permanent is invariant under row and column permutations") {
  const std::size_t n = 9;
  const auto a = oracle::random_matrix(n, 77);
  std::vector<std::size_t> rp(n), cp(n);
  std::iota(rp.begin(), rp.end(), 0);
  std::iota(cp.begin(), cp.end(), 0);
  std::rotate(rp.begin(), rp.begin() + 3, rp.end());
  std::reverse(cp.begin(), cp.end());
  ComplexMatrix b(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) b(r, c) = a(rp[r], cp[c]);
  CHECK(rel(permanent(b), permanent(a)) < 1e-12);
}

TEST_CASE("permanent is linear in each row") {
  const std::size_t n = 8;
  const auto a = oracle::random_matrix(n, 5);
  const auto u = oracle::random_matrix(n, 6);
  const Complex alpha(0.7, -1.3), beta(-2.0, 0.4);
  auto with_row = [&](auto&& row) {
    ComplexMatrix m = a;
    for (std::size_t c = 0; c < n; ++c) m(3, c) = row(c);
    return m;
  };
  const Complex lhs = permanent(with_row([&](std::size_t c) { return alpha * a(3, c) + beta * u(0, c); }));
  const Complex rhs = alpha * permanent(a) + beta * permanent(with_row([&](std::size_t c) { return u(0, c); }));
  CHECK(rel(lhs, rhs) < 1e-12);
}

TEST_CASE("Glynn, Gray-code Ryser and direct Ryser agree") {
  for (std::size_t n : {10u, 13u}) {
    const auto a = oracle::random_matrix(n, n);
    const Complex g = permanent(a);
    CHECK(rel(permanent_ryser(a), g) < 1e-10);
    CHECK(rel(permanent_ryser_direct(a), g) < 1e-10);
  }
}

TEST_CASE("threaded evaluation matches the serial one") {
  const auto a = oracle::random_matrix(14, 3);
  CHECK(rel(permanent(a, 4), permanent(a, 1)) < 1e-12);
  CHECK(rel(permanent_ryser(a, 3), permanent_ryser(a, 1)) < 1e-10);
}

TEST_CASE("row-replaced permanents match direct evaluation") {
  const std::size_t n = 9;
  const auto a = oracle::random_matrix(n, 21);
  const auto b = oracle::random_matrix(n, 22);
  const auto res = permanent_with_row_replacements(a, b, 2);
  CHECK(rel(res.value, permanent(a)) < 1e-12);
  REQUIRE(res.rows.size() == n);
  for (std::size_t i = 0; i < n; ++i) {
    ComplexMatrix m = a;
    for (std::size_t c = 0; c < n; ++c) m(i, c) = b(i, c);
    CHECK(rel(res.rows[i], oracle::permanent_bruteforce(m)) < 1e-10);
  }
}

TEST_CASE("a zero row gives a zero permanent") {
  auto a = oracle::random_matrix(10, 8);
  for (std::size_t c = 0; c < 10; ++c) a(4, c) = 0.0;
  CHECK(std::abs(permanent(a)) == 0.0);
}

TEST_CASE("orders above the limit are rejected") {
  const ComplexMatrix big(kMaxPermanentOrder + 1, 1.0);
  for (auto fn : {+[](const ComplexMatrix& m) { return permanent(m); },
                  +[](const ComplexMatrix& m) { return permanent_ryser(m); }}) {
    bool threw = false;
    try {
      (void)fn(big);
    } catch (const Error& e) {
      threw = e.kind() == ErrorKind::TooLarge;
    }
    CHECK(threw);
  }
}
