#include "pilotwave/coords.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pilotwave/error.hpp"
#include "pilotwave/sampling.hpp"

namespace pilotwave {

double CoordChange::alpha(std::size_t j, std::size_t i) const noexcept {
  double v = b_ / static_cast<double>(n_);
  if (i == j) v += a_;
  if (i == 1) v += c_;
  return v;
}

std::vector<double> CoordChange::row(std::size_t j) const {
  std::vector<double> r(n_);
  for (std::size_t i = 1; i <= n_; ++i) r[i - 1] = alpha(j, i);
  return r;
}

std::vector<double> CoordChange::forward(std::span<const double> x) const {
  require(x.size() == n_, ErrorKind::InvalidArgument, "configuration size differs from N");
  const double sum = std::accumulate(x.begin(), x.end(), 0.0);
  std::vector<double> out(n_);
  out[0] = sum / static_cast<double>(n_);
  for (std::size_t j = 2; j <= n_; ++j) out[j - 1] = a_ * x[j - 1] + b_ * out[0] + c_ * x[0];
  return out;
}

std::vector<double> CoordChange::inverse(std::span<const double> cm_y) const {
  require(cm_y.size() == n_, ErrorKind::InvalidArgument, "configuration size differs from N");
  const double rn = std::sqrt(static_cast<double>(n_));
  double ysum = 0.0;
  for (std::size_t j = 1; j < n_; ++j) ysum += cm_y[j];
  std::vector<double> x(n_);
  x[0] = cm_y[0] - ysum / rn;
  for (std::size_t j = 1; j < n_; ++j) x[j] = cm_y[0] + cm_y[j] - ysum / (rn + static_cast<double>(n_));
  return x;
}

double CoordChange::Residuals::max() const noexcept { return std::max({row_sum, row_norm, orthogonal}); }

namespace {

double dot_rows(const CoordChange& cc, std::size_t j, std::size_t k) {
  double s = 0.0;
  for (std::size_t i = 1; i <= cc.n(); ++i) s += cc.alpha(j, i) * cc.alpha(k, i);
  return s;
}

void row_conditions(const CoordChange& cc, CoordChange::Residuals& r) {
  for (std::size_t j = 2; j <= cc.n(); ++j) {
    double s = 0.0, q = 0.0;
    for (std::size_t i = 1; i <= cc.n(); ++i) {
      const double v = cc.alpha(j, i);
      s += v;
      q += v * v;
    }
    r.row_sum = std::max(r.row_sum, std::abs(s));
    r.row_norm = std::max(r.row_norm, std::abs(q - 1.0));
  }
}

}  // namespace

CoordChange::Residuals CoordChange::residuals() const {
  Residuals r;
  row_conditions(*this, r);
  for (std::size_t j = 2; j <= n_; ++j)
    for (std::size_t k = j + 1; k <= n_; ++k) r.orthogonal = std::max(r.orthogonal, std::abs(dot_rows(*this, j, k)));
  return r;
}

double CoordChange::gram_residual() const {
  // Rows: CoM direction (1/sqrt(N),...) then alpha^{(2..N)}.
  const std::size_t n = n_;
  std::vector<std::vector<double>> rows;
  rows.emplace_back(n, 1.0 / std::sqrt(static_cast<double>(n)));
  for (std::size_t j = 2; j <= n; ++j) rows.push_back(row(j));
  double worst = 0.0;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = p; q < n; ++q) {
      const double g = std::inner_product(rows[p].begin(), rows[p].end(), rows[q].begin(), 0.0);
      worst = std::max(worst, std::abs(g - (p == q ? 1.0 : 0.0)));
    }
  return worst;
}

CoordChange build_coord_change(std::size_t n) {
  require(n >= 2, ErrorKind::InvalidArgument, "coordinate change needs N >= 2");
  const double rn = std::sqrt(static_cast<double>(n));
  const CoordChange cc(n, 1.0, -rn / (rn + 1.0), -1.0 / (rn + 1.0));

  CoordChange::Residuals r;
  row_conditions(cc, r);
  std::vector<std::size_t> probes{2, n};
  if (n >= 3) probes.push_back(3);
  for (std::size_t j : probes)
    for (std::size_t k = 2; k <= n; ++k)
      if (k != j) r.orthogonal = std::max(r.orthogonal, std::abs(dot_rows(cc, j, k)));
  if (r.max() > 1e-12) {
    fail(ErrorKind::ConditionViolation, "coordinate conditions violated: residual " + std::to_string(r.max()));
  }
  return cc;
}

namespace {

struct TestFunction {
  std::vector<double> center, inv_var;
  bool constant = false;
  double operator()(std::span<const double> x) const {
    if (constant) return 1.0;
    double e = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - center[i];
      e += d * d * inv_var[i];
    }
    return std::exp(-0.5 * e);
  }
};

}  // namespace

LaplacianReport laplacian_identity_residual(std::size_t n, LaplacianTestFunction family, std::size_t points,
                                            double h, std::uint64_t seed) {
  require(n >= 2 && n <= 8, ErrorKind::InvalidArgument, "Laplacian check supports 2 <= N <= 8");
  require(h > 0.0, ErrorKind::InvalidArgument, "finite-difference step must be positive");
  const CoordChange cc = build_coord_change(n);
  Rng rng(seed);

  TestFunction f;
  f.constant = family == LaplacianTestFunction::Constant;
  for (std::size_t i = 0; i < n; ++i) {
    f.center.push_back(0.5 * (uniform01(rng) - 0.5));
    const double width = family == LaplacianTestFunction::AnisotropicGaussian ? 0.6 + 0.8 * uniform01(rng) : 1.0;
    f.inv_var.push_back(1.0 / (width * width));
  }
  auto g = [&](std::span<const double> cm_y) { return f(cc.inverse(cm_y)); };

  auto second = [&](auto&& fn, std::vector<double> p, std::size_t k) {
    const double c = p[k];
    p[k] = c + h;
    const double fp = fn(p);
    p[k] = c - h;
    const double fm = fn(p);
    p[k] = c;
    return (fp - 2.0 * fn(p) + fm) / (h * h);
  };

  LaplacianReport rep{n, points, h, 0.0};
  for (std::size_t s = 0; s < points; ++s) {
    std::vector<double> x(n);
    for (auto& xi : x) xi = 2.0 * (uniform01(rng) - 0.5);
    double lhs = 0.0;
    for (std::size_t i = 0; i < n; ++i) lhs += second(f, x, i);
    const auto q = cc.forward(x);
    double rhs = second(g, q, 0) / static_cast<double>(n);
    for (std::size_t j = 1; j < n; ++j) rhs += second(g, q, j);
    rep.max_residual = std::max(rep.max_residual, std::abs(lhs - rhs));
  }
  return rep;
}

std::pair<double, double> cancellation_factors(double n) {
  require(n >= 1.0, ErrorKind::InvalidArgument, "N must be at least 1");
  const double rn = std::sqrt(n);
  const double d = rn + n;
  return {1.0 - 1.0 / rn - (n - 1.0) / d, 1.0 / n + (n - 1.0) / (d * d) - 2.0 / d};
}

ReductionReport v_cm_reduction(const QuadraticPotential& v, std::size_t n, std::size_t configurations,
                               std::uint64_t seed) {
  require(n >= 2, ErrorKind::InvalidArgument, "reduction check needs N >= 2");
  const CoordChange cc = build_coord_change(n);
  Rng rng(seed);
  ReductionReport rep{n, configurations, 0.0};
  const double nn = static_cast<double>(n);
  for (std::size_t s = 0; s < configurations; ++s) {
    std::vector<double> x(n);
    for (auto& xi : x) xi = 10.0 * (uniform01(rng) - 0.5);
    const auto q = cc.forward(x);
    double lhs = 0.0, ysq = 0.0;
    for (double xi : x) lhs += v(xi);
    for (std::size_t j = 1; j < n; ++j) ysq += q[j] * q[j];
    rep.max_residual = std::max(rep.max_residual, std::abs(lhs - nn * v(q[0]) - v.gamma * ysq));
  }
  return rep;
}

}  // namespace pilotwave
