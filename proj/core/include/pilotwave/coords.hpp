#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace pilotwave {

/// Centre of mass plus relative coordinates y_j = a x_j + (b/N) sum_i x_i + c x_1, j = 2..N,
/// with a = 1, b = -sqrt(N)/(sqrt(N)+1), c = -1/(sqrt(N)+1), i.e.
/// y_j = x_j - (sqrt(N) x_cm + x_1)/(sqrt(N)+1).
class CoordChange {
 public:
  std::size_t n() const noexcept { return n_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double c() const noexcept { return c_; }

  /// alpha^{(j)}_i for j in [2, N], i in [1, N] (1-based, as in the formulas).
  double alpha(std::size_t j, std::size_t i) const noexcept;
  /// Row alpha^{(j)} as a dense vector of length N.
  std::vector<double> row(std::size_t j) const;

  /// (x_cm, y_2..y_N) from x_1..x_N. Output has N entries, x_cm first.
  std::vector<double> forward(std::span<const double> x) const;
  /// x_1..x_N from (x_cm, y_2..y_N).
  std::vector<double> inverse(std::span<const double> cm_y) const;

  struct Residuals {
    double row_sum = 0.0;      // max_j |sum_i alpha^{(j)}_i|
    double row_norm = 0.0;     // max_j |sum_i (alpha^{(j)}_i)^2 - 1|
    double orthogonal = 0.0;   // max_{j != k} |sum_i alpha^{(j)}_i alpha^{(k)}_i|
    double max() const noexcept;
  };
  /// Conditions over every row and every pair of rows (O(N^3)).
  Residuals residuals() const;
  /// Max deviation of the Gram matrix of {CoM row / |CoM row|, alpha rows} from the identity.
  double gram_residual() const;

 private:
  friend CoordChange build_coord_change(std::size_t n);
  CoordChange(std::size_t n, double a, double b, double c) : n_(n), a_(a), b_(b), c_(c) {}

  std::size_t n_;
  double a_, b_, c_;
};

/// Throws ConditionViolation when a condition exceeds 1e-12. Rows are checked
/// individually; pairs involving the first, second and last relative rows
/// cover every distinct inner-product pattern of the structure.
CoordChange build_coord_change(std::size_t n);

enum class LaplacianTestFunction { Gaussian, AnisotropicGaussian, Constant };

struct LaplacianReport {
  std::size_t n = 0;
  std::size_t points = 0;
  double h = 1e-4;
  double max_residual = 0.0;
};

/// Max over random points of |sum_i f_{x_i x_i} - ((1/N) f_{x_cm x_cm} + sum_j f_{y_j y_j})|,
/// every second derivative taken by central differences with step h.
LaplacianReport laplacian_identity_residual(std::size_t n, LaplacianTestFunction family, std::size_t points = 100,
                                            double h = 1e-4, std::uint64_t seed = 7);

/// (1 - 1/sqrt(N) - (N-1)/(sqrt(N)+N), 1/N + (N-1)/(sqrt(N)+N)^2 - 2/(sqrt(N)+N)).
std::pair<double, double> cancellation_factors(double n);

struct QuadraticPotential {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double operator()(double x) const noexcept { return alpha + beta * x + gamma * x * x; }
};

struct ReductionReport {
  std::size_t n = 0;
  std::size_t configurations = 0;
  double max_residual = 0.0;
};

/// Max over random configurations of |sum_j V(x_j) - N V(x_cm) - gamma sum_i y_i^2|.
ReductionReport v_cm_reduction(const QuadraticPotential& v, std::size_t n, std::size_t configurations = 100,
                               std::uint64_t seed = 11);

}  // namespace pilotwave
