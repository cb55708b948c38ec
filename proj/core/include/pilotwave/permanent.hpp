#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace pilotwave {

using Complex = std::complex<double>;

/// Dense square complex matrix, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t n, Complex fill = {}) : n_(n), data_(n * n, fill) {}

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix ones(std::size_t n) { return ComplexMatrix(n, Complex(1.0, 0.0)); }

  std::size_t order() const noexcept { return n_; }
  Complex& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * n_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * n_ + c]; }
  const std::vector<Complex>& data() const noexcept { return data_; }

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Complex> data_;
};

/// Largest order accepted by the exponential-cost routines (TooLarge above).
inline constexpr std::size_t kMaxPermanentOrder = 24;

/// Glynn's formula perm(A) = 2^{1-N} sum_d (prod_k d_k) prod_r (sum_k d_k A_rk)
/// over sign vectors with d_1 = +1, visited in Gray-code order so each step
/// updates the N row sums in O(N). Rows are scaled by their largest modulus
/// and the scales are reapplied in the log domain; the signed sum uses
/// compensated accumulation. `threads` splits the Gray sequence into chunks.
Complex permanent(const ComplexMatrix& a, std::size_t threads = 1);

/// Ryser's formula perm(A) = (-1)^N sum_S (-1)^|S| prod_r sum_{k in S} A_rk with
/// Gray-code subset updates, O(2^N N). Same scaling and accumulation.
Complex permanent_ryser(const ComplexMatrix& a, std::size_t threads = 1);

struct PermanentWithRows {
  Complex value;
  /// rows[i] = perm(a with row i replaced by row i of b).
  std::vector<Complex> rows;
};

/// perm(a) and all N row-replaced permanents in a single Glynn/Gray pass,
/// O(2^N N): the replaced-row term of a sign vector is its b-row sum times
/// the product of the other a-row sums, taken from prefix/suffix products.
PermanentWithRows permanent_with_row_replacements(const ComplexMatrix& a, const ComplexMatrix& b,
                                                  std::size_t threads = 1);

/// Ryser's formula recomputing every row sum from scratch for each subset,
/// O(2^N N^2). Reference for the Gray-code paths.
Complex permanent_ryser_direct(const ComplexMatrix& a);

}  // namespace pilotwave
