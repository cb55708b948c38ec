#include "pilotwave/permanent.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "pilotwave/error.hpp"
#include "pilotwave/parallel.hpp"

namespace pilotwave {

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

namespace {

// Plain complex arithmetic without the NaN/Inf recovery of __muldc3.
struct C {
  double re = 0.0;
  double im = 0.0;
};
inline C mul(C a, C b) noexcept { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
inline C add(C a, C b) noexcept { return {a.re + b.re, a.im + b.im}; }
inline C sub(C a, C b) noexcept { return {a.re - b.re, a.im - b.im}; }

struct Kahan {
  C sum{};
  C comp{};
  void add(C term) noexcept {
    const C y = sub(term, comp);
    const C t = pilotwave::add(sum, y);
    comp = sub(sub(t, sum), y);
    sum = t;
  }
};

void check_order(std::size_t n) {
  require(n <= kMaxPermanentOrder, ErrorKind::TooLarge,
          "permanent order " + std::to_string(n) + " exceeds the limit of " + std::to_string(kMaxPermanentOrder));
}

inline std::uint64_t gray(std::uint64_t g) noexcept { return g ^ (g >> 1); }

struct Scaled {
  std::size_t n = 0;
  std::vector<C> a;  // column-major: a[j * n + k] = A(k, j) / s_k
  std::vector<C> b;
  Complex scale{1.0, 0.0};
  bool zero = false;
};

Scaled scale_rows(const ComplexMatrix& a, const ComplexMatrix* b) {
  const std::size_t n = a.order();
  Scaled s;
  s.n = n;
  s.a.resize(n * n);
  if (b) s.b.resize(n * n);
  double log_scale = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double m = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      m = std::max(m, std::abs(a(k, j)));
      if (b) m = std::max(m, std::abs((*b)(k, j)));
    }
    if (m == 0.0) {
      s.zero = true;
      m = 1.0;
    }
    log_scale += std::log(m);
    for (std::size_t j = 0; j < n; ++j) {
      s.a[j * n + k] = {a(k, j).real() / m, a(k, j).imag() / m};
      if (b) s.b[j * n + k] = {(*b)(k, j).real() / m, (*b)(k, j).imag() / m};
    }
  }
  s.scale = std::exp(log_scale);
  return s;
}

// Sum over Gray indices g in [begin, end) of sign(S) * prod_k rowsum_k(S),
// S = gray(g); the global (-1)^n is applied by the caller.
C ryser_chunk(const Scaled& s, std::uint64_t begin, std::uint64_t end) {
  const std::size_t n = s.n;
  std::vector<C> r(n);
  std::uint64_t subset = gray(begin);
  for (std::size_t j = 0; j < n; ++j) {
    if (!((subset >> j) & 1U)) continue;
    for (std::size_t k = 0; k < n; ++k) r[k] = add(r[k], s.a[j * n + k]);
  }
  Kahan acc;
  bool odd = std::popcount(subset) & 1;
  for (std::uint64_t g = begin;;) {
    C prod = r[0];
    for (std::size_t k = 1; k < n; ++k) prod = mul(prod, r[k]);
    acc.add(odd ? C{-prod.re, -prod.im} : prod);
    if (++g >= end) break;
    const auto j = static_cast<std::size_t>(std::countr_zero(g));
    const bool added = (gray(g) >> j) & 1U;
    const C* col = &s.a[j * n];
    if (added) {
      for (std::size_t k = 0; k < n; ++k) r[k] = add(r[k], col[k]);
    } else {
      for (std::size_t k = 0; k < n; ++k) r[k] = sub(r[k], col[k]);
    }
    odd = !odd;
  }
  return acc.sum;
}

// Glynn sign vectors: d_0 = +1, d_{j+1} = -1 where bit j of gray(g) is set.
// Row sums are r_k = sum_j d_j A_kj.
void glynn_start(const std::vector<C>& a, std::size_t n, std::uint64_t code, std::vector<double>& re,
                 std::vector<double>& im) {
  re.assign(n, 0.0);
  im.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double d = (j > 0 && ((code >> (j - 1)) & 1U)) ? -1.0 : 1.0;
    for (std::size_t k = 0; k < n; ++k) re[k] += d * a[j * n + k].re, im[k] += d * a[j * n + k].im;
  }
}

C glynn_chunk(const Scaled& s, std::uint64_t begin, std::uint64_t end) {
  const std::size_t n = s.n;
  std::vector<double> rr, ri;
  glynn_start(s.a, n, gray(begin), rr, ri);
  Kahan acc;
  bool odd = std::popcount(gray(begin)) & 1;
  for (std::uint64_t g = begin;;) {
    double pr = rr[0], pi = ri[0];
    for (std::size_t k = 1; k < n; ++k) {
      const double t = pr * rr[k] - pi * ri[k];
      pi = pr * ri[k] + pi * rr[k];
      pr = t;
    }
    acc.add(odd ? C{-pr, -pi} : C{pr, pi});
    if (++g >= end) break;
    const auto j = static_cast<std::size_t>(std::countr_zero(g));
    // Column j+1 flips sign: +1 -> -1 when the bit turns on.
    const double step = ((gray(g) >> j) & 1U) ? -2.0 : 2.0;
    const C* col = &s.a[(j + 1) * n];
    for (std::size_t k = 0; k < n; ++k) rr[k] += step * col[k].re, ri[k] += step * col[k].im;
    odd = !odd;
  }
  return acc.sum;
}

// Split real/imaginary arrays so the per-row work vectorizes.
struct RowsPartial {
  Kahan value;
  std::vector<double> sum_re, sum_im;
};

void glynn_rows_chunk(const Scaled& s, std::uint64_t begin, std::uint64_t end, RowsPartial& out) {
  const std::size_t n = s.n;
  std::vector<double> rv, iv, qv, jv;
  glynn_start(s.a, n, gray(begin), rv, iv);
  glynn_start(s.b, n, gray(begin), qv, jv);
  // Layout: one buffer, every array padded to n + 1 entries.
  const std::size_t w = n + 1;
  std::vector<double> buf(12 * w + 4 * n * n, 0.0);
  double* __restrict rr = buf.data();
  double* __restrict ri = rr + w;
  double* __restrict qr = ri + w;
  double* __restrict qi = qr + w;
  double* __restrict pr = qi + w;
  double* __restrict pi = pr + w;
  double* __restrict sr = pi + w;
  double* __restrict si = sr + w;
  double* __restrict sum_re = si + w;
  double* __restrict sum_im = sum_re + w;
  double* __restrict comp_re = sum_im + w;
  double* __restrict comp_im = comp_re + w;
  double* __restrict ar = comp_im + w;
  double* __restrict ai = ar + n * n;
  double* __restrict br = ai + n * n;
  double* __restrict bi = br + n * n;
  for (std::size_t k = 0; k < n * n; ++k) {
    ar[k] = s.a[k].re, ai[k] = s.a[k].im;
    br[k] = s.b[k].re, bi[k] = s.b[k].im;
  }
  for (std::size_t k = 0; k < n; ++k) rr[k] = rv[k], ri[k] = iv[k], qr[k] = qv[k], qi[k] = jv[k];

  bool odd = std::popcount(gray(begin)) & 1;
  for (std::uint64_t g = begin;;) {
    // Running products kept in registers; pr[k] = prod_{<k}, sr[k] = prod_{>=k}.
    double fr = 1.0, fi = 0.0, br_ = 1.0, bi_ = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      pr[k] = fr, pi[k] = fi;
      const double t = fr * rr[k] - fi * ri[k];
      fi = fr * ri[k] + fi * rr[k];
      fr = t;
      const std::size_t m = n - 1 - k;
      sr[m + 1] = br_, si[m + 1] = bi_;
      const double u = br_ * rr[m] - bi_ * ri[m];
      bi_ = br_ * ri[m] + bi_ * rr[m];
      br_ = u;
    }
    const double sign = odd ? -1.0 : 1.0;
    out.value.add({sign * fr, sign * fi});
    for (std::size_t i = 0; i < n; ++i) {
      const double xr = pr[i] * sr[i + 1] - pi[i] * si[i + 1];
      const double xi = pr[i] * si[i + 1] + pi[i] * sr[i + 1];
      const double tr = sign * (qr[i] * xr - qi[i] * xi);
      const double ti = sign * (qr[i] * xi + qi[i] * xr);
      const double yr = tr - comp_re[i], yi = ti - comp_im[i];
      const double nr = sum_re[i] + yr, ni = sum_im[i] + yi;
      comp_re[i] = (nr - sum_re[i]) - yr;
      comp_im[i] = (ni - sum_im[i]) - yi;
      sum_re[i] = nr, sum_im[i] = ni;
    }
    if (++g >= end) break;
    const auto j = static_cast<std::size_t>(std::countr_zero(g));
    const double step = ((gray(g) >> j) & 1U) ? -2.0 : 2.0;
    const std::size_t c = (j + 1) * n;
    for (std::size_t k = 0; k < n; ++k) {
      rr[k] += step * ar[c + k], ri[k] += step * ai[c + k];
      qr[k] += step * br[c + k], qi[k] += step * bi[c + k];
    }
    odd = !odd;
  }
  out.sum_re.assign(sum_re, sum_re + n);
  out.sum_im.assign(sum_im, sum_im + n);
}

std::vector<std::uint64_t> chunk_bounds(std::uint64_t first, std::uint64_t last, std::size_t threads) {
  const std::uint64_t count = last - first;
  const std::uint64_t parts = std::max<std::uint64_t>(1, std::min<std::uint64_t>(threads, count));
  std::vector<std::uint64_t> bounds(parts + 1);
  for (std::uint64_t p = 0; p <= parts; ++p) bounds[p] = first + count * p / parts;
  return bounds;
}

Complex finish(C sum, double sign, Complex scale) { return Complex(sign * sum.re, sign * sum.im) * scale; }

}  // namespace

Complex permanent(const ComplexMatrix& a, std::size_t threads) {
  const std::size_t n = a.order();
  check_order(n);
  if (n == 0) return 1.0;
  const Scaled s = scale_rows(a, nullptr);
  if (s.zero) return 0.0;
  const auto bounds = chunk_bounds(0, std::uint64_t{1} << (n - 1), threads);
  std::vector<C> partial(bounds.size() - 1);
  parallel_for(partial.size(), threads, [&](std::size_t p) { partial[p] = glynn_chunk(s, bounds[p], bounds[p + 1]); });
  Kahan total;
  for (const C& p : partial) total.add(p);
  return finish(total.sum, std::ldexp(1.0, 1 - static_cast<int>(n)), s.scale);
}

Complex permanent_ryser(const ComplexMatrix& a, std::size_t threads) {
  const std::size_t n = a.order();
  check_order(n);
  if (n == 0) return 1.0;
  const Scaled s = scale_rows(a, nullptr);
  if (s.zero) return 0.0;
  // Gray index 0 is the empty subset, which contributes nothing.
  const auto bounds = chunk_bounds(1, std::uint64_t{1} << n, threads);
  std::vector<C> partial(bounds.size() - 1);
  parallel_for(partial.size(), threads, [&](std::size_t p) { partial[p] = ryser_chunk(s, bounds[p], bounds[p + 1]); });
  Kahan total;
  for (const C& p : partial) total.add(p);
  return finish(total.sum, n % 2 == 0 ? 1.0 : -1.0, s.scale);
}

PermanentWithRows permanent_with_row_replacements(const ComplexMatrix& a, const ComplexMatrix& b,
                                                  std::size_t threads) {
  const std::size_t n = a.order();
  check_order(n);
  require(b.order() == n, ErrorKind::InvalidArgument, "replacement matrix must match the order of a");
  PermanentWithRows out{Complex{1.0, 0.0}, std::vector<Complex>(n)};
  if (n == 0) return out;
  const Scaled s = scale_rows(a, &b);
  const auto bounds = chunk_bounds(0, std::uint64_t{1} << (n - 1), threads);
  std::vector<RowsPartial> partial(bounds.size() - 1);
  parallel_for(partial.size(), threads,
               [&](std::size_t p) { glynn_rows_chunk(s, bounds[p], bounds[p + 1], partial[p]); });
  Kahan value;
  std::vector<Kahan> rows(n);
  for (const auto& p : partial) {
    value.add(p.value.sum);
    for (std::size_t i = 0; i < n; ++i) rows[i].add({p.sum_re[i], p.sum_im[i]});
  }
  const double norm = std::ldexp(1.0, 1 - static_cast<int>(n));
  out.value = finish(value.sum, norm, s.scale);
  for (std::size_t i = 0; i < n; ++i) out.rows[i] = finish(rows[i].sum, norm, s.scale);
  return out;
}

Complex permanent_ryser_direct(const ComplexMatrix& a) {
  const std::size_t n = a.order();
  check_order(n);
  if (n == 0) return 1.0;
  const std::uint64_t total = std::uint64_t{1} << n;
  Kahan acc;
  for (std::uint64_t subset = 1; subset < total; ++subset) {
    C prod{1.0, 0.0};
    for (std::size_t k = 0; k < n; ++k) {
      C row{};
      for (std::size_t j = 0; j < n; ++j) {
        if ((subset >> j) & 1U) row = add(row, C{a(k, j).real(), a(k, j).imag()});
      }
      prod = mul(prod, row);
    }
    const bool odd = std::popcount(subset) & 1;
    acc.add(odd ? C{-prod.re, -prod.im} : prod);
  }
  return finish(acc.sum, n % 2 == 0 ? 1.0 : -1.0, 1.0);
}

}  // namespace pilotwave
