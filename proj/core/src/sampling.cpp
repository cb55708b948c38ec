#include "pilotwave/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pilotwave/error.hpp"

namespace pilotwave {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

DensityCdf::DensityCdf(const Grid1D& grid, std::span<const double> density)
    : grid_(grid), cumulative_(grid.size(), 0.0) {
  require(density.size() == grid.size(), ErrorKind::GridMismatch, "density size does not match grid");
  const double dx = grid.dx();
  for (std::size_t i = 1; i < density.size(); ++i) {
    cumulative_[i] = cumulative_[i - 1] + 0.5 * dx * (density[i - 1] + density[i]);
  }
  total_ = cumulative_.back();
  require(std::isfinite(total_), ErrorKind::InvalidArgument, "density is not finite");
  require(total_ >= 1e-300, ErrorKind::ZeroNorm, "density has zero mass");
}

DensityCdf::DensityCdf(const WaveFunction1D& wf) : DensityCdf(wf.grid(), density(wf)) {}

double DensityCdf::operator()(double x) const noexcept {
  if (x <= grid_.x_min()) return 0.0;
  if (x >= grid_.x_max()) return 1.0;
  const std::size_t i = grid_.cell_of(x);
  const double s = (x - grid_.x(i)) / grid_.dx();
  return ((1.0 - s) * cumulative_[i] + s * cumulative_[i + 1]) / total_;
}

double DensityCdf::quantile(double u) const noexcept {
  const double target = std::clamp(u, 0.0, 1.0) * total_;
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  if (it == cumulative_.begin()) return grid_.x_min();
  if (it == cumulative_.end()) return grid_.x_max();
  const auto i = static_cast<std::size_t>(std::distance(cumulative_.begin(), it)) - 1;
  const double mass = cumulative_[i + 1] - cumulative_[i];
  const double s = mass > 0.0 ? (target - cumulative_[i]) / mass : 0.0;
  return grid_.x(i) + s * grid_.dx();
}

std::vector<double> sample_positions(const DensityCdf& cdf, std::size_t count, Rng& rng, SamplingScheme scheme) {
  std::vector<double> out(count);
  if (scheme == SamplingScheme::Independent) {
    for (auto& x : out) x = cdf.quantile(uniform01(rng));
    return out;
  }
  const double m = static_cast<double>(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = cdf.quantile((static_cast<double>(k) + uniform01(rng)) / m);
  // Fisher-Yates with our own uniform so the order is platform independent.
  for (std::size_t k = count; k > 1; --k) {
    const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(k));
    std::swap(out[k - 1], out[std::min(j, k - 1)]);
  }
  return out;
}

std::vector<double> sample_positions(const WaveFunction1D& wf, std::size_t count, std::uint64_t seed,
                                     SamplingScheme scheme) {
  DensityCdf cdf(wf);
  Rng rng(seed);
  return sample_positions(cdf, count, rng, scheme);
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  require(!samples.empty(), ErrorKind::TooFewSamples, "KS statistic needs at least one sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), ErrorKind::TooFewSamples, "two-sample KS needs non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace pilotwave
