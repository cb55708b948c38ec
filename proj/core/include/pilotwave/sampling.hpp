#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "pilotwave/wavefunction.hpp"

namespace pilotwave {

using Rng = std::mt19937_64;

/// Deterministic child seed for stream `stream` of a base seed (splitmix64 mix).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

/// Uniform double in [0, 1) built from the top 53 bits of one draw.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

enum class SamplingScheme {
  /// M i.i.d. draws.
  Independent,
  /// One draw per probability stratum [k/M, (k+1)/M), returned in random order.
  Stratified,
};

/// Piecewise-linear cumulative distribution of a non-negative density sampled
/// on a grid (trapezoid cell masses, uniform density within each cell).
class DensityCdf {
 public:
  DensityCdf(const Grid1D& grid, std::span<const double> density);
  explicit DensityCdf(const WaveFunction1D& wf);

  double total_mass() const noexcept { return total_; }
  double operator()(double x) const noexcept;
  double quantile(double u) const noexcept;
  const Grid1D& grid() const noexcept { return grid_; }

 private:
  Grid1D grid_;
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

std::vector<double> sample_positions(const WaveFunction1D& wf, std::size_t count, std::uint64_t seed,
                                     SamplingScheme scheme = SamplingScheme::Independent);
std::vector<double> sample_positions(const DensityCdf& cdf, std::size_t count, Rng& rng,
                                     SamplingScheme scheme = SamplingScheme::Independent);

/// Two-sided one-sample Kolmogorov-Smirnov statistic sup |F_n - F|.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);
/// Two-sample Kolmogorov-Smirnov statistic.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace pilotwave
