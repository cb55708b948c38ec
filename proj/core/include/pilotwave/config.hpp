#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pilotwave/bohm.hpp"
#include "pilotwave/classical.hpp"
#include "pilotwave/manybody.hpp"
#include "pilotwave/potential.hpp"
#include "pilotwave/sampling.hpp"
#include "pilotwave/wavefunction.hpp"

namespace pilotwave {

enum class ExperimentId { Fig1, Fig2, Fig3, Fig4, Fig5, AppendixA, AppendixB, CatState, Custom };

std::string_view to_string(ExperimentId id) noexcept;
/// Throws ConfigError for an unknown name.
ExperimentId parse_experiment_id(std::string_view name);
const std::vector<ExperimentId>& all_experiments();

struct GridConfig {
  double x_min = -40.0;
  double x_max = 40.0;
  std::size_t points = 4096;
  Grid1D build() const { return Grid1D(x_min, x_max, points); }
};

/// kind: constant | linear | harmonic | uniform_field.
struct PotentialConfig {
  std::string kind = "constant";
  double value = 0.0;
  double slope = 0.0;
  double stiffness = 1.0;
  double center = 0.0;
  double field_strength = 0.0;
  double charge = 1.0;
  PotentialSpec build() const;
};

struct EquivarianceConfig {
  double time = 2.0;
  std::size_t trajectories = 5000;
};

struct IdentityConfig {
  /// Points per axis of the successively refined 2D grids (correlated Gaussian).
  std::vector<std::size_t> points{201, 401, 801};
  /// Refinement used for the asymmetric bimodal field and the convergence order.
  std::vector<std::size_t> bimodal_points{501, 1001, 2001};
  double mass_cm = 1.0;
  double mass = 1.0;
};

struct CatConfig {
  CatStateSpec spec{{1.0, 0.0, 0.0}, -10.0, 10.0, 10};
  std::size_t experiments = 1000;
  std::size_t product_particles = 10000;
  std::size_t product_experiments = 20;
};

struct AppendixAConfig {
  double err_over_sigma = 0.005;
  double probability = 0.98;
  double n_particles = 6e23;
  double n_experiments = 2e12;
};

struct AppendixBConfig {
  std::vector<std::size_t> coefficient_n{2, 3, 4, 10, 100, 1024};
  std::vector<std::size_t> laplacian_n{2, 3, 4};
  std::size_t laplacian_points = 100;
  double h = 1e-4;
  std::size_t reduction_n = 20;
  std::size_t reduction_configurations = 100;
};

struct ExperimentConfig {
  ExperimentId experiment = ExperimentId::Custom;
  /// "dimensionless" (m = hbar = 1 by default) or "nm-fs" (com_convergence block).
  std::string units = "dimensionless";
  double mass = 1.0;
  double hbar = 1.0;
  GridConfig grid;
  GaussianPacketSpec packet{1.0, 0.0, 0.0};
  PotentialConfig potential;
  /// 0 selects default_time_step.
  double dt = 0.0;
  double t_max = 5.0;
  std::size_t record_stride = 0;  // 0: about 200 records
  std::size_t trajectories = 1000;
  SamplingScheme sampling = SamplingScheme::Stratified;
  /// Centre the CN energy reference on <H> of the initial state.
  bool center_energy = true;
  /// Replace the initial packet by the discrete ground state it approximates.
  bool refine_ground_state = false;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::string output_dir;
  bool svg = true;
  std::size_t plotted_trajectories = 40;

  EquivarianceConfig equivariance;
  ClassicalOptions classical;
  IdentityConfig identity;
  ComConvergenceConfig com_convergence;
  CatConfig cat;
  AppendixAConfig appendix_a;
  AppendixBConfig appendix_b;
};

/// Defaults for an experiment, matching the committed presets.
ExperimentConfig default_config(ExperimentId id);

/// JSON text -> config. "experiment" selects the defaults, every other key
/// overrides one of them. Unknown keys and wrong types raise ConfigError
/// naming the offending key path.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Fully resolved config as pretty JSON (every default written out).
std::string to_json(const ExperimentConfig& config);

}  // namespace pilotwave
