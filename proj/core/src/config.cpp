#include "pilotwave/config.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "pilotwave/error.hpp"

namespace pilotwave {
namespace {

using json = nlohmann::ordered_json;

constexpr std::array<std::pair<ExperimentId, std::string_view>, 9> kNames{{
    {ExperimentId::Fig1, "fig1"},
    {ExperimentId::Fig2, "fig2"},
    {ExperimentId::Fig3, "fig3"},
    {ExperimentId::Fig4, "fig4"},
    {ExperimentId::Fig5, "fig5"},
    {ExperimentId::AppendixA, "appendix-a"},
    {ExperimentId::AppendixB, "appendix-b"},
    {ExperimentId::CatState, "cat-state"},
    {ExperimentId::Custom, "custom"},
}};

[[noreturn]] void config_error(const std::string& what) { fail(ErrorKind::ConfigError, what); }

std::string join_path(const std::string& parent, std::string_view key) {
  return parent.empty() ? std::string(key) : parent + "." + std::string(key);
}

/// Reads keys from one JSON object and remembers which were consumed so that
/// anything left over can be reported as unknown.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) config_error("'" + (path_.empty() ? std::string("<root>") : path_) + "' must be an object");
  }

  bool has(std::string_view key) const { return node_.contains(std::string(key)); }

  void read(std::string_view key, double& out) {
    if (const json* v = take(key)) {
      if (!v->is_number()) type_error(key, "a number");
      out = v->get<double>();
    }
  }
  template <class T>
    requires std::is_unsigned_v<T>
  void read(std::string_view key, T& out) {
    if (const json* v = take(key)) out = static_cast<T>(as_count(*v, key));
  }
  void read(std::string_view key, bool& out) {
    if (const json* v = take(key)) {
      if (!v->is_boolean()) type_error(key, "true or false");
      out = v->get<bool>();
    }
  }
  void read(std::string_view key, std::string& out) {
    if (const json* v = take(key)) {
      if (!v->is_string()) type_error(key, "a string");
      out = v->get<std::string>();
    }
  }
  template <class T>
  void read(std::string_view key, std::vector<T>& out) {
    if (const json* v = take(key)) {
      if (!v->is_array()) type_error(key, "an array");
      std::vector<T> items;
      for (std::size_t i = 0; i < v->size(); ++i) {
        const json& e = (*v)[i];
        const std::string name = std::string(key) + "[" + std::to_string(i) + "]";
        if constexpr (std::is_same_v<T, double>) {
          if (!e.is_number()) type_error(name, "a number");
          items.push_back(e.get<double>());
        } else {
          items.push_back(static_cast<T>(as_count(e, name)));
        }
      }
      out = std::move(items);
    }
  }
  void read(std::string_view key, Range& out) {
    std::vector<double> pair{out.lo, out.hi};
    read(key, pair);
    if (pair.size() != 2 || pair[0] > pair[1]) config_error("'" + join_path(path_, key) + "' must be [lo, hi] with lo <= hi");
    out = {pair[0], pair[1]};
  }

  template <class F>
  void child(std::string_view key, F&& fill) {
    if (const json* v = take(key)) {
      Reader sub(*v, join_path(path_, key));
      fill(sub);
      sub.finish();
    }
  }

  void finish() const {
    for (const auto& item : node_.items())
      if (!used_.count(item.key())) config_error("unknown key '" + join_path(path_, item.key()) + "'");
  }

  const std::string& path() const { return path_; }

 private:
  const json* take(std::string_view key) {
    const std::string k(key);
    if (!node_.contains(k)) return nullptr;
    used_.insert(k);
    return &node_.at(k);
  }
  [[noreturn]] void type_error(std::string_view key, const char* expected) const {
    config_error("'" + join_path(path_, key) + "' must be " + expected);
  }
  std::uint64_t as_count(const json& v, std::string_view key) const {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    type_error(key, "a non-negative integer");
  }

  const json& node_;
  std::string path_;
  std::set<std::string> used_;
};

SamplingScheme parse_sampling(const std::string& s) {
  if (s == "independent") return SamplingScheme::Independent;
  if (s == "stratified") return SamplingScheme::Stratified;
  config_error("'sampling' must be \"independent\" or \"stratified\", got \"" + s + "\"");
}

std::string sampling_name(SamplingScheme s) { return s == SamplingScheme::Stratified ? "stratified" : "independent"; }

void read_common(Reader& r, ExperimentConfig& c) {
  r.read("units", c.units);
  r.read("mass", c.mass);
  r.read("hbar", c.hbar);
  r.child("grid", [&](Reader& g) {
    g.read("x_min", c.grid.x_min);
    g.read("x_max", c.grid.x_max);
    g.read("points", c.grid.points);
  });
  r.child("packet", [&](Reader& p) {
    p.read("sigma", c.packet.sigma);
    p.read("x0", c.packet.x0);
    p.read("k0", c.packet.k0);
  });
  r.child("potential", [&](Reader& p) {
    p.read("kind", c.potential.kind);
    p.read("value", c.potential.value);
    p.read("slope", c.potential.slope);
    p.read("stiffness", c.potential.stiffness);
    p.read("center", c.potential.center);
    p.read("field_strength", c.potential.field_strength);
    p.read("charge", c.potential.charge);
  });
  r.read("dt", c.dt);
  r.read("t_max", c.t_max);
  r.read("record_stride", c.record_stride);
  r.read("trajectories", c.trajectories);
  std::string sampling = sampling_name(c.sampling);
  r.read("sampling", sampling);
  c.sampling = parse_sampling(sampling);
  r.read("center_energy", c.center_energy);
  r.read("ground_state", c.refine_ground_state);
  r.read("seed", c.seed);
  r.read("threads", c.threads);
  r.read("output_dir", c.output_dir);
  r.read("svg", c.svg);
  r.read("plotted_trajectories", c.plotted_trajectories);
  r.child("equivariance", [&](Reader& e) {
    e.read("time", c.equivariance.time);
    e.read("trajectories", c.equivariance.trajectories);
  });
  r.child("classical", [&](Reader& e) {
    e.read("node_epsilon", c.classical.node_epsilon);
    e.read("phase_tolerance", c.classical.phase_tolerance);
    e.read("support_fraction", c.classical.support_fraction);
    e.read("resolution_tolerance", c.classical.resolution_tolerance);
  });
  r.child("identity", [&](Reader& e) {
    e.read("points", c.identity.points);
    e.read("bimodal_points", c.identity.bimodal_points);
    e.read("mass_cm", c.identity.mass_cm);
    e.read("mass", c.identity.mass);
  });
  r.child("com_convergence", [&](Reader& e) {
    auto& m = c.com_convergence;
    e.read("particle_counts", m.particle_counts);
    e.read("seeds", m.seeds);
    e.read("exchange", m.exchange);
    e.read("distinguishable", m.distinguishable);
    e.read("x_left", m.x_left);
    e.read("x_right", m.x_right);
    e.read("k_left", m.k_left);
    e.read("k_right", m.k_right);
    e.read("sigma", m.sigma);
    e.read("field_volt_per_meter", m.field_volt_per_meter);
    e.read("charge_coulomb", m.charge_coulomb);
    e.read("particle_mass_kg", m.particle_mass_kg);
    e.read("x_min", m.x_min);
    e.read("x_max", m.x_max);
    e.read("grid_points", m.grid_points);
    e.read("dt", m.dt);
    e.read("wave_substeps", m.wave_substeps);
    e.read("t_max", m.t_max);
    e.read("record_stride", m.record_stride);
    e.read("equilibration_steps", m.equilibration_steps);
    e.read("error_length", m.error_length);
    e.read("keep_example_trajectories", m.keep_example_trajectories);
  });
  r.child("cat", [&](Reader& e) {
    auto& m = c.cat;
    e.read("sigma", m.spec.packet.sigma);
    e.read("k0", m.spec.packet.k0);
    e.read("x_left", m.spec.x_left);
    e.read("x_right", m.spec.x_right);
    e.read("particles", m.spec.n_particles);
    e.read("experiments", m.experiments);
    e.read("product_particles", m.product_particles);
    e.read("product_experiments", m.product_experiments);
  });
  r.child("appendix_a", [&](Reader& e) {
    auto& m = c.appendix_a;
    e.read("err_over_sigma", m.err_over_sigma);
    e.read("probability", m.probability);
    e.read("n_particles", m.n_particles);
    e.read("n_experiments", m.n_experiments);
  });
  r.child("appendix_b", [&](Reader& e) {
    auto& m = c.appendix_b;
    e.read("coefficient_n", m.coefficient_n);
    e.read("laplacian_n", m.laplacian_n);
    e.read("laplacian_points", m.laplacian_points);
    e.read("h", m.h);
    e.read("reduction_n", m.reduction_n);
    e.read("reduction_configurations", m.reduction_configurations);
  });
}

void check(bool ok, const std::string& what) {
  if (!ok) config_error(what);
}

void validate(const ExperimentConfig& c) {
  const bool nm_fs = c.experiment == ExperimentId::Fig3;
  check(c.units == (nm_fs ? "nm-fs" : "dimensionless"),
        "'units' must be \"" + std::string(nm_fs ? "nm-fs" : "dimensionless") + "\" for " +
            std::string(to_string(c.experiment)));
  check(c.mass > 0.0 && c.hbar > 0.0, "'mass' and 'hbar' must be positive");
  check(c.grid.x_max > c.grid.x_min, "'grid.x_max' must exceed 'grid.x_min'");
  check(c.grid.points >= Grid1D::kMinPoints, "'grid.points' must be at least 8");
  check(c.packet.sigma > 0.0, "'packet.sigma' must be positive");
  (void)c.potential.build();
  check(c.dt >= 0.0, "'dt' must be >= 0 (0 selects an automatic step)");
  check(c.t_max > 0.0, "'t_max' must be positive");
  check(c.threads >= 1, "'threads' must be at least 1");
  check(c.trajectories >= 1, "'trajectories' must be at least 1");
  check(c.equivariance.time > 0.0 && c.equivariance.time <= c.t_max,
        "'equivariance.time' must lie in (0, t_max]");
  check(c.classical.node_epsilon > 0.0 && c.classical.phase_tolerance > 0.0 && c.classical.resolution_tolerance > 0.0 &&
            c.classical.support_fraction > 0.0,
        "'classical' tolerances must be positive");
  check(!c.identity.points.empty(), "'identity.points' must not be empty");
  for (std::size_t p : c.identity.points) check(p >= Grid1D::kMinPoints, "'identity.points' entries must be >= 8");
  check(c.identity.bimodal_points.size() >= 2, "'identity.bimodal_points' needs at least two grids");
  for (std::size_t p : c.identity.bimodal_points)
    check(p >= Grid1D::kMinPoints, "'identity.bimodal_points' entries must be >= 8");
  const auto& m = c.com_convergence;
  check(!m.particle_counts.empty() && !m.seeds.empty(), "'com_convergence' needs particle counts and seeds");
  for (std::size_t n : m.particle_counts)
    check(n >= 1 && n <= kMaxPermanentOrder, "'com_convergence.particle_counts' entries must be in [1, 24]");
  check(m.exchange || m.distinguishable, "'com_convergence' must enable exchange or distinguishable");
  check(m.sigma > 0.0 && m.dt > 0.0 && m.t_max > 0.0 && m.wave_substeps >= 1 && m.error_length > 0.0,
        "'com_convergence' sigma, dt, t_max, wave_substeps and error_length must be positive");
  check(m.x_max > m.x_min && m.grid_points >= Grid1D::kMinPoints, "'com_convergence' grid is invalid");
  check(c.cat.spec.packet.sigma > 0.0 && c.cat.spec.x_left < c.cat.spec.x_right && c.cat.spec.n_particles >= 1,
        "'cat' packet is invalid");
  check(c.cat.experiments >= 1 && c.cat.product_experiments >= 1 && c.cat.product_particles >= 2,
        "'cat' counts must be positive (product_particles >= 2)");
  check(c.appendix_a.err_over_sigma > 0.0 && c.appendix_a.probability > 0.0 && c.appendix_a.probability < 1.0,
        "'appendix_a' needs err_over_sigma > 0 and probability in (0, 1)");
  check(c.appendix_a.n_particles >= 1.0 && c.appendix_a.n_experiments > 1.0,
        "'appendix_a' needs n_particles >= 1 and n_experiments > 1");
  for (std::size_t n : c.appendix_b.coefficient_n) check(n >= 2, "'appendix_b.coefficient_n' entries must be >= 2");
  for (std::size_t n : c.appendix_b.laplacian_n)
    check(n >= 2 && n <= 8, "'appendix_b.laplacian_n' entries must be in [2, 8]");
  check(c.appendix_b.h > 0.0 && c.appendix_b.reduction_n >= 2, "'appendix_b' needs h > 0 and reduction_n >= 2");
}

json range_json(const Range& r) { return json::array({r.lo, r.hi}); }

}  // namespace

std::string_view to_string(ExperimentId id) noexcept {
  for (const auto& [k, name] : kNames)
    if (k == id) return name;
  return "custom";
}

ExperimentId parse_experiment_id(std::string_view name) {
  for (const auto& [k, n] : kNames)
    if (n == name) return k;
  std::string known;
  for (const auto& [k, n] : kNames) known += (known.empty() ? "" : ", ") + std::string(n);
  config_error("'experiment' must be one of " + known + ", got \"" + std::string(name) + "\"");
}

const std::vector<ExperimentId>& all_experiments() {
  static const std::vector<ExperimentId> ids = [] {
    std::vector<ExperimentId> v;
    for (const auto& [k, n] : kNames) v.push_back(k);
    return v;
  }();
  return ids;
}

PotentialSpec PotentialConfig::build() const {
  if (kind == "constant") return PotentialSpec::constant(value);
  if (kind == "linear") return PotentialSpec::linear(slope);
  if (kind == "harmonic") {
    if (stiffness < 0.0) config_error("'potential.stiffness' must be >= 0");
    return PotentialSpec::harmonic(stiffness, center);
  }
  if (kind == "uniform_field") return PotentialSpec::uniform_field(field_strength, charge);
  config_error("'potential.kind' must be constant, linear, harmonic or uniform_field, got \"" + kind + "\"");
}

ExperimentConfig default_config(ExperimentId id) {
  ExperimentConfig c;
  c.experiment = id;
  switch (id) {
    case ExperimentId::Fig1:
      c.packet = {1.0, -15.0, 10.0};
      c.potential.kind = "linear";
      c.potential.slope = 2.0;
      c.grid = {-40.0, 40.0, 4096};
      c.t_max = 5.0;
      c.trajectories = 2000;
      c.sampling = SamplingScheme::Stratified;
      break;
    case ExperimentId::Fig2:
      c.packet = {1.0, 0.0, 0.0};
      c.potential.kind = "harmonic";
      c.potential.stiffness = 1.0;
      c.grid = {-10.0, 10.0, 1024};
      c.dt = 0.005;
      c.t_max = 10.0;
      c.trajectories = 200;
      c.refine_ground_state = true;
      break;
    case ExperimentId::Fig3:
      c.units = "nm-fs";
      c.com_convergence.particle_counts = {4, 8, 12, 16, 20};
      c.t_max = c.com_convergence.t_max;
      break;
    case ExperimentId::Fig4:
      c.packet = {1.0, -15.0, 10.0};
      c.potential.kind = "linear";
      c.potential.slope = 2.0;
      c.grid = {-40.0, 40.0, 4096};
      c.dt = 1e-3;
      c.t_max = 5.0;
      c.trajectories = 40;
      c.sampling = SamplingScheme::Stratified;
      break;
    case ExperimentId::Fig5:
      c.packet = {0.2, -2.0, 0.0};
      c.potential.kind = "harmonic";
      c.potential.stiffness = 1.0;
      c.grid = {-5.0, 5.0, 2048};
      c.dt = 1e-3;
      c.t_max = 4.0 * 3.14159265358979323846;
      c.trajectories = 40;
      c.sampling = SamplingScheme::Stratified;
      break;
    case ExperimentId::AppendixA:
    case ExperimentId::AppendixB:
      c.t_max = 1.0;
      break;
    case ExperimentId::CatState:
      c.grid = {-30.0, 30.0, 4096};
      c.t_max = 1.0;
      break;
    case ExperimentId::Custom:
      c.packet = {1.0, 0.0, 0.0};
      c.potential.kind = "constant";
      c.grid = {-30.0, 30.0, 4096};
      c.dt = 2e-3;
      c.t_max = 4.0;
      c.trajectories = 5000;
      c.sampling = SamplingScheme::Independent;
      c.equivariance = {2.0, 5000};
      break;
  }
  c.equivariance.time = std::min(c.equivariance.time, c.t_max);
  return c;
}

ExperimentConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text.begin(), json_text.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    config_error(std::string("malformed JSON: ") + e.what());
  }
  Reader r(root, "");
  if (!r.has("experiment")) config_error("missing key 'experiment'");
  std::string name;
  r.read("experiment", name);
  ExperimentConfig c = default_config(parse_experiment_id(name));
  read_common(r, c);
  r.finish();
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = std::string(to_string(c.experiment));
  j["units"] = c.units;
  j["mass"] = c.mass;
  j["hbar"] = c.hbar;
  j["grid"] = {{"x_min", c.grid.x_min}, {"x_max", c.grid.x_max}, {"points", c.grid.points}};
  j["packet"] = {{"sigma", c.packet.sigma}, {"x0", c.packet.x0}, {"k0", c.packet.k0}};
  j["potential"] = {{"kind", c.potential.kind},
                    {"value", c.potential.value},
                    {"slope", c.potential.slope},
                    {"stiffness", c.potential.stiffness},
                    {"center", c.potential.center},
                    {"field_strength", c.potential.field_strength},
                    {"charge", c.potential.charge}};
  j["dt"] = c.dt;
  j["t_max"] = c.t_max;
  j["record_stride"] = c.record_stride;
  j["trajectories"] = c.trajectories;
  j["sampling"] = sampling_name(c.sampling);
  j["center_energy"] = c.center_energy;
  j["ground_state"] = c.refine_ground_state;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["output_dir"] = c.output_dir;
  j["svg"] = c.svg;
  j["plotted_trajectories"] = c.plotted_trajectories;
  j["equivariance"] = {{"time", c.equivariance.time}, {"trajectories", c.equivariance.trajectories}};
  j["classical"] = {{"node_epsilon", c.classical.node_epsilon},
                    {"phase_tolerance", c.classical.phase_tolerance},
                    {"support_fraction", c.classical.support_fraction},
                    {"resolution_tolerance", c.classical.resolution_tolerance}};
  j["identity"] = {{"points", c.identity.points},
                   {"bimodal_points", c.identity.bimodal_points},
                   {"mass_cm", c.identity.mass_cm},
                   {"mass", c.identity.mass}};
  const auto& m = c.com_convergence;
  j["com_convergence"] = {{"particle_counts", m.particle_counts},
                          {"seeds", m.seeds},
                          {"exchange", m.exchange},
                          {"distinguishable", m.distinguishable},
                          {"x_left", range_json(m.x_left)},
                          {"x_right", range_json(m.x_right)},
                          {"k_left", range_json(m.k_left)},
                          {"k_right", range_json(m.k_right)},
                          {"sigma", m.sigma},
                          {"field_volt_per_meter", m.field_volt_per_meter},
                          {"charge_coulomb", m.charge_coulomb},
                          {"particle_mass_kg", m.particle_mass_kg},
                          {"x_min", m.x_min},
                          {"x_max", m.x_max},
                          {"grid_points", m.grid_points},
                          {"dt", m.dt},
                          {"wave_substeps", m.wave_substeps},
                          {"t_max", m.t_max},
                          {"record_stride", m.record_stride},
                          {"equilibration_steps", m.equilibration_steps},
                          {"error_length", m.error_length},
                          {"keep_example_trajectories", m.keep_example_trajectories}};
  j["cat"] = {{"sigma", c.cat.spec.packet.sigma},
              {"k0", c.cat.spec.packet.k0},
              {"x_left", c.cat.spec.x_left},
              {"x_right", c.cat.spec.x_right},
              {"particles", c.cat.spec.n_particles},
              {"experiments", c.cat.experiments},
              {"product_particles", c.cat.product_particles},
              {"product_experiments", c.cat.product_experiments}};
  j["appendix_a"] = {{"err_over_sigma", c.appendix_a.err_over_sigma},
                     {"probability", c.appendix_a.probability},
                     {"n_particles", c.appendix_a.n_particles},
                     {"n_experiments", c.appendix_a.n_experiments}};
  j["appendix_b"] = {{"coefficient_n", c.appendix_b.coefficient_n},
                     {"laplacian_n", c.appendix_b.laplacian_n},
                     {"laplacian_points", c.appendix_b.laplacian_points},
                     {"h", c.appendix_b.h},
                     {"reduction_n", c.appendix_b.reduction_n},
                     {"reduction_configurations", c.appendix_b.reduction_configurations}};
  return j.dump(2);
}

}  // namespace pilotwave
