// pilotwave-com: runs the preset experiments and writes CSV/SVG/metadata.
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pilotwave/config.hpp"
#include "pilotwave/error.hpp"
#include "pilotwave/experiments.hpp"

namespace fs = std::filesystem;
using namespace pilotwave;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitNumeric = 1;
constexpr int kExitConfig = 2;

std::vector<fs::path> preset_dirs() {
  std::vector<fs::path> dirs;
  if (const char* env = std::getenv("PILOTWAVE_PRESETS")) dirs.emplace_back(env);
  dirs.emplace_back(PILOTWAVE_PRESET_DIR);
  dirs.emplace_back(PILOTWAVE_INSTALLED_PRESET_DIR);
  return dirs;
}

std::vector<fs::path> list_presets() {
  for (const auto& dir : preset_dirs()) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) continue;
    std::vector<fs::path> found;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.path().extension() == ".json") found.push_back(e.path());
    std::sort(found.begin(), found.end());
    if (!found.empty()) return found;
  }
  return {};
}

/// A path to an existing file, or the name of a preset.
fs::path resolve_config(const std::string& arg) {
  if (fs::exists(arg)) return arg;
  for (const auto& p : list_presets())
    if (p.stem() == arg) return p;
  fail(ErrorKind::ConfigError, "no config file or preset named '" + arg + "'");
}

void print_check(const Check& c) {
  std::printf("%s  %-55s %.6g %s ", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.value, c.relation.c_str());
  if (c.relation == "in")
    std::printf("[%.6g, %.6g]", c.threshold, c.upper);
  else
    std::printf("%.6g", c.threshold);
  if (!c.detail.empty()) std::printf("  (%s)", c.detail.c_str());
  std::printf("\n");
}

int run_command(const std::string& config_arg, bool check, const std::optional<std::string>& out_flag,
                const std::optional<std::uint64_t>& seed, const std::optional<std::size_t>& threads) {
  ExperimentConfig config;
  fs::path out;
  try {
    config = load_config(resolve_config(config_arg));
    if (seed) {
      config.seed = *seed;
      auto& seeds = config.com_convergence.seeds;
      for (std::size_t k = 0; k < seeds.size(); ++k) seeds[k] = *seed + k;
    }
    if (threads) {
      if (*threads == 0) fail(ErrorKind::ConfigError, "--threads must be at least 1");
      config.threads = *threads;
    }
    if (out_flag) {
      out = *out_flag;
    } else if (const char* env = std::getenv("PILOTWAVE_OUT"); env && *env) {
      out = env;
    } else if (!config.output_dir.empty()) {
      out = config.output_dir;
    } else {
      out = fs::path("out") / std::string(to_string(config.experiment));
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "pilotwave-com: %s\n", e.what());
    return kExitConfig;
  }

  std::printf("experiment %s -> %s\n", std::string(to_string(config.experiment)).c_str(), out.string().c_str());
  RunArtifacts art;
  try {
    art = run_experiment(config, out);
  } catch (const Error& e) {
    std::fprintf(stderr, "pilotwave-com: %s\n", e.what());
    return e.kind() == ErrorKind::ConfigError || e.kind() == ErrorKind::IoError ? kExitConfig : kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "pilotwave-com: %s\n", e.what());
    return kExitNumeric;
  }
  for (const auto& c : art.checks) print_check(c);
  std::printf("%zu files written, wall time %.2f s, %s\n", art.files.size(), art.wall_seconds,
              art.passed() ? "all checks passed" : "some checks failed");
  if (check && !art.passed()) return kExitNumeric;
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pilot-wave centre-of-mass experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment from a config file or preset name");
  std::string config_arg;
  bool check = false;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  run->add_option("config", config_arg, "Config JSON file or preset name")->required();
  run->add_flag("--check", check, "Exit 1 when an acceptance gate fails");
  run->add_option("--out", out, "Output directory (overrides PILOTWAVE_OUT and the config)");
  run->add_option("--seed", seed, "Base seed");
  run->add_option("--threads", threads, "Worker threads");

  auto* list = app.add_subcommand("list-presets", "List the committed presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  if (*list) {
    const auto presets = list_presets();
    if (presets.empty()) {
      std::fprintf(stderr, "pilotwave-com: no presets found\n");
      return kExitConfig;
    }
    for (const auto& p : presets) std::printf("%-12s %s\n", p.stem().string().c_str(), p.string().c_str());
    return kExitPass;
  }
  return run_command(config_arg, check, out, seed, threads);
}
