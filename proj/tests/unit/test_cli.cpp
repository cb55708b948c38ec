#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "pilotwave/config.hpp"
#include "pilotwave/csv.hpp"
#include "pilotwave/error.hpp"
#include "pilotwave/experiments.hpp"

using namespace pilotwave;
namespace fs = std::filesystem;

namespace {

std::string config_error_of(const std::string& json) {
  try {
    (void)parse_config(json);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) return e.what();
    return "wrong kind: " + std::string(e.what());
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("pilotwave_test_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

#ifdef PILOTWAVE_CLI
int run_cli(const std::string& args) {
  const int status = std::system((std::string(PILOTWAVE_CLI) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
#endif

}  // namespace

TEST_CASE("unknown keys are rejected by name") {
  const auto msg = config_error_of(R"({"experiment": "fig1", "packet": {"sigma": 1.0, "sigmaa": 2.0}})");
  CHECK(msg.find("packet.sigmaa") != std::string::npos);
  CHECK(config_error_of(R"({"experiment": "fig1", "bogus": 1})").find("bogus") != std::string::npos);
}

TEST_CASE("wrong types and bad values are config errors") {
  CHECK(config_error_of(R"({"experiment": "fig1", "dt": "small"})").find("dt") != std::string::npos);
  CHECK(!config_error_of(R"({"experiment": "fig9"})").empty());
  CHECK(!config_error_of(R"({"experiment": "fig1", "grid": {"points": 2}})").empty());
  CHECK(!config_error_of(R"({"experiment": "fig4", "classical": {"phase_tolerance": -1}})").empty());
  CHECK(!config_error_of("{not json").empty());
}

TEST_CASE("resolved config survives a JSON round trip") {
  for (auto id : all_experiments()) {
    const auto c = default_config(id);
    const auto text = to_json(c);
    CHECK(to_json(parse_config(text)) == text);
  }
}

TEST_CASE("every committed preset parses") {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(PILOTWAVE_PRESET_DIR)) {
    if (e.path().extension() != ".json") continue;
    CAPTURE(e.path().string());
    const auto c = load_config(e.path());
    CHECK(to_string(c.experiment) == e.path().stem().string());
    ++n;
  }
  CHECK(n == all_experiments().size());
}

TEST_CASE("CSV: header plus one line per row, 17 digit round trip") {
  Table t;
  t.add("t", {0.0, 0.1, 1.0 / 3.0});
  t.add("value", {std::sqrt(2.0), -1e-300, 6.02214076e23});
  const auto text = format_csv(t);
  std::size_t lines = 0;
  for (char ch : text) lines += ch == '\n';
  CHECK(lines == 4);
  CHECK(text.rfind("t, value\n", 0) == 0);
  const auto back = parse_csv_text(text);
  REQUIRE(back.columns == t.columns);
  CHECK(back.values == t.values);
}

TEST_CASE("CSV written to disk reads back identically") {
  Table t;
  t.add("t", {0.0, 0.5, 1.0});
  t.add("a", {1.0 / 7.0, 2.0 / 7.0, 3.0 / 7.0});
  t.add("b", {-1.0, 0.0, 1e-17});
  const auto dir = scratch("csv");
  fs::create_directories(dir);
  emit_csv(t, dir / "t.csv");
  const auto back = parse_csv(dir / "t.csv");
  CHECK(back.values == t.values);
  fs::remove_all(dir);
}

TEST_CASE("SVG output is a self-contained line plot") {
  Table t;
  t.add("t", {0.0, 1.0, 2.0});
  t.add("x", {0.0, 1.0, 4.0});
  t.add("y", {1.0, 0.5, 0.25});
  const auto svg = format_svg(t, {"demo", "t", "x", false});
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("demo") != std::string::npos);
  std::size_t lines = 0;
  for (std::size_t p = svg.find("<polyline"); p != std::string::npos; p = svg.find("<polyline", p + 1)) ++lines;
  CHECK(lines == 2);
}

TEST_CASE("spearman rank correlation") {
  CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
  CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
  // ranks of y: 1, 2.5, 2.5, 4
  CHECK(spearman({1, 2, 3, 4}, {1, 5, 5, 9}) == doctest::Approx(0.9486832980505138));
}

TEST_CASE("appendix runs pass their gates and write metadata") {
  for (auto id : {ExperimentId::AppendixA, ExperimentId::AppendixB}) {
    const auto dir = scratch(std::string(to_string(id)));
    const auto art = run_experiment(default_config(id), dir);
    CHECK(art.passed());
    CHECK(!art.checks.empty());
    CHECK(fs::exists(dir / "run.json"));
    const auto meta = slurp(dir / "run.json");
    CHECK(meta.find("code_version") != std::string::npos);
    CHECK(meta.find("wall_time_seconds") != std::string::npos);
    CHECK(meta.find("\"config\"") != std::string::npos);
    for (const auto& f : art.files) CHECK(fs::exists(f));
    fs::remove_all(dir);
  }
}

TEST_CASE("identical config gives byte-identical CSV files") {
  auto c = default_config(ExperimentId::CatState);
  c.cat.experiments = 50;
  c.cat.spec.n_particles = 4;
  c.cat.product_particles = 2000;
  c.cat.product_experiments = 3;
  c.svg = false;
  const auto a = scratch("repro_a"), b = scratch("repro_b");
  const auto ra = run_experiment(c, a);
  const auto rb = run_experiment(c, b);
  REQUIRE(ra.files.size() == rb.files.size());
  std::size_t csvs = 0;
  for (const auto& f : ra.files) {
    if (f.extension() != ".csv") continue;
    ++csvs;
    CHECK(slurp(f) == slurp(b / f.filename()));
  }
  CHECK(csvs > 0);
  fs::remove_all(a);
  fs::remove_all(b);
}

#ifdef PILOTWAVE_CLI
TEST_CASE("command line exit codes and output directory") {
  const auto dir = scratch("exit");
  fs::create_directories(dir);
  CHECK(run_cli("run appendix-a --check --out " + (dir / "a").string()) == 0);
  CHECK(fs::exists(dir / "a" / "run.json"));

  std::ofstream(dir / "bad.json") << R"({"experiment": "appendix-a", "extra": 1})";
  CHECK(run_cli("run " + (dir / "bad.json").string()) == 2);
  CHECK(run_cli("run no-such-preset") == 2);

  // grid too coarse for the packet: the gates fail, so --check exits 1
  std::ofstream(dir / "coarse.json") << R"({"experiment": "fig5", "grid": {"points": 64}, "t_max": 2.5})";
  CHECK(run_cli("run " + (dir / "coarse.json").string() + " --check --out " + (dir / "c").string()) == 1);

  CHECK(run_cli("list-presets") == 0);
  CHECK(run_cli("") == 2);

  const auto env_dir = dir / "env";
  CHECK(std::system(("PILOTWAVE_OUT=" + env_dir.string() + " " + PILOTWAVE_CLI +
                     " run appendix-a > /dev/null 2>&1").c_str()) == 0);
  CHECK(fs::exists(env_dir / "run.json"));
  fs::remove_all(dir);
}
#endif
