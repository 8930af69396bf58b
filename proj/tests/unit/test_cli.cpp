#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

#include "wqc/cli/commands.hpp"
#include "wqc/cli/config.hpp"
#include "wqc/cli/io.hpp"

using namespace wqc::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("wqc-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the tool and returns its exit status.
int run(const std::string& args) {
  const std::string cmd = std::string("\"") + WQC_EXE + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Everything after the provenance comment line.
std::string csv_body(const fs::path& p) {
  const auto text = slurp(p);
  return text.substr(text.find('\n') + 1);
}

}  // namespace

TEST_CASE("an empty configuration resolves to the defaults") {
  const auto c = parse_config_text("");
  CHECK(c.billiard.Lx == 1.5);
  CHECK(c.billiard.R == 8);
  CHECK(c.window.levels == 100);
  CHECK(c.window.recenter);
  CHECK(c.measures.bc_rule == BcRule::Detect);
  CHECK(c.seed == 1);
  CHECK(validate(c).empty());
}

TEST_CASE("configuration errors name their fields") {
  try {
    (void)parse_config_text("billiard:\n  Lz: 2\n  Lx: -1\n");
    FAIL("expected a configuration error");
  } catch (const ConfigError& e) {
    const auto& v = e.violations();
    REQUIRE(v.size() == 2);
    CHECK(v[0].find("billiard.Lz") != std::string::npos);
    CHECK(v[0].find("unknown key") != std::string::npos);
    CHECK(v[1].find("billiard.Lx") != std::string::npos);
  }
  CHECK_THROWS_AS((void)parse_config_text("window:\n  levels: many\n"), ConfigError);
  CHECK_THROWS_AS((void)parse_config_text("measures:\n  bc_rule: guess\n"), ConfigError);
}

TEST_CASE("JSON and YAML describe the same run") {
  const auto y = parse_config_text("billiard:\n  R: .inf\nseed: 4\n");
  const auto j = parse_config_text(R"({"billiard": {"R": "inf"}, "seed": 4})");
  CHECK(std::isinf(y.billiard.R));
  CHECK(config_hash(y) == config_hash(j));
  CHECK(to_json(y) == to_json(j));
}

TEST_CASE("the configuration hash ignores where and how fast a run goes") {
  auto a = parse_config_text("");
  auto b = a;
  b.out_dir = "elsewhere";
  b.jobs = 8;
  CHECK(config_hash(a) == config_hash(b));
  b.seed = 2;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(config_hash(a).size() == 16);
}

TEST_CASE("CSV and matrix files") {
  const auto dir = scratch("io");
  const Provenance prov{"abc", 3, json::object()};
  {
    CsvWriter w(dir / "t.csv", prov, {"x", "y"});
    w.row({0.1, 1e-300});
    CHECK_THROWS((void)w.row({1.0}));
  }
  const auto text = slurp(dir / "t.csv");
  CHECK(text.rfind("# wqc " + version_string() + " config=abc seed=3\n", 0) == 0);
  CHECK(text.find("x,y\n0.10000000000000001,1e-300\n") != std::string::npos);
  CHECK(std::stod(format_number(0.1)) == 0.1);

  Eigen::MatrixXd m(2, 3);
  m << 1, 2, 3, 4, 5, 6.5;
  write_matrix(dir / "m.bin", m, prov);
  CHECK(read_matrix(dir / "m.bin") == m);
  const auto side = json::parse(slurp(dir / "m.bin.json"));
  CHECK(side["rows"] == 2);
  CHECK(side["cols"] == 3);
  CHECK(side["provenance"]["seed"] == 3);
}

TEST_CASE("sweep seeds are derived per point") {
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  const auto p = sweep_billiard(wqc::BilliardParams{}, 0.1, 1.0 / 9);
  const auto s = wqc::derive_scales(p);
  CHECK(s.u == doctest::Approx(0.1));
  CHECK(s.hbar_eff == doctest::Approx(1.0 / 9));
}

TEST_CASE("exit codes and the resolved configuration echo") {
  const auto dir = scratch("exit");
  std::ofstream(dir / "minimal.yaml") << "window:\n  levels: 40\n";
  std::ofstream(dir / "lz.yaml") << "billiard:\n  Lz: 1\n";
  std::ofstream(dir / "neg.yaml") << "billiard:\n  Lx: -1.5\n";

  CHECK(run("--version") == 0);
  CHECK(run("quantum-solve --config " + (dir / "minimal.yaml").string() + " --out " + (dir / "ok").string()) == 0);
  const auto echo = json::parse(slurp(dir / "ok" / "config.resolved.json"));
  CHECK(echo["window"]["levels"] == 40);
  CHECK(echo["billiard"]["Lx"] == 1.5);
  CHECK(echo["measures"]["weight"] == "exponential");
  CHECK(fs::exists(dir / "ok" / "eigenvalues.csv"));
  CHECK(fs::exists(dir / "ok" / "fmatrix.bin.json"));

  CHECK(run("ear --config " + (dir / "lz.yaml").string() + " --out " + (dir / "lz").string()) == 2);
  const auto lz = json::parse(slurp(dir / "lz" / "error.json"));
  CHECK(lz["error"] == "config");
  CHECK(lz["details"][0].get<std::string>().find("Lz") != std::string::npos);

  CHECK(run("ear --config " + (dir / "neg.yaml").string() + " --out " + (dir / "neg").string()) == 2);
  const auto neg = json::parse(slurp(dir / "neg" / "error.json"));
  CHECK(neg["details"][0].get<std::string>().find("billiard.Lx") != std::string::npos);

  CHECK(run("ear --config " + (dir / "missing.yaml").string() + " --out " + (dir / "missing").string()) == 2);
  CHECK(run("no-such-command") == 2);

  // A sweep needs at least one point on each axis.
  std::ofstream(dir / "empty.yaml") << "sweep:\n  u: []\n  hbar: [0.1]\n";
  CHECK(run("sweep --config " + (dir / "empty.yaml").string() + " --out " + (dir / "empty").string()) == 2);
}

TEST_CASE("repeated runs and thread counts give identical tables") {
  const auto dir = scratch("det");
  std::ofstream(dir / "s.yaml") << "window:\n  levels: 40\n  buffer_fraction: 0.3\n"
                                   "measures:\n  bc_rule: deltaR\n"
                                   "sweep:\n  u: [0.05, 0.1, 0.2]\n  hbar: [0.1111111111111111]\n";
  const auto cfg = (dir / "s.yaml").string();
  REQUIRE(run("sweep --config " + cfg + " --out " + (dir / "a").string() + " --jobs 1") == 0);
  REQUIRE(run("sweep --config " + cfg + " --out " + (dir / "b").string() + " --jobs 3") == 0);
  REQUIRE(run("stats --config " + cfg + " --out " + (dir / "c").string()) == 0);
  REQUIRE(run("stats --config " + cfg + " --out " + (dir / "d").string()) == 0);
  CHECK(csv_body(dir / "a" / "sweep.csv") == csv_body(dir / "b" / "sweep.csv"));
  CHECK(slurp(dir / "c" / "spacings.csv") == slurp(dir / "d" / "spacings.csv"));
  CHECK(slurp(dir / "a" / "sweep.csv").find("u,hbar,E,dim") != std::string::npos);
}

TEST_CASE("classical spectrum reaches the flat tail") {
  const auto dir = scratch("spectrum");
  std::ofstream(dir / "c.json") << R"({"classical": {"piston_hits": 50000, "omega_max": 8, "grid_points": 801}})";
  REQUIRE(run("classical-spectrum --config " + (dir / "c.json").string() + " --out " + (dir / "out").string()) == 0);
  const auto r = json::parse(slurp(dir / "out" / "classical.json"));
  MESSAGE("tail plateau / C_inf = " << r["tail_plateau_over_Cinf"].get<double>());
  CHECK(std::abs(r["tail_plateau_over_Cinf"].get<double>() - 1) < 0.05);
  CHECK(slurp(dir / "out" / "spectrum.csv").find("\nomega,") != std::string::npos);
}
