#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "metagrav/cli_io.hpp"
#include "metagrav/experiments.hpp"

using namespace metagrav;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("metagrav_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int counter() {
    static int c = 0;
    return c++;
  }
  fs::path file(const std::string& name) const { return path / name; }
};

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("flat key=value parsing with comments and overrides") {
  TempDir tmp;
  write_file(tmp.file("ok.cfg"),
             "# analytic inputs\n"
             "mass_mp = 1e12   # reference value\n"
             "alpha=1.0\n"
             "\n"
             "density_g_cm3 = 0\n");
  ConfigMap cfg;
  cfg.load_file(tmp.file("ok.cfg").string());
  CHECK(cfg.get_double("mass_mp", 0.0) == 1e12);
  CHECK(cfg.get_double("alpha", 0.0) == 1.0);
  cfg.set_override("alpha=2.5");  // overrides win over file values
  CHECK(cfg.get_double("alpha", 0.0) == 2.5);
  CHECK(cfg.get_double("density_g_cm3", -1.0) == 0.0);
  CHECK_NOTHROW(cfg.finish());
}

TEST_CASE("all validation failures are reported together, with lines") {
  TempDir tmp;
  write_file(tmp.file("bad.cfg"),
             "mass_mp = twelve\n"
             "alhpa = 1.0\n"
             "points = 3.5\n");
  ConfigMap cfg;
  cfg.load_file(tmp.file("bad.cfg").string());
  cfg.get_double("mass_mp", 0.0);   // type error, line 1
  cfg.get_int("points", 0);         // type error, line 3
  try {
    cfg.finish();                   // plus unknown key 'alhpa', line 2
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("mass_mp") != std::string::npos);
    CHECK(msg.find("line 1") != std::string::npos);
    CHECK(msg.find("alhpa") != std::string::npos);
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("points") != std::string::npos);
    CHECK(msg.find("line 3") != std::string::npos);
  }
}

TEST_CASE("syntax errors: missing '=', duplicates, bad overrides") {
  TempDir tmp;
  write_file(tmp.file("syn.cfg"),
             "just a line\n"
             "alpha = 1\n"
             "alpha = 2\n");
  ConfigMap cfg;
  CHECK_THROWS_AS(cfg.load_file(tmp.file("syn.cfg").string()), ConfigError);
  ConfigMap cfg2;
  CHECK_THROWS_AS(cfg2.set_override("no_equals_sign"), ConfigError);
  ConfigMap cfg3;
  CHECK_THROWS_AS(cfg3.load_file((tmp.path / "missing.cfg").string()),
                  ConfigError);
}

TEST_CASE("double list parsing") {
  ConfigMap cfg;
  cfg.set_override("masses=1, 2 ,4");
  const std::vector<double> m = cfg.get_double_list("masses", {});
  REQUIRE(m.size() == 3);
  CHECK(m[0] == 1.0);
  CHECK(m[1] == 2.0);
  CHECK(m[2] == 4.0);
  ConfigMap cfg2;
  cfg2.set_override("masses=1,x");
  cfg2.get_double_list("masses", {});
  CHECK_THROWS_AS(cfg2.finish(), ConfigError);
}

TEST_CASE("scenario dispatch: names, unknown scenario, unknown key") {
  CHECK(scenario_names().size() == 7);
  ConfigMap cfg;
  CHECK_THROWS_AS(dispatch_scenario("nonsense", cfg), ConfigError);
  ConfigMap cfg2;
  cfg2.set_override("not_a_key=1");
  CHECK_THROWS_AS(dispatch_scenario("analytic", cfg2), ConfigError);
}

TEST_CASE("analytic scenario dispatch honors overrides") {
  ConfigMap cfg;
  cfg.set_override("mass_mp=1e12");
  ExperimentReport rep = dispatch_scenario("analytic", cfg);
  CHECK(rep.scenario == "analytic");
  CHECK(rep.all_passed());
  bool echoed = false;
  for (const auto& [k, v] : rep.config_echo)
    if (k == "mass_mp" && v == "1e+12") echoed = true;
  CHECK(echoed);
}

TEST_CASE("emit writes CSVs plus summary.json, byte-identical on rerun") {
  TempDir out1, out2;
  ExperimentReport rep = run_analytic(AnalyticConfig{});
  emit_report(rep, out1.path.string());
  REQUIRE(fs::exists(out1.file("summary.json")));
  ExperimentReport rep2 = run_analytic(AnalyticConfig{});
  emit_report(rep2, out2.path.string());
  CHECK(read_file(out1.file("summary.json")) ==
        read_file(out2.file("summary.json")));
  // summary carries the required schema fields
  const std::string j = read_file(out1.file("summary.json"));
  for (const char* field : {"\"scenario\"", "\"config\"", "\"fits\"",
                            "\"checks\"", "\"all_passed\"", "\"versions\""})
    CHECK(j.find(field) != std::string::npos);
  // no leftover temporaries from the atomic-rename path
  for (const auto& entry : fs::directory_iterator(out1.path))
    CHECK(entry.path().extension() != ".tmp");
}

TEST_CASE("threshold scan emits the documented table schema") {
  TempDir out;
  ExperimentReport rep = run_threshold_scan(ThresholdScanConfig{});
  emit_report(rep, out.path.string());
  REQUIRE(fs::exists(out.file("thresholds.csv")));
  std::ifstream in(out.file("thresholds.csv"));
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "mass_mp,lambda_cm,ebind_erg,freq_hz,coh_len_cm,radius_cm,tau_s,a_cm,"
        "regime");
  std::string row;
  int rows = 0;
  while (std::getline(in, row)) ++rows;
  CHECK(rows > 50);
}

TEST_CASE("time series CSVs use the t,<name> header") {
  TempDir out;
  ExperimentReport rep;
  rep.scenario = "analytic";
  rep.series.push_back({"visibility", {{0.0, 1.0}, {0.1, 0.5}}});
  emit_report(rep, out.path.string());
  REQUIRE(fs::exists(out.file("visibility.csv")));
  const std::string csv = read_file(out.file("visibility.csv"));
  CHECK(csv.rfind("t,visibility\n", 0) == 0);
  CHECK(csv.find("0.1,0.5") != std::string::npos);
}

TEST_CASE("format_double uses shortest round-trip decimals") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5e-7) == "-2.5e-07");
  // round trip: parsing the string recovers the exact double
  const double v = 0.1234567890123456789;
  CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("worker thread cap follows METAGRAV_THREADS") {
  ::unsetenv("METAGRAV_THREADS");
  CHECK(worker_thread_cap() == 1);
  ::setenv("METAGRAV_THREADS", "4", 1);
  CHECK(worker_thread_cap() == 4);
  ::setenv("METAGRAV_THREADS", "garbage", 1);
  CHECK(worker_thread_cap() == 1);
  ::setenv("METAGRAV_THREADS", "0", 1);
  CHECK(worker_thread_cap() == 1);
  ::unsetenv("METAGRAV_THREADS");
}

#ifdef METAGRAV_CLI_PATH
namespace {
int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(METAGRAV_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}
}  // namespace

TEST_CASE("CLI exit codes") {
  TempDir out;
  // 0: run completed, all checks passed
  CHECK(run_cli("analytic --out " + out.path.string()) == 0);
  REQUIRE(fs::exists(out.file("summary.json")));
  // 1: usage / config errors
  CHECK(run_cli("analytic") == 1);                       // missing --out
  CHECK(run_cli("bogus --out " + out.path.string()) == 1);
  CHECK(run_cli("analytic --set no_such_key=1 --out " + out.path.string()) ==
        1);
  CHECK(run_cli("analytic --config /does/not/exist --out " +
                out.path.string()) == 1);
  // help is a success path
  CHECK(run_cli("--help") == 0);
}

TEST_CASE("CLI exit code 2 still writes the report") {
  TempDir out;
  // a deliberately coarse mesh spacing completes the run but misses the
  // energy tolerance, so the run reports failure yet still emits its files
  const int rc =
      run_cli("groundstate-radial --set mesh_points=1000 --set r_max=120 "
              "--out " +
              out.path.string());
  CHECK(rc == 2);
  CHECK(fs::exists(out.file("summary.json")));
}
#endif
