#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "levy/cli.hpp"

namespace fs = std::filesystem;
using levy::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("levy_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("time grid syntax") {
  using levy::cli::parse_t_grid;
  CHECK(parse_t_grid("1e-2,1e-4") == std::vector<double>{1e-2, 1e-4});
  const auto dec = parse_t_grid("1e-4:1e-16");
  REQUIRE(dec.size() == 13);
  CHECK(dec.front() == 1e-4);
  CHECK(dec[1] == 1e-5);
  CHECK(dec.back() == 1e-16);
  const auto lin = parse_t_grid("1e-2:1e-6:3");
  REQUIRE(lin.size() == 3);
  CHECK(lin[1] == doctest::Approx(1e-4).epsilon(1e-12));
  CHECK_THROWS(parse_t_grid("1e-2:3e-5"));
  CHECK_THROWS(parse_t_grid("abc"));
}

TEST_CASE("mt-exact prints the exact law") {
  const auto r = call({"mt-exact", "--alpha", "1", "--ell", "constant:1", "--t", "0.367879", "--x", "2"});
  CHECK(r.code == 0);
  CHECK(std::stod(r.out) == doctest::Approx(0.367879).epsilon(1e-6));
  const auto grid = call({"mt-exact", "--t", "0.1", "--x", "1,2"});
  CHECK(grid.code == 0);
  CHECK(grid.out.rfind("t,x,F\n", 0) == 0);
}

TEST_CASE("ssv-check verdicts") {
  const auto bad = call({"ssv-check", "--ell", "loglog", "--t-grid", "1e-4:1e-16"});
  CHECK(bad.code == 0);
  CHECK(bad.out.find("NOT super-slowly varying") != std::string::npos);
  const auto good = call({"ssv-check", "--ell", "logpower:1"});
  CHECK(good.code == 0);
  CHECK(good.out.find("NOT") == std::string::npos);
  CHECK(good.out.find("super-slowly varying") != std::string::npos);
}

TEST_CASE("configuration errors exit with 2") {
  CHECK(call({"simulate", "--config", "missing.cfg"}).code == 2);
  CHECK(call({"simulate", "--no-such-flag"}).code == 2);
  CHECK(call({"frobnicate"}).code == 2);
  CHECK(call({}).code == 2);
  CHECK(call({"mt-exact", "--alpha", "2.5"}).code == 2);
  CHECK(call({"simulate", "--replicates", "10", "--seed", "1"}).code == 2);
  CHECK(call({"simulate", "--ell", "loglog", "--alpha", "0.5", "--seed", "1", "--out-dir",
              scratch("loglog").string()})
            .code == 2);
  CHECK(call({"mt-exact", "--ell", "loglog", "--alpha", "0.5", "--t", "0.5", "--x", "1"}).code == 2);
}

TEST_CASE("config file sections and overrides") {
  const auto dir = scratch("cfg");
  fs::create_directories(dir);
  const auto ini = dir / "run.ini";
  std::ofstream(ini) << "[simulate]\nalpha=1.5\nreplicates=200\nseed=5\nt-grid=1e-1,1e-2\n";
  const auto out = dir / "out";
  const auto r = call({"simulate", "--config", ini.string(), "--out-dir", out.string(), "--replicates", "150"});
  CHECK(r.code == 0);
  const auto manifest = slurp(out / "manifest.ini");
  CHECK(manifest.find("alpha=1.5") != std::string::npos);
  CHECK(manifest.find("replicates=150") != std::string::npos);
  CHECK(manifest.find("seed=5") != std::string::npos);
  CHECK(manifest.find("; config " + ini.string()) != std::string::npos);

  std::ofstream(dir / "bad.ini") << "[simulate]\nalphaa=1.5\n";
  CHECK(call({"--config", (dir / "bad.ini").string(), "simulate"}).code == 2);
}

TEST_CASE("omitted seed is drawn and recorded") {
  const auto out = scratch("seed");
  const auto r = call({"simulate", "--replicates", "100", "--t-grid", "0.1", "--out-dir", out.string()});
  CHECK(r.code == 0);
  const auto manifest = slurp(out / "manifest.ini");
  CHECK(manifest.find("\nseed=") != std::string::npos);
}

TEST_CASE("re-running a manifest reproduces the outputs for any thread count") {
  const auto a = scratch("rerun_a");
  const auto b = scratch("rerun_b");
  REQUIRE(call({"yz", "--alpha", "1.5", "--replicates", "200", "--seed", "3", "--t-grid", "1e-1,1e-2", "--threads",
                "1", "--dump-paths", "2", "--dump-jumps", "1", "--out-dir", a.string()})
              .code == 0);
  REQUIRE(call({"--config", (a / "manifest.ini").string(), "yz", "--threads", "3", "--out-dir", b.string()}).code ==
          0);
  for (const char* f : {"stats.csv", "summary.json", "paths_0.csv", "paths_1.csv", "jumps_0.csv"}) {
    CAPTURE(f);
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK_FALSE(slurp(a / f).empty());
  }
  CHECK(slurp(a / "paths_0.csv").rfind("t,Y,Z,M\n", 0) == 0);
}

TEST_CASE("validate-ineq writes both tables") {
  const auto out = scratch("ineq");
  const auto r = call({"validate-ineq", "--alpha", "1.5", "--replicates", "500", "--seed", "2", "--a-grid", "0.1",
                       "--b-grid", "0.2", "--out-dir", out.string()});
  CHECK(r.code == 0);
  CHECK(slurp(out / "ineq.csv").rfind("a,b,t,p,sign,inequality,estimate", 0) == 0);
  CHECK(slurp(out / "negpart.csv").rfind("t,x,estimate,std_error,bound\n", 0) == 0);
}
