#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "ccnls/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "ccnls");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = ccnls::cli::cli_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("ccnls-test-" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> m;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) m[fs::relative(e.path(), root).string()] = slurp(e.path());
  return m;
}

fs::path only_run_dir(const fs::path& root) {
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(root)) dirs.push_back(e.path());
  REQUIRE(dirs.size() == 1);
  return dirs[0];
}

const std::vector<std::string> kSmallDichotomy = {"dichotomy", "--set", "kmin=-2", "--set", "kmax=2", "--set", "fuzz=50"};

}  // namespace

TEST_CASE("classify prints the regime") {
  fs::path root = scratch("classify");
  Run r = invoke({"classify", "--set", "alpha=2", "--out", root.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("classify: regime Iteration") != std::string::npos);
  json m = json::parse(slurp(only_run_dir(root) / "manifest.json"));
  CHECK(m["subcommand"] == "classify");
  CHECK(m["params"]["alpha"] == 2);
  CHECK(m["version"] == ccnls::cli::kVersion);
  CHECK(m["hash"].get<std::string>().size() == 64);
}

TEST_CASE("simulate writes a trajectory") {
  fs::path root = scratch("simulate");
  Run r = invoke({"simulate", "--set", "grid.M=64", "--set", "grid.L=\"2pi\"", "--set", "solver.T=0", "--out",
                 root.string(), "--assert"});
  CHECK(r.code == 0);
  fs::path dir = only_run_dir(root);
  for (const char* f : {"manifest.json", "summary.json", "trajectory.bin", "trajectory.bin.json", "trajectory.csv"})
    CHECK(fs::exists(dir / f));
  json s = json::parse(slurp(dir / "summary.json"));
  CHECK(s["acceptance_band"]["ok"] == true);
}

TEST_CASE("counterexample-a1 passes its band") {
  fs::path root = scratch("a1");
  Run r = invoke({"counterexample-a1", "--assert", "--out", root.string()});
  CHECK(r.code == 0);
  CHECK(slurp(only_run_dir(root) / "a1.csv").rfind("scale,member,ratio\n", 0) == 0);
}

TEST_CASE("usage errors exit with 2") {
  fs::path root = scratch("errors");
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({"classify", "--bogus"}).code == 2);
  Run r = invoke({"classify", "--set", "nonsense=1", "--out", root.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("unknown key") != std::string::npos);
  CHECK(invoke({"simulate", "--set", "solver.dt=-1", "--dry-run"}).code == 2);
  CHECK(invoke({"classify", "--config", (root / "missing.json").string(), "--dry-run"}).code == 2);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("config file and overrides") {
  fs::path root = scratch("config");
  fs::create_directories(root);
  std::ofstream(root / "c.json") << R"({"alpha": 3, "beta": 1})";
  Run r = invoke({"classify", "--config", (root / "c.json").string(), "--set", "beta=2", "--out", (root / "o").string()});
  CHECK(r.code == 0);
  json m = json::parse(slurp(only_run_dir(root / "o") / "manifest.json"));
  CHECK(m["params"]["alpha"] == 3);
  CHECK(m["params"]["beta"] == 2);
}

TEST_CASE("dry run writes nothing") {
  fs::path root = scratch("dry");
  Run r = invoke({"converge", "--dry-run", "--out", root.string()});
  CHECK(r.code == 0);
  CHECK_FALSE(fs::exists(root));
}

TEST_CASE("band violations exit with 4 under --assert") {
  fs::path root = scratch("band");
  std::vector<std::string> a = {"simulate", "--set", "grid.M=64", "--set", "grid.L=\"2pi\"", "--set", "K=16",
                                "--set", "data.amplitude=1", "--set", "solver.dt=0.125", "--set", "solver.T=1",
                                "--set", "solver.cadence=1", "--out", root.string()};
  CHECK(invoke(a).code == 0);
  a.push_back("--assert");
  Run r = invoke(a);
  CHECK(r.code == 4);
  CHECK(r.err.find("acceptance band") != std::string::npos);
}

TEST_CASE("outputs are byte-identical across runs and keyed by parameters") {
  fs::path r1 = scratch("idem1"), r2 = scratch("idem2");
  auto a = kSmallDichotomy, b = kSmallDichotomy;
  a.insert(a.end(), {"--out", r1.string()});
  b.insert(b.end(), {"--out", r2.string(), "--jobs", "2"});
  REQUIRE(invoke(a).code == 0);
  REQUIRE(invoke(b).code == 0);
  CHECK(tree(r1) == tree(r2));
  CHECK(slurp(only_run_dir(r1) / "dichotomy.csv").rfind("xi2,xi3,deviation,threshold,in_A,in_B,certified,margin\n", 0) == 0);

  // a second parameter set lands in a separate directory
  auto c = kSmallDichotomy;
  c.insert(c.end(), {"--set", "fuzz=51", "--out", r1.string()});
  REQUIRE(invoke(c).code == 0);
  int n = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(r1)) ++n;
  CHECK(n == 2);
}

TEST_CASE("CCNLS_SEED overrides the seed") {
  fs::path root = scratch("seed");
  ::setenv("CCNLS_SEED", "12345", 1);
  Run r = invoke({"classify", "--out", root.string()});
  ::unsetenv("CCNLS_SEED");
  REQUIRE(r.code == 0);
  json m = json::parse(slurp(only_run_dir(root) / "manifest.json"));
  CHECK(m["seed"] == 12345);
  ::setenv("CCNLS_SEED", "abc", 1);
  CHECK(invoke({"classify", "--dry-run"}).code == 2);
  ::unsetenv("CCNLS_SEED");
}

TEST_CASE("parameter resolution") {
  using ccnls::cli::resolve_params;
  json d = {{"a", 1}, {"g", {{"x", 1}, {"y", 2}}}};
  json r = resolve_params(d, {{"g", {{"y", 5}}}});
  CHECK(r["g"]["x"] == 1);
  CHECK(r["g"]["y"] == 5);
  CHECK_THROWS(resolve_params(d, {{"g", {{"z", 5}}}}));
  json cfg = json::object();
  ccnls::cli::apply_override(cfg, "g.y=[1,2]");
  ccnls::cli::apply_override(cfg, "name=abc");
  CHECK(cfg["g"]["y"] == json::array({1, 2}));
  CHECK(cfg["name"] == "abc");
  CHECK(ccnls::cli::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
