#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "helpers.hpp"
#include "plgraph/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

RunResult run(std::vector<std::string> args) {
  std::vector<const char*> argv;
  argv.push_back("plgraph");
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  std::streambuf* old_out = std::cout.rdbuf(out.rdbuf());
  std::streambuf* old_err = std::cerr.rdbuf(err.rdbuf());
  RunResult r;
  r.code = plgraph::run_cli(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Fixture documents shared by every test case; created once per process.
const fs::path& fixture_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "plgraph-cli-fixtures";
    fs::create_directories(d);
    th::write_text((d / "path3.json").string(), R"({
      "vertices": ["a", "b", "c"],
      "edges": [["a", "b", 1.0], ["b", "c", 1.0]],
      "interior": ["b"]
    })");
    th::write_text((d / "path4.json").string(), R"({
      "vertices": ["a", "b", "c", "d"],
      "edges": [["a", "b", 1.0], ["b", "c", 1.0], ["c", "d", 1.0]],
      "interior": ["b", "c"]
    })");
    th::write_text((d / "k1_path3.json").string(), R"({"K": {"b": 1.0}})");
    th::write_text((d / "k1.json").string(), R"({"K": {"b": 1.0, "c": 1.0}})");
    th::write_text((d / "k2.json").string(), R"({"K": {"b": 2.0, "c": 2.0}})");
    th::write_text((d / "kpm.json").string(), R"({"K": {"b": 1.0, "c": -1.0}})");
    th::write_text((d / "broken.json").string(), "{\"vertices\": [");
    return d;
  }();
  return dir;
}

std::string fx(const char* name) { return (fixture_dir() / name).string(); }

fs::path fresh_out_dir(const char* tag) {
  fs::path d = fixture_dir() / tag;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("eigen subcommand writes a full report and exits 0") {
  const fs::path out = fresh_out_dir("eigen0") / "rep.json";
  const RunResult r = run({"eigen", "--graph", fx("path3.json"), "--weight", fx("k1_path3.json"),
                           "--output", out.string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  const json rep = json::parse(slurp(out));
  CHECK(rep.at("command") == "eigen");
  CHECK(rep.at("tool").contains("name"));
  CHECK(rep.at("tool").contains("version"));
  CHECK(rep.at("config").at("p") == 2.0);
  CHECK(rep.at("config").at("seed") == 0);
  CHECK(rep.at("inputs").at("graph").contains("fnv1a64"));
  CHECK(rep.at("inputs").at("weight").contains("fnv1a64"));
  const json& res = rep.at("result");
  CHECK(res.at("converged") == true);
  CHECK(res.at("lambda1").get<double>() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(res.at("eigenfunction").at("b").get<double>() ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-10));
  CHECK(res.at("psi").get<double>() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(!res.contains("oracle"));  // grid defaults to off
}

TEST_CASE("eigen oracle cross-check appears when a grid is requested") {
  const fs::path out = fresh_out_dir("eigen-grid") / "rep.json";
  const RunResult r = run({"eigen", "--graph", fx("path3.json"), "--weight", fx("k1_path3.json"),
                           "--grid", "400", "--output", out.string()});
  CHECK(r.code == 0);
  const json rep = json::parse(slurp(out));
  CHECK(rep.at("result").contains("oracle"));
  CHECK(rep.at("result").at("oracle").get<double>() == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("reports are deterministic byte for byte") {
  const fs::path dir = fresh_out_dir("det");
  const fs::path out = dir / "rep.json";
  const std::vector<std::string> args = {"eigen",    "--graph",  fx("path4.json"),
                                         "--weight", fx("kpm.json"), "--p",
                                         "3",        "--output", out.string()};
  REQUIRE(run(args).code == 0);
  const std::string first = slurp(out);
  REQUIRE(run(args).code == 0);
  CHECK(first == slurp(out));
  CHECK(!first.empty());
}

TEST_CASE("csv projection flattens the report") {
  const fs::path out = fresh_out_dir("csv") / "rep.csv";
  const RunResult r = run({"eigen", "--graph", fx("path3.json"), "--weight", fx("k1_path3.json"),
                           "--format", "csv", "--output", out.string()});
  CHECK(r.code == 0);
  const std::string csv = slurp(out);
  CHECK(csv.rfind("key,value\n", 0) == 0);
  CHECK(csv.find("\nresult.lambda1,") != std::string::npos);
  CHECK(csv.find("\ncommand,") != std::string::npos);
}

TEST_CASE("bare output filenames land in PLGRAPH_OUT_DIR") {
  const fs::path dir = fresh_out_dir("envdir");
  REQUIRE(setenv("PLGRAPH_OUT_DIR", dir.string().c_str(), 1) == 0);
  const RunResult r = run({"eigen", "--graph", fx("path3.json"), "--weight", fx("k1_path3.json"),
                           "--output", "bare.json"});
  REQUIRE(unsetenv("PLGRAPH_OUT_DIR") == 0);
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "bare.json"));
  const json rep = json::parse(slurp(dir / "bare.json"));
  // The report echoes the name as given, not the resolved path.
  CHECK(rep.at("config").at("output") == "bare.json");
}

TEST_CASE("no temporary files survive an atomic write") {
  const fs::path dir = fresh_out_dir("tmpscan");
  const fs::path out = dir / "rep.json";
  REQUIRE(run({"eigen", "--graph", fx("path3.json"), "--weight", fx("k1_path3.json"), "--output",
               out.string()})
              .code == 0);
  int entries = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    ++entries;
    CHECK(e.path().extension() != ".tmp");
  }
  CHECK(entries == 1);
}

TEST_CASE("input errors exit 1") {
  CHECK(run({"eigen", "--graph", fx("no-such-file.json"), "--weight", fx("k1_path3.json")}).code ==
        1);
  CHECK(run({"eigen", "--graph", fx("broken.json"), "--weight", fx("k1_path3.json")}).code == 1);
  CHECK(run({"eigen", "--graph", fx("path3.json"), "--weight", fx("k1_path3.json"), "--p", "0.5"})
            .code == 1);
  // The semilinear route needs p > 2.
  CHECK(run({"solve", "--graph", fx("path3.json"), "--weight", fx("k1_path3.json"), "--p", "2",
             "--q", "4", "--lambda-frac", "0.5"})
            .code == 1);
  // Spectral parameter must be inside (0, lambda1).
  CHECK(run({"solve", "--graph", fx("path3.json"), "--weight", fx("k1_path3.json"), "--q", "5",
             "--lambda-frac", "1.5"})
            .code == 1);
  // --lambda and --lambda-frac are mutually exclusive, and one is required.
  CHECK(run({"solve", "--graph", fx("path3.json"), "--weight", fx("k1_path3.json"), "--q", "5",
             "--lambda", "0.1", "--lambda-frac", "0.5"})
            .code == 1);
  CHECK(run({"solve", "--graph", fx("path3.json"), "--weight", fx("k1_path3.json"), "--q", "5"})
            .code == 1);
  CHECK(run({"solve", "--graph", fx("path3.json"), "--weight", fx("k1_path3.json"), "--q", "5",
             "--lambda-frac", "0.5", "--family", "exp"})
            .code == 1);
  // Equal weights violate the strict-increase hypothesis.
  CHECK(run({"verify", "monotonicity-weight", "--graph", fx("path4.json"), "--k1", fx("k1.json"),
             "--k2", fx("k1.json")})
            .code == 1);
  CHECK(run({"bogus"}).code == 1);
  CHECK(run({}).code == 1);
}

TEST_CASE("iteration starvation exits 2 but still writes the report") {
  const fs::path out = fresh_out_dir("starve") / "rep.json";
  const RunResult r =
      run({"eigen", "--graph", fx("path4.json"), "--weight", fx("kpm.json"), "--p", "3",
           "--max-iter", "1", "--restarts", "1", "--output", out.string()});
  CHECK(r.code == 2);
  const json rep = json::parse(slurp(out));
  CHECK(rep.at("result").at("converged") == false);
}

TEST_CASE("violated verification bounds exit 4") {
  const fs::path out = fresh_out_dir("tmfail") / "rep.json";
  // An absurdly small embedding constant makes the stated bound impossible.
  const RunResult r = run({"verify", "tm", "--graph", fx("path3.json"), "--p", "4", "--alpha", "2",
                           "--c0", "0.01", "--samples", "50", "--output", out.string()});
  CHECK(r.code == 4);
  const json rep = json::parse(slurp(out));
  bool any_fail = false;
  for (const auto& row : rep.at("checks")) {
    if (!row.at("pass").get<bool>()) any_fail = true;
  }
  CHECK(any_fail);
}

TEST_CASE("verification suites pass on sound inputs") {
  const fs::path dir = fresh_out_dir("verify-ok");
  CHECK(run({"verify", "green", "--graph", fx("path4.json"), "--trials", "50", "--output",
             (dir / "green.json").string()})
            .code == 0);
  CHECK(run({"verify", "embedding", "--graph", fx("path3.json"), "--samples", "100", "--output",
             (dir / "emb.json").string()})
            .code == 0);
  CHECK(run({"verify", "tm", "--graph", fx("path3.json"), "--p", "4", "--alpha", "2", "--samples",
             "100", "--output", (dir / "tm.json").string()})
            .code == 0);
  CHECK(run({"verify", "monotonicity-weight", "--graph", fx("path4.json"), "--k1", fx("k1.json"),
             "--k2", fx("k2.json"), "--output", (dir / "mw.json").string()})
            .code == 0);
  CHECK(run({"verify", "monotonicity-domain", "--graph", fx("path4.json"), "--weight",
             fx("k1.json"), "--inner", "b", "--output", (dir / "md.json").string()})
            .code == 0);

  const json mw = json::parse(slurp(dir / "mw.json"));
  CHECK(mw.at("result").at("lambda1_first").get<double>() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(mw.at("result").at("lambda1_second").get<double>() ==
        doctest::Approx(0.25).epsilon(1e-9));
  const json md = json::parse(slurp(dir / "md.json"));
  CHECK(md.at("result").at("lambda1_inner").get<double>() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(md.at("result").at("lambda1_outer").get<double>() == doctest::Approx(0.5).epsilon(1e-9));

  const fs::path csv = dir / "green.csv";
  CHECK(run({"verify", "green", "--graph", fx("path4.json"), "--trials", "20", "--format", "csv",
             "--output", csv.string()})
            .code == 0);
  CHECK(slurp(csv).rfind("check,relation,observed,expected,pass\n", 0) == 0);
}

TEST_CASE("solve subcommand reproduces the closed-form critical point") {
  const fs::path dir = fresh_out_dir("solve");
  const fs::path out = dir / "rep.json";
  const std::vector<std::string> args = {"solve",         "--graph", fx("path3.json"),
                                         "--weight",      fx("k1_path3.json"), "--q",
                                         "5",             "--lambda-frac", "0.5",
                                         "--output",      out.string()};
  const RunResult r = run(args);
  CHECK(r.code == 0);
  const json rep = json::parse(slurp(out));
  CHECK(rep.at("command") == "solve");
  CHECK(rep.at("config").at("p") == 3.0);
  CHECK(rep.at("config").at("lambda").get<double>() ==
        doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-10));
  const json& res = rep.at("result");
  CHECK(res.at("converged") == true);
  CHECK(res.at("u").at("b").get<double>() ==
        doctest::Approx(std::pow(2.0, -0.75)).epsilon(1e-6));
  CHECK(res.at("c").get<double>() ==
        doctest::Approx(std::pow(2.0, -0.75) / 30.0).epsilon(1e-6));
  CHECK(res.at("lambda1").get<double>() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
  CHECK(res.at("geometry").at("r").get<double>() > 0.0);
  CHECK(res.at("geometry").at("inf_ring").get<double>() > 0.0);
  CHECK(res.at("compactness").at("bounded") == true);
  CHECK(res.at("compactness").at("divergence_flag") == false);
  CHECK(res.at("negative_part_max").get<double>() <= 1e-10);

  REQUIRE(run(args).code == 0);
  // Reports keep insertion order and round-trip through the same dumper.
  CHECK(slurp(out) == nlohmann::ordered_json::parse(slurp(out)).dump(2) + "\n");
  const std::string again = slurp(out);
  REQUIRE(run(args).code == 0);
  CHECK(slurp(out) == again);
}

TEST_CASE("version flag exits 0") {
  const RunResult r = run({"--version"});
  CHECK(r.code == 0);
  CHECK(r.out.find("plgraph") != std::string::npos);
}
