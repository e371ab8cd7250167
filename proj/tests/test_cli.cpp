#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "zollforge/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string err;
};

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("zollforge_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Run run(const std::string& args, const fs::path& dir) {
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = "ZOLLFORGE_THREADS=1 " + std::string(ZF_CLI_PATH) + " " + args + " > " +
                          (dir / "stdout.txt").string() + " 2> " + err.string();
  const int st = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  r.err = zf::io::read_file(err.string());
  return r;
}

json load(const fs::path& p) { return json::parse(zf::io::read_file(p.string())); }

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.json";
  zf::io::write_file(p.string(), text);
  return p;
}

void check_manifest(const fs::path& out) {
  const json m = load(out / "manifest.json");
  REQUIRE(m.contains("outputs"));
  CHECK_FALSE(m["outputs"].empty());
  for (auto it = m["outputs"].begin(); it != m["outputs"].end(); ++it)
    CHECK(it.value() == zf::io::sha256_file((out / it.key()).string()));
  CHECK(m.contains("versions"));
  CHECK(m.contains("stages"));
}

}  // namespace

TEST_CASE("funk-eigencheck") {
  const fs::path d = scratch("funk");
  const fs::path cfg = write_config(d, "");
  Run r = run("funk-eigencheck --config " + cfg.string() + " --out " + (d / "a").string(), d);
  CHECK(r.code == 0);
  const json rep = load(d / "a" / "funk_eigencheck.json");
  CHECK(rep["passed"] == true);
  CHECK(rep["rows"].size() == 13);
  for (const auto& row : rep["rows"]) {
    if (row["l"].get<int>() % 2)
      CHECK(std::abs(row["computed"].get<double>()) < 1e-10);
    else
      CHECK(row["rel_err"].get<double>() < 1e-8);
  }
  check_manifest(d / "a");

  // byte-identical reports across runs
  r = run("funk-eigencheck --out " + (d / "b").string(), d);
  CHECK(r.code == 0);
  CHECK(zf::io::read_file((d / "a" / "funk_eigencheck.json").string()) ==
        zf::io::read_file((d / "b" / "funk_eigencheck.json").string()));

  // too coarse a direction grid fails the tolerance
  const fs::path coarse = write_config(d, R"({"dir_theta": 4, "dir_phi": 12})");
  r = run("funk-eigencheck --config " + coarse.string() + " --out " + (d / "c").string(), d);
  CHECK(r.code == 2);
}

TEST_CASE("solve") {
  const fs::path d = scratch("solve");
  const fs::path cfg = write_config(d, R"({"l_max": 6})");
  SUBCASE("trivial state") {
    const Run r = run("solve --config " + cfg.string() + " --t 0 --out " + (d / "z").string(), d);
    CHECK(r.code == 0);
    const json s = load(d / "z" / "state_t0.json");
    CHECK(s["t"] == 0.0);
    for (double c : s["psi"]["coeffs"]) CHECK(c == 0.0);
  }
  SUBCASE("zonal cubic with exports") {
    const Run r = run("solve --config " + cfg.string() + " --f Y3_0 --t 0.005,0.01 --format obj --verify --out " +
                          (d / "y").string(),
                      d);
    CHECK(r.code == 0);
    const json sum = load(d / "y" / "summary.json");
    CHECK(sum["passed"] == true);
    CHECK(sum["states"].size() == 2);
    CHECK(sum["order"].get<double>() > 1.8);
    for (const auto& st : sum["states"]) CHECK(st["max_h"].get<double>() < 1e-6);
    CHECK(fs::exists(d / "y" / "embedding_t1.obj"));
    CHECK(load(d / "y" / "report_t0.json")["incidence_ok"] == true);
    check_manifest(d / "y");
  }
  SUBCASE("catalog polynomial with equivariance") {
    const fs::path c8 = write_config(d, R"({"l_max": 8, "tol_h": 1e-4, "tol_area": 1e-4})");
    const Run r = run("solve --config " + c8.string() + " --f catalog:D3 --t 0.01 --check-equivariance --format csv --out " +
                          (d / "c").string(),
                      d);
    CHECK(r.code == 0);
    const json sum = load(d / "c" / "summary.json");
    REQUIRE(sum["states"].size() == 1);
    const json& eq = sum["states"][0]["equivariance"];
    CHECK(eq["elements"].size() == 5);
    CHECK(eq["max_psi"].get<double>() < 1e-7);
    CHECK(fs::exists(d / "c" / "curves_t0.csv"));
    CHECK(fs::exists(d / "c" / "mean_curvature_t0.csv"));
  }
  SUBCASE("non-convergence") {
    const fs::path bad = write_config(d, R"({"l_max": 6, "max_iters": 1, "tol_h": 1e-13, "tol_area": 1e-13})");
    const Run r = run("solve --config " + bad.string() + " --f Y3_0 --t 0.02 --out " + (d / "n").string(), d);
    CHECK(r.code == 3);
    CHECK(r.err.find("t = ") != std::string::npos);
  }
}

TEST_CASE("symmetry") {
  const fs::path d = scratch("sym");
  Run r = run("symmetry --group I --verify --out " + (d / "i").string(), d);
  CHECK(r.code == 0);
  json rep = load(d / "i" / "stabilizer_report.json");
  CHECK(rep["passed"] == true);
  CHECK(rep["reports"][0]["order"] == 60);
  const json cat = load(d / "i" / "catalog.json");
  CHECK(cat[0]["group"] == "I");
  CHECK(cat[0]["poly"][0].size() == 4);
  check_manifest(d / "i");

  r = run("symmetry --group Dn[D2n --n 4 --verify --out " + (d / "d").string(), d);
  CHECK(r.code == 0);
  rep = load(d / "d" / "stabilizer_report.json");
  CHECK(rep["reports"][0]["group"] == "D4[D8");
  CHECK(rep["reports"][0]["order"] == 16);

  r = run("symmetry --group all --verify --out " + (d / "all").string(), d);
  CHECK(r.code == 0);
  CHECK(load(d / "all" / "stabilizer_report.json")["entries"] == 31);
}

TEST_CASE("usage errors") {
  const fs::path d = scratch("usage");
  CHECK(run("symmetry --group Q7 --verify", d).code == 64);
  CHECK(run("symmetry --group Dn --verify", d).code == 64);
  CHECK(run("frobnicate", d).code == 64);
  CHECK(run("", d).code == 64);
  CHECK(run("solve --f Y3 --out " + (d / "x").string(), d).code == 64);
  CHECK(run("solve --f Y2_0 --out " + (d / "x").string(), d).code == 64);
  CHECK(run("solve --scheme newton", d).code == 64);
  CHECK(run("solve --format png", d).code == 64);
  CHECK(run("solve --config " + (d / "missing.json").string(), d).code == 64);
  const fs::path cfg = write_config(d, R"({"l_max": 6, "colour": 1})");
  CHECK(run("funk-eigencheck --config " + cfg.string(), d).code == 64);
  CHECK(run("solve --config " + write_config(d, "{not json").string(), d).code == 64);
}
