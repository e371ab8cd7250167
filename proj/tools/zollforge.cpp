// zollforge: batch runner for the Funk spectrum check, the Zoll family solver
// and the symmetry catalog.
//
// Exit codes: 0 pass, 2 verification or integrity failure, 3 non-convergence,
// 64 usage error.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "zollforge/embedding.hpp"
#include "zollforge/error.hpp"
#include "zollforge/io.hpp"
#include "zollforge/solver.hpp"
#include "zollforge/symmetry.hpp"

namespace fs = std::filesystem;
using namespace zf;
using io::Json;

namespace {

constexpr int kPass = 0, kVerifyFail = 2, kNonConvergence = 3, kUsage = 64;

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Options {
  std::string config_path, f_spec = "Y3_0", out_dir = "zollforge-out", format = "json", scheme, group;
  std::vector<double> t_values;
  double tol_h = 0.0;
  int n = 0;
  bool verify = false, equivariance = false;
};

SolverConfig load_config(const Options& o, io::RunManifest& man) {
  SolverConfig c;
  if (!o.config_path.empty()) {
    std::string text;
    try {
      text = io::read_file(o.config_path);
    } catch (const Error& e) {
      fail(ErrorKind::Config, e.what());
    }
    man.add_input("config", text);
    if (text.find_first_not_of(" \t\r\n") != std::string::npos) c = SolverConfig::from_json(text);
  }
  if (!o.t_values.empty()) c.t_values = o.t_values;
  if (o.tol_h > 0) c.tol_h = o.tol_h;
  if (!o.scheme.empty()) c.scheme = o.scheme;
  c.validate();
  man.set_config(Json::parse(c.to_json()));
  return c;
}

// Y<l>_<m> terms joined by + or -, each with an optional "<scalar>*" prefix
SphereFunction parse_harmonic_spec(const std::string& spec, int L) {
  SphereFunction f(L);
  std::size_t i = 0;
  const std::string s = spec;
  auto skip = [&] {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  };
  auto bad = [&](const std::string& why) { fail(ErrorKind::Config, "bad --f '" + spec + "': " + why); };
  bool first = true;
  skip();
  if (i == s.size()) bad("empty");
  while (i < s.size()) {
    double sign = 1.0;
    if (s[i] == '+' || s[i] == '-') {
      sign = s[i] == '-' ? -1.0 : 1.0;
      ++i;
      skip();
    } else if (!first) {
      bad("expected + or -");
    }
    double scale = 1.0;
    if (i < s.size() && s[i] != 'Y') {
      char* end = nullptr;
      scale = std::strtod(s.c_str() + i, &end);
      if (end == s.c_str() + i) bad("expected a number or Y");
      i = static_cast<std::size_t>(end - s.c_str());
      skip();
      if (i >= s.size() || s[i] != '*') bad("expected *");
      ++i;
      skip();
    }
    int l = 0, m = 0, used = 0;
    if (i >= s.size() || std::sscanf(s.c_str() + i, "Y%d_%d%n", &l, &m, &used) != 2) bad("expected Y<l>_<m>");
    i += used;
    if (l < 0 || std::abs(m) > l) bad("invalid harmonic index");
    if (l > L) fail(ErrorKind::Config, "f has harmonic content above l_max");
    f.coeff(l, m) += sign * scale;
    first = false;
    skip();
  }
  return f;
}

SphereFunction parse_f(const std::string& spec, int n, int L, std::string* group_out, int* n_out) {
  if (spec.rfind("catalog:", 0) == 0) {
    const auto [name, nn] = parse_group_name(spec, n);
    const ExactPolynomial p = invariant_polynomial(name, nn);
    if (p.degree() > L) fail(ErrorKind::Config, "catalog polynomial degree exceeds l_max");
    SphereFunction f = remove_linear(restrict_to_sphere(p, L));
    f *= 1.0 / f.l2_norm();
    if (group_out) *group_out = name;
    if (n_out) *n_out = nn;
    return f;
  }
  SphereFunction f = parse_harmonic_spec(spec, L);
  for (int l = 0; l <= L; l += 2)
    for (int m = -l; m <= l; ++m)
      if (f.coeff(l, m) != 0.0) fail(ErrorKind::Config, "f must be odd");
  return f;
}

void ensure_dir(const std::string& d) {
  std::error_code ec;
  fs::create_directories(d, ec);
  if (ec) fail(ErrorKind::Io, "cannot create output directory " + d);
}

std::string write_output(io::RunManifest& man, const std::string& dir, const std::string& name, const std::string& text) {
  const std::string path = (fs::path(dir) / name).string();
  io::write_file(path, text);
  man.add_output(path);
  return path;
}

int cmd_funk(const Options& o) {
  io::RunManifest man("funk-eigencheck");
  const auto t0 = Clock::now();
  SolverConfig c = load_config(o, man);
  const int L = 12;
  SolverConfig g = c;
  g.l_max = std::max(c.l_max, L);
  const auto grid = g.grid();
  FunkSystem sys(SphereFunction(L), TangentField(grid, 2), L);
  Json rows = Json::array();
  bool ok = true;
  for (int l = 0; l <= L; ++l) {
    const double oracle = 2.0 * M_PI * std::legendre(l, 0.0);
    double computed = 0.0, err = 0.0;
    for (int m = -l; m <= l; ++m) {
      const SphereFunction y = SphereFunction::basis(L, l, m);
      const ProjectiveFunction img = sys.apply(y);
      if (l % 2) {
        computed = std::max(computed, img.max_abs());
        err = computed;
        continue;
      }
      const ProjectiveFunction yd = ProjectiveFunction::from_function(grid, y);
      const double lam = img.dot(yd) / yd.dot(yd);
      if (m == 0) computed = lam;
      err = std::max(err, std::abs(lam - oracle) / std::abs(oracle));
    }
    const bool pass = l % 2 ? err < 1e-10 : err < 1e-8;
    ok = ok && pass;
    rows.push_back({{"l", l}, {"computed", computed}, {"oracle", oracle}, {"rel_err", err}, {"pass", pass}});
  }
  man.stage("spectrum", since(t0));
  Json rep{{"l_max", L}, {"rows", rows}, {"passed", ok}};
  ensure_dir(o.out_dir);
  write_output(man, o.out_dir, "funk_eigencheck.json", io::canonical_dump(rep));
  man.write(o.out_dir);
  std::cout << io::canonical_dump(rep);
  return ok ? kPass : kVerifyFail;
}

// group elements to test for equivariance of the solution
std::vector<GroupElement> symmetry_candidates(const SphereFunction& f, const std::string& group, int n) {
  std::vector<GroupElement> out;
  if (!group.empty()) {
    for (const auto& e : build_group(group, n).elements)
      if (!e.m.isIdentity(1e-12)) out.push_back(e);
    return out;
  }
  std::vector<Mat3> cand;
  for (int k = 1; k < 24; ++k) cand.push_back(OrthogonalTransform::rotation(Vec3::UnitZ(), 2 * M_PI * k / 24).matrix());
  cand.push_back(Vec3(1, -1, 1).asDiagonal());
  cand.push_back(Vec3(1, -1, -1).asDiagonal());
  for (const Mat3& A : cand) {
    const SphereFunction g = rotate(f, OrthogonalTransform(A));
    double d = 0.0;
    for (std::size_t k = 0; k < g.coeffs().size(); ++k) d = std::max(d, std::abs(g.coeffs()[k] - f.coeffs()[k]));
    if (d < 1e-12) out.push_back(element(A));
  }
  return out;
}

int cmd_solve(const Options& o) {
  io::RunManifest man("solve");
  auto t0 = Clock::now();
  const SolverConfig c = load_config(o, man);
  std::string group;
  int gn = 0;
  const SphereFunction f = parse_f(o.f_spec, o.n, c.l_max, &group, &gn);
  man.add_input("f", o.f_spec);
  if (o.format != "json" && o.format != "obj" && o.format != "csv") fail(ErrorKind::Config, "unknown --format " + o.format);
  ensure_dir(o.out_dir);

  std::string failure;
  const std::vector<SolutionState> states = continuation(f, c, &failure);
  man.stage("solve", since(t0));

  bool all_ok = true;
  Json summary = Json::array();
  for (std::size_t i = 0; i < states.size(); ++i) {
    const SolutionState& s = states[i];
    const std::string tag = "t" + std::to_string(i);
    write_output(man, o.out_dir, "state_" + tag + ".json", to_json(s));
    t0 = Clock::now();
    const ZollReport rep = verify_zoll(s, o.verify ? 2 : 0);
    man.stage("verify_" + tag, since(t0));
    const bool ok = rep.passed(c.tol_h, c.tol_area);
    all_ok = all_ok && ok;
    Json item{{"t", s.t},
              {"iterations", s.iterations},
              {"max_h", rep.max_h_all},
              {"area_spread", rep.area_spread},
              {"incidence_ok", rep.incidence_ok},
              {"passed", ok}};
    write_output(man, o.out_dir, "report_" + tag + ".json", rep.to_json());
    if (o.format == "obj") {
      std::ostringstream os;
      export_embedding_obj(os, s.psi);
      write_output(man, o.out_dir, "embedding_" + tag + ".obj", os.str());
    } else if (o.format == "csv") {
      std::ostringstream os, hs;
      export_curves_csv(os, s);
      write_output(man, o.out_dir, "curves_" + tag + ".csv", os.str());
      const StarShapedSurface surf(s.psi);
      write_grid_csv(hs, surf.grid(), surf.mean_curvature_on_grid());
      write_output(man, o.out_dir, "mean_curvature_" + tag + ".csv", hs.str());
    }
    if (o.equivariance) {
      t0 = Clock::now();
      Json eq = Json::array();
      double worst_psi = 0.0, worst_h = 0.0;
      for (const auto& g : symmetry_candidates(f, group, gn)) {
        const EquivarianceReport r = equivariance_check(s, OrthogonalTransform(Mat3(g.m)));
        worst_psi = std::max(worst_psi, r.psi);
        worst_h = std::max(worst_h, r.hausdorff);
        eq.push_back({{"psi", r.psi}, {"phi", r.phi}, {"hausdorff", r.hausdorff}});
      }
      const bool eq_ok = worst_psi < 1e-7 && worst_h < 1e-6;
      all_ok = all_ok && eq_ok;
      item["equivariance"] = {{"elements", eq}, {"max_psi", worst_psi}, {"max_hausdorff", worst_h}, {"passed", eq_ok}};
      man.stage("equivariance_" + tag, since(t0));
    }
    summary.push_back(item);
  }
  Json out{{"f", o.f_spec}, {"states", summary}, {"passed", all_ok && failure.empty()}};
  if (states.size() >= 2) out["order"] = fit_order(states, f);
  if (!failure.empty()) out["failure"] = failure;
  write_output(man, o.out_dir, "summary.json", io::canonical_dump(out));
  man.write(o.out_dir);
  std::cout << io::canonical_dump(out);
  if (!failure.empty()) {
    std::cerr << "non-convergence: " << failure << "\n";
    return kNonConvergence;
  }
  return all_ok ? kPass : kVerifyFail;
}

int cmd_symmetry(const Options& o) {
  io::RunManifest man("symmetry");
  const auto t0 = Clock::now();
  std::vector<std::pair<std::string, int>> keys;
  if (o.group == "all")
    keys = catalog_keys(o.n > 0 ? o.n : 6);
  else
    keys.push_back(parse_group_name(o.group, o.n));
  man.set_config({{"group", o.group}, {"n", o.n}, {"verify", o.verify}});
  ensure_dir(o.out_dir);
  bool ok = true;
  Json reports = Json::array(), entries = Json::array();
  for (const auto& [name, n] : keys) {
    const CatalogEntry e = catalog_entry(name, n);
    entries.push_back(Json::parse(e.to_json()));
    if (o.verify) {
      const StabilizerReport r = stabilizer_verify(e.poly, e.group, e.witnesses);
      ok = ok && r.passed();
      reports.push_back(Json::parse(r.to_json()));
    }
  }
  man.stage("catalog", since(t0));
  write_output(man, o.out_dir, "catalog.json", io::canonical_dump(entries));
  Json out{{"entries", static_cast<int>(keys.size())}};
  if (o.verify) {
    out["reports"] = reports;
    out["passed"] = ok;
    write_output(man, o.out_dir, "stabilizer_report.json", io::canonical_dump(out));
  }
  man.write(o.out_dir);
  std::cout << io::canonical_dump(o.verify ? out : entries);
  return ok ? kPass : kVerifyFail;
}

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Config:
      return kUsage;
    case ErrorKind::NonConvergence:
    case ErrorKind::StepSize:
    case ErrorKind::Singularity:
    case ErrorKind::Invertibility:
    case ErrorKind::Numerical:
    case ErrorKind::GraphValidity:
    case ErrorKind::Solvability:
      return kNonConvergence;
    default:
      return kVerifyFail;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zoll families of minimal surfaces on star-shaped spheres"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* c) {
    c->add_option("--config", o.config_path, "solver configuration JSON");
    c->add_option("--out", o.out_dir, "output directory");
  };
  auto* funk = app.add_subcommand("funk-eigencheck", "Funk transform eigenvalues against 2 pi P_l(0)");
  add_common(funk);

  auto* solve = app.add_subcommand("solve", "solve for the Zoll family along t");
  add_common(solve);
  solve->add_option("--f", o.f_spec, "Y<l>_<m> sums or catalog:<group>");
  solve->add_option("--t", o.t_values, "t values")->delimiter(',');
  solve->add_option("--tol-h", o.tol_h, "tolerance on max |H|");
  solve->add_option("--scheme", o.scheme, "hamilton or gauss-newton")
      ->check(CLI::IsMember({"hamilton", "gauss-newton"}));
  solve->add_option("--format", o.format, "obj, csv or json")->check(CLI::IsMember({"obj", "csv", "json"}));
  solve->add_option("--n", o.n, "family parameter for catalog:<group>");
  solve->add_flag("--verify", o.verify, "include the incidence check");
  solve->add_flag("--check-equivariance", o.equivariance, "check invariance under the symmetries of f");

  auto* sym = app.add_subcommand("symmetry", "build and verify symmetry catalog entries");
  sym->add_option("--out", o.out_dir, "output directory");
  sym->add_option("--group", o.group, "group name, e.g. I, Dn[D2n, D3 or all")->required();
  sym->add_option("--n", o.n, "family parameter");
  sym->add_flag("--verify", o.verify, "run the stabilizer verification");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*funk) return cmd_funk(o);
    if (*solve) return cmd_solve(o);
    return cmd_symmetry(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kVerifyFail;
  }
}
