#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "egb/app.hpp"

using namespace egb;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("egb_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RunConfig small_convergence(const fs::path& out) {
  RunConfig c;
  c.command = "convergence";
  c.n = {2, 4};
  c.nu = 1e-2;
  c.out = out.string();
  return c;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, sep)) out.push_back(tok);
  return out;
}

}  // namespace

TEST_SUITE("app") {
  TEST_CASE("config validation") {
    RunConfig c;
    CHECK_NOTHROW(validate(c));
    c.n = {4, 8, 12};
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = RunConfig{};
    c.command = "plot";
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = RunConfig{};
    c.dim = 1;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = RunConfig{};
    c.method = "XX";
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = RunConfig{};
    c.nu = 0.0;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = RunConfig{};
    c.penalty.rho1 = -1.0;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = RunConfig{};
    c.command = "profile";
    c.nus = {1.0, -1.0};
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = RunConfig{};
    c.command = "permeability";
    c.ball = Ball{Vec::Zero(), 0.0};
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
  }

  TEST_CASE("method selection and default meshes") {
    RunConfig c;
    CHECK(methods(c).size() == 2);
    c.method = "PR";
    CHECK(methods(c) == std::vector<Method>{Method::PR});
    c.command = "profile";
    CHECK(mesh_for(c) == 32);
    c.dim = 3;
    CHECK(mesh_for(c) == 16);
    c.command = "permeability";
    c.dim = 2;
    CHECK(mesh_for(c) == 64);
    c.mesh_n = 8;
    CHECK(mesh_for(c) == 8);
  }

  TEST_CASE("config hash is deterministic and sensitive") {
    RunConfig a, b;
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    b.nu = 2e-6;
    CHECK(config_hash(a) != config_hash(b));
    b = a;
    b.penalty.rho2 = 4.0;
    CHECK(config_hash(a) != config_hash(b));
    b = a;
    b.out = "/somewhere/else";
    b.threads = 7;
    CHECK(config_hash(a) == config_hash(b));
    CHECK(canonical_config(a).find("nu=9.9999999999999995e-07") != std::string::npos);
  }

  TEST_CASE("thread count from the environment") {
    ::setenv("EGB_THREADS", "3", 1);
    CHECK(threads_from_env() == 3);
    ::setenv("EGB_THREADS", "1000", 1);
    CHECK(threads_from_env() == 64);
    ::setenv("EGB_THREADS", "abc", 1);
    CHECK(threads_from_env() == 1);
    ::unsetenv("EGB_THREADS");
    CHECK(threads_from_env() == 1);
  }

  TEST_CASE("convergence run writes a complete CSV and manifest, identically on rerun") {
    const fs::path dir = fresh_dir("conv");
    RunConfig c = small_convergence(dir);
    std::ostringstream log;
    CHECK(run(c, log) == 0);
    const std::string csv = slurp(dir / "convergence.csv");
    const std::string manifest = slurp(dir / "manifest.json");

    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line.find("config_hash=" + config_hash(c)) != std::string::npos);
    std::getline(in, line);
    const auto header = split(line, ',');
    CHECK(header.size() == 19);
    CHECK(header[4] == "energy");
    CHECK(header.back() == "status");
    int rows = 0;
    while (std::getline(in, line)) {
      const auto cells = split(line, ',');
      CHECK(cells.size() == header.size());
      CHECK(cells.back() == "ok");
      CHECK((cells[5] == "-") == (cells[1] == "2"));
      ++rows;
    }
    CHECK(rows == 4);

    const auto j = nlohmann::json::parse(manifest);
    CHECK(j["command"] == "convergence");
    CHECK(j["config_hash"] == config_hash(c));
    CHECK(j["version"] == version());
    CHECK(j["boundary"] == "strong");
    CHECK(j["rho1"] == 3.0);
    CHECK(j["extra"]["outputs"][0] == "convergence.csv");

    c.threads = 2;
    std::ostringstream log2;
    CHECK(run(c, log2) == 0);
    CHECK(slurp(dir / "convergence.csv") == csv);
    CHECK(slurp(dir / "manifest.json") == manifest);
  }

  TEST_CASE("profile reference columns are the closed-form values") {
    RunConfig c;
    c.command = "profile";
    c.mesh_n = 4;
    c.nus = {1.0, 1e-4};
    const auto rows = run_profile(c);
    REQUIRE(rows.size() == 2);
    std::ostringstream csv;
    write_profile_csv(csv, c, rows);
    std::istringstream in(csv.str());
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    for (const ProfileRow& r : rows) {
      REQUIRE(std::getline(in, line));
      const auto cells = split(line, ',');
      REQUIRE(cells.size() == 13);
      CHECK(std::stod(cells[9]) == error_profile_reference(r.nu, 2, ProfileQuantity::velocity, Method::ST));
      CHECK(std::stod(cells[10]) == error_profile_reference(r.nu, 2, ProfileQuantity::velocity, Method::PR));
      CHECK(std::stod(cells[11]) == error_profile_reference(r.nu, 2, ProfileQuantity::pressure, Method::ST));
      CHECK(std::stod(cells[12]) == error_profile_reference(r.nu, 2, ProfileQuantity::pressure, Method::PR));
      CHECK(r.st->report);
      CHECK(r.pr->report);
    }
  }

  TEST_CASE("single run writes VTK for both methods and they differ") {
    const fs::path dir = fresh_dir("single");
    RunConfig c;
    c.command = "single";
    c.mesh_n = 4;
    c.out = dir.string();
    std::ostringstream log;
    CHECK(run(c, log) == 0);
    CHECK(fs::exists(dir / "single_ST.vtk"));
    CHECK(fs::exists(dir / "single_PR.vtk"));
    CHECK(fs::exists(dir / "manifest.json"));
    const auto j = nlohmann::json::parse(slurp(dir / "single_report.json"));
    REQUIRE(j.size() == 2);
    CHECK(slurp(dir / "single_ST.vtk") != slurp(dir / "single_PR.vtk"));
    CHECK(slurp(dir / "single_ST.vtk").rfind("# vtk DataFile Version", 0) == 0);
  }

  TEST_CASE("permeability run summary") {
    const fs::path dir = fresh_dir("perm");
    RunConfig c;
    c.command = "permeability";
    c.mesh_n = 8;
    c.out = dir.string();
    const auto s = run_permeability(c);
    REQUIRE(s.size() == 2);
    for (const auto& r : s) {
      CHECK(r.failure.empty());
      CHECK(r.n == 8);
      CHECK(r.mean_high > 0.0);
    }
    CHECK(fs::exists(dir / "permeability_ST.vtk"));
    CHECK(fs::exists(dir / "permeability_summary.json"));
  }

  TEST_CASE("uniform flow through a homogeneous medium") {
    // K = mu = 1 gives sigma = 1; f = sigma g makes u = g = (1, 0), p = 0 exact.
    const Mesh m = Mesh::build_structured(2, 8);
    const Discretization disc(m);
    BrinkmanProblem p;
    p.method = Method::ST;
    p.coeff = CoefficientField::uniform(m, 1.0, 1.0);
    p.f = [](const Vec&) { return Vec(1, 0, 0); };
    p.g = p.f;
    const DiscreteSolution st = solve_brinkman(disc, p);
    for (std::size_t t = 0; t < m.n_cells(); ++t)
      CHECK((disc.eg().value(st.u, t, m.cell(t).barycenter) - Vec(1, 0, 0)).norm() < 1e-9);
    CHECK(st.p.norm() < 1e-9);
    CHECK(boundary_oscillation(disc.eg(), st.u, p.g) < 1e-9);
  }

  TEST_CASE("command line: config file values are overridden by flags") {
    const fs::path dir = fresh_dir("cli");
    {
      std::ofstream cfg(dir / "run.ini");
      cfg << "dim = 2\nnu = 0.5\nn = 2,4\nmethod = PR\n";
    }
    const std::string cmd = std::string(EGB_CLI_PATH) + " convergence --config " + (dir / "run.ini").string() +
                            " --nu 0.25 --out " + dir.string() + " > " + (dir / "log.txt").string() + " 2>&1";
    REQUIRE(std::system(cmd.c_str()) == 0);
    const auto j = nlohmann::json::parse(slurp(dir / "manifest.json"));
    const std::string canon = j["config"];
    CHECK(canon.find("nu=0.25\n") != std::string::npos);
    CHECK(canon.find("n=2,4\n") != std::string::npos);
    CHECK(canon.find("method=PR\n") != std::string::npos);

    const std::string bad = std::string(EGB_CLI_PATH) + " convergence --n 4,6 > /dev/null 2>&1";
    CHECK(std::system(bad.c_str()) != 0);
    const std::string ver = std::string(EGB_CLI_PATH) + " --version > " + (dir / "v.txt").string();
    CHECK(std::system(ver.c_str()) == 0);
    CHECK(slurp(dir / "v.txt").find(version()) != std::string::npos);
  }
}
