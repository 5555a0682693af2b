#include "egb/app.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "egb/quadrature.hpp"
#include "egb/vtk.hpp"

#ifndef EGB_VERSION
#define EGB_VERSION "0.0.0+unknown"
#endif

namespace egb {

namespace {

using nlohmann::json;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string sci(double v) { return fmt("%.6e", v); }

std::string order_cell(const Order& o) { return o.exact ? "exact" : fmt("%.4f", o.value); }

// Runs jobs 0..count-1 on up to `threads` workers; each job writes its own slot.
template <class F>
void parallel_for(std::size_t count, int threads, F&& job) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) job(i);
    });
  for (auto& t : pool) t.join();
}

std::filesystem::path out_path(const RunConfig& c, const std::string& name) {
  std::filesystem::create_directories(c.out);
  return std::filesystem::path(c.out) / name;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
}

json report_json(const RunRow& row) {
  json j;
  j["method"] = to_string(row.method);
  j["n"] = row.n;
  j["nu"] = row.nu;
  if (!row.report) {
    j["failure"] = row.failure;
    return j;
  }
  const ErrorReport& r = *row.report;
  j["h"] = r.h;
  j["rho1"] = r.rho1;
  j["rho2"] = r.rho2;
  j["energy"] = r.energy;
  j["enorm"] = r.enorm_err;
  j["scaled_h1"] = r.scaled_h1;
  j["l2_u"] = r.l2_u;
  j["grad_u"] = r.grad_u;
  j["jump_inv"] = r.jump_inv;
  j["jump_dir"] = r.jump_dir;
  if (r.energy_pi) j["energy_pi"] = *r.energy_pi;
  if (r.energy_R) j["energy_R"] = *r.energy_R;
  j["energy_hjump"] = r.energy_hjump;
  j["p0_p"] = r.p0_p;
  j["total_p"] = r.total_p;
  j["residual"] = row.residual;
  return j;
}

BrinkmanProblem manufactured_problem(const RunConfig& c, const Mesh& mesh, const ManufacturedCase& mc, Method m) {
  BrinkmanProblem pb;
  pb.method = m;
  pb.boundary = c.boundary;
  pb.coeff = CoefficientField::uniform(mesh, mc.nu);
  pb.penalty = c.penalty;
  pb.f = mc.f;
  pb.g = mc.g;
  pb.tolerance = c.tolerance;
  return pb;
}

}  // namespace

const char* version() { return EGB_VERSION; }

void validate(const RunConfig& c) {
  const std::vector<std::string> commands = {"convergence", "profile", "single", "permeability"};
  if (std::find(commands.begin(), commands.end(), c.command) == commands.end())
    throw std::invalid_argument("unknown command '" + c.command + "'");
  if (c.dim != 2 && c.dim != 3) throw std::invalid_argument("dim must be 2 or 3");
  if (c.method != "ST" && c.method != "PR" && c.method != "both")
    throw std::invalid_argument("method must be ST, PR or both");
  if (!(c.nu > 0.0)) throw std::invalid_argument("nu must be positive");
  if (!(c.penalty.rho1 > 0.0) || !(c.penalty.rho2 > 0.0)) throw std::invalid_argument("penalties must be positive");
  if (!(c.tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (c.mesh_n < 0) throw std::invalid_argument("mesh size must be positive");
  if (c.command == "convergence") {
    if (c.n.empty()) throw std::invalid_argument("mesh list is empty");
    for (std::size_t i = 0; i < c.n.size(); ++i) {
      if (c.n[i] < 1) throw std::invalid_argument("mesh sizes must be positive");
      if (i > 0 && c.n[i] != 2 * c.n[i - 1])
        throw std::invalid_argument("mesh list must double at every step");
    }
  }
  if (c.command == "profile") {
    if (c.nus.empty()) throw std::invalid_argument("nu list is empty");
    for (double v : c.nus)
      if (!(v > 0.0)) throw std::invalid_argument("every nu must be positive");
  }
  if (c.command == "permeability") {
    if (!(c.mu > 0.0) || !(c.low_k > 0.0) || !(c.high_k > 0.0))
      throw std::invalid_argument("mu and permeabilities must be positive");
    if (c.ball && !(c.ball->radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
  }
}

std::vector<Method> methods(const RunConfig& c) {
  if (c.method == "ST") return {Method::ST};
  if (c.method == "PR") return {Method::PR};
  return {Method::ST, Method::PR};
}

std::string canonical_config(const RunConfig& c) {
  std::ostringstream s;
  auto num = [](double v) { return fmt("%.17g", v); };
  s << "command=" << c.command << '\n' << "dim=" << c.dim << '\n' << "method=" << c.method << '\n';
  s << "nu=" << num(c.nu) << '\n' << "n=";
  for (std::size_t i = 0; i < c.n.size(); ++i) s << (i ? "," : "") << c.n[i];
  s << '\n' << "mesh_n=" << mesh_for(c) << '\n' << "nus=";
  for (std::size_t i = 0; i < c.nus.size(); ++i) s << (i ? "," : "") << num(c.nus[i]);
  s << '\n' << "mu=" << num(c.mu) << '\n' << "low_k=" << num(c.low_k) << '\n' << "high_k=" << num(c.high_k) << '\n';
  s << "raster=" << c.raster << '\n';
  const Ball b = c.ball.value_or(Ball::literal());
  s << "ball=" << num(b.center[0]) << ',' << num(b.center[1]) << ',' << num(b.center[2]) << ',' << num(b.radius) << '\n';
  s << "rho1=" << num(c.penalty.rho1) << '\n' << "rho2=" << num(c.penalty.rho2) << '\n';
  s << "tolerance=" << num(c.tolerance) << '\n' << "boundary=" << to_string(c.boundary) << '\n';
  s << "with_discrete=" << (c.with_discrete ? 1 : 0) << '\n';
  return s.str();
}

std::string config_hash(const RunConfig& c) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : canonical_config(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int threads_from_env() {
  const char* v = std::getenv("EGB_THREADS");
  if (!v || !*v) return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (end == v || *end != '\0') return 1;
  return static_cast<int>(std::clamp(n, 1L, 64L));
}

int mesh_for(const RunConfig& c) {
  if (c.mesh_n > 0) return c.mesh_n;
  if (c.command == "profile") return c.dim == 2 ? 32 : 16;
  if (c.command == "permeability") return c.dim == 2 ? 64 : 16;
  return 16;
}

RunRow run_case(const RunConfig& c, Method m, int n, double nu) {
  RunRow row;
  row.method = m;
  row.n = n;
  row.nu = nu;
  try {
    const Mesh mesh = Mesh::build_structured(c.dim, n);
    const Discretization disc(mesh);
    const ManufacturedCase mc = manufactured(c.dim, nu);
    const DiscreteSolution sol = solve_brinkman(disc, manufactured_problem(c, mesh, mc, m));
    row.residual = sol.residual;
    row.report = compute_errors(disc, sol.u, sol.p, mc.exact, nu, c.penalty, c.with_discrete);
  } catch (const SolverError& e) {
    row.failure = e.what();
  }
  return row;
}

ConvergenceTable run_convergence(const RunConfig& c) {
  validate(c);
  const std::vector<Method> ms = methods(c);
  ConvergenceTable t;
  t.rows.resize(ms.size() * c.n.size());
  parallel_for(t.rows.size(), c.threads, [&](std::size_t i) {
    t.rows[i] = run_case(c, ms[i / c.n.size()], c.n[i % c.n.size()], c.nu);
  });
  return t;
}

void write_convergence_csv(std::ostream& out, const RunConfig& c, const ConvergenceTable& t) {
  out << "# egb convergence dim=" << c.dim << " config_hash=" << config_hash(c) << " version=" << version() << '\n';
  out << "method,n,h,nu,energy,energy_order,scaled_h1,scaled_h1_order,l2_u,l2_u_order,"
         "p0_p,p0_p_order,total_p,total_p_order,energy_pi,energy_R,energy_hjump,residual,status\n";
  const ErrorColumn cols[] = {ErrorColumn::energy, ErrorColumn::scaled_h1, ErrorColumn::l2_u, ErrorColumn::p0_p,
                              ErrorColumn::total_p};
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const RunRow& r = t.rows[i];
    const RunRow* prev = (i > 0 && t.rows[i - 1].method == r.method) ? &t.rows[i - 1] : nullptr;
    out << to_string(r.method) << ',' << r.n << ',' << sci(1.0 / r.n) << ',' << sci(r.nu);
    if (!r.report) {
      for (int k = 0; k < 13; ++k) out << ",";
      std::string reason = r.failure;
      std::replace(reason.begin(), reason.end(), ',', ';');
      out << "," << "failed: " << reason << '\n';
      continue;
    }
    for (ErrorColumn col : cols) {
      out << ',' << sci(column_value(*r.report, col)) << ',';
      if (prev && prev->report)
        out << order_cell(convergence_orders({column_value(*prev->report, col), column_value(*r.report, col)})[0]);
      else
        out << '-';
    }
    out << ',' << (r.report->energy_pi ? sci(*r.report->energy_pi) : "-");
    out << ',' << (r.report->energy_R ? sci(*r.report->energy_R) : "-");
    out << ',' << sci(r.report->energy_hjump);
    out << ',' << fmt("%.3e", r.residual) << ",ok\n";
  }
}

std::vector<ProfileRow> run_profile(const RunConfig& c) {
  validate(c);
  const int n = mesh_for(c);
  const std::vector<Method> ms = methods(c);
  std::vector<ProfileRow> rows(c.nus.size());
  std::vector<RunRow> runs(c.nus.size() * ms.size());
  parallel_for(runs.size(), c.threads, [&](std::size_t i) {
    runs[i] = run_case(c, ms[i % ms.size()], n, c.nus[i / ms.size()]);
  });
  for (std::size_t k = 0; k < c.nus.size(); ++k) {
    ProfileRow& row = rows[k];
    row.nu = c.nus[k];
    for (std::size_t j = 0; j < ms.size(); ++j)
      (ms[j] == Method::ST ? row.st : row.pr) = runs[k * ms.size() + j];
    row.ref_u_st = error_profile_reference(row.nu, c.dim, ProfileQuantity::velocity, Method::ST);
    row.ref_u_pr = error_profile_reference(row.nu, c.dim, ProfileQuantity::velocity, Method::PR);
    row.ref_p_st = error_profile_reference(row.nu, c.dim, ProfileQuantity::pressure, Method::ST);
    row.ref_p_pr = error_profile_reference(row.nu, c.dim, ProfileQuantity::pressure, Method::PR);
  }
  return rows;
}

void write_profile_csv(std::ostream& out, const RunConfig& c, const std::vector<ProfileRow>& rows) {
  out << "# egb profile dim=" << c.dim << " n=" << mesh_for(c) << " config_hash=" << config_hash(c)
      << " version=" << version() << '\n';
  out << "nu,st_energy,pr_energy,st_scaled_h1,pr_scaled_h1,st_p0_p,pr_p0_p,st_total_p,pr_total_p,"
         "ref_u_st,ref_u_pr,ref_p_st,ref_p_pr\n";
  auto cell = [](const std::optional<RunRow>& r, ErrorColumn col) -> std::string {
    if (!r || !r->report) return "-";
    return sci(column_value(*r->report, col));
  };
  for (const ProfileRow& r : rows) {
    out << sci(r.nu);
    for (ErrorColumn col : {ErrorColumn::energy, ErrorColumn::scaled_h1, ErrorColumn::p0_p, ErrorColumn::total_p})
      out << ',' << cell(r.st, col) << ',' << cell(r.pr, col);
    out << ',' << fmt("%.17g", r.ref_u_st) << ',' << fmt("%.17g", r.ref_u_pr) << ',' << fmt("%.17g", r.ref_p_st)
        << ',' << fmt("%.17g", r.ref_p_pr) << '\n';
  }
}

double boundary_oscillation(const EGSpace& eg, const Eigen::VectorXd& u_h, const VectorField& g) {
  const Mesh& mesh = eg.mesh();
  double worst = 0.0;
  for (std::size_t fi = 0; fi < mesh.n_faces(); ++fi) {
    const Face& f = mesh.face(fi);
    if (!f.is_boundary()) continue;
    const MappedRule q = face_quadrature(mesh, fi, error_degree(mesh.dim()));
    for (std::size_t k = 0; k < q.size(); ++k) {
      const Vec e = eg.value(u_h, f.plus_cell, q.points[k]) - g(q.points[k]);
      worst = std::max(worst, (e - e.dot(f.normal) * f.normal).norm());
    }
  }
  return worst;
}

PermeabilityCase permeability_from_config(const RunConfig& c) {
  PermeabilityConfig pc;
  pc.mu = c.mu;
  pc.low_k = c.low_k;
  pc.high_k = c.high_k;
  if (c.dim == 2) {
    pc.raster = c.raster.empty() ? default_raster(c.low_k, c.high_k) : load_raster(c.raster);
  } else {
    pc.ball = c.ball.value_or(Ball::literal());
  }
  return permeability_case(c.dim, pc);
}

namespace {

struct PermeabilityRun {
  PermeabilitySummary summary;
  Eigen::VectorXd u, p;
};

PermeabilityRun solve_permeability(const RunConfig& c, const Mesh& mesh, const Discretization& disc,
                                   const PermeabilityCase& pc, Method m) {
  PermeabilityRun run;
  run.summary.method = m;
  run.summary.n = mesh.subdivisions();
  BrinkmanProblem pb;
  pb.method = m;
  pb.boundary = c.boundary;
  pb.coeff = pc.coefficients(mesh);
  pb.penalty = c.penalty;
  pb.f = pc.f;
  pb.g = pc.g;
  pb.tolerance = c.tolerance;
  DiscreteSolution sol;
  try {
    sol = solve_brinkman(disc, pb);
  } catch (const SolverError& e) {
    run.summary.failure = e.what();
    return run;
  }
  run.u = sol.u;
  run.p = sol.p;
  run.summary.residual = sol.residual;
  run.summary.oscillation = boundary_oscillation(disc.eg(), sol.u, pc.g);
  const std::vector<bool> low = pc.low_region(mesh);
  double vol_hi = 0.0, vol_lo = 0.0, sum_hi = 0.0, sum_lo = 0.0;
  for (std::size_t t = 0; t < mesh.n_cells(); ++t) {
    const double mag = disc.eg().value(sol.u, t, mesh.cell(t).barycenter).norm();
    const double v = mesh.cell(t).volume;
    if (low[t]) {
      vol_lo += v;
      sum_lo += v * mag;
      run.summary.max_low = std::max(run.summary.max_low, mag);
    } else {
      vol_hi += v;
      sum_hi += v * mag;
      run.summary.max_high = std::max(run.summary.max_high, mag);
    }
  }
  run.summary.mean_high = vol_hi > 0.0 ? sum_hi / vol_hi : 0.0;
  run.summary.mean_low = vol_lo > 0.0 ? sum_lo / vol_lo : 0.0;
  return run;
}

json summary_json(const PermeabilitySummary& s) {
  json j;
  j["method"] = to_string(s.method);
  j["n"] = s.n;
  if (!s.failure.empty()) {
    j["failure"] = s.failure;
    return j;
  }
  j["boundary_oscillation"] = s.oscillation;
  j["mean_magnitude_high_k"] = s.mean_high;
  j["mean_magnitude_low_k"] = s.mean_low;
  j["max_magnitude_high_k"] = s.max_high;
  j["max_magnitude_low_k"] = s.max_low;
  j["residual"] = s.residual;
  return j;
}

}  // namespace

std::vector<PermeabilitySummary> run_permeability(const RunConfig& c) {
  validate(c);
  const PermeabilityCase pc = permeability_from_config(c);
  const Mesh mesh = Mesh::build_structured(c.dim, mesh_for(c));
  const Discretization disc(mesh);
  const std::vector<Method> ms = methods(c);
  std::vector<PermeabilityRun> runs(ms.size());
  parallel_for(ms.size(), c.threads, [&](std::size_t i) { runs[i] = solve_permeability(c, mesh, disc, pc, ms[i]); });

  std::vector<PermeabilitySummary> out;
  for (const auto& r : runs) out.push_back(r.summary);
  if (!c.out.empty()) {
    Eigen::VectorXd k(static_cast<Eigen::Index>(mesh.n_cells()));
    for (std::size_t t = 0; t < mesh.n_cells(); ++t)
      k[static_cast<Eigen::Index>(t)] = pc.permeability(mesh.cell(t).barycenter);
    json j = json::array();
    for (const auto& r : runs) {
      j.push_back(summary_json(r.summary));
      if (r.summary.failure.empty())
        write_vtk(out_path(c, std::string("permeability_") + to_string(r.summary.method) + ".vtk").string(),
                  disc.eg(), r.u, r.p, {{"permeability", k}});
    }
    write_text(out_path(c, "permeability_summary.json"), j.dump(2) + "\n");
  }
  return out;
}

std::vector<RunRow> run_single(const RunConfig& c) {
  validate(c);
  const int n = mesh_for(c);
  const Mesh mesh = Mesh::build_structured(c.dim, n);
  const Discretization disc(mesh);
  const ManufacturedCase mc = manufactured(c.dim, c.nu);
  std::vector<RunRow> rows;
  json reports = json::array();
  for (Method m : methods(c)) {
    RunRow row;
    row.method = m;
    row.n = n;
    row.nu = c.nu;
    try {
      const DiscreteSolution sol = solve_brinkman(disc, manufactured_problem(c, mesh, mc, m));
      row.residual = sol.residual;
      row.report = compute_errors(disc, sol.u, sol.p, mc.exact, c.nu, c.penalty, c.with_discrete);
      if (!c.out.empty())
        write_vtk(out_path(c, std::string("single_") + to_string(m) + ".vtk").string(), disc.eg(), sol.u, sol.p);
    } catch (const SolverError& e) {
      row.failure = e.what();
    }
    reports.push_back(report_json(row));
    rows.push_back(std::move(row));
  }
  if (!c.out.empty()) write_text(out_path(c, "single_report.json"), reports.dump(2) + "\n");
  return rows;
}

std::string manifest_json(const RunConfig& c, const std::string& extra_json) {
  json j;
  j["command"] = c.command;
  j["version"] = version();
  j["config_hash"] = config_hash(c);
  j["dim"] = c.dim;
  j["method"] = c.method;
  j["rho1"] = c.penalty.rho1;
  j["rho2"] = c.penalty.rho2;
  j["tolerance"] = c.tolerance;
  j["boundary"] = to_string(c.boundary);
  j["mesh_pattern"] = c.dim == 2 ? "unit square, n x n squares, diagonal from lower-left to upper-right"
                                 : "unit cube, n^3 cubes, six Kuhn tetrahedra about the main diagonal";
  j["solver"] = "sparse LU up to " + std::to_string(kDirectLimit) +
                " unknowns, else Schur-complement PCG with incomplete-Cholesky CG (or sparse Cholesky) for the velocity block";
  j["config"] = canonical_config(c);
  j["extra"] = json::parse(extra_json);
  return j.dump(2) + "\n";
}

int run(const RunConfig& c, std::ostream& log) {
  validate(c);
  json extra = json::object();
  int status = 0;
  if (c.command == "convergence") {
    const ConvergenceTable t = run_convergence(c);
    std::ostringstream csv;
    write_convergence_csv(csv, c, t);
    log << csv.str();
    for (const auto& r : t.rows)
      if (!r.report) status = 2;
    if (!c.out.empty()) write_text(out_path(c, "convergence.csv"), csv.str());
    extra["outputs"] = {"convergence.csv"};
  } else if (c.command == "profile") {
    const auto rows = run_profile(c);
    std::ostringstream csv;
    write_profile_csv(csv, c, rows);
    log << csv.str();
    for (const auto& r : rows)
      if ((r.st && !r.st->report) || (r.pr && !r.pr->report)) status = 2;
    if (!c.out.empty()) write_text(out_path(c, "profile.csv"), csv.str());
    extra["outputs"] = {"profile.csv"};
  } else if (c.command == "single") {
    const auto rows = run_single(c);
    json j = json::array();
    for (const auto& r : rows) {
      j.push_back(report_json(r));
      if (!r.report) status = 2;
    }
    log << j.dump(2) << '\n';
    extra["outputs"] = {"single_report.json"};
  } else {
    const auto rows = run_permeability(c);
    json j = json::array();
    for (const auto& r : rows) {
      j.push_back(summary_json(r));
      if (!r.failure.empty()) status = 2;
    }
    log << j.dump(2) << '\n';
    extra["outputs"] = {"permeability_summary.json"};
  }
  if (!c.out.empty()) write_text(out_path(c, "manifest.json"), manifest_json(c, extra.dump()));
  return status;
}

}  // namespace egb
