#ifndef EGB_APP_HPP
#define EGB_APP_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "egb/analysis.hpp"

namespace egb {

struct RunConfig {
  std::string command = "convergence";  // convergence | profile | single | permeability
  int dim = 2;
  std::string method = "both";  // ST | PR | both
  double nu = 1e-6;
  std::vector<int> n = {4, 8, 16, 32, 64};  // convergence meshes
  int mesh_n = 0;  // profile / single / permeability mesh; 0 picks the per-command default
  std::vector<double> nus = {1, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
  double mu = 1e-6;
  double low_k = 1e-6;
  double high_k = 1.0;
  std::string raster;         // 2D permeability file; built-in pattern when empty
  std::optional<Ball> ball;   // 3D; Ball::literal() when empty
  Penalty penalty;
  double tolerance = kDefaultTolerance;
  BoundaryTreatment boundary = BoundaryTreatment::strong;
  bool with_discrete = true;  // also report |||Pi_h u - u_h||| and its R variant
  std::string out;            // no files are written when empty
  int threads = 1;
};

/// Throws std::invalid_argument on a bad selector, a nonpositive parameter
/// or an n list that is not a doubling sequence (convergence only).
void validate(const RunConfig& c);

std::vector<Method> methods(const RunConfig& c);

/// Stable key=value rendering of every field that affects results.
std::string canonical_config(const RunConfig& c);
/// FNV-1a 64 of canonical_config, as 16 hex digits.
std::string config_hash(const RunConfig& c);

/// Worker count from EGB_THREADS (default 1, clamped to [1, 64]).
int threads_from_env();

struct RunRow {
  Method method = Method::PR;
  int n = 0;
  double nu = 0.0;
  std::optional<ErrorReport> report;
  std::string failure;  // set when the solve failed
  double residual = 0.0;
};

/// One manufactured solve and its errors.
RunRow run_case(const RunConfig& c, Method m, int n, double nu);

struct ConvergenceTable {
  std::vector<RunRow> rows;  // grouped by method, increasing n
};

ConvergenceTable run_convergence(const RunConfig& c);
void write_convergence_csv(std::ostream& out, const RunConfig& c, const ConvergenceTable& t);

struct ProfileRow {
  double nu = 0.0;
  std::optional<RunRow> st;
  std::optional<RunRow> pr;
  double ref_u_st = 0.0, ref_u_pr = 0.0, ref_p_st = 0.0, ref_p_pr = 0.0;
};

/// Mesh used by profile (32 in 2D, 16 in 3D), single (16) and permeability
/// (64 in 2D, 16 in 3D) unless c.mesh_n is set.
int mesh_for(const RunConfig& c);

/// Runs at mesh_for(c), one row per entry of c.nus.
std::vector<ProfileRow> run_profile(const RunConfig& c);
void write_profile_csv(std::ostream& out, const RunConfig& c, const std::vector<ProfileRow>& rows);

struct PermeabilitySummary {
  Method method = Method::PR;
  std::string failure;
  int n = 0;
  double oscillation = 0.0;  // max tangential |u_h - g| on boundary faces
  double mean_high = 0.0;    // volume-weighted mean |u_h(x_T)| where K is high
  double mean_low = 0.0;
  double max_high = 0.0;
  double max_low = 0.0;
  double residual = 0.0;
};

/// max over boundary-face quadrature points of the tangential part of
/// u_h - g.
double boundary_oscillation(const EGSpace& eg, const Eigen::VectorXd& u_h, const VectorField& g);

PermeabilityCase permeability_from_config(const RunConfig& c);
std::vector<PermeabilitySummary> run_permeability(const RunConfig& c);

/// Solves one manufactured case per method at mesh_for(c) and c.nu.
std::vector<RunRow> run_single(const RunConfig& c);

/// JSON manifest for any command (no timestamps; reruns are identical).
std::string manifest_json(const RunConfig& c, const std::string& extra_json = "{}");

const char* version();

/// Runs the command, writing outputs under c.out. Returns a process exit code.
int run(const RunConfig& c, std::ostream& log);

}  // namespace egb

#endif
