#ifndef EGB_ANALYSIS_HPP
#define EGB_ANALYSIS_HPP

#include <optional>
#include <string>
#include <vector>

#include "egb/problems.hpp"
#include "egb/solver.hpp"

namespace egb {

/// Pi_h w: vertex values for the continuous part, and per cell
///   c_T = (1 / (d |T|)) * oint_{dT} (w - Pi^C w) . n
/// so that (div Pi_h w, 1)_T = (div w, 1)_T.
Eigen::VectorXd interpolate_pi_h(const EGSpace& eg, const VectorField& w);

/// Cell means of p with the global (volume-weighted) mean removed.
Eigen::VectorXd project_p0(const PressureSpace& pressure, const ScalarField& p);

/// Broken norms of u - u_h on one mesh.
///
///   enorm^2  = ||grad_h e||^2 + rho1 ||h_e^{-1/2} [[e]]||^2
///   energy^2 = nu enorm^2 + ||e||^2 + rho2 ||h_e^{1/2} [[e]]||^2
///
/// On interior faces [[e]] = -[[u_h]]; on boundary faces e = u - u_h.
/// With with_discrete set, energy_pi = |||Pi_h u - u_h||| and
/// energy_R = |||Pi_h u - u_h|||_R, the same norm of the discrete difference
/// with ||R(.)|| in place of the L2 term.
/// energy_hjump weights the L2 jump term by h_e^2 instead of h_e; it is a
/// diagnostic for comparing with tables computed that way.
/// h is 1/n.
struct ErrorReport {
  double h = 0.0;
  double nu = 0.0;
  double rho1 = 0.0;
  double rho2 = 0.0;

  double grad_u = 0.0;     // ||grad_h(u - u_h)||
  double jump_inv = 0.0;   // ||h_e^{-1/2} [[u - u_h]]||
  double jump_dir = 0.0;   // ||h_e^{1/2} [[u - u_h]]||
  double enorm_err = 0.0;
  double scaled_h1 = 0.0;  // sqrt(nu) * enorm_err
  double l2_u = 0.0;
  double energy = 0.0;
  std::optional<double> energy_pi;
  std::optional<double> energy_R;
  double energy_hjump = 0.0;

  double p0_p = 0.0;     // ||P0 p - p_h||
  double total_p = 0.0;  // ||(p - mean p) - p_h||
};

ErrorReport compute_errors(const Discretization& disc, const Eigen::VectorXd& u_h,
                           const Eigen::VectorXd& p_h, const ExactSolution& exact, double nu,
                           const Penalty& penalty, bool with_discrete = false);

enum class ErrorColumn { energy, scaled_h1, l2_u, p0_p, total_p, enorm, energy_pi, energy_R, energy_hjump };

const char* to_string(ErrorColumn c);
double column_value(const ErrorReport& r, ErrorColumn c);

/// log2(e_{2h} / e_h) between consecutive entries. exact is set (and value
/// is NaN) when either error is zero or negative.
struct Order {
  double value = 0.0;
  bool exact = false;
};

std::vector<Order> convergence_orders(const std::vector<double>& errors);

/// Orders of one column. Throws unless there are at least two reports and
/// h halves between consecutive ones.
std::vector<Order> convergence_orders(const std::vector<ErrorReport>& reports, ErrorColumn c);

enum class ProfileQuantity { velocity, pressure };

/// Reference error profiles E(nu) as closed-form functions, with h = 1/32
/// in 2D and h = 1/16 in 3D. Throws on an unsupported dimension.
double error_profile_reference(double nu, int dim, ProfileQuantity q, Method m);

/// Discrete inf-sup constant
///   min_{q in Q_h, q != 0} max_{v} b(v, q) / (||v||_X ||q||_0)
/// with the X inner product given by X (SPD) and the zero-mean constraint
/// on q. Dense; intended for small meshes.
double inf_sup_constant(const SparseMatrix& B, const SparseMatrix& X, const Eigen::VectorXd& cell_volumes);

}  // namespace egb

#endif
