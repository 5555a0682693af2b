#ifndef EGB_ASSEMBLY_HPP
#define EGB_ASSEMBLY_HPP

#include <functional>
#include <vector>

#include <Eigen/Sparse>

#include "egb/fespace.hpp"
#include "egb/reconstruction.hpp"

namespace egb {

using ScalarField = std::function<double(const Vec&)>;
using VectorField = std::function<Vec(const Vec&)>;

enum class Method { ST, PR };

const char* to_string(Method m);

/// Viscous coefficient nu (mu for the permeability runs) and per-cell
/// reaction sigma (1 for the scaled equations, mu / K(x_T) otherwise).
struct CoefficientField {
  double nu = 1.0;
  Eigen::VectorXd sigma;

  static CoefficientField uniform(const Mesh& mesh, double nu, double sigma = 1.0);

  /// Throws unless nu > 0 and every sigma_T > 0 with one value per cell.
  void validate(const Mesh& mesh) const;
};

/// Sigma seen by the face penalty: mean of the two neighbours, or the
/// single neighbour on the boundary.
double face_sigma(const Mesh& mesh, const Eigen::VectorXd& sigma, std::size_t face);

struct Penalty {
  double rho1 = 3.0;
  double rho2 = 3.0;
};

struct FormMatrices {
  SparseMatrix A;       // a(.,.), unscaled by nu
  SparseMatrix C;       // c(.,.) with sigma
  SparseMatrix Ctilde;  // c~(.,.) with sigma; empty unless requested
  SparseMatrix B;       // b(.,.): rows pressure, columns velocity
  Penalty penalty;
};

/// Accumulates dense local blocks into a sparse matrix, flushing to
/// compressed storage in bounded chunks.
class SparseAccumulator {
public:
  SparseAccumulator(Eigen::Index rows, Eigen::Index cols, std::size_t chunk = 1u << 22);
  void add(Eigen::Index row, Eigen::Index col, double value);
  SparseMatrix finish();

private:
  void flush();
  SparseMatrix result_;
  std::vector<Eigen::Triplet<double>> pending_;
  std::size_t chunk_;
};

SparseMatrix assemble_a(const EGSpace& eg, double rho1);

SparseMatrix assemble_c(const EGSpace& eg, const Eigen::VectorXd& sigma, double rho2);

/// rho2 <h_e sigma_e [[w]], [[v]]>_{E_h}, the part shared by c and c~.
SparseMatrix assemble_jump_penalty(const EGSpace& eg, const Eigen::VectorXd& sigma, double rho2);

/// Sigma-weighted mass matrix of the BDM1 moment basis.
SparseMatrix assemble_hdiv_mass(const HdivSpace& hdiv, const Eigen::VectorXd& sigma);

SparseMatrix assemble_c_tilde(const EGSpace& eg, const ReconstructionOperator& R,
                              const Eigen::VectorXd& sigma, double rho2);

SparseMatrix assemble_b(const EGSpace& eg, const PressureSpace& pressure);

/// ST: F_j = (f, v_j); PR: F_j = (f, R v_j) = R^T (f, psi_i). R is required
/// for PR.
Eigen::VectorXd assemble_loads(const EGSpace& eg, const VectorField& f,
                               const ReconstructionOperator* R, Method method);

/// Load against the BDM1 moment basis, (f, psi_i).
Eigen::VectorXd assemble_hdiv_load(const HdivSpace& hdiv, const VectorField& f);

struct DirichletCorrection {
  Eigen::VectorXd velocity;
  Eigen::VectorXd pressure;
};

/// Nitsche terms from replacing [[u]] by (u - g) on boundary faces:
///   velocity:  nu (-<grad(w) n, g> + rho1 <h^-1 g, w>) + rho2 <h sigma g, w>
///   pressure:  -<g.n, q>
/// The method does not change the result since R has zero boundary moments.
DirichletCorrection assemble_dirichlet(const EGSpace& eg, const PressureSpace& pressure,
                                       const VectorField& g, const CoefficientField& coeff,
                                       const Penalty& penalty, Method method);

FormMatrices assemble_forms(const EGSpace& eg, const PressureSpace& pressure,
                            const ReconstructionOperator* R, const Eigen::VectorXd& sigma,
                            const Penalty& penalty);

}  // namespace egb

#endif
