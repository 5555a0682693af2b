#ifndef EGB_SOLVER_HPP
#define EGB_SOLVER_HPP

#include <stdexcept>
#include <string>

#include "egb/assembly.hpp"

namespace egb {

class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Symmetric block system
///
///   [  K   -B^T  0 ] [u]   [ F ]
///   [ -B    0    w ] [p] = [-G ]
///   [  0    w^T  0 ] [l]   [ 0 ]
///
/// with K = nu A + C (ST) or nu A + C~ (PR) and w the cell volumes, so the
/// last row enforces sum_T |T| p_T = 0.
struct SaddlePointSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  std::size_t n_velocity = 0;
  std::size_t n_pressure = 0;
  double viscosity = 0.0;  // scales the pressure-mass part of the Schur preconditioner
};

SaddlePointSystem build_saddle_point(const SparseMatrix& K, const SparseMatrix& B,
                                     const Eigen::VectorXd& F, const Eigen::VectorXd& G,
                                     const Eigen::VectorXd& weights);

struct DiscreteSolution {
  Eigen::VectorXd u;
  Eigen::VectorXd p;
  double multiplier = 0.0;
  double residual = 0.0;  // relative algebraic residual
  int refinement_steps = 0;
  int iterations = 0;  // Schur-complement CG iterations, summed over refinement
  std::string factorization;
};

inline constexpr double kDefaultTolerance = 1e-10;

/// direct: sparse LU of the whole block system.
/// schur: preconditioned CG on the pressure Schur
///   complement B K^-1 B^T, preconditioned by nu M_p^-1 + (B diag(K)^-1 B^T)^-1,
///   with K^-1 from incomplete-Cholesky CG or, failing that, sparse Cholesky.
/// automatic: direct up to kDirectLimit unknowns, schur above.
enum class SolverStrategy { automatic, direct, schur };

inline constexpr std::size_t kDirectLimit = 12000;

/// Solve with iterative refinement on the full block system. Throws
/// SolverError if a factorization fails or the relative residual stays above
/// tolerance.
DiscreteSolution solve(const SaddlePointSystem& system, double tolerance = kDefaultTolerance,
                       SolverStrategy strategy = SolverStrategy::automatic);

/// Spaces and reconstruction on one mesh. The mesh must outlive it.
class Discretization {
public:
  explicit Discretization(const Mesh& mesh);
  Discretization(const Discretization&) = delete;
  Discretization& operator=(const Discretization&) = delete;

  const Mesh& mesh() const { return *mesh_; }
  const EGSpace& eg() const { return eg_; }
  const PressureSpace& pressure() const { return pressure_; }
  const HdivSpace& hdiv() const { return hdiv_; }
  const ReconstructionOperator& reconstruction() const { return R_; }

private:
  const Mesh* mesh_;
  EGSpace eg_;
  PressureSpace pressure_;
  HdivSpace hdiv_;
  ReconstructionOperator R_;
};

/// strong: continuous dofs on boundary vertices are fixed to g(vertex), so
/// the continuous part of a test function vanishes on the boundary; the
/// boundary-face terms then act on the enrichment and on u_h - g.
/// nitsche: every dof is free and g enters only through the face terms.
enum class BoundaryTreatment { strong, nitsche };

const char* to_string(BoundaryTreatment b);

struct BrinkmanProblem {
  Method method = Method::PR;
  BoundaryTreatment boundary = BoundaryTreatment::strong;
  CoefficientField coeff;
  Penalty penalty;
  VectorField f;
  VectorField g;  // empty means homogeneous Dirichlet data
  double tolerance = kDefaultTolerance;
  SolverStrategy strategy = SolverStrategy::automatic;
};

/// Assembles the ST-EG or PR-EG system for the problem and solves it.
SaddlePointSystem assemble_system(const Discretization& disc, const BrinkmanProblem& problem);
DiscreteSolution solve_brinkman(const Discretization& disc, const BrinkmanProblem& problem);

}  // namespace egb

#endif
