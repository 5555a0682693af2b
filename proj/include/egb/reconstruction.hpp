#ifndef EGB_RECONSTRUCTION_HPP
#define EGB_RECONSTRUCTION_HPP

#include <Eigen/Sparse>

#include "egb/fespace.hpp"

namespace egb {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Linear map V_h -> BDM1 given by face moments:
///   interior e:  int_e (Rv).n_e p = int_e {v}.n_e p   for all p in P1(e)
///   boundary e:  int_e (Rv).n_e p = 0
/// Stored as an explicit (n_moments x n_eg) matrix; boundary rows are empty.
class ReconstructionOperator {
public:
  ReconstructionOperator(const EGSpace& eg, const HdivSpace& hdiv);

  const EGSpace& eg_space() const { return *eg_; }
  const HdivSpace& hdiv_space() const { return *hdiv_; }
  const SparseMatrix& matrix() const { return matrix_; }

  /// Moment coefficients of Rv. Throws on a size mismatch.
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;

private:
  const EGSpace* eg_;
  const HdivSpace* hdiv_;
  SparseMatrix matrix_;
};

ReconstructionOperator build_reconstruction(const Mesh& mesh, const EGSpace& eg, const HdivSpace& hdiv);

}  // namespace egb

#endif
