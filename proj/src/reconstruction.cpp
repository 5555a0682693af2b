#include "egb/reconstruction.hpp"

#include <stdexcept>
#include <vector>

#include "egb/quadrature.hpp"

namespace egb {

ReconstructionOperator::ReconstructionOperator(const EGSpace& eg, const HdivSpace& hdiv)
    : eg_(&eg), hdiv_(&hdiv) {
  if (&eg.mesh() != &hdiv.mesh())
    throw std::invalid_argument("ReconstructionOperator: spaces live on different meshes");
  const Mesh& mesh = eg.mesh();
  const int d = mesh.dim();

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(mesh.n_faces() * static_cast<std::size_t>(2 * d * eg.n_local()));
  for (std::size_t f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.face(f);
    if (face.is_boundary()) continue;
    const MappedRule q = face_quadrature(mesh, f, kFaceDegree);
    for (Side side : {Side::plus, Side::minus}) {
      const TraceSide ts = mesh.trace(f, side);
      const auto dofs = eg.local_dofs(ts.cell);
      for (std::size_t p = 0; p < q.size(); ++p) {
        const LocalBasis basis = eg.eval_basis_unchecked(ts.cell, q.points[p]);
        for (int k = 0; k < d; ++k) {
          const double wk = q.weights[p] * ts.avg_weight * hdiv.test_function(k, q.bary[p]);
          const auto row = static_cast<Eigen::Index>(hdiv.dof(f, k));
          for (int i = 0; i < basis.size; ++i)
            triplets.emplace_back(row, static_cast<Eigen::Index>(dofs[i]),
                                  wk * basis.value[i].dot(face.normal));
        }
      }
    }
  }
  matrix_.resize(static_cast<Eigen::Index>(hdiv.n_dofs()), static_cast<Eigen::Index>(eg.n_dofs()));
  matrix_.setFromTriplets(triplets.begin(), triplets.end());
  matrix_.prune(0.0);
  matrix_.makeCompressed();
}

Eigen::VectorXd ReconstructionOperator::apply(const Eigen::VectorXd& v) const {
  if (v.size() != matrix_.cols())
    throw std::invalid_argument("ReconstructionOperator::apply: vector size does not match V_h");
  return matrix_ * v;
}

ReconstructionOperator build_reconstruction(const Mesh& mesh, const EGSpace& eg, const HdivSpace& hdiv) {
  if (&eg.mesh() != &mesh || &hdiv.mesh() != &mesh)
    throw std::invalid_argument("build_reconstruction: spaces are not built on this mesh");
  return ReconstructionOperator(eg, hdiv);
}

}  // namespace egb
