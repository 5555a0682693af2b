#ifndef EGB_FESPACE_HPP
#define EGB_FESPACE_HPP

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "egb/mesh.hpp"

namespace egb {

inline constexpr int kMaxEGLocal = 13;    // d(d+1) + 1 for d = 3
inline constexpr int kMaxHdivLocal = 12;  // d(d+1) for d = 3

/// Values and gradients of the local EG basis on one cell. Gradients are
/// stored as grad(c, k) = d v_c / d x_k.
struct LocalBasis {
  int size = 0;
  std::array<Vec, kMaxEGLocal> value;
  std::array<Mat, kMaxEGLocal> grad;
};

/// V_h = C_h + D_h: vector P1 nodal functions on every vertex plus one
/// enrichment c (x - x_T) per cell.
///
/// Global numbering: vertex v, component c -> v * d + c; the enrichment of
/// cell T -> d * n_vertices + T. Locally, vertex a and component c map to
/// a * d + c and the enrichment is last.
class EGSpace {
public:
  explicit EGSpace(const Mesh& mesh);

  const Mesh& mesh() const { return *mesh_; }
  int dim() const { return mesh_->dim(); }
  std::size_t n_continuous_dofs() const { return n_continuous_; }
  std::size_t n_enrichment_dofs() const { return mesh_->n_cells(); }
  std::size_t n_dofs() const { return n_continuous_ + mesh_->n_cells(); }
  int n_local() const { return dim() * (dim() + 1) + 1; }
  int enrichment_local() const { return n_local() - 1; }

  std::size_t continuous_dof(std::size_t vertex, int component) const {
    return vertex * static_cast<std::size_t>(dim()) + static_cast<std::size_t>(component);
  }
  std::size_t enrichment_dof(std::size_t cell) const { return n_continuous_ + cell; }
  bool is_enrichment(std::size_t dof) const { return dof >= n_continuous_; }

  std::array<std::size_t, kMaxEGLocal> local_dofs(std::size_t cell) const;

  /// Throws if x lies outside the closed cell (1e-12 barycentric tolerance).
  LocalBasis eval_basis(std::size_t cell, const Vec& x) const;
  /// Same, without the containment check (x is trusted to be in the cell).
  LocalBasis eval_basis_unchecked(std::size_t cell, const Vec& x) const;

  Vec value(const Eigen::VectorXd& coeffs, std::size_t cell, const Vec& x) const;
  Mat gradient(const Eigen::VectorXd& coeffs, std::size_t cell) const;

  /// Zeroes the enrichment part (v^C) or the continuous part (v^D).
  Eigen::VectorXd continuous_part(const Eigen::VectorXd& coeffs) const;
  Eigen::VectorXd enrichment_part(const Eigen::VectorXd& coeffs) const;

  /// Continuous dofs attached to boundary vertices.
  std::vector<std::size_t> boundary_continuous_dofs() const;

private:
  const Mesh* mesh_;
  std::size_t n_continuous_;
};

/// Piecewise constants with the zero-mean constraint sum_T |T| q_T = 0.
class PressureSpace {
public:
  explicit PressureSpace(const Mesh& mesh) : mesh_(&mesh) {}

  const Mesh& mesh() const { return *mesh_; }
  std::size_t n_dofs() const { return mesh_->n_cells(); }
  bool zero_mean() const { return true; }

  /// Cell volumes, the weights of the mean constraint.
  Eigen::VectorXd weights() const;
  double mean(const Eigen::VectorXd& q) const;
  Eigen::VectorXd remove_mean(const Eigen::VectorXd& q) const;

private:
  const Mesh* mesh_;
};

struct HdivValue {
  Vec value = Vec::Zero();
  double divergence = 0.0;
};

/// BDM1 with d normal moments per face against P1(e) test functions.
///
/// Test functions on a face with ascending vertices v0 < v1 (< v2) and face
/// barycentric coordinates l0, l1 (, l2):
///   edges: {1, l1 - 1/2}, i.e. {1, s} with s the midpoint arclength over h_e;
///   triangles: {1, l0 - 1/3, l1 - 1/3}.
/// Moments use the global face normal n_e, so normal traces are single valued.
class HdivSpace {
public:
  explicit HdivSpace(const Mesh& mesh);

  const Mesh& mesh() const { return *mesh_; }
  int dim() const { return mesh_->dim(); }
  int moments_per_face() const { return dim(); }
  std::size_t n_dofs() const { return mesh_->n_faces() * static_cast<std::size_t>(dim()); }
  int n_local() const { return dim() * (dim() + 1); }
  std::size_t dof(std::size_t face, int k) const {
    return face * static_cast<std::size_t>(dim()) + static_cast<std::size_t>(k);
  }

  std::array<std::size_t, kMaxHdivLocal> local_dofs(std::size_t cell) const;

  /// Test function k of a face, from the face barycentric coordinates.
  double test_function(int k, const std::array<double, kMaxVertsPerCell>& face_bary) const;
  /// Test function k of a face at a physical point on it.
  double test_function(std::size_t face, int k, const Vec& x) const;

  /// Unique BDM1 field on the cell with the given local moments (ordered
  /// as local_dofs). Throws on a wrong dof count.
  HdivValue eval(std::size_t cell, std::span<const double> local_moments, const Vec& x) const;
  /// Same, reading the cell's moments out of a global moment vector.
  HdivValue eval_global(std::size_t cell, const Eigen::VectorXd& moments, const Vec& x) const;

  /// Values of all local basis functions at x (column i = basis i).
  Eigen::Matrix<double, 3, Eigen::Dynamic> basis_values(std::size_t cell, const Vec& x) const;

  /// Local mass matrix of the moment-dual basis (unit weight).
  Eigen::MatrixXd local_mass(std::size_t cell) const;

private:
  Vec monomial(std::size_t cell, int j, const Vec& x) const;

  const Mesh* mesh_;
  // dual_[T] maps local moments to coefficients of the scaled monomials
  // psi_j = m_a e_c, j = c (d+1) + a, m_0 = 1, m_a = (x - x_T)_{a-1} / h_T.
  std::vector<Eigen::MatrixXd> dual_;
  std::vector<Eigen::MatrixXd> gram_;
};

}  // namespace egb

#endif
