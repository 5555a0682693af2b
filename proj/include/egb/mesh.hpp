#ifndef EGB_MESH_HPP
#define EGB_MESH_HPP

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace egb {

/// Points and vectors are always stored with three components; in 2D the
/// third component is zero.
using Vec = Eigen::Vector3d;
using Mat = Eigen::Matrix3d;

inline constexpr std::size_t kMaxVertsPerCell = 4;

enum class Side { plus, minus };

/// What a face-side contributes to jumps and averages.
///
/// jump_sign is +1 on T+ and -1 on T-; avg_weight is 1/2 on interior faces
/// and 1 on boundary faces, where jump and average are both the full trace.
struct TraceSide {
  std::size_t cell;
  int local_face;
  double jump_sign;
  double avg_weight;
};

struct Cell {
  std::array<std::size_t, kMaxVertsPerCell> vertices{};
  std::array<std::size_t, kMaxVertsPerCell> faces{};  // local face k is opposite vertex k
  double volume = 0.0;
  double diameter = 0.0;
  Vec barycenter = Vec::Zero();
};

struct Face {
  std::array<std::size_t, 3> vertices{};  // ascending global index
  double measure = 0.0;
  double h = 0.0;                          // |e|^{1/(d-1)}
  Vec normal = Vec::Zero();                // T+ -> T-, outward on the boundary
  Vec centroid = Vec::Zero();
  std::size_t plus_cell = 0;
  int plus_local = 0;
  std::optional<std::size_t> minus_cell;
  int minus_local = -1;

  bool is_boundary() const { return !minus_cell.has_value(); }
};

/// Conforming simplicial mesh of the unit square or cube.
///
/// Faces are numbered in order of first appearance when walking cells in
/// index order, so the cell with the smaller index is always T+.
class Mesh {
public:
  /// n x n squares cut along the lower-left to upper-right diagonal (2D), or
  /// n^3 cubes split into the six Kuhn tetrahedra around the main diagonal (3D).
  static Mesh build_structured(int dim, int n);

  int dim() const { return dim_; }
  int subdivisions() const { return n_; }
  int verts_per_cell() const { return dim_ + 1; }
  int verts_per_face() const { return dim_; }

  std::size_t n_vertices() const { return vertices_.size(); }
  std::size_t n_cells() const { return cells_.size(); }
  std::size_t n_faces() const { return faces_.size(); }
  std::size_t n_boundary_faces() const;

  const Vec& vertex(std::size_t i) const { return vertices_[i]; }
  const Cell& cell(std::size_t i) const { return cells_[i]; }
  const Face& face(std::size_t i) const { return faces_[i]; }
  const std::vector<Vec>& vertices() const { return vertices_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<Face>& faces() const { return faces_; }

  /// Largest cell diameter.
  double mesh_size() const { return mesh_size_; }

  TraceSide trace(std::size_t face, Side side) const;

  /// Outward unit normal of a cell's local face.
  Vec outward_normal(std::size_t cell, int local_face) const;

  /// Barycentric coordinates of x in the cell, in local vertex order.
  std::array<double, kMaxVertsPerCell> barycentric(std::size_t cell, const Vec& x) const;

  /// Gradients of the barycentric coordinates (constant per cell).
  const std::array<Vec, kMaxVertsPerCell>& barycentric_gradients(std::size_t cell) const {
    return bary_grad_[cell];
  }

  bool contains(std::size_t cell, const Vec& x, double tol = 1e-12) const;

  /// Copy of the mesh with T+ and T- of one interior face exchanged and its
  /// normal negated.
  Mesh with_flipped_face(std::size_t face) const;

private:
  Mesh() = default;
  void finalize();

  int dim_ = 2;
  int n_ = 0;
  double mesh_size_ = 0.0;
  std::vector<Vec> vertices_;
  std::vector<Cell> cells_;
  std::vector<Face> faces_;
  std::vector<std::array<Vec, kMaxVertsPerCell>> bary_grad_;
};

}  // namespace egb

#endif
