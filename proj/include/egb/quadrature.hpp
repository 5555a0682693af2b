#ifndef EGB_QUADRATURE_HPP
#define EGB_QUADRATURE_HPP

#include <array>
#include <vector>

#include "egb/mesh.hpp"

namespace egb {

/// Rule on the reference simplex {x_i >= 0, sum x_i <= 1} of dimension 1..3.
/// Weights sum to the reference measure 1/dim!.
struct ReferenceRule {
  int dim = 0;
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  std::size_t size() const { return weights.size(); }
};

/// Gauss-Legendre nodes and weights on [0, 1].
ReferenceRule gauss_legendre(int npoints);

/// Positive-weight collapsed (Duffy) product rule exact for polynomials of
/// total degree <= degree.
const ReferenceRule& simplex_rule(int dim, int degree);

/// Quadrature mapped onto a mesh entity. For a cell, bary[q] holds the
/// barycentric coordinates w.r.t. the cell's local vertices; for a face,
/// w.r.t. the face's (sorted) vertices.
struct MappedRule {
  std::vector<Vec> points;
  std::vector<double> weights;
  std::vector<std::array<double, kMaxVertsPerCell>> bary;
  std::size_t size() const { return weights.size(); }
};

MappedRule cell_quadrature(const Mesh& mesh, std::size_t cell, int degree);
MappedRule face_quadrature(const Mesh& mesh, std::size_t face, int degree);

/// Degrees used throughout: bilinear forms are integrated exactly with
/// kCellDegree / kFaceDegree; smooth data and error integrals use
/// error_degree(dim).
inline constexpr int kCellDegree = 4;
inline constexpr int kFaceDegree = 3;
inline constexpr int error_degree(int dim) { return dim == 2 ? 6 : 5; }

}  // namespace egb

#endif
