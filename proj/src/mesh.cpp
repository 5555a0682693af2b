#include "egb/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace egb {

namespace {

std::size_t vid2(int i, int j, int n) { return static_cast<std::size_t>(j * (n + 1) + i); }

std::size_t vid3(int i, int j, int k, int n) {
  return static_cast<std::size_t>((k * (n + 1) + j) * (n + 1) + i);
}

}  // namespace

Mesh Mesh::build_structured(int dim, int n) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("build_structured: dim must be 2 or 3");
  if (n < 1) throw std::invalid_argument("build_structured: n must be >= 1");

  Mesh m;
  m.dim_ = dim;
  m.n_ = n;
  const double h = 1.0 / n;

  if (dim == 2) {
    m.vertices_.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) m.vertices_.emplace_back(i * h, j * h, 0.0);
    m.cells_.reserve(static_cast<std::size_t>(2 * n * n));
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const auto v00 = vid2(i, j, n), v10 = vid2(i + 1, j, n);
        const auto v01 = vid2(i, j + 1, n), v11 = vid2(i + 1, j + 1, n);
        Cell lower, upper;
        lower.vertices = {v00, v10, v11, 0};
        upper.vertices = {v00, v11, v01, 0};
        m.cells_.push_back(lower);
        m.cells_.push_back(upper);
      }
    }
  } else {
    m.vertices_.reserve(static_cast<std::size_t>((n + 1) * (n + 1) * (n + 1)));
    for (int k = 0; k <= n; ++k)
      for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) m.vertices_.emplace_back(i * h, j * h, k * h);
    // Kuhn split: one tetrahedron per monotone lattice path from the
    // lower corner to the upper corner of each cube.
    static constexpr std::array<std::array<int, 3>, 6> perms{{
        {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    m.cells_.reserve(static_cast<std::size_t>(6 * n * n * n));
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          for (const auto& p : perms) {
            std::array<int, 3> ijk{i, j, k};
            Cell c;
            c.vertices[0] = vid3(ijk[0], ijk[1], ijk[2], n);
            for (int s = 0; s < 3; ++s) {
              ++ijk[p[s]];
              c.vertices[s + 1] = vid3(ijk[0], ijk[1], ijk[2], n);
            }
            m.cells_.push_back(c);
          }
        }
      }
    }
  }
  m.finalize();
  return m;
}

void Mesh::finalize() {
  const int nv = dim_ + 1;
  bary_grad_.assign(cells_.size(), {});
  mesh_size_ = 0.0;

  for (std::size_t c = 0; c < cells_.size(); ++c) {
    Cell& cell = cells_[c];
    const Vec& x0 = vertices_[cell.vertices[0]];
    Eigen::MatrixXd jac(dim_, dim_);
    for (int i = 0; i < dim_; ++i) {
      const Vec e = vertices_[cell.vertices[i + 1]] - x0;
      for (int r = 0; r < dim_; ++r) jac(r, i) = e[r];
    }
    const double det = jac.determinant();
    cell.volume = std::abs(det) / (dim_ == 2 ? 2.0 : 6.0);
    const Eigen::MatrixXd jinv = jac.inverse();
    Vec g0 = Vec::Zero();
    for (int i = 0; i < dim_; ++i) {
      Vec g = Vec::Zero();
      for (int r = 0; r < dim_; ++r) g[r] = jinv(i, r);
      bary_grad_[c][i + 1] = g;
      g0 -= g;
    }
    bary_grad_[c][0] = g0;

    cell.barycenter = Vec::Zero();
    for (int i = 0; i < nv; ++i) cell.barycenter += vertices_[cell.vertices[i]];
    cell.barycenter /= nv;

    cell.diameter = 0.0;
    for (int a = 0; a < nv; ++a)
      for (int b = a + 1; b < nv; ++b)
        cell.diameter = std::max(
            cell.diameter, (vertices_[cell.vertices[a]] - vertices_[cell.vertices[b]]).norm());
    mesh_size_ = std::max(mesh_size_, cell.diameter);
  }

  faces_.clear();
  std::map<std::array<std::size_t, 3>, std::size_t> lookup;
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    Cell& cell = cells_[c];
    for (int lf = 0; lf < nv; ++lf) {
      std::array<std::size_t, 3> key{0, 0, 0};
      int w = 0;
      for (int i = 0; i < nv; ++i)
        if (i != lf) key[w++] = cell.vertices[i];
      std::sort(key.begin(), key.begin() + dim_);
      auto [it, inserted] = lookup.try_emplace(key, faces_.size());
      if (inserted) {
        Face f;
        f.vertices = key;
        f.plus_cell = c;
        f.plus_local = lf;
        faces_.push_back(f);
      } else {
        Face& f = faces_[it->second];
        if (f.minus_cell) throw std::logic_error("Mesh: face shared by more than two cells");
        f.minus_cell = c;
        f.minus_local = lf;
      }
      cell.faces[lf] = it->second;
    }
  }

  for (Face& f : faces_) {
    const Vec& a = vertices_[f.vertices[0]];
    const Vec& b = vertices_[f.vertices[1]];
    Vec n;
    if (dim_ == 2) {
      const Vec t = b - a;
      f.measure = t.norm();
      f.h = f.measure;
      n = Vec(t[1], -t[0], 0.0) / f.measure;
      f.centroid = 0.5 * (a + b);
    } else {
      const Vec& cc = vertices_[f.vertices[2]];
      const Vec cr = (b - a).cross(cc - a);
      f.measure = 0.5 * cr.norm();
      f.h = std::sqrt(f.measure);
      n = cr.normalized();
      f.centroid = (a + b + cc) / 3.0;
    }
    if (n.dot(f.centroid - cells_[f.plus_cell].barycenter) < 0.0) n = -n;
    f.normal = n;
  }
}

std::size_t Mesh::n_boundary_faces() const {
  return static_cast<std::size_t>(
      std::count_if(faces_.begin(), faces_.end(), [](const Face& f) { return f.is_boundary(); }));
}

TraceSide Mesh::trace(std::size_t face, Side side) const {
  if (face >= faces_.size()) throw std::out_of_range("Mesh::trace: no such face");
  const Face& f = faces_[face];
  if (f.is_boundary()) {
    if (side == Side::minus)
      throw std::invalid_argument("Mesh::trace: boundary face has no minus side");
    return {f.plus_cell, f.plus_local, 1.0, 1.0};
  }
  if (side == Side::plus) return {f.plus_cell, f.plus_local, 1.0, 0.5};
  return {*f.minus_cell, f.minus_local, -1.0, 0.5};
}

Vec Mesh::outward_normal(std::size_t cell, int local_face) const {
  const Face& f = faces_[cells_[cell].faces[local_face]];
  return f.plus_cell == cell && f.plus_local == local_face ? f.normal : Vec(-f.normal);
}

std::array<double, kMaxVertsPerCell> Mesh::barycentric(std::size_t cell, const Vec& x) const {
  std::array<double, kMaxVertsPerCell> lam{0.0, 0.0, 0.0, 0.0};
  const Vec d = x - vertices_[cells_[cell].vertices[0]];
  double rest = 1.0;
  for (int i = 1; i <= dim_; ++i) {
    lam[i] = bary_grad_[cell][i].dot(d);
    rest -= lam[i];
  }
  lam[0] = rest;
  return lam;
}

bool Mesh::contains(std::size_t cell, const Vec& x, double tol) const {
  const auto lam = barycentric(cell, x);
  for (int i = 0; i <= dim_; ++i)
    if (lam[i] < -tol) return false;
  if (dim_ == 2 && std::abs(x[2]) > tol) return false;
  return true;
}

Mesh Mesh::with_flipped_face(std::size_t face) const {
  if (face >= faces_.size() || faces_[face].is_boundary())
    throw std::invalid_argument("Mesh::with_flipped_face: face must be interior");
  Mesh copy = *this;
  Face& f = copy.faces_[face];
  const std::size_t minus = *f.minus_cell;
  f.minus_cell = f.plus_cell;
  f.plus_cell = minus;
  std::swap(f.plus_local, f.minus_local);
  f.normal = -f.normal;
  return copy;
}

}  // namespace egb
