#include "egb/fespace.hpp"

#include <cmath>
#include <stdexcept>

#include "egb/quadrature.hpp"

namespace egb {

EGSpace::EGSpace(const Mesh& mesh)
    : mesh_(&mesh), n_continuous_(mesh.n_vertices() * static_cast<std::size_t>(mesh.dim())) {}

std::array<std::size_t, kMaxEGLocal> EGSpace::local_dofs(std::size_t cell) const {
  std::array<std::size_t, kMaxEGLocal> dofs{};
  const Cell& c = mesh_->cell(cell);
  const int d = dim();
  for (int a = 0; a <= d; ++a)
    for (int comp = 0; comp < d; ++comp) dofs[a * d + comp] = continuous_dof(c.vertices[a], comp);
  dofs[enrichment_local()] = enrichment_dof(cell);
  return dofs;
}

LocalBasis EGSpace::eval_basis(std::size_t cell, const Vec& x) const {
  if (!mesh_->contains(cell, x, 1e-12))
    throw std::invalid_argument("EGSpace::eval_basis: point outside cell");
  return eval_basis_unchecked(cell, x);
}

LocalBasis EGSpace::eval_basis_unchecked(std::size_t cell, const Vec& x) const {
  const int d = dim();
  LocalBasis out;
  out.size = n_local();
  const auto lam = mesh_->barycentric(cell, x);
  const auto& grads = mesh_->barycentric_gradients(cell);
  for (int a = 0; a <= d; ++a) {
    for (int comp = 0; comp < d; ++comp) {
      const int i = a * d + comp;
      out.value[i] = Vec::Zero();
      out.value[i][comp] = lam[a];
      out.grad[i] = Mat::Zero();
      out.grad[i].row(comp) = grads[a].transpose();
    }
  }
  const int e = enrichment_local();
  out.value[e] = x - mesh_->cell(cell).barycenter;
  out.grad[e] = Mat::Zero();
  for (int k = 0; k < d; ++k) out.grad[e](k, k) = 1.0;
  return out;
}

Vec EGSpace::value(const Eigen::VectorXd& coeffs, std::size_t cell, const Vec& x) const {
  const auto basis = eval_basis_unchecked(cell, x);
  const auto dofs = local_dofs(cell);
  Vec v = Vec::Zero();
  for (int i = 0; i < basis.size; ++i) v += coeffs[static_cast<Eigen::Index>(dofs[i])] * basis.value[i];
  return v;
}

Mat EGSpace::gradient(const Eigen::VectorXd& coeffs, std::size_t cell) const {
  const auto basis = eval_basis_unchecked(cell, mesh_->cell(cell).barycenter);
  const auto dofs = local_dofs(cell);
  Mat g = Mat::Zero();
  for (int i = 0; i < basis.size; ++i) g += coeffs[static_cast<Eigen::Index>(dofs[i])] * basis.grad[i];
  return g;
}

Eigen::VectorXd EGSpace::continuous_part(const Eigen::VectorXd& coeffs) const {
  Eigen::VectorXd out = coeffs;
  out.tail(static_cast<Eigen::Index>(n_enrichment_dofs())).setZero();
  return out;
}

Eigen::VectorXd EGSpace::enrichment_part(const Eigen::VectorXd& coeffs) const {
  Eigen::VectorXd out = coeffs;
  out.head(static_cast<Eigen::Index>(n_continuous_)).setZero();
  return out;
}

std::vector<std::size_t> EGSpace::boundary_continuous_dofs() const {
  std::vector<bool> on_boundary(mesh_->n_vertices(), false);
  for (const Face& f : mesh_->faces())
    if (f.is_boundary())
      for (int i = 0; i < dim(); ++i) on_boundary[f.vertices[i]] = true;
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < on_boundary.size(); ++v)
    if (on_boundary[v])
      for (int c = 0; c < dim(); ++c) out.push_back(continuous_dof(v, c));
  return out;
}

Eigen::VectorXd PressureSpace::weights() const {
  Eigen::VectorXd w(static_cast<Eigen::Index>(n_dofs()));
  for (std::size_t t = 0; t < n_dofs(); ++t) w[static_cast<Eigen::Index>(t)] = mesh_->cell(t).volume;
  return w;
}

double PressureSpace::mean(const Eigen::VectorXd& q) const {
  const Eigen::VectorXd w = weights();
  return w.dot(q) / w.sum();
}

Eigen::VectorXd PressureSpace::remove_mean(const Eigen::VectorXd& q) const {
  return q.array() - mean(q);
}

// ---------------------------------------------------------------------------

HdivSpace::HdivSpace(const Mesh& mesh) : mesh_(&mesh) {
  const int d = dim();
  const int nl = n_local();
  dual_.resize(mesh.n_cells());
  gram_.resize(mesh.n_cells());
  for (std::size_t t = 0; t < mesh.n_cells(); ++t) {
    const Cell& cell = mesh.cell(t);
    Eigen::MatrixXd moments = Eigen::MatrixXd::Zero(nl, nl);
    for (int lf = 0; lf <= d; ++lf) {
      const std::size_t fid = cell.faces[lf];
      const Vec& n = mesh.face(fid).normal;
      const MappedRule q = face_quadrature(mesh, fid, kFaceDegree);
      for (std::size_t p = 0; p < q.size(); ++p)
        for (int k = 0; k < d; ++k) {
          const double wk = q.weights[p] * test_function(k, q.bary[p]);
          for (int j = 0; j < nl; ++j) moments(lf * d + k, j) += wk * monomial(t, j, q.points[p]).dot(n);
        }
    }
    dual_[t] = moments.inverse();

    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d + 1, d + 1);
    const MappedRule q = cell_quadrature(mesh, t, kCellDegree);
    for (std::size_t p = 0; p < q.size(); ++p) {
      Eigen::VectorXd m(d + 1);
      m[0] = 1.0;
      const Vec r = (q.points[p] - cell.barycenter) / cell.diameter;
      for (int a = 0; a < d; ++a) m[a + 1] = r[a];
      gram += q.weights[p] * m * m.transpose();
    }
    gram_[t] = gram;
  }
}

std::array<std::size_t, kMaxHdivLocal> HdivSpace::local_dofs(std::size_t cell) const {
  std::array<std::size_t, kMaxHdivLocal> dofs{};
  const Cell& c = mesh_->cell(cell);
  const int d = dim();
  for (int lf = 0; lf <= d; ++lf)
    for (int k = 0; k < d; ++k) dofs[lf * d + k] = dof(c.faces[lf], k);
  return dofs;
}

double HdivSpace::test_function(int k, const std::array<double, kMaxVertsPerCell>& face_bary) const {
  if (k == 0) return 1.0;
  if (dim() == 2) return face_bary[1] - 0.5;
  return face_bary[k - 1] - 1.0 / 3.0;
}

double HdivSpace::test_function(std::size_t face, int k, const Vec& x) const {
  const Face& f = mesh_->face(face);
  std::array<double, kMaxVertsPerCell> lam{0.0, 0.0, 0.0, 0.0};
  const Vec& a = mesh_->vertex(f.vertices[0]);
  const Vec& b = mesh_->vertex(f.vertices[1]);
  if (dim() == 2) {
    const Vec t = b - a;
    lam[1] = (x - a).dot(t) / t.squaredNorm();
    lam[0] = 1.0 - lam[1];
  } else {
    const Vec& c = mesh_->vertex(f.vertices[2]);
    const Vec e1 = b - a, e2 = c - a, r = x - a;
    Eigen::Matrix2d g;
    g << e1.dot(e1), e1.dot(e2), e1.dot(e2), e2.dot(e2);
    const Eigen::Vector2d st = g.ldlt().solve(Eigen::Vector2d(r.dot(e1), r.dot(e2)));
    lam[1] = st[0];
    lam[2] = st[1];
    lam[0] = 1.0 - st[0] - st[1];
  }
  return test_function(k, lam);
}

Vec HdivSpace::monomial(std::size_t cell, int j, const Vec& x) const {
  const int d = dim();
  const int comp = j / (d + 1);
  const int a = j % (d + 1);
  Vec v = Vec::Zero();
  if (a == 0) {
    v[comp] = 1.0;
  } else {
    const Cell& c = mesh_->cell(cell);
    v[comp] = (x[a - 1] - c.barycenter[a - 1]) / c.diameter;
  }
  return v;
}

HdivValue HdivSpace::eval(std::size_t cell, std::span<const double> local_moments, const Vec& x) const {
  const int nl = n_local();
  if (static_cast<int>(local_moments.size()) != nl)
    throw std::invalid_argument("HdivSpace::eval: expected one moment per local dof");
  const int d = dim();
  Eigen::Map<const Eigen::VectorXd> m(local_moments.data(), nl);
  const Eigen::VectorXd alpha = dual_[cell] * m;
  HdivValue out;
  const double hT = mesh_->cell(cell).diameter;
  for (int j = 0; j < nl; ++j) out.value += alpha[j] * monomial(cell, j, x);
  for (int c = 0; c < d; ++c) out.divergence += alpha[c * (d + 1) + c + 1] / hT;
  return out;
}

HdivValue HdivSpace::eval_global(std::size_t cell, const Eigen::VectorXd& moments, const Vec& x) const {
  const auto dofs = local_dofs(cell);
  std::array<double, kMaxHdivLocal> local{};
  for (int i = 0; i < n_local(); ++i) local[i] = moments[static_cast<Eigen::Index>(dofs[i])];
  return eval(cell, std::span<const double>(local.data(), static_cast<std::size_t>(n_local())), x);
}

Eigen::Matrix<double, 3, Eigen::Dynamic> HdivSpace::basis_values(std::size_t cell, const Vec& x) const {
  const int nl = n_local();
  Eigen::Matrix<double, 3, Eigen::Dynamic> psi(3, nl);
  for (int j = 0; j < nl; ++j) psi.col(j) = monomial(cell, j, x);
  return psi * dual_[cell];
}

Eigen::MatrixXd HdivSpace::local_mass(std::size_t cell) const {
  const int d = dim();
  const int nl = n_local();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(nl, nl);
  for (int c = 0; c < d; ++c) g.block(c * (d + 1), c * (d + 1), d + 1, d + 1) = gram_[cell];
  return dual_[cell].transpose() * g * dual_[cell];
}

}  // namespace egb
