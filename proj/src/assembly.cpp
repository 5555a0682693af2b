#include "egb/assembly.hpp"

#include <stdexcept>

#include "egb/quadrature.hpp"

namespace egb {

const char* to_string(Method m) { return m == Method::ST ? "ST" : "PR"; }

CoefficientField CoefficientField::uniform(const Mesh& mesh, double nu, double sigma) {
  CoefficientField c;
  c.nu = nu;
  c.sigma = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(mesh.n_cells()), sigma);
  return c;
}

void CoefficientField::validate(const Mesh& mesh) const {
  if (!(nu > 0.0)) throw std::invalid_argument("CoefficientField: nu must be positive");
  if (sigma.size() != static_cast<Eigen::Index>(mesh.n_cells()))
    throw std::invalid_argument("CoefficientField: sigma needs one value per cell");
  if (!(sigma.array() > 0.0).all())
    throw std::invalid_argument("CoefficientField: sigma must be positive");
}

double face_sigma(const Mesh& mesh, const Eigen::VectorXd& sigma, std::size_t face) {
  const Face& f = mesh.face(face);
  const double sp = sigma[static_cast<Eigen::Index>(f.plus_cell)];
  if (f.is_boundary()) return sp;
  return 0.5 * (sp + sigma[static_cast<Eigen::Index>(*f.minus_cell)]);
}

SparseAccumulator::SparseAccumulator(Eigen::Index rows, Eigen::Index cols, std::size_t chunk)
    : result_(rows, cols), chunk_(chunk) {
  pending_.reserve(chunk_);
}

void SparseAccumulator::add(Eigen::Index row, Eigen::Index col, double value) {
  pending_.emplace_back(row, col, value);
  if (pending_.size() >= chunk_) flush();
}

void SparseAccumulator::flush() {
  if (pending_.empty()) return;
  SparseMatrix part(result_.rows(), result_.cols());
  part.setFromTriplets(pending_.begin(), pending_.end());
  if (result_.nonZeros() == 0)
    result_ = std::move(part);
  else
    result_ = result_ + part;
  pending_.clear();
}

SparseMatrix SparseAccumulator::finish() {
  flush();
  result_.makeCompressed();
  return std::move(result_);
}

namespace {

/// Union of the EG dofs of the one or two cells adjacent to a face.
struct FaceStencil {
  int n_sides = 0;
  std::array<TraceSide, 2> sides{};
  int size = 0;
  std::array<std::size_t, 2 * kMaxEGLocal> dofs{};
  std::array<std::array<int, kMaxEGLocal>, 2> slot{};
};

FaceStencil make_stencil(const EGSpace& eg, std::size_t face) {
  const Mesh& mesh = eg.mesh();
  FaceStencil s;
  s.sides[0] = mesh.trace(face, Side::plus);
  s.n_sides = 1;
  if (!mesh.face(face).is_boundary()) {
    s.sides[1] = mesh.trace(face, Side::minus);
    s.n_sides = 2;
  }
  for (int side = 0; side < s.n_sides; ++side) {
    const auto local = eg.local_dofs(s.sides[side].cell);
    for (int i = 0; i < eg.n_local(); ++i) {
      int found = -1;
      for (int u = 0; u < s.size; ++u)
        if (s.dofs[u] == local[i]) {
          found = u;
          break;
        }
      if (found < 0) {
        found = s.size++;
        s.dofs[found] = local[i];
      }
      s.slot[side][i] = found;
    }
  }
  return s;
}

/// Jumps [[phi]] and averaged normal gradients {grad phi} n_e of every
/// stencil function at one face point.
struct FaceTraces {
  std::array<Vec, 2 * kMaxEGLocal> jump;
  std::array<Vec, 2 * kMaxEGLocal> avg_grad_n;
};

FaceTraces face_traces(const EGSpace& eg, const FaceStencil& s, const Vec& x, const Vec& n) {
  FaceTraces t;
  for (int u = 0; u < s.size; ++u) {
    t.jump[u] = Vec::Zero();
    t.avg_grad_n[u] = Vec::Zero();
  }
  for (int side = 0; side < s.n_sides; ++side) {
    const TraceSide& ts = s.sides[side];
    const LocalBasis b = eg.eval_basis_unchecked(ts.cell, x);
    for (int i = 0; i < b.size; ++i) {
      const int u = s.slot[side][i];
      t.jump[u] += ts.jump_sign * b.value[i];
      t.avg_grad_n[u] += ts.avg_weight * (b.grad[i] * n);
    }
  }
  return t;
}

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw std::invalid_argument(what);
}

}  // namespace

SparseMatrix assemble_a(const EGSpace& eg, double rho1) {
  require_positive(rho1, "assemble_a: rho1 must be positive");
  const Mesh& mesh = eg.mesh();
  const int nl = eg.n_local();
  SparseAccumulator acc(idx(eg.n_dofs()), idx(eg.n_dofs()));

  for (std::size_t t = 0; t < mesh.n_cells(); ++t) {
    // all local gradients are constant on the cell
    const LocalBasis b = eg.eval_basis_unchecked(t, mesh.cell(t).barycenter);
    const auto dofs = eg.local_dofs(t);
    const double vol = mesh.cell(t).volume;
    for (int i = 0; i < nl; ++i)
      for (int j = 0; j < nl; ++j) {
        const double v = vol * (b.grad[i].array() * b.grad[j].array()).sum();
        if (v != 0.0) acc.add(idx(dofs[i]), idx(dofs[j]), v);
      }
  }

  for (std::size_t f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.face(f);
    const FaceStencil s = make_stencil(eg, f);
    const MappedRule q = face_quadrature(mesh, f, kFaceDegree);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(s.size, s.size);
    for (std::size_t p = 0; p < q.size(); ++p) {
      const FaceTraces tr = face_traces(eg, s, q.points[p], face.normal);
      const double w = q.weights[p];
      for (int i = 0; i < s.size; ++i)
        for (int j = 0; j < s.size; ++j)
          local(i, j) += w * (-tr.avg_grad_n[j].dot(tr.jump[i]) - tr.avg_grad_n[i].dot(tr.jump[j]) +
                              rho1 / face.h * tr.jump[i].dot(tr.jump[j]));
    }
    for (int i = 0; i < s.size; ++i)
      for (int j = 0; j < s.size; ++j)
        if (local(i, j) != 0.0) acc.add(idx(s.dofs[i]), idx(s.dofs[j]), local(i, j));
  }
  return acc.finish();
}

SparseMatrix assemble_jump_penalty(const EGSpace& eg, const Eigen::VectorXd& sigma, double rho2) {
  require_positive(rho2, "assemble_jump_penalty: rho2 must be positive");
  const Mesh& mesh = eg.mesh();
  if (sigma.size() != idx(mesh.n_cells()))
    throw std::invalid_argument("assemble_jump_penalty: sigma needs one value per cell");
  SparseAccumulator acc(idx(eg.n_dofs()), idx(eg.n_dofs()));
  for (std::size_t f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.face(f);
    const FaceStencil s = make_stencil(eg, f);
    const MappedRule q = face_quadrature(mesh, f, kFaceDegree);
    const double scale = rho2 * face.h * face_sigma(mesh, sigma, f);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(s.size, s.size);
    for (std::size_t p = 0; p < q.size(); ++p) {
      const FaceTraces tr = face_traces(eg, s, q.points[p], face.normal);
      for (int i = 0; i < s.size; ++i)
        for (int j = 0; j < s.size; ++j) local(i, j) += q.weights[p] * scale * tr.jump[i].dot(tr.jump[j]);
    }
    for (int i = 0; i < s.size; ++i)
      for (int j = 0; j < s.size; ++j)
        if (local(i, j) != 0.0) acc.add(idx(s.dofs[i]), idx(s.dofs[j]), local(i, j));
  }
  return acc.finish();
}

SparseMatrix assemble_c(const EGSpace& eg, const Eigen::VectorXd& sigma, double rho2) {
  const Mesh& mesh = eg.mesh();
  if (sigma.size() != idx(mesh.n_cells()) || !(sigma.array() > 0.0).all())
    throw std::invalid_argument("assemble_c: sigma must be positive with one value per cell");
  const int nl = eg.n_local();
  SparseAccumulator acc(idx(eg.n_dofs()), idx(eg.n_dofs()));
  for (std::size_t t = 0; t < mesh.n_cells(); ++t) {
    const MappedRule q = cell_quadrature(mesh, t, kCellDegree);
    const auto dofs = eg.local_dofs(t);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(nl, nl);
    for (std::size_t p = 0; p < q.size(); ++p) {
      const LocalBasis b = eg.eval_basis_unchecked(t, q.points[p]);
      for (int i = 0; i < nl; ++i)
        for (int j = 0; j < nl; ++j) local(i, j) += q.weights[p] * b.value[i].dot(b.value[j]);
    }
    local *= sigma[idx(t)];
    for (int i = 0; i < nl; ++i)
      for (int j = 0; j < nl; ++j)
        if (local(i, j) != 0.0) acc.add(idx(dofs[i]), idx(dofs[j]), local(i, j));
  }
  SparseMatrix mass = acc.finish();
  return mass + assemble_jump_penalty(eg, sigma, rho2);
}

SparseMatrix assemble_hdiv_mass(const HdivSpace& hdiv, const Eigen::VectorXd& sigma) {
  const Mesh& mesh = hdiv.mesh();
  if (sigma.size() != idx(mesh.n_cells()))
    throw std::invalid_argument("assemble_hdiv_mass: sigma needs one value per cell");
  const int nl = hdiv.n_local();
  SparseAccumulator acc(idx(hdiv.n_dofs()), idx(hdiv.n_dofs()));
  for (std::size_t t = 0; t < mesh.n_cells(); ++t) {
    const Eigen::MatrixXd local = sigma[idx(t)] * hdiv.local_mass(t);
    const auto dofs = hdiv.local_dofs(t);
    for (int i = 0; i < nl; ++i)
      for (int j = 0; j < nl; ++j) acc.add(idx(dofs[i]), idx(dofs[j]), local(i, j));
  }
  return acc.finish();
}

SparseMatrix assemble_c_tilde(const EGSpace& eg, const ReconstructionOperator& R,
                              const Eigen::VectorXd& sigma, double rho2) {
  if (&R.eg_space() != &eg)
    throw std::invalid_argument("assemble_c_tilde: reconstruction built on a different space");
  if (sigma.size() != idx(eg.mesh().n_cells()) || !(sigma.array() > 0.0).all())
    throw std::invalid_argument("assemble_c_tilde: sigma must be positive with one value per cell");
  const SparseMatrix mass = assemble_hdiv_mass(R.hdiv_space(), sigma);
  const SparseMatrix& r = R.matrix();
  const SparseMatrix rt = r.transpose();
  const SparseMatrix mr = mass * r;
  SparseMatrix ct = rt * mr;
  return ct + assemble_jump_penalty(eg, sigma, rho2);
}

SparseMatrix assemble_b(const EGSpace& eg, const PressureSpace& pressure) {
  const Mesh& mesh = eg.mesh();
  if (&pressure.mesh() != &mesh)
    throw std::invalid_argument("assemble_b: spaces live on different meshes");
  const int nl = eg.n_local();
  SparseAccumulator acc(idx(pressure.n_dofs()), idx(eg.n_dofs()));
  for (std::size_t t = 0; t < mesh.n_cells(); ++t) {
    const LocalBasis b = eg.eval_basis_unchecked(t, mesh.cell(t).barycenter);
    const auto dofs = eg.local_dofs(t);
    for (int i = 0; i < nl; ++i) {
      const double v = mesh.cell(t).volume * b.grad[i].trace();
      if (v != 0.0) acc.add(idx(t), idx(dofs[i]), v);
    }
  }
  for (std::size_t f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.face(f);
    const FaceStencil s = make_stencil(eg, f);
    const MappedRule q = face_quadrature(mesh, f, kFaceDegree);
    std::array<double, 2 * kMaxEGLocal> jn{};
    for (std::size_t p = 0; p < q.size(); ++p) {
      const FaceTraces tr = face_traces(eg, s, q.points[p], face.normal);
      for (int u = 0; u < s.size; ++u) jn[u] += q.weights[p] * tr.jump[u].dot(face.normal);
    }
    // -<[[w]].n_e, {q}> with q the indicator of each adjacent cell
    for (int side = 0; side < s.n_sides; ++side) {
      const TraceSide& ts = s.sides[side];
      for (int u = 0; u < s.size; ++u)
        if (jn[u] != 0.0) acc.add(idx(ts.cell), idx(s.dofs[u]), -ts.avg_weight * jn[u]);
    }
  }
  return acc.finish();
}

Eigen::VectorXd assemble_hdiv_load(const HdivSpace& hdiv, const VectorField& f) {
  const Mesh& mesh = hdiv.mesh();
  Eigen::VectorXd load = Eigen::VectorXd::Zero(idx(hdiv.n_dofs()));
  const int nl = hdiv.n_local();
  for (std::size_t t = 0; t < mesh.n_cells(); ++t) {
    const MappedRule q = cell_quadrature(mesh, t, error_degree(mesh.dim()));
    const auto dofs = hdiv.local_dofs(t);
    for (std::size_t p = 0; p < q.size(); ++p) {
      const Vec fx = f(q.points[p]);
      const auto psi = hdiv.basis_values(t, q.points[p]);
      for (int i = 0; i < nl; ++i) load[idx(dofs[i])] += q.weights[p] * fx.dot(psi.col(i));
    }
  }
  return load;
}

Eigen::VectorXd assemble_loads(const EGSpace& eg, const VectorField& f,
                               const ReconstructionOperator* R, Method method) {
  if (method == Method::PR) {
    if (R == nullptr) throw std::invalid_argument("assemble_loads: PR loads need the reconstruction");
    if (&R->eg_space() != &eg)
      throw std::invalid_argument("assemble_loads: reconstruction built on a different space");
    return R->matrix().transpose() * assemble_hdiv_load(R->hdiv_space(), f);
  }
  const Mesh& mesh = eg.mesh();
  Eigen::VectorXd load = Eigen::VectorXd::Zero(idx(eg.n_dofs()));
  for (std::size_t t = 0; t < mesh.n_cells(); ++t) {
    const MappedRule q = cell_quadrature(mesh, t, error_degree(mesh.dim()));
    const auto dofs = eg.local_dofs(t);
    for (std::size_t p = 0; p < q.size(); ++p) {
      const Vec fx = f(q.points[p]);
      const LocalBasis b = eg.eval_basis_unchecked(t, q.points[p]);
      for (int i = 0; i < b.size; ++i) load[idx(dofs[i])] += q.weights[p] * fx.dot(b.value[i]);
    }
  }
  return load;
}

DirichletCorrection assemble_dirichlet(const EGSpace& eg, const PressureSpace& pressure,
                                       const VectorField& g, const CoefficientField& coeff,
                                       const Penalty& penalty, Method /*method*/) {
  const Mesh& mesh = eg.mesh();
  coeff.validate(mesh);
  DirichletCorrection out;
  out.velocity = Eigen::VectorXd::Zero(idx(eg.n_dofs()));
  out.pressure = Eigen::VectorXd::Zero(idx(pressure.n_dofs()));
  for (std::size_t f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.face(f);
    if (!face.is_boundary()) continue;
    const std::size_t t = face.plus_cell;
    const auto dofs = eg.local_dofs(t);
    const MappedRule q = face_quadrature(mesh, f, error_degree(mesh.dim()));
    const double sig = face_sigma(mesh, coeff.sigma, f);
    for (std::size_t p = 0; p < q.size(); ++p) {
      const Vec gx = g(q.points[p]);
      const double w = q.weights[p];
      const LocalBasis b = eg.eval_basis_unchecked(t, q.points[p]);
      for (int i = 0; i < b.size; ++i) {
        const double visc = -(b.grad[i] * face.normal).dot(gx) + penalty.rho1 / face.h * b.value[i].dot(gx);
        const double reac = penalty.rho2 * face.h * sig * b.value[i].dot(gx);
        out.velocity[idx(dofs[i])] += w * (coeff.nu * visc + reac);
      }
      out.pressure[idx(t)] -= w * gx.dot(face.normal);
    }
  }
  return out;
}

FormMatrices assemble_forms(const EGSpace& eg, const PressureSpace& pressure,
                            const ReconstructionOperator* R, const Eigen::VectorXd& sigma,
                            const Penalty& penalty) {
  FormMatrices m;
  m.penalty = penalty;
  m.A = assemble_a(eg, penalty.rho1);
  m.C = assemble_c(eg, sigma, penalty.rho2);
  if (R != nullptr) m.Ctilde = assemble_c_tilde(eg, *R, sigma, penalty.rho2);
  m.B = assemble_b(eg, pressure);
  return m;
}

}  // namespace egb
