#include "egb/analysis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "egb/quadrature.hpp"

namespace egb {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

struct BrokenParts {
  double grad2 = 0.0;
  double l2 = 0.0;
  double jump_inv2 = 0.0;
  double jump_dir2 = 0.0;
  double jump_h2 = 0.0;
};

// Broken H1/L2 parts of (u - v) for a discrete v; u may be empty (zero).
BrokenParts broken_parts(const EGSpace& eg, const Eigen::VectorXd& v, const VectorField& u,
                         const TensorField& grad_u) {
  const Mesh& mesh = eg.mesh();
  const int deg = error_degree(mesh.dim());
  BrokenParts out;
  for (std::size_t t = 0; t < mesh.n_cells(); ++t) {
    const Mat gv = eg.gradient(v, t);
    const MappedRule q = cell_quadrature(mesh, t, deg);
    for (std::size_t k = 0; k < q.size(); ++k) {
      const Vec& x = q.points[k];
      Vec e = -eg.value(v, t, x);
      Mat ge = -gv;
      if (u) e += u(x);
      if (grad_u) ge += grad_u(x);
      out.l2 += q.weights[k] * e.squaredNorm();
      out.grad2 += q.weights[k] * ge.squaredNorm();
    }
  }
  for (std::size_t fi = 0; fi < mesh.n_faces(); ++fi) {
    const Face& f = mesh.face(fi);
    const MappedRule q = face_quadrature(mesh, fi, deg);
    double j2 = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) {
      const Vec& x = q.points[k];
      Vec jump = -eg.value(v, f.plus_cell, x);
      if (f.is_boundary()) {
        if (u) jump += u(x);
      } else {
        jump += eg.value(v, *f.minus_cell, x);
      }
      j2 += q.weights[k] * jump.squaredNorm();
    }
    out.jump_inv2 += j2 / f.h;
    out.jump_dir2 += j2 * f.h;
    out.jump_h2 += j2 * f.h * f.h;
  }
  return out;
}

double reconstruction_l2_squared(const Discretization& disc, const Eigen::VectorXd& v) {
  const Mesh& mesh = disc.mesh();
  const Eigen::VectorXd m = disc.reconstruction().apply(v);
  const int deg = error_degree(mesh.dim());
  double s = 0.0;
  for (std::size_t t = 0; t < mesh.n_cells(); ++t) {
    const MappedRule q = cell_quadrature(mesh, t, deg);
    for (std::size_t k = 0; k < q.size(); ++k)
      s += q.weights[k] * disc.hdiv().eval_global(t, m, q.points[k]).value.squaredNorm();
  }
  return s;
}

}  // namespace

Eigen::VectorXd interpolate_pi_h(const EGSpace& eg, const VectorField& w) {
  const Mesh& mesh = eg.mesh();
  const int d = mesh.dim();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(idx(eg.n_dofs()));
  for (std::size_t v = 0; v < mesh.n_vertices(); ++v) {
    const Vec wv = w(mesh.vertex(v));
    for (int comp = 0; comp < d; ++comp) c[idx(eg.continuous_dof(v, comp))] = wv[comp];
  }
  const int deg = error_degree(d);
  for (std::size_t t = 0; t < mesh.n_cells(); ++t) {
    const Cell& cell = mesh.cell(t);
    double flux = 0.0;
    for (int lf = 0; lf < d + 1; ++lf) {
      const Vec n = mesh.outward_normal(t, lf);
      const MappedRule q = face_quadrature(mesh, cell.faces[lf], deg);
      for (std::size_t k = 0; k < q.size(); ++k)
        flux += q.weights[k] * (w(q.points[k]) - eg.value(c, t, q.points[k])).dot(n);
    }
    c[idx(eg.enrichment_dof(t))] = flux / (d * cell.volume);
  }
  return c;
}

Eigen::VectorXd project_p0(const PressureSpace& pressure, const ScalarField& p) {
  const Mesh& mesh = pressure.mesh();
  const int deg = error_degree(mesh.dim());
  Eigen::VectorXd q(idx(mesh.n_cells()));
  for (std::size_t t = 0; t < mesh.n_cells(); ++t) {
    const MappedRule r = cell_quadrature(mesh, t, deg);
    double s = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) s += r.weights[k] * p(r.points[k]);
    q[idx(t)] = s / mesh.cell(t).volume;
  }
  return pressure.remove_mean(q);
}

ErrorReport compute_errors(const Discretization& disc, const Eigen::VectorXd& u_h,
                           const Eigen::VectorXd& p_h, const ExactSolution& exact, double nu,
                           const Penalty& penalty, bool with_discrete) {
  const Mesh& mesh = disc.mesh();
  const EGSpace& eg = disc.eg();
  if (u_h.size() != idx(eg.n_dofs()) || p_h.size() != idx(mesh.n_cells()))
    throw std::invalid_argument("compute_errors: coefficient vectors do not match the mesh");

  ErrorReport r;
  r.h = 1.0 / mesh.subdivisions();
  r.nu = nu;
  r.rho1 = penalty.rho1;
  r.rho2 = penalty.rho2;

  const BrokenParts b = broken_parts(eg, u_h, exact.velocity, exact.velocity_gradient);
  r.grad_u = std::sqrt(b.grad2);
  r.jump_inv = std::sqrt(b.jump_inv2);
  r.jump_dir = std::sqrt(b.jump_dir2);
  r.l2_u = std::sqrt(b.l2);
  const double enorm2 = b.grad2 + penalty.rho1 * b.jump_inv2;
  r.enorm_err = std::sqrt(enorm2);
  r.scaled_h1 = std::sqrt(nu) * r.enorm_err;
  r.energy = std::sqrt(nu * enorm2 + b.l2 + penalty.rho2 * b.jump_dir2);
  r.energy_hjump = std::sqrt(nu * enorm2 + b.l2 + penalty.rho2 * b.jump_h2);

  if (with_discrete) {
    const Eigen::VectorXd diff = interpolate_pi_h(eg, exact.velocity) - u_h;
    const BrokenParts bd = broken_parts(eg, diff, {}, {});
    const double common = nu * (bd.grad2 + penalty.rho1 * bd.jump_inv2) + penalty.rho2 * bd.jump_dir2;
    r.energy_pi = std::sqrt(common + bd.l2);
    r.energy_R = std::sqrt(common + reconstruction_l2_squared(disc, diff));
  }

  // Pressure: exact p shifted to zero mean, compared with the zero-mean p_h.
  const int deg = error_degree(mesh.dim());
  double pint = 0.0, vol = 0.0;
  std::vector<MappedRule> rules;
  rules.reserve(mesh.n_cells());
  for (std::size_t t = 0; t < mesh.n_cells(); ++t) {
    rules.push_back(cell_quadrature(mesh, t, deg));
    for (std::size_t k = 0; k < rules[t].size(); ++k) pint += rules[t].weights[k] * exact.pressure(rules[t].points[k]);
    vol += mesh.cell(t).volume;
  }
  const double pmean = pint / vol;
  double p0 = 0.0, tot = 0.0;
  for (std::size_t t = 0; t < mesh.n_cells(); ++t) {
    double cell_int = 0.0;
    for (std::size_t k = 0; k < rules[t].size(); ++k) {
      const double pv = exact.pressure(rules[t].points[k]) - pmean;
      cell_int += rules[t].weights[k] * pv;
      const double e = pv - p_h[idx(t)];
      tot += rules[t].weights[k] * e * e;
    }
    const double e0 = cell_int / mesh.cell(t).volume - p_h[idx(t)];
    p0 += mesh.cell(t).volume * e0 * e0;
  }
  r.p0_p = std::sqrt(p0);
  r.total_p = std::sqrt(tot);
  return r;
}

const char* to_string(ErrorColumn c) {
  switch (c) {
    case ErrorColumn::energy: return "energy";
    case ErrorColumn::scaled_h1: return "scaled_h1";
    case ErrorColumn::l2_u: return "l2_u";
    case ErrorColumn::p0_p: return "p0_p";
    case ErrorColumn::total_p: return "total_p";
    case ErrorColumn::enorm: return "enorm";
    case ErrorColumn::energy_pi: return "energy_pi";
    case ErrorColumn::energy_R: return "energy_R";
    case ErrorColumn::energy_hjump: return "energy_hjump";
  }
  return "?";
}

double column_value(const ErrorReport& r, ErrorColumn c) {
  switch (c) {
    case ErrorColumn::energy: return r.energy;
    case ErrorColumn::scaled_h1: return r.scaled_h1;
    case ErrorColumn::l2_u: return r.l2_u;
    case ErrorColumn::p0_p: return r.p0_p;
    case ErrorColumn::total_p: return r.total_p;
    case ErrorColumn::enorm: return r.enorm_err;
    case ErrorColumn::energy_pi:
      if (!r.energy_pi) throw std::invalid_argument("column_value: report has no energy_pi");
      return *r.energy_pi;
    case ErrorColumn::energy_R:
      if (!r.energy_R) throw std::invalid_argument("column_value: report has no energy_R");
      return *r.energy_R;
    case ErrorColumn::energy_hjump: return r.energy_hjump;
  }
  throw std::invalid_argument("column_value: unknown column");
}

std::vector<Order> convergence_orders(const std::vector<double>& errors) {
  std::vector<Order> out;
  for (std::size_t i = 1; i < errors.size(); ++i) {
    Order o;
    if (!(errors[i - 1] > 0.0) || !(errors[i] > 0.0)) {
      o.exact = true;
      o.value = std::numeric_limits<double>::quiet_NaN();
    } else {
      o.value = std::log2(errors[i - 1] / errors[i]);
    }
    out.push_back(o);
  }
  return out;
}

std::vector<Order> convergence_orders(const std::vector<ErrorReport>& reports, ErrorColumn c) {
  if (reports.size() < 2) throw std::invalid_argument("convergence_orders: need at least two reports");
  std::vector<double> e;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (i > 0 && std::abs(reports[i - 1].h / reports[i].h - 2.0) > 1e-9)
      throw std::invalid_argument("convergence_orders: h must halve between consecutive reports");
    e.push_back(column_value(reports[i], c));
  }
  return convergence_orders(e);
}

double error_profile_reference(double nu, int dim, ProfileQuantity q, Method m) {
  if (!(nu >= 0.0)) throw std::invalid_argument("error_profile_reference: nu must be nonnegative");
  const double s = std::sqrt(nu);
  if (dim == 2) {
    const double h = 1.0 / 32.0;
    if (q == ProfileQuantity::velocity)
      return m == Method::ST ? 0.1 * h * s + 0.3 * h / std::sqrt(nu + 3.0 * h * h) + 0.4 * h
                             : 0.8 * h * s + 0.05 * h;
    return m == Method::ST ? 2.0 * h * nu + 3.0 * h * s + 0.3 * h
                           : 0.5 * h * nu + 0.01 * h * s + 0.01 * h * h;
  }
  if (dim == 3) {
    const double h = 1.0 / 16.0;
    if (q == ProfileQuantity::velocity)
      return m == Method::ST ? 0.1 * h * s + h / std::sqrt(nu + 3.0 * h * h) + 9.0 * h
                             : 6.0 * h * s + 0.25 * h;
    return m == Method::ST ? 1.5 * h * nu + h * s + 2.5 * h
                           : 2.0 * h * nu + 0.02 * h * s + 0.2 * h * h;
  }
  throw std::invalid_argument("error_profile_reference: dim must be 2 or 3");
}

double inf_sup_constant(const SparseMatrix& B, const SparseMatrix& X, const Eigen::VectorXd& cell_volumes) {
  const Eigen::Index np = B.rows();
  if (X.rows() != B.cols() || X.cols() != B.cols() || cell_volumes.size() != np)
    throw std::invalid_argument("inf_sup_constant: sizes do not match");
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(X);
  if (ldlt.info() != Eigen::Success) throw std::invalid_argument("inf_sup_constant: X is not SPD");
  const Eigen::MatrixXd Bt = Eigen::MatrixXd(B.transpose());
  const Eigen::MatrixXd XiBt = ldlt.solve(Bt);
  // S = B X^-1 B^T, scaled by the pressure mass M = diag(|T|).
  const Eigen::VectorXd is = cell_volumes.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd S = is.asDiagonal() * (Eigen::MatrixXd(B) * XiBt) * is.asDiagonal();
  // Restrict to the zero-mean subspace: (M^{1/2} 1) is orthogonal to it.
  Eigen::VectorXd w = cell_volumes.cwiseSqrt();
  w.normalize();
  const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(np, np) - w * w.transpose();
  S = P * S * P;
  S = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  // The smallest eigenvalue belongs to w itself (it is 0 after projection).
  if (np < 2) return 0.0;
  return std::sqrt(std::max(0.0, es.eigenvalues()[1]));
}

}  // namespace egb
