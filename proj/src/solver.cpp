#include "egb/solver.hpp"

#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

namespace egb {

namespace {
Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }
}  // namespace

SaddlePointSystem build_saddle_point(const SparseMatrix& K, const SparseMatrix& B,
                                     const Eigen::VectorXd& F, const Eigen::VectorXd& G,
                                     const Eigen::VectorXd& weights) {
  const Eigen::Index nu = K.rows(), np = B.rows();
  if (K.cols() != nu || B.cols() != nu || F.size() != nu || G.size() != np || weights.size() != np)
    throw std::invalid_argument("build_saddle_point: block sizes do not match");
  const Eigen::Index n = nu + np + 1;

  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(K.nonZeros() + 2 * B.nonZeros() + 2 * np));
  for (Eigen::Index k = 0; k < K.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(K, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  for (Eigen::Index k = 0; k < B.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(B, k); it; ++it) {
      t.emplace_back(nu + it.row(), it.col(), -it.value());
      t.emplace_back(it.col(), nu + it.row(), -it.value());
    }
  for (Eigen::Index i = 0; i < np; ++i) {
    t.emplace_back(nu + i, n - 1, weights[i]);
    t.emplace_back(n - 1, nu + i, weights[i]);
  }

  SaddlePointSystem sys;
  sys.matrix.resize(n, n);
  sys.matrix.setFromTriplets(t.begin(), t.end());
  sys.matrix.makeCompressed();
  sys.rhs = Eigen::VectorXd::Zero(n);
  sys.rhs.head(nu) = F;
  sys.rhs.segment(nu, np) = -G;
  sys.n_velocity = static_cast<std::size_t>(nu);
  sys.n_pressure = static_cast<std::size_t>(np);
  return sys;
}

namespace {


class DirectSolver {
public:
  explicit DirectSolver(const SparseMatrix& m) {
    lu_.compute(m);
    if (lu_.info() != Eigen::Success)
      throw SolverError("solve: factorization failed (singular system? check penalties and constraint)");
  }
  Eigen::VectorXd apply(const Eigen::VectorXd& r, int&) {
    Eigen::VectorXd x = lu_.solve(r);
    if (lu_.info() != Eigen::Success) throw SolverError("solve: back substitution failed");
    return x;
  }

private:
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
};

// Solves with the velocity block K. Incomplete-Cholesky CG is tried first;
// when it needs more than kMaxInnerIterations (viscous-dominated K), the
// solver switches to a sparse Cholesky factorization for good.
class VelocitySolver {
public:
  VelocitySolver(const SparseMatrix& K, double tol) : K_(&K) {
    cg_.setTolerance(tol);
    cg_.setMaxIterations(kMaxInnerIterations);
    cg_.compute(K);
    if (cg_.info() != Eigen::Success) use_factorization();
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) {
    if (!factored_) {
      Eigen::VectorXd x = cg_.solve(b);
      if (cg_.info() == Eigen::Success) return x;
      use_factorization();
    }
    return llt_.solve(b);
  }

  bool factored() const { return factored_; }

private:
  static constexpr int kMaxInnerIterations = 150;

  void use_factorization() {
    llt_.compute(*K_);
    if (llt_.info() != Eigen::Success) throw SolverError("solve: velocity block is not positive definite");
    factored_ = true;
  }

  const SparseMatrix* K_;
  bool factored_ = false;
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::IncompleteCholesky<double>> cg_;
  Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> llt_;
};

// Block elimination of
//   K u - B^T p = r1,  -B u + w l = r2,  w^T p = r3.
// Since B^T 1 = 0, l = 1^T r2 / 1^T w, and p solves S p = -r2 - B K^-1 r1 + w l
// with S = B K^-1 B^T, up to a constant fixed by w^T p = r3.
class SchurSolver {
public:
  SchurSolver(const SaddlePointSystem& sys, double cg_tol) : nu_(idx(sys.n_velocity)), np_(idx(sys.n_pressure)), cg_tol_(cg_tol) {
    const SparseMatrix& M = sys.matrix;
    K_ = M.topLeftCorner(nu_, nu_);
    Bt_ = -M.block(0, nu_, nu_, np_);
    w_ = M.col(nu_ + np_).segment(nu_, np_);
    kinv_.emplace(K_, cg_tol);

    const Eigen::VectorXd dinv = K_.diagonal().cwiseInverse();
    const SparseMatrix B = Bt_.transpose();
    SparseMatrix L = B * dinv.asDiagonal() * Bt_;
    const double alpha = 1e-8 * L.diagonal().mean() / w_.mean();
    SparseMatrix reg(np_, np_);
    std::vector<Eigen::Triplet<double>> t;
    for (Eigen::Index i = 0; i < np_; ++i) t.emplace_back(i, i, alpha * w_[i]);
    reg.setFromTriplets(t.begin(), t.end());
    L += reg;
    lap_.compute(L);
    if (lap_.info() != Eigen::Success) throw SolverError("solve: Schur preconditioner factorization failed");
    mass_scale_ = sys.viscosity;
  }

  bool factored() const { return kinv_->factored(); }

  Eigen::VectorXd apply(const Eigen::VectorXd& r, int& iterations) {
    const Eigen::VectorXd r1 = r.head(nu_), r2 = r.segment(nu_, np_);
    const double r3 = r[nu_ + np_];
    const double l = r2.sum() / w_.sum();
    const Eigen::VectorXd Kr1 = kinv_->solve(r1);
    Eigen::VectorXd b = -r2 - Bt_.transpose() * Kr1 + w_ * l;
    b.array() -= b.mean();
    Eigen::VectorXd p = pcg(b, iterations);
    p.array() += (r3 - w_.dot(p)) / w_.sum();
    Eigen::VectorXd x(r.size());
    x.head(nu_) = kinv_->solve(r1 + Bt_ * p);
    x.segment(nu_, np_) = p;
    x[nu_ + np_] = l;
    return x;
  }

private:
  Eigen::VectorXd schur(const Eigen::VectorXd& p) {
    Eigen::VectorXd y = Bt_.transpose() * kinv_->solve(Bt_ * p);
    y.array() -= y.mean();
    return y;
  }
  Eigen::VectorXd precondition(const Eigen::VectorXd& r) {
    Eigen::VectorXd z = lap_.solve(r);
    if (mass_scale_ > 0.0) z += mass_scale_ * r.cwiseQuotient(w_);
    z.array() -= z.mean();
    return z;
  }
  Eigen::VectorXd pcg(const Eigen::VectorXd& b, int& iterations) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(np_);
    const double bn = b.norm();
    if (bn == 0.0) return x;
    Eigen::VectorXd r = b, z = precondition(r), d = z;
    double rz = r.dot(z);
    const int max_it = 20 * static_cast<int>(std::sqrt(static_cast<double>(np_))) + 500;
    for (int k = 0; k < max_it; ++k) {
      const Eigen::VectorXd Sd = schur(d);
      const double alpha = rz / d.dot(Sd);
      x += alpha * d;
      r -= alpha * Sd;
      ++iterations;
      if (r.norm() <= cg_tol_ * bn) return x;
      z = precondition(r);
      const double rz_new = r.dot(z);
      d = z + (rz_new / rz) * d;
      rz = rz_new;
    }
    throw SolverError("solve: Schur-complement CG did not converge");
  }

  Eigen::Index nu_, np_;
  double cg_tol_;
  SparseMatrix K_, Bt_;
  Eigen::VectorXd w_;
  double mass_scale_ = 0.0;
  std::optional<VelocitySolver> kinv_;
  Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> lap_;
};

template <class Inner>
void refine(const SaddlePointSystem& system, Inner& inner, double tolerance, DiscreteSolution& sol,
            Eigen::VectorXd& x) {
  const double bnorm = system.rhs.norm();
  x = inner.apply(system.rhs, sol.iterations);
  if (!x.allFinite()) throw SolverError("solve: non-finite solution");
  Eigen::VectorXd r = system.rhs - system.matrix * x;
  sol.residual = r.norm() / bnorm;
  while (sol.residual > 0.01 * tolerance && sol.refinement_steps < 5) {
    const Eigen::VectorXd trial = x + inner.apply(r, sol.iterations);
    const Eigen::VectorXd rt = system.rhs - system.matrix * trial;
    ++sol.refinement_steps;
    if (!(rt.norm() < r.norm())) break;
    x = trial;
    r = rt;
    sol.residual = r.norm() / bnorm;
  }
}

}  // namespace

DiscreteSolution solve(const SaddlePointSystem& system, double tolerance, SolverStrategy strategy) {
  if (!(tolerance > 0.0)) throw std::invalid_argument("solve: tolerance must be positive");
  const Eigen::Index nu = idx(system.n_velocity), np = idx(system.n_pressure);
  if (system.matrix.rows() != nu + np + 1 || system.rhs.size() != nu + np + 1)
    throw std::invalid_argument("solve: system is not assembled consistently");

  DiscreteSolution sol;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(system.rhs.size());
  if (system.rhs.norm() > 0.0) {
    if (strategy == SolverStrategy::automatic)
      strategy = static_cast<std::size_t>(system.rhs.size()) <= kDirectLimit ? SolverStrategy::direct
                                                                             : SolverStrategy::schur;
    if (strategy == SolverStrategy::direct) {
      sol.factorization = "sparse-lu";
      DirectSolver inner(system.matrix);
      refine(system, inner, tolerance, sol, x);
    } else {
      SchurSolver inner(system, 1e-3 * tolerance);
      refine(system, inner, tolerance, sol, x);
      sol.factorization = inner.factored() ? "cholesky-schur-pcg" : "iccg-schur-pcg";
    }
    if (!(sol.residual <= tolerance))
      throw SolverError("solve: relative residual " + std::to_string(sol.residual) + " above tolerance " +
                        std::to_string(tolerance));
  } else {
    sol.factorization = "trivial";
  }

  sol.u = x.head(nu);
  sol.p = x.segment(nu, np);
  sol.multiplier = x[nu + np];
  return sol;
}

const char* to_string(BoundaryTreatment b) { return b == BoundaryTreatment::strong ? "strong" : "nitsche"; }

namespace {

// Fixes the listed velocity dofs to the given values, keeping K symmetric:
// their rows and columns become identity and the known values move to the
// right-hand side.
void fix_velocity_dofs(SparseMatrix& K, SparseMatrix& B, Eigen::VectorXd& F, Eigen::VectorXd& G,
                       const std::vector<std::size_t>& dofs, const Eigen::VectorXd& values) {
  std::vector<char> fixed(static_cast<std::size_t>(K.rows()), 0);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(K.rows());
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    fixed[dofs[i]] = 1;
    x[idx(dofs[i])] = values[idx(i)];
  }
  F -= K * x;
  G -= B * x;
  K.prune([&](Eigen::Index r, Eigen::Index c, double) { return !fixed[static_cast<std::size_t>(r)] && !fixed[static_cast<std::size_t>(c)]; });
  B.prune([&](Eigen::Index, Eigen::Index c, double) { return !fixed[static_cast<std::size_t>(c)]; });
  SparseMatrix I(K.rows(), K.cols());
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(dofs.size());
  for (std::size_t d : dofs) t.emplace_back(idx(d), idx(d), 1.0);
  I.setFromTriplets(t.begin(), t.end());
  K += I;
  for (std::size_t d : dofs) F[idx(d)] = x[idx(d)];
}

}  // namespace

Discretization::Discretization(const Mesh& mesh)
    : mesh_(&mesh), eg_(mesh), pressure_(mesh), hdiv_(mesh), R_(eg_, hdiv_) {}

SaddlePointSystem assemble_system(const Discretization& disc, const BrinkmanProblem& problem) {
  const Mesh& mesh = disc.mesh();
  problem.coeff.validate(mesh);
  const EGSpace& eg = disc.eg();

  SparseMatrix K = problem.coeff.nu * assemble_a(eg, problem.penalty.rho1);
  if (problem.method == Method::ST)
    K += assemble_c(eg, problem.coeff.sigma, problem.penalty.rho2);
  else
    K += assemble_c_tilde(eg, disc.reconstruction(), problem.coeff.sigma, problem.penalty.rho2);
  SparseMatrix B = assemble_b(eg, disc.pressure());

  Eigen::VectorXd F = Eigen::VectorXd::Zero(idx(eg.n_dofs()));
  if (problem.f) F = assemble_loads(eg, problem.f, &disc.reconstruction(), problem.method);
  Eigen::VectorXd G = Eigen::VectorXd::Zero(idx(disc.pressure().n_dofs()));
  if (problem.g) {
    const DirichletCorrection dc =
        assemble_dirichlet(eg, disc.pressure(), problem.g, problem.coeff, problem.penalty, problem.method);
    F += dc.velocity;
    G += dc.pressure;
  }
  if (problem.boundary == BoundaryTreatment::strong) {
    const std::vector<std::size_t> dofs = eg.boundary_continuous_dofs();
    Eigen::VectorXd values = Eigen::VectorXd::Zero(idx(dofs.size()));
    if (problem.g) {
      const auto d = static_cast<std::size_t>(eg.dim());
      for (std::size_t i = 0; i < dofs.size(); ++i)
        values[idx(i)] = problem.g(mesh.vertex(dofs[i] / d))[static_cast<Eigen::Index>(dofs[i] % d)];
    }
    fix_velocity_dofs(K, B, F, G, dofs, values);
  }
  SaddlePointSystem sys = build_saddle_point(K, B, F, G, disc.pressure().weights());
  sys.viscosity = problem.coeff.nu;
  return sys;
}

DiscreteSolution solve_brinkman(const Discretization& disc, const BrinkmanProblem& problem) {
  return solve(assemble_system(disc, problem), problem.tolerance, problem.strategy);
}

}  // namespace egb
