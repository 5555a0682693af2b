#include <cmath>

#include "doctest.h"
#include "support.hpp"

#include "egb/analysis.hpp"
#include "egb/solver.hpp"

using namespace egb;

namespace {

BrinkmanProblem manufactured_problem(const Mesh& m, const ManufacturedCase& mc, Method method) {
  BrinkmanProblem p;
  p.method = method;
  p.coeff = CoefficientField::uniform(m, mc.nu);
  p.f = mc.f;
  p.g = mc.g;
  return p;
}

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("zero data gives the zero solution") {
    for (int dim = 2; dim <= 3; ++dim)
      for (Method method : {Method::ST, Method::PR}) {
        const Mesh m = Mesh::build_structured(dim, 2);
        const Discretization disc(m);
        BrinkmanProblem p;
        p.method = method;
        p.coeff = CoefficientField::uniform(m, 1e-3);
        p.f = [](const Vec&) { return Vec::Zero(); };
        const DiscreteSolution s = solve_brinkman(disc, p);
        CHECK(s.u.norm() <= 1e-10);
        CHECK(s.p.norm() <= 1e-10);
      }
  }

  TEST_CASE("manufactured solves: zero-mean pressure, discrete divergence and residual") {
    for (int dim = 2; dim <= 3; ++dim)
      for (Method method : {Method::ST, Method::PR})
        for (BoundaryTreatment bt : {BoundaryTreatment::strong, BoundaryTreatment::nitsche}) {
          const Mesh m = Mesh::build_structured(dim, dim == 2 ? 6 : 2);
          const Discretization disc(m);
          const ManufacturedCase mc = manufactured(dim, 1e-2);
          BrinkmanProblem p = manufactured_problem(m, mc, method);
          p.boundary = bt;
          const DiscreteSolution s = solve_brinkman(disc, p);
          CHECK(s.residual <= kDefaultTolerance);
          CHECK(std::abs(disc.pressure().weights().dot(s.p)) <= 1e-10);

          const SparseMatrix B = assemble_b(disc.eg(), disc.pressure());
          const DirichletCorrection d =
              assemble_dirichlet(disc.eg(), disc.pressure(), mc.g, p.coeff, p.penalty, method);
          CHECK((B * s.u - d.pressure).cwiseAbs().maxCoeff() <= 1e-9);
          CHECK(std::abs(s.multiplier) <= 1e-9);

          if (bt == BoundaryTreatment::strong)
            for (std::size_t dof : disc.eg().boundary_continuous_dofs()) {
              const std::size_t v = dof / static_cast<std::size_t>(dim);
              CHECK(s.u[static_cast<Eigen::Index>(dof)] == mc.g(m.vertex(v))[static_cast<int>(dof % dim)]);
            }
        }
  }

  TEST_CASE("solution is linear in the data") {
    const Mesh m = Mesh::build_structured(2, 6);
    const Discretization disc(m);
    const ManufacturedCase mc = manufactured(2, 1e-3);
    BrinkmanProblem p = manufactured_problem(m, mc, Method::PR);
    const DiscreteSolution a = solve_brinkman(disc, p);
    p.f = [&](const Vec& x) -> Vec { return -2.5 * mc.f(x); };
    p.g = [&](const Vec& x) -> Vec { return -2.5 * mc.g(x); };
    const DiscreteSolution b = solve_brinkman(disc, p);
    CHECK((b.u + 2.5 * a.u).norm() <= 1e-9 * a.u.norm());
    CHECK((b.p + 2.5 * a.p).norm() <= 1e-9 * a.p.norm());
  }

  TEST_CASE("PR-EG is pressure robust: a gradient force gives zero velocity") {
    // phi is cubic so every quadrature involved is exact.
    const ScalarField phi = [](const Vec& x) { return 1e3 * (x[0] * x[0] * x[1] + x[1] * x[1] * x[1] - x[0]); };
    const VectorField grad = [](const Vec& x) {
      return Vec(1e3 * (2 * x[0] * x[1] - 1.0), 1e3 * (x[0] * x[0] + 3 * x[1] * x[1]), 0.0);
    };
    const Mesh m = Mesh::build_structured(2, 8);
    const Discretization disc(m);
    BrinkmanProblem p;
    p.coeff = CoefficientField::uniform(m, 1e-6);
    p.f = grad;
    p.method = Method::PR;
    const DiscreteSolution pr = solve_brinkman(disc, p);
    const Eigen::VectorXd p0 = project_p0(disc.pressure(), phi);
    CHECK(pr.u.cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((pr.p - p0).norm() <= 1e-9 * p0.norm());

    p.method = Method::ST;
    const DiscreteSolution st = solve_brinkman(disc, p);
    CHECK(st.u.cwiseAbs().maxCoeff() > 1e-2);
  }

  TEST_CASE("ST and PR systems coincide on zero-trace continuous fields") {
    for (int dim = 2; dim <= 3; ++dim) {
      const Mesh m = Mesh::build_structured(dim, dim == 2 ? 4 : 2);
      const Discretization disc(m);
      const ManufacturedCase mc = manufactured(dim, 1e-2);
      BrinkmanProblem p = manufactured_problem(m, mc, Method::ST);
      p.boundary = BoundaryTreatment::nitsche;
      const SaddlePointSystem st = assemble_system(disc, p);
      p.method = Method::PR;
      const SaddlePointSystem pr = assemble_system(disc, p);

      const EGSpace& eg = disc.eg();
      const auto n = static_cast<Eigen::Index>(eg.n_dofs());
      auto zero_trace = [&](unsigned seed) {
        Eigen::VectorXd v = eg.continuous_part(support::random_vector(n, seed));
        for (std::size_t d : eg.boundary_continuous_dofs()) v[static_cast<Eigen::Index>(d)] = 0.0;
        return v;
      };
      const Eigen::VectorXd v = zero_trace(1), w = zero_trace(2);
      const SparseMatrix Kst = st.matrix.topLeftCorner(n, n), Kpr = pr.matrix.topLeftCorner(n, n);
      CHECK(std::abs(v.dot(Kst * w) - v.dot(Kpr * w)) <= 1e-12 * std::abs(v.dot(Kst * w)));
      CHECK(std::abs(v.dot(st.rhs.head(n)) - v.dot(pr.rhs.head(n))) <= 1e-12 * std::max(1.0, std::abs(v.dot(st.rhs.head(n)))));
      CHECK((st.matrix.bottomRows(st.matrix.rows() - n) - pr.matrix.bottomRows(pr.matrix.rows() - n)).norm() == 0.0);
    }
  }

  TEST_CASE("direct and Schur-complement strategies agree") {
    for (double nu : {1.0, 1e-6}) {
      const Mesh m = Mesh::build_structured(2, 8);
      const Discretization disc(m);
      const ManufacturedCase mc = manufactured(2, nu);
      BrinkmanProblem p = manufactured_problem(m, mc, Method::PR);
      p.strategy = SolverStrategy::direct;
      const DiscreteSolution a = solve_brinkman(disc, p);
      p.strategy = SolverStrategy::schur;
      const DiscreteSolution b = solve_brinkman(disc, p);
      CHECK(a.factorization == "sparse-lu");
      CHECK(b.factorization.find("schur") != std::string::npos);
      CHECK(b.iterations > 0);
      CHECK((a.u - b.u).norm() <= 1e-8 * a.u.norm());
      CHECK((a.p - b.p).norm() <= 1e-8 * a.p.norm());
    }
  }

  TEST_CASE("bad inputs") {
    const Mesh m = Mesh::build_structured(2, 2);
    const Discretization disc(m);
    BrinkmanProblem p;
    p.coeff = CoefficientField::uniform(m, 1.0);
    p.f = [](const Vec&) { return Vec(1, 0, 0); };
    const SaddlePointSystem sys = assemble_system(disc, p);
    CHECK_THROWS_AS(solve(sys, 0.0), std::invalid_argument);
    SaddlePointSystem broken = sys;
    broken.rhs = Eigen::VectorXd::Ones(3);
    CHECK_THROWS_AS(solve(broken), std::invalid_argument);
    p.coeff.nu = -1.0;
    CHECK_THROWS(assemble_system(disc, p));
    CHECK(std::string(to_string(BoundaryTreatment::strong)) == "strong");
  }
}
