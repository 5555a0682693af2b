#include <cmath>

#include "doctest.h"
#include "oracle.hpp"

#include "egb/quadrature.hpp"

using namespace egb;

namespace {

double fact(int n) { return oracle::factorial(n); }

// Integral of prod x_i^{a_i} over the reference simplex.
double monomial_integral(const std::array<int, 3>& a, int dim) {
  double num = 1.0;
  int s = 0;
  for (int i = 0; i < dim; ++i) {
    num *= fact(a[i]);
    s += a[i];
  }
  return num / fact(s + dim);
}

}  // namespace

TEST_SUITE("quadrature") {
  TEST_CASE("gauss-legendre integrates polynomials of degree 2n-1 on [0,1]") {
    for (int n = 1; n <= 6; ++n) {
      const ReferenceRule r = gauss_legendre(n);
      for (int k = 0; k <= 2 * n - 1; ++k) {
        double q = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) q += r.weights[i] * std::pow(r.points[i][0], k);
        CHECK(q == doctest::Approx(1.0 / (k + 1)).epsilon(1e-14));
      }
    }
    CHECK_THROWS(gauss_legendre(0));
  }

  TEST_CASE("simplex rules are exact up to their degree with positive weights") {
    for (int dim = 1; dim <= 3; ++dim)
      for (int deg = 0; deg <= 8; ++deg) {
        const ReferenceRule& r = simplex_rule(dim, deg);
        double wsum = 0.0;
        for (double w : r.weights) {
          CHECK(w > 0.0);
          wsum += w;
        }
        CHECK(wsum == doctest::Approx(1.0 / fact(dim)).epsilon(1e-14));
        for (int a = 0; a <= deg; ++a)
          for (int b = 0; b <= (dim > 1 ? deg - a : 0); ++b)
            for (int c = 0; c <= (dim > 2 ? deg - a - b : 0); ++c) {
              const std::array<int, 3> e{a, b, c};
              double q = 0.0;
              for (std::size_t i = 0; i < r.size(); ++i) {
                double v = r.weights[i];
                for (int k = 0; k < dim; ++k) v *= std::pow(r.points[i][k], e[k]);
                q += v;
              }
              CHECK(q == doctest::Approx(monomial_integral(e, dim)).epsilon(1e-13));
            }
      }
    CHECK_THROWS(simplex_rule(4, 2));
    CHECK_THROWS(simplex_rule(2, -1));
  }

  TEST_CASE("independent simplex rule reproduces the monomial formula") {
    // Sanity check of the test oracle itself.
    for (int dim = 1; dim <= 3; ++dim) {
      const auto rule = oracle::grundmann_moeller(dim, 3);
      double wsum = 0.0;
      for (const auto& p : rule) wsum += p.weight;
      CHECK(wsum == doctest::Approx(1.0).epsilon(1e-13));
      const std::array<int, 3> e{2, dim > 1 ? 2 : 0, dim > 2 ? 3 : 0};
      double q = 0.0;
      for (const auto& p : rule) {
        double v = p.weight / fact(dim);
        for (int k = 0; k < dim; ++k) v *= std::pow(p.bary[k + 1], e[k]);
        q += v;
      }
      CHECK(q == doctest::Approx(monomial_integral(e, dim)).epsilon(1e-12));
    }
  }

  TEST_CASE("mapped rules sum to the entity measure and integrate linear functions") {
    for (int dim = 2; dim <= 3; ++dim) {
      const Mesh m = Mesh::build_structured(dim, 2);
      for (std::size_t t = 0; t < m.n_cells(); ++t) {
        const MappedRule q = cell_quadrature(m, t, 2);
        double w = 0.0;
        Vec first = Vec::Zero();
        for (std::size_t i = 0; i < q.size(); ++i) {
          w += q.weights[i];
          first += q.weights[i] * q.points[i];
        }
        CHECK(w == doctest::Approx(m.cell(t).volume).epsilon(1e-14));
        CHECK((first / w - m.cell(t).barycenter).norm() < 1e-14);
      }
      for (std::size_t f = 0; f < m.n_faces(); ++f) {
        const MappedRule q = face_quadrature(m, f, 2);
        double w = 0.0;
        for (double x : q.weights) w += x;
        CHECK(w == doctest::Approx(m.face(f).measure).epsilon(1e-14));
      }
    }
  }
}
