#include <cmath>
#include <set>

#include "doctest.h"
#include "support.hpp"

#include "egb/assembly.hpp"
#include "egb/mesh.hpp"

using namespace egb;

TEST_SUITE("mesh") {
  TEST_CASE("entity counts of the structured meshes") {
    for (int n : {1, 2, 3, 5}) {
      const Mesh m2 = Mesh::build_structured(2, n);
      CHECK(m2.n_vertices() == static_cast<std::size_t>((n + 1) * (n + 1)));
      CHECK(m2.n_cells() == static_cast<std::size_t>(2 * n * n));
      CHECK(m2.n_faces() == static_cast<std::size_t>(3 * n * n + 2 * n));
      CHECK(m2.n_boundary_faces() == static_cast<std::size_t>(4 * n));

      const Mesh m3 = Mesh::build_structured(3, n);
      CHECK(m3.n_vertices() == static_cast<std::size_t>((n + 1) * (n + 1) * (n + 1)));
      CHECK(m3.n_cells() == static_cast<std::size_t>(6 * n * n * n));
      CHECK(m3.n_faces() == static_cast<std::size_t>(12 * n * n * n + 6 * n * n));
      CHECK(m3.n_boundary_faces() == static_cast<std::size_t>(12 * n * n));
    }
    CHECK_THROWS(Mesh::build_structured(4, 2));
    CHECK_THROWS(Mesh::build_structured(2, 0));
  }

  TEST_CASE("volumes, boundary measure and the closed-surface identity") {
    for (int dim = 2; dim <= 3; ++dim) {
      const Mesh m = Mesh::build_structured(dim, 3);
      double vol = 0.0;
      for (const Cell& c : m.cells()) {
        CHECK(c.volume > 0.0);
        vol += c.volume;
      }
      CHECK(vol == doctest::Approx(1.0).epsilon(1e-13));

      double boundary = 0.0;
      for (const Face& f : m.faces())
        if (f.is_boundary()) boundary += f.measure;
      CHECK(boundary == doctest::Approx(2.0 * dim).epsilon(1e-13));

      for (std::size_t t = 0; t < m.n_cells(); ++t) {
        Vec s = Vec::Zero();
        for (int k = 0; k <= dim; ++k) s += m.face(m.cell(t).faces[k]).measure * m.outward_normal(t, k);
        CHECK(s.norm() < 1e-14);
      }
    }
  }

  TEST_CASE("face normals, orientation and h_e") {
    for (int dim = 2; dim <= 3; ++dim) {
      const Mesh m = Mesh::build_structured(dim, 2);
      for (const Face& f : m.faces()) {
        CHECK(f.normal.norm() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(f.h == doctest::Approx(dim == 2 ? f.measure : std::sqrt(f.measure)).epsilon(1e-14));
        for (int a = 1; a < dim; ++a) CHECK(f.vertices[a - 1] < f.vertices[a]);
        for (int a = 0; a < dim; ++a) CHECK(std::abs((m.vertex(f.vertices[a]) - f.centroid).dot(f.normal)) < 1e-14);
        const Vec away = f.centroid - m.cell(f.plus_cell).barycenter;
        CHECK(away.dot(f.normal) > 0.0);
        if (f.minus_cell) {
          CHECK(f.plus_cell < *f.minus_cell);
          CHECK((m.cell(*f.minus_cell).barycenter - f.centroid).dot(f.normal) > 0.0);
        } else {
          // Outward from the unit box: the normal is a coordinate direction.
          CHECK(f.normal.cwiseAbs().maxCoeff() == doctest::Approx(1.0).epsilon(1e-14));
        }
      }
    }
  }

  TEST_CASE("mesh size halves under refinement") {
    for (int dim = 2; dim <= 3; ++dim) {
      const double c = std::sqrt(static_cast<double>(dim));
      for (int n : {2, 4, 8}) CHECK(Mesh::build_structured(dim, n).mesh_size() == doctest::Approx(c / n).epsilon(1e-14));
    }
  }

  TEST_CASE("2D diagonal runs from lower left to upper right") {
    const Mesh m = Mesh::build_structured(2, 1);
    bool found = false;
    for (const Face& f : m.faces())
      if (!f.is_boundary()) {
        const Vec a = m.vertex(f.vertices[0]), b = m.vertex(f.vertices[1]);
        found = (a - b).cwiseAbs().isApprox(Vec(1, 1, 0)) && std::abs(a[0] - a[1]) < 1e-15;
      }
    CHECK(found);
  }

  TEST_CASE("trace sides") {
    const Mesh m = Mesh::build_structured(2, 2);
    for (std::size_t f = 0; f < m.n_faces(); ++f) {
      const TraceSide p = m.trace(f, Side::plus);
      CHECK(p.cell == m.face(f).plus_cell);
      CHECK(p.jump_sign == 1.0);
      if (m.face(f).is_boundary()) {
        CHECK(p.avg_weight == 1.0);
        CHECK_THROWS_AS(m.trace(f, Side::minus), std::invalid_argument);
      } else {
        const TraceSide q = m.trace(f, Side::minus);
        CHECK(q.jump_sign == -1.0);
        CHECK(q.avg_weight == 0.5);
        CHECK(m.cell(q.cell).faces[q.local_face] == f);
      }
    }
    CHECK_THROWS_AS(m.trace(m.n_faces(), Side::plus), std::out_of_range);
  }

  TEST_CASE("barycentric coordinates and containment") {
    const Mesh m = Mesh::build_structured(3, 2);
    for (std::size_t t = 0; t < m.n_cells(); ++t) {
      const auto l = m.barycentric(t, m.cell(t).barycenter);
      for (int a = 0; a < 4; ++a) CHECK(l[a] == doctest::Approx(0.25).epsilon(1e-13));
      CHECK(m.contains(t, m.vertex(m.cell(t).vertices[2])));
      CHECK_FALSE(m.contains(t, Vec(2.0, 2.0, 2.0)));
    }
  }

  TEST_CASE("boundary faces sit on the box and touch only boundary vertices") {
    const Mesh m = Mesh::build_structured(3, 3);
    std::set<std::size_t> bverts;
    for (const Face& f : m.faces())
      if (f.is_boundary())
        for (int a = 0; a < 3; ++a) bverts.insert(f.vertices[a]);
    CHECK(bverts.size() == static_cast<std::size_t>(64 - 8));
    for (std::size_t v : bverts) {
      const Vec x = m.vertex(v);
      CHECK((x.minCoeff() < 1e-15 || x.maxCoeff() > 1.0 - 1e-15));
    }
  }

  TEST_CASE("flipping an interior face leaves the assembled form unchanged") {
    for (int dim = 2; dim <= 3; ++dim) {
      const Mesh m = Mesh::build_structured(dim, 2);
      std::size_t face = 0;
      while (m.face(face).is_boundary()) ++face;
      const Mesh flipped = m.with_flipped_face(face);
      CHECK(flipped.face(face).plus_cell == *m.face(face).minus_cell);
      CHECK((flipped.face(face).normal + m.face(face).normal).norm() < 1e-15);

      const EGSpace a(m), b(flipped);
      const Eigen::VectorXd sigma = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m.n_cells()));
      CHECK(support::relative_gap(support::dense(assemble_a(b, 3.0)), support::dense(assemble_a(a, 3.0))) < 1e-13);
      CHECK(support::relative_gap(support::dense(assemble_c(b, sigma, 3.0)), support::dense(assemble_c(a, sigma, 3.0))) < 1e-13);
      std::size_t bface = 0;
      while (!m.face(bface).is_boundary()) ++bface;
      CHECK_THROWS(m.with_flipped_face(bface));
    }
  }
}
