#include "egb/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace egb {

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace

ReferenceRule gauss_legendre(int npoints) {
  if (npoints < 1) throw std::invalid_argument("gauss_legendre: npoints must be >= 1");
  ReferenceRule rule;
  rule.dim = 1;
  rule.points.resize(static_cast<std::size_t>(npoints));
  rule.weights.resize(static_cast<std::size_t>(npoints));
  for (int i = 0; i < npoints; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (npoints + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(npoints, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(npoints, x).second;
    const auto idx = static_cast<std::size_t>(npoints - 1 - i);
    rule.points[idx] = {0.5 * (x + 1.0), 0.0, 0.0};
    rule.weights[idx] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

namespace {

ReferenceRule build_simplex_rule(int dim, int degree) {
  // The collapse Jacobian adds (dim - 1) to the degree in the first direction.
  const int needed = degree + dim - 1;
  const int m = std::max(1, (needed + 2) / 2);
  const ReferenceRule gl = gauss_legendre(m);
  ReferenceRule rule;
  rule.dim = dim;
  if (dim == 1) return gl;
  if (dim == 2) {
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        const double xi = gl.points[a][0], eta = gl.points[b][0];
        rule.points.push_back({xi, eta * (1.0 - xi), 0.0});
        rule.weights.push_back(gl.weights[a] * gl.weights[b] * (1.0 - xi));
      }
    return rule;
  }
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) {
        const double xi = gl.points[a][0], eta = gl.points[b][0], zeta = gl.points[c][0];
        rule.points.push_back({xi, eta * (1.0 - xi), zeta * (1.0 - xi) * (1.0 - eta)});
        rule.weights.push_back(gl.weights[a] * gl.weights[b] * gl.weights[c] * (1.0 - xi) *
                               (1.0 - xi) * (1.0 - eta));
      }
  return rule;
}

}  // namespace

const ReferenceRule& simplex_rule(int dim, int degree) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("simplex_rule: dim must be 1..3");
  if (degree < 0) throw std::invalid_argument("simplex_rule: negative degree");
  static std::mutex mutex;
  static std::map<std::pair<int, int>, ReferenceRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find({dim, degree});
  if (it == cache.end()) it = cache.emplace(std::pair{dim, degree}, build_simplex_rule(dim, degree)).first;
  return it->second;
}

namespace {

MappedRule map_rule(const ReferenceRule& ref, const std::array<const Vec*, 4>& verts, int nverts,
                    double measure) {
  // measure / reference measure = measure * dim!
  double fact = 1.0;
  for (int k = 2; k < nverts; ++k) fact *= k;
  MappedRule out;
  out.points.reserve(ref.size());
  out.weights.reserve(ref.size());
  out.bary.reserve(ref.size());
  for (std::size_t q = 0; q < ref.size(); ++q) {
    std::array<double, kMaxVertsPerCell> lam{0.0, 0.0, 0.0, 0.0};
    double rest = 1.0;
    for (int i = 1; i < nverts; ++i) {
      lam[i] = ref.points[q][i - 1];
      rest -= lam[i];
    }
    lam[0] = rest;
    Vec x = Vec::Zero();
    for (int i = 0; i < nverts; ++i) x += lam[i] * *verts[i];
    out.points.push_back(x);
    out.weights.push_back(ref.weights[q] * measure * fact);
    out.bary.push_back(lam);
  }
  return out;
}

}  // namespace

MappedRule cell_quadrature(const Mesh& mesh, std::size_t cell, int degree) {
  const Cell& c = mesh.cell(cell);
  std::array<const Vec*, 4> v{};
  for (int i = 0; i <= mesh.dim(); ++i) v[i] = &mesh.vertex(c.vertices[i]);
  return map_rule(simplex_rule(mesh.dim(), degree), v, mesh.dim() + 1, c.volume);
}

MappedRule face_quadrature(const Mesh& mesh, std::size_t face, int degree) {
  const Face& f = mesh.face(face);
  std::array<const Vec*, 4> v{};
  for (int i = 0; i < mesh.dim(); ++i) v[i] = &mesh.vertex(f.vertices[i]);
  return map_rule(simplex_rule(mesh.dim() - 1, degree), v, mesh.dim(), f.measure);
}

}  // namespace egb
