#include "egb/problems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace egb {

namespace {

// F(t) = t^2 (t - 1)^2 and its derivatives; the 2D velocity is
// u = 5 (F(x) F'(y), -F'(x) F(y)).
double F0(double t) { return t * t * (t - 1.0) * (t - 1.0); }
double F1(double t) { return 4.0 * t * t * t - 6.0 * t * t + 2.0 * t; }
double F2(double t) { return 12.0 * t * t - 12.0 * t + 2.0; }
double F3(double t) { return 24.0 * t - 12.0; }

ExactSolution exact_2d() {
  ExactSolution e;
  e.velocity = [](const Vec& x) {
    return Vec(5.0 * F0(x[0]) * F1(x[1]), -5.0 * F1(x[0]) * F0(x[1]), 0.0);
  };
  e.velocity_gradient = [](const Vec& x) {
    Mat g = Mat::Zero();
    g(0, 0) = 5.0 * F1(x[0]) * F1(x[1]);
    g(0, 1) = 5.0 * F0(x[0]) * F2(x[1]);
    g(1, 0) = -5.0 * F2(x[0]) * F0(x[1]);
    g(1, 1) = -5.0 * F1(x[0]) * F1(x[1]);
    return g;
  };
  e.velocity_laplacian = [](const Vec& x) {
    return Vec(5.0 * (F2(x[0]) * F1(x[1]) + F0(x[0]) * F3(x[1])),
               -5.0 * (F3(x[0]) * F0(x[1]) + F1(x[0]) * F2(x[1])), 0.0);
  };
  e.pressure = [](const Vec& x) { return 10.0 * (2.0 * x[0] - 1.0) * (2.0 * x[1] - 1.0); };
  e.pressure_gradient = [](const Vec& x) {
    return Vec(20.0 * (2.0 * x[1] - 1.0), 20.0 * (2.0 * x[0] - 1.0), 0.0);
  };
  return e;
}

ExactSolution exact_3d() {
  using std::cos;
  using std::sin;
  constexpr double pi = std::numbers::pi;
  ExactSolution e;
  e.velocity = [](const Vec& x) {
    const double sx = sin(pi * x[0]), sy = sin(pi * x[1]), sz = sin(pi * x[2]);
    const double cx = cos(pi * x[0]), cy = cos(pi * x[1]), cz = cos(pi * x[2]);
    return Vec(sx * (cy - cz), sy * (cz - cx), sz * (cx - cy));
  };
  e.velocity_gradient = [](const Vec& x) {
    const double sx = sin(pi * x[0]), sy = sin(pi * x[1]), sz = sin(pi * x[2]);
    const double cx = cos(pi * x[0]), cy = cos(pi * x[1]), cz = cos(pi * x[2]);
    Mat g;
    g << pi * cx * (cy - cz), -pi * sx * sy, pi * sx * sz,
         pi * sy * sx, pi * cy * (cz - cx), -pi * sy * sz,
         -pi * sz * sx, pi * sz * sy, pi * cz * (cx - cy);
    return g;
  };
  e.velocity_laplacian = [v = e.velocity](const Vec& x) -> Vec { return -2.0 * pi * pi * v(x); };
  e.pressure = [](const Vec& x) {
    return pi * pi * pi * sin(pi * x[0]) * sin(pi * x[1]) * sin(pi * x[2]) - 1.0;
  };
  e.pressure_gradient = [](const Vec& x) {
    const double sx = sin(pi * x[0]), sy = sin(pi * x[1]), sz = sin(pi * x[2]);
    const double cx = cos(pi * x[0]), cy = cos(pi * x[1]), cz = cos(pi * x[2]);
    const double c = pi * pi * pi * pi;
    return Vec(c * cx * sy * sz, c * sx * cy * sz, c * sx * sy * cz);
  };
  return e;
}

}  // namespace

ManufacturedCase manufactured(int dim, double nu) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("manufactured: dim must be 2 or 3");
  if (!(nu > 0.0)) throw std::invalid_argument("manufactured: nu must be positive");
  ManufacturedCase mc;
  mc.dim = dim;
  mc.nu = nu;
  mc.exact = dim == 2 ? exact_2d() : exact_3d();
  mc.f = [e = mc.exact, nu](const Vec& x) -> Vec {
    return -nu * e.velocity_laplacian(x) + e.velocity(x) + e.pressure_gradient(x);
  };
  mc.g = mc.exact.velocity;
  return mc;
}

double Raster::at(const Vec& x) const {
  const int i = std::clamp(static_cast<int>(std::floor(x[0] * nx)), 0, nx - 1);
  const int j = std::clamp(static_cast<int>(std::floor(x[1] * ny)), 0, ny - 1);
  return values[static_cast<std::size_t>(j * nx + i)];
}

Raster parse_raster(std::istream& in) {
  Raster r;
  if (!(in >> r.nx >> r.ny) || r.nx <= 0 || r.ny <= 0)
    throw std::invalid_argument("parse_raster: expected positive 'nx ny' header");
  const auto count = static_cast<std::size_t>(r.nx) * static_cast<std::size_t>(r.ny);
  r.values.reserve(count);
  double v;
  while (in >> v) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("parse_raster: permeability values must be positive");
    r.values.push_back(v);
  }
  if (!in.eof()) throw std::invalid_argument("parse_raster: unreadable value");
  if (r.values.size() != count)
    throw std::invalid_argument("parse_raster: expected " + std::to_string(count) + " values, got " +
                                std::to_string(r.values.size()));
  return r;
}

Raster load_raster(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("load_raster: cannot open " + path);
  return parse_raster(in);
}

Raster default_raster(double low_k, double high_k) {
  // '#' marks low permeability; the first string is the top row.
  static constexpr const char* rows[8] = {
      "........",
      ".######.",
      "......#.",
      "##....#.",
      ".#..###.",
      ".#......",
      ".####..#",
      "........",
  };
  Raster r;
  r.nx = 8;
  r.ny = 8;
  r.values.resize(64);
  for (int j = 0; j < 8; ++j)
    for (int i = 0; i < 8; ++i) r.values[static_cast<std::size_t>(j * 8 + i)] = rows[7 - j][i] == '#' ? low_k : high_k;
  return r;
}

Eigen::VectorXd PermeabilityCase::sigma(const Mesh& mesh) const {
  Eigen::VectorXd s(static_cast<Eigen::Index>(mesh.n_cells()));
  for (std::size_t t = 0; t < mesh.n_cells(); ++t)
    s[static_cast<Eigen::Index>(t)] = mu / permeability(mesh.cell(t).barycenter);
  return s;
}

std::vector<bool> PermeabilityCase::low_region(const Mesh& mesh) const {
  std::vector<bool> low(mesh.n_cells());
  for (std::size_t t = 0; t < mesh.n_cells(); ++t) low[t] = permeability(mesh.cell(t).barycenter) <= low_k;
  return low;
}

CoefficientField PermeabilityCase::coefficients(const Mesh& mesh) const {
  CoefficientField c;
  c.nu = mu;
  c.sigma = sigma(mesh);
  return c;
}

PermeabilityCase permeability_case(int dim, const PermeabilityConfig& config) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("permeability_case: dim must be 2 or 3");
  if (!(config.mu > 0.0) || !(config.low_k > 0.0) || !(config.high_k > 0.0))
    throw std::invalid_argument("permeability_case: mu and permeabilities must be positive");
  PermeabilityCase pc;
  pc.dim = dim;
  pc.mu = config.mu;
  pc.low_k = config.low_k;
  if (dim == 2) {
    Raster r = config.raster ? *config.raster : default_raster(config.low_k, config.high_k);
    if (r.nx <= 0 || r.ny <= 0 || r.values.size() != static_cast<std::size_t>(r.nx * r.ny))
      throw std::invalid_argument("permeability_case: malformed raster");
    for (double v : r.values)
      if (!(v > 0.0)) throw std::invalid_argument("permeability_case: raster values must be positive");
    pc.permeability = [r = std::move(r)](const Vec& x) { return r.at(x); };
    pc.f = [](const Vec&) { return Vec(1.0, 1.0, 0.0); };
    pc.g = [](const Vec&) { return Vec(1.0, 0.0, 0.0); };
  } else {
    if (!(config.ball.radius > 0.0)) throw std::invalid_argument("permeability_case: ball radius must be positive");
    pc.permeability = [b = config.ball, lo = config.low_k, hi = config.high_k](const Vec& x) {
      return (x - b.center).norm() <= b.radius ? lo : hi;
    };
    pc.f = [](const Vec&) { return Vec(1.0, 1.0, 1.0); };
    pc.g = [](const Vec&) { return Vec(1.0, 0.0, 0.0); };
  }
  return pc;
}

}  // namespace egb
