#ifndef EGB_PROBLEMS_HPP
#define EGB_PROBLEMS_HPP

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "egb/assembly.hpp"

namespace egb {

using TensorField = std::function<Mat(const Vec&)>;

struct ExactSolution {
  VectorField velocity;
  TensorField velocity_gradient;  // grad(c, k) = d u_c / d x_k
  VectorField velocity_laplacian;
  ScalarField pressure;
  VectorField pressure_gradient;
};

/// Closed-form solution of -nu Lap u + u + grad p = f, div u = 0 on the unit
/// square (dim 2) or cube (dim 3), with f and g = u|_boundary derived from it.
struct ManufacturedCase {
  int dim = 2;
  double nu = 1.0;
  ExactSolution exact;
  VectorField f;
  VectorField g;
};

ManufacturedCase manufactured(int dim, double nu);

/// Piecewise constant permeability on a uniform nx x ny grid over the unit
/// square. Values are row-major with row 0 at the bottom (y in [0, 1/ny)).
///
/// Text format: "nx ny" followed by nx * ny positive values.
struct Raster {
  int nx = 0;
  int ny = 0;
  std::vector<double> values;

  double at(const Vec& x) const;
};

Raster parse_raster(std::istream& in);
Raster load_raster(const std::string& path);

/// Built-in illustrative map: an 8 x 8 raster with a few low-permeability
/// barriers leaving a winding channel. It is not a transcription of any
/// published map.
Raster default_raster(double low_k = 1e-6, double high_k = 1.0);

/// Low-permeability ball in the unit cube.
struct Ball {
  Vec center = Vec::Zero();
  double radius = 0.0625;

  /// |x| <= 0.25^2, taken literally: a small ball around the origin corner.
  static Ball literal() { return {Vec::Zero(), 0.0625}; }
  /// Interior obstacle of radius 0.25 at the cube center.
  static Ball centered() { return {Vec(0.5, 0.5, 0.5), 0.25}; }
};

struct PermeabilityConfig {
  double mu = 1e-6;
  double low_k = 1e-6;
  double high_k = 1.0;
  std::optional<Raster> raster;  // 2D; default_raster() when empty
  Ball ball = Ball::literal();   // 3D
};

struct PermeabilityCase {
  int dim = 2;
  double mu = 1e-6;
  double low_k = 1e-6;
  ScalarField permeability;
  VectorField f;
  VectorField g;

  /// sigma_T = mu / K(x_T).
  Eigen::VectorXd sigma(const Mesh& mesh) const;
  /// Cells whose barycentric permeability is the low value.
  std::vector<bool> low_region(const Mesh& mesh) const;
  CoefficientField coefficients(const Mesh& mesh) const;
};

/// f = <1, 1(, 1)>, g = <1, 0(, 0)>. Throws on a malformed raster.
PermeabilityCase permeability_case(int dim, const PermeabilityConfig& config);

}  // namespace egb

#endif
