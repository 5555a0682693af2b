#ifndef EGB_VTK_HPP
#define EGB_VTK_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "egb/fespace.hpp"

namespace egb {

/// Legacy ASCII unstructured grid with cell data: pressure, velocity at the
/// barycenter and its magnitude. Extra per-cell scalars may be appended.
struct VtkCellScalar {
  std::string name;
  Eigen::VectorXd values;
};

void write_vtk(std::ostream& out, const EGSpace& eg, const Eigen::VectorXd& u_h, const Eigen::VectorXd& p_h,
               const std::vector<VtkCellScalar>& extra = {});
void write_vtk(const std::string& path, const EGSpace& eg, const Eigen::VectorXd& u_h,
               const Eigen::VectorXd& p_h, const std::vector<VtkCellScalar>& extra = {});

}  // namespace egb

#endif
