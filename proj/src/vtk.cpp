#include "egb/vtk.hpp"

#include <fstream>
#include <ostream>
#include <stdexcept>

namespace egb {

void write_vtk(std::ostream& out, const EGSpace& eg, const Eigen::VectorXd& u_h, const Eigen::VectorXd& p_h,
               const std::vector<VtkCellScalar>& extra) {
  const Mesh& mesh = eg.mesh();
  const std::size_t nc = mesh.n_cells();
  const int nv = mesh.verts_per_cell();
  if (u_h.size() != static_cast<Eigen::Index>(eg.n_dofs()) || p_h.size() != static_cast<Eigen::Index>(nc))
    throw std::invalid_argument("write_vtk: coefficient vectors do not match the mesh");
  for (const auto& s : extra)
    if (s.values.size() != static_cast<Eigen::Index>(nc))
      throw std::invalid_argument("write_vtk: cell scalar '" + s.name + "' has the wrong size");

  out.precision(12);
  out << "# vtk DataFile Version 3.0\negb solution\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.n_vertices() << " double\n";
  for (const Vec& v : mesh.vertices()) out << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  out << "CELLS " << nc << ' ' << nc * static_cast<std::size_t>(nv + 1) << '\n';
  for (const Cell& c : mesh.cells()) {
    out << nv;
    for (int a = 0; a < nv; ++a) out << ' ' << c.vertices[a];
    out << '\n';
  }
  out << "CELL_TYPES " << nc << '\n';
  for (std::size_t t = 0; t < nc; ++t) out << (mesh.dim() == 2 ? 5 : 10) << '\n';

  out << "CELL_DATA " << nc << '\n';
  out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (std::size_t t = 0; t < nc; ++t) out << p_h[static_cast<Eigen::Index>(t)] << '\n';
  std::vector<Vec> vel(nc);
  for (std::size_t t = 0; t < nc; ++t) vel[t] = eg.value(u_h, t, mesh.cell(t).barycenter);
  out << "VECTORS velocity double\n";
  for (const Vec& v : vel) out << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  out << "SCALARS velocity_magnitude double 1\nLOOKUP_TABLE default\n";
  for (const Vec& v : vel) out << v.norm() << '\n';
  for (const auto& s : extra) {
    out << "SCALARS " << s.name << " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t t = 0; t < nc; ++t) out << s.values[static_cast<Eigen::Index>(t)] << '\n';
  }
}

void write_vtk(const std::string& path, const EGSpace& eg, const Eigen::VectorXd& u_h,
               const Eigen::VectorXd& p_h, const std::vector<VtkCellScalar>& extra) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_vtk: cannot open " + path);
  write_vtk(out, eg, u_h, p_h, extra);
}

}  // namespace egb
