#include "heatduct/vtk_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace heatduct {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void header(std::ostringstream& os, const std::string& title) {
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
}

void points(std::ostringstream& os, const ChannelMesh& mesh) {
  os << "POINTS " << mesh.n_vertices() << " double\n";
  for (const auto& v : mesh.vertices) os << g17(v[0]) << ' ' << g17(v[1]) << ' ' << g17(v[2]) << '\n';
}

void hex_cells(std::ostringstream& os, const ChannelMesh& mesh) {
  const auto n = mesh.n_cells();
  os << "CELLS " << n << ' ' << 9 * n << '\n';
  for (const auto& c : mesh.cells) {
    os << 8;
    for (auto v : c) os << ' ' << v;
    os << '\n';
  }
  os << "CELL_TYPES " << n << '\n';
  for (std::size_t i = 0; i < n; ++i) os << "12\n";
}

}  // namespace

std::string vtk_mesh(const ChannelMesh& mesh) {
  std::ostringstream os;
  header(os, "channel mesh");
  points(os, mesh);
  hex_cells(os, mesh);
  return os.str();
}

std::string vtk_facets(const ChannelMesh& mesh) {
  std::ostringstream os;
  header(os, "channel boundary facets");
  points(os, mesh);
  const auto n = mesh.facets.size();
  os << "CELLS " << n << ' ' << 5 * n << '\n';
  for (const auto& f : mesh.facets) {
    os << 4;
    for (auto v : f.vertices) os << ' ' << v;
    os << '\n';
  }
  os << "CELL_TYPES " << n << '\n';
  for (std::size_t i = 0; i < n; ++i) os << "9\n";
  os << "CELL_DATA " << n << "\nSCALARS tag int 1\nLOOKUP_TABLE default\n";
  for (const auto& f : mesh.facets) os << (f.tag == BoundaryTag::GammaN ? 1 : 0) << '\n';
  os << "SCALARS plane int 1\nLOOKUP_TABLE default\n";
  for (const auto& f : mesh.facets) os << f.plane << '\n';
  return os.str();
}

std::string vtk_state(const DiscreteSpace& space, const State& state) {
  const auto& mesh = space.mesh();
  const auto ns = space.n_scalar();
  if (state.u.size() != 3 * ns || state.theta.size() != ns || state.P.size() != mesh.n_vertices())
    throw std::invalid_argument("state does not match the space");
  std::ostringstream os;
  header(os, "coupled state");
  points(os, mesh);
  hex_cells(os, mesh);

  const auto [nx, ny, nz] = mesh.divisions;
  std::vector<std::size_t> node(mesh.n_vertices());
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i)
        node[mesh.vertex_index(i, j, k)] = space.lattice_index(2 * i, 2 * j, 2 * k);

  os << "POINT_DATA " << mesh.n_vertices() << "\nVECTORS u double\n";
  for (auto n : node)
    os << g17(state.u[n]) << ' ' << g17(state.u[ns + n]) << ' ' << g17(state.u[2 * ns + n]) << '\n';
  os << "SCALARS P double 1\nLOOKUP_TABLE default\n";
  for (double p : state.P) os << g17(p) << '\n';
  os << "SCALARS theta double 1\nLOOKUP_TABLE default\n";
  for (auto n : node) os << g17(state.theta[n]) << '\n';
  if (state.vartheta.size() == ns) {
    os << "SCALARS vartheta double 1\nLOOKUP_TABLE default\n";
    for (auto n : node) os << g17(state.vartheta[n]) << '\n';
  }
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace heatduct
