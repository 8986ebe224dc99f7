#include "heatduct/mesh.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>
#include <string>

namespace heatduct {

Edge make_edge(std::size_t v0, std::size_t v1) {
  return v0 < v1 ? Edge{v0, v1} : Edge{v1, v0};
}

std::size_t ChannelMesh::vertex_index(int i, int j, int k) const {
  const auto nx1 = static_cast<std::size_t>(divisions[0] + 1);
  const auto ny1 = static_cast<std::size_t>(divisions[1] + 1);
  return static_cast<std::size_t>(i) +
         nx1 * (static_cast<std::size_t>(j) + ny1 * static_cast<std::size_t>(k));
}

std::size_t ChannelMesh::cell_index(int i, int j, int k) const {
  const auto nx = static_cast<std::size_t>(divisions[0]);
  const auto ny = static_cast<std::size_t>(divisions[1]);
  return static_cast<std::size_t>(i) +
         nx * (static_cast<std::size_t>(j) + ny * static_cast<std::size_t>(k));
}

std::array<int, 3> ChannelMesh::cell_coords(std::size_t cell) const {
  const auto nx = static_cast<std::size_t>(divisions[0]);
  const auto ny = static_cast<std::size_t>(divisions[1]);
  return {static_cast<int>(cell % nx), static_cast<int>((cell / nx) % ny),
          static_cast<int>(cell / (nx * ny))};
}

ChannelMesh build_channel_mesh(double lx, double ly, double lz, int nx, int ny,
                               int nz) {
  if (!(lx > 0.0) || !(ly > 0.0) || !(lz > 0.0))
    throw std::invalid_argument("channel dimensions must be positive");
  if (nx < 1 || ny < 1 || nz < 1)
    throw std::invalid_argument("channel divisions must be at least 1");

  ChannelMesh mesh;
  mesh.dims = {lx, ly, lz};
  mesh.divisions = {nx, ny, nz};

  mesh.vertices.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1) * (nz + 1));
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i)
        mesh.vertices.push_back({lx * i / nx, ly * j / ny, lz * k / nz});

  mesh.cells.reserve(static_cast<std::size_t>(nx) * ny * nz);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        auto v = [&](int a, int b, int c) {
          return mesh.vertex_index(i + a, j + b, k + c);
        };
        mesh.cells.push_back({v(0, 0, 0), v(1, 0, 0), v(1, 1, 0), v(0, 1, 0),
                              v(0, 0, 1), v(1, 0, 1), v(1, 1, 1), v(0, 1, 1)});
      }

  // x-normal faces (open ends).
  for (int side = 0; side < 2; ++side) {
    const int i = side == 0 ? 0 : nx;
    const int ci = side == 0 ? 0 : nx - 1;
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < ny; ++j)
        mesh.facets.push_back(
            {{mesh.vertex_index(i, j, k), mesh.vertex_index(i, j + 1, k),
              mesh.vertex_index(i, j + 1, k + 1), mesh.vertex_index(i, j, k + 1)},
             BoundaryTag::GammaN,
             side,
             mesh.cell_index(ci, j, k)});
  }
  // y-normal walls.
  for (int side = 0; side < 2; ++side) {
    const int j = side == 0 ? 0 : ny;
    const int cj = side == 0 ? 0 : ny - 1;
    for (int k = 0; k < nz; ++k)
      for (int i = 0; i < nx; ++i)
        mesh.facets.push_back(
            {{mesh.vertex_index(i, j, k), mesh.vertex_index(i + 1, j, k),
              mesh.vertex_index(i + 1, j, k + 1), mesh.vertex_index(i, j, k + 1)},
             BoundaryTag::GammaD,
             2 + side,
             mesh.cell_index(i, cj, k)});
  }
  // z-normal walls.
  for (int side = 0; side < 2; ++side) {
    const int k = side == 0 ? 0 : nz;
    const int ck = side == 0 ? 0 : nz - 1;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        mesh.facets.push_back(
            {{mesh.vertex_index(i, j, k), mesh.vertex_index(i + 1, j, k),
              mesh.vertex_index(i + 1, j + 1, k), mesh.vertex_index(i, j + 1, k)},
             BoundaryTag::GammaD,
             4 + side,
             mesh.cell_index(i, j, ck)});
  }

  // Junction edges: the rim of each open face.
  for (int i : {0, nx}) {
    for (int j = 0; j < ny; ++j) {
      mesh.edges_M.push_back(
          make_edge(mesh.vertex_index(i, j, 0), mesh.vertex_index(i, j + 1, 0)));
      mesh.edges_M.push_back(make_edge(mesh.vertex_index(i, j, nz),
                                       mesh.vertex_index(i, j + 1, nz)));
    }
    for (int k = 0; k < nz; ++k) {
      mesh.edges_M.push_back(
          make_edge(mesh.vertex_index(i, 0, k), mesh.vertex_index(i, 0, k + 1)));
      mesh.edges_M.push_back(make_edge(mesh.vertex_index(i, ny, k),
                                       mesh.vertex_index(i, ny, k + 1)));
    }
  }
  std::sort(mesh.edges_M.begin(), mesh.edges_M.end());
  return mesh;
}

namespace {

Vec3 cell_centroid(const ChannelMesh& mesh, std::size_t cell) {
  Vec3 c{};
  for (auto v : mesh.cells[cell]) c = c + mesh.vertices[v];
  return (1.0 / 8.0) * c;
}

bool facet_has_edge(const Facet& f, Edge e) {
  for (int q = 0; q < 4; ++q) {
    if (make_edge(f.vertices[q], f.vertices[(q + 1) % 4]) == e) return true;
  }
  return false;
}

}  // namespace

Vec3 facet_normal(const ChannelMesh& mesh, const Facet& facet) {
  const auto& p = mesh.vertices;
  const auto& v = facet.vertices;
  Vec3 n = cross(p[v[2]] - p[v[0]], p[v[3]] - p[v[1]]);
  Vec3 centroid = (0.25) * (p[v[0]] + p[v[1]] + p[v[2]] + p[v[3]]);
  if (dot(n, centroid - cell_centroid(mesh, facet.cell)) < 0.0) n = -1.0 * n;
  return (1.0 / norm(n)) * n;
}

double facet_area(const ChannelMesh& mesh, const Facet& facet) {
  const auto& p = mesh.vertices;
  const auto& v = facet.vertices;
  const double g = 0.5 / std::sqrt(3.0);
  double area = 0.0;
  for (double s : {0.5 - g, 0.5 + g})
    for (double t : {0.5 - g, 0.5 + g}) {
      // Bilinear map over (s, t) with corners v0, v1, v2, v3 in cyclic order.
      Vec3 ds = (1.0 - t) * (p[v[1]] - p[v[0]]) + t * (p[v[2]] - p[v[3]]);
      Vec3 dt = (1.0 - s) * (p[v[3]] - p[v[0]]) + s * (p[v[2]] - p[v[1]]);
      area += 0.25 * norm(cross(ds, dt));
    }
  return area;
}

double junction_angle(const ChannelMesh& mesh, Edge edge) {
  if (!std::binary_search(mesh.edges_M.begin(), mesh.edges_M.end(), edge))
    throw std::invalid_argument("edge (" + std::to_string(edge.a) + ", " +
                                std::to_string(edge.b) +
                                ") is not on the GammaD/GammaN junction");
  const Facet* dirichlet = nullptr;
  const Facet* neumann = nullptr;
  for (const auto& f : mesh.facets) {
    if (!facet_has_edge(f, edge)) continue;
    if (f.tag == BoundaryTag::GammaD)
      dirichlet = &f;
    else
      neumann = &f;
  }
  if (dirichlet == nullptr || neumann == nullptr)
    throw std::logic_error("junction edge without adjacent GammaD/GammaN facets");
  const double c = std::clamp(
      dot(facet_normal(mesh, *dirichlet), facet_normal(mesh, *neumann)), -1.0,
      1.0);
  return std::numbers::pi - std::acos(c);
}

ChannelMesh with_displaced_vertex(const ChannelMesh& mesh, std::size_t vertex,
                                  const Vec3& delta) {
  ChannelMesh out = mesh;
  out.vertices.at(vertex) = out.vertices[vertex] + delta;
  return out;
}

}  // namespace heatduct
