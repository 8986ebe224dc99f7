#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "heatduct/types.hpp"

namespace heatduct {

/// Boundary part a facet belongs to: no-slip / fixed temperature walls, or
/// the open (do-nothing) channel ends.
enum class BoundaryTag { GammaD, GammaN };

/// Boundary quadrilateral. `plane` is 0..5 for x=0, x=Lx, y=0, y=Ly, z=0, z=Lz.
struct Facet {
  std::array<std::size_t, 4> vertices{};
  BoundaryTag tag = BoundaryTag::GammaD;
  int plane = 0;
  std::size_t cell = 0;
};

/// Mesh edge given by its two vertex indices, stored with a < b.
struct Edge {
  std::size_t a = 0;
  std::size_t b = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

Edge make_edge(std::size_t v0, std::size_t v1);

/// Structured hexahedral mesh of the box [0,Lx]x[0,Ly]x[0,Lz]. The faces
/// x = 0 and x = Lx are open (GammaN); the four side walls are GammaD.
/// Vertices are ordered x fastest, then y, then z. Cell vertices follow the
/// VTK hexahedron convention.
struct ChannelMesh {
  Vec3 dims{};
  std::array<int, 3> divisions{};
  std::vector<Vec3> vertices;
  std::vector<std::array<std::size_t, 8>> cells;
  std::vector<Facet> facets;
  /// Edges shared by one GammaD facet and one GammaN facet, sorted.
  std::vector<Edge> edges_M;

  std::size_t vertex_index(int i, int j, int k) const;
  std::size_t cell_index(int i, int j, int k) const;
  std::array<int, 3> cell_coords(std::size_t cell) const;
  std::size_t n_vertices() const { return vertices.size(); }
  std::size_t n_cells() const { return cells.size(); }
};

ChannelMesh build_channel_mesh(double lx, double ly, double lz, int nx, int ny,
                               int nz);

/// Unit outward normal of a boundary facet computed from its vertex positions.
Vec3 facet_normal(const ChannelMesh& mesh, const Facet& facet);

/// Area of a (possibly non-planar) boundary facet by 2x2 Gauss quadrature of
/// the bilinear surface map.
double facet_area(const ChannelMesh& mesh, const Facet& facet);

/// Interior dihedral angle between the GammaD and GammaN facets meeting at
/// `edge`. Throws std::invalid_argument if `edge` is not in edges_M.
double junction_angle(const ChannelMesh& mesh, Edge edge);

/// Copy of `mesh` with one vertex displaced; used to build distorted fixtures.
ChannelMesh with_displaced_vertex(const ChannelMesh& mesh, std::size_t vertex,
                                  const Vec3& delta);

}  // namespace heatduct
