#pragma once

#include <string>

#include "heatduct/fixed_point.hpp"
#include "heatduct/mesh.hpp"
#include "heatduct/space.hpp"

namespace heatduct {

/// Legacy VTK ASCII unstructured grid of the hexahedral cells.
std::string vtk_mesh(const ChannelMesh& mesh);

/// Boundary quads with cell data "tag" (0 = GammaD, 1 = GammaN) and "plane".
std::string vtk_facets(const ChannelMesh& mesh);

/// Hex grid with point data u (vector), P, theta and vartheta sampled at the
/// mesh vertices.
std::string vtk_state(const DiscreteSpace& space, const State& state);

/// Writes `text` to `path`, creating parent directories.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace heatduct
