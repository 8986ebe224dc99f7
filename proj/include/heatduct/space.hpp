#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "heatduct/mesh.hpp"
#include "heatduct/types.hpp"

namespace heatduct {

/// Gauss-Legendre rule on [0, 1] with `n` points.
struct GaussRule1D {
  std::vector<double> points;
  std::vector<double> weights;
};
GaussRule1D gauss_legendre(int n);

/// Tensor-product Gauss rule on the reference cube [0,1]^3.
struct Quadrature {
  int order = 0;  // points per direction
  std::vector<Vec3> points;
  std::vector<double> weights;
  std::size_t size() const { return points.size(); }
};
Quadrature tensor_gauss(int points_per_direction);

/// Which boundary parts carry essential conditions.
enum class BoundaryPolicy {
  Mixed,         // GammaD walls Dirichlet, open ends natural
  AllDirichlet,  // closed cavity; only used to probe the pressure nullspace
};

inline constexpr int kScalarNodesPerCell = 27;
inline constexpr int kPressureNodesPerCell = 8;

/// Taylor-Hood velocity/pressure pair plus a temperature space on a
/// ChannelMesh. Scalar fields (temperature and each velocity component) use
/// triquadratic nodal elements on the lattice of (2nx+1)(2ny+1)(2nz+1) nodes;
/// pressure uses trilinear elements on the mesh vertices. Velocity vectors
/// are stored component-blocked: [u_x nodes | u_y nodes | u_z nodes].
class DiscreteSpace {
 public:
  DiscreteSpace(ChannelMesh mesh, int quad_order,
                BoundaryPolicy policy = BoundaryPolicy::Mixed);

  const ChannelMesh& mesh() const { return mesh_; }
  const Quadrature& quadrature() const { return quadrature_; }
  BoundaryPolicy policy() const { return policy_; }

  std::size_t n_scalar() const { return nodes_.size(); }
  std::size_t n_velocity() const { return 3 * nodes_.size(); }
  std::size_t n_pressure() const { return mesh_.n_vertices(); }
  std::size_t n_cells() const { return mesh_.n_cells(); }

  const std::vector<Vec3>& scalar_nodes() const { return nodes_; }
  std::array<int, 3> lattice_size() const { return lattice_; }
  std::size_t lattice_index(int i, int j, int k) const;

  /// Scalar dofs of a cell, local index a + 3b + 9c (a along x).
  std::array<std::size_t, kScalarNodesPerCell> cell_scalar_dofs(
      std::size_t cell) const;
  /// Pressure dofs of a cell in VTK hexahedron order.
  const std::array<std::size_t, 8>& cell_pressure_dofs(std::size_t cell) const {
    return mesh_.cells[cell];
  }

  /// Sorted scalar node indices on the closure of GammaD.
  const std::vector<std::size_t>& dirichlet_theta() const { return dirichlet_theta_; }
  /// Sorted velocity dof indices (all three components) on the closure of GammaD.
  const std::vector<std::size_t>& dirichlet_u() const { return dirichlet_u_; }
  bool is_dirichlet_node(std::size_t node) const { return dirichlet_node_[node] != 0; }

  /// Interpolate closed-form fields onto the nodal bases.
  std::vector<double> interpolate(const ScalarFn& f) const;
  std::vector<double> interpolate(const VectorFn& f) const;
  /// Trilinear interpolation onto the pressure space.
  std::vector<double> interpolate_pressure(const ScalarFn& f) const;

 private:
  ChannelMesh mesh_;
  Quadrature quadrature_;
  BoundaryPolicy policy_;
  std::array<int, 3> lattice_{};
  std::vector<Vec3> nodes_;
  std::vector<char> dirichlet_node_;
  std::vector<std::size_t> dirichlet_theta_;
  std::vector<std::size_t> dirichlet_u_;
};

DiscreteSpace build_spaces(const ChannelMesh& mesh, int quad_order = 5,
                           BoundaryPolicy policy = BoundaryPolicy::Mixed);

/// Shape data of one cell at the quadrature points of the space.
///
/// Gradients use the full trilinear geometry map. Second derivatives assume
/// an affine cell (exact for the box meshes built here).
class CellValues {
 public:
  explicit CellValues(const DiscreteSpace& space);

  void reinit(std::size_t cell);

  std::size_t n_points() const { return n_q_; }
  const Vec3& point(std::size_t q) const { return x_[q]; }
  double JxW(std::size_t q) const { return jxw_[q]; }

  double shape(std::size_t q, int a) const { return phi_[q * 27 + a]; }
  const Vec3& grad(std::size_t q, int a) const { return dphi_[q * 27 + a]; }
  const Mat3& hessian(std::size_t q, int a) const { return d2phi_[q * 27 + a]; }
  double pressure_shape(std::size_t q, int a) const { return psi_[q * 8 + a]; }

  const std::array<std::size_t, kScalarNodesPerCell>& dofs() const { return dofs_; }
  std::size_t cell() const { return cell_; }

  /// Values of a scalar nodal field at quadrature point q.
  double value(std::span<const double> f, std::size_t q) const;
  Vec3 gradient(std::span<const double> f, std::size_t q) const;
  Mat3 hessian(std::span<const double> f, std::size_t q) const;
  /// Component-blocked velocity field evaluation.
  Vec3 vector_value(std::span<const double> u, std::size_t q) const;
  /// G[i][j] = d u_i / d x_j.
  Mat3 vector_gradient(std::span<const double> u, std::size_t q) const;
  double pressure_value(std::span<const double> p, std::size_t q) const;

 private:
  const DiscreteSpace* space_;
  std::size_t n_q_;
  std::size_t n_scalar_;
  std::size_t cell_ = 0;
  std::array<std::size_t, kScalarNodesPerCell> dofs_{};
  // reference data
  std::vector<double> phi_;
  std::vector<Vec3> ref_dphi_;
  std::vector<Mat3> ref_d2phi_;
  std::vector<double> psi_;
  std::vector<Vec3> ref_dpsi_;
  // physical data
  std::vector<Vec3> x_;
  std::vector<double> jxw_;
  std::vector<Vec3> dphi_;
  std::vector<Mat3> d2phi_;
};

/// Triquadratic shape values at a reference point, local order a + 3b + 9c.
std::array<double, kScalarNodesPerCell> q2_shape_values(const Vec3& ref);

/// Reference geometry helpers (trilinear map of a hexahedron).
Vec3 map_to_physical(const ChannelMesh& mesh, std::size_t cell, const Vec3& ref);

}  // namespace heatduct
