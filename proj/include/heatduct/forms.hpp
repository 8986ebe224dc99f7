#pragma once

#include <span>
#include <vector>

#include "heatduct/material.hpp"
#include "heatduct/space.hpp"
#include "heatduct/sparse.hpp"

namespace heatduct {

enum class OperatorKind { AViscous, BConvection, Kappa, MixedSaddle };

struct AssembledOperator {
  SparseMatrix matrix;
  OperatorKind kind;
  bool symmetric = false;
};

enum class LoadKind { Buoyancy, Dissipation, ConvectionLoad, Lifting, Source };

struct LoadVector {
  std::vector<double> values;
  LoadKind origin;
};

/// Scalar Laplacian coeff * int grad(phi_j).grad(phi_i) on the quadratic space.
SparseMatrix assemble_scalar_stiffness(const DiscreteSpace& space, double coeff = 1.0);
/// Scalar mass matrix int phi_j phi_i.
SparseMatrix assemble_scalar_mass(const DiscreteSpace& space);

/// a(u, v) = nu int grad u : grad v, block diagonal on the component-blocked layout.
AssembledOperator assemble_a(const DiscreteSpace& space, const MaterialModel& model);
/// kappa(theta, phi) = lambda int grad theta . grad phi.
AssembledOperator assemble_kappa(const DiscreteSpace& space, const MaterialModel& model);
/// B[q, i] = int psi_q div(phi_i), shape n_pressure x n_velocity.
SparseMatrix assemble_divergence(const DiscreteSpace& space);

/// Unconstrained Taylor-Hood saddle matrix [A, -B^T; -B, 0]. The do-nothing
/// condition is the natural condition of this form, so the open ends carry
/// no boundary terms.
AssembledOperator assemble_saddle(const DiscreteSpace& space, const MaterialModel& model);

/// Replace the listed rows by identity rows and zero the matching columns.
SparseMatrix apply_dirichlet(const SparseMatrix& a, std::span<const std::size_t> rows);

/// Saddle matrix with Dirichlet velocity rows eliminated. `pin_pressure`
/// additionally fixes pressure dof 0 (needed only without open ends).
SparseMatrix constrained_saddle(const DiscreteSpace& space, const MaterialModel& model,
                                bool pin_pressure = false);

/// Convection operator B(u0)[i, j] = rho0 int (u0 . grad phi_j) . phi_i, so
/// w^T B(u0) v = b(u0, v, w).
AssembledOperator assemble_b(const DiscreteSpace& space, const MaterialModel& model,
                             std::span<const double> u0);

/// Entry i: b(u0, u0, phi_i).
LoadVector assemble_convection_load(const DiscreteSpace& space, const MaterialModel& model,
                                    std::span<const double> u0);

/// Entry i: cV int rho(theta_frozen) u . grad(theta_transported) phi_i.
LoadVector assemble_d_load(const DiscreteSpace& space, const MaterialModel& model,
                           std::span<const double> theta_frozen, std::span<const double> u,
                           std::span<const double> theta_transported);

/// Entry i: alpha1 nu int e(u) : e(v) phi_i with e the symmetric gradient.
LoadVector assemble_e_load(const DiscreteSpace& space, const MaterialModel& model,
                           std::span<const double> u, std::span<const double> v);

/// Entry i: int rho(theta) g . phi_i.
LoadVector assemble_buoyancy(const DiscreteSpace& space, const MaterialModel& model,
                             std::span<const double> theta, const VectorFn& g);

/// Entry i: int f . phi_i (vector) or int f phi_i (scalar).
LoadVector assemble_source(const DiscreteSpace& space, const VectorFn& f);
LoadVector assemble_source(const DiscreteSpace& space, const ScalarFn& f);

/// Zero the listed entries.
void zero_rows(std::vector<double>& v, std::span<const std::size_t> rows);

enum class NormKind { Lebesgue, H1, BrokenW2 };

/// Discrete norms of a nodal field (scalar layout or component-blocked
/// vector layout, inferred from the size). The Lebesgue and broken W^{2,s}
/// exponents must lie in [4/3, s0); H1 ignores `s`.
double discrete_norm(const DiscreteSpace& space, std::span<const double> field, NormKind which,
                     double s = 2.0);

/// Second-derivative part (sum over cells of int |D^2 v|^s)^(1/s).
double broken_w2_seminorm(const DiscreteSpace& space, std::span<const double> field,
                          double s = 2.0);

/// L^s norms of closed-form fields by quadrature.
double lebesgue_norm(const DiscreteSpace& space, const VectorFn& f, double s);
double lebesgue_norm(const DiscreteSpace& space, const ScalarFn& f, double s);

/// Throws std::invalid_argument unless 4/3 <= s < s0.
void check_sobolev_exponent(double s);

/// L^s norms of form integrands, i.e. the norms of the functionals
/// b(u, v, .), d(vartheta, u, theta, .) and e(u, v, .) as elements of L^s.
double convection_density_norm(const DiscreteSpace& space, const MaterialModel& model,
                               std::span<const double> u, std::span<const double> v, double s);
double d_density_norm(const DiscreteSpace& space, const MaterialModel& model,
                      std::span<const double> vartheta, std::span<const double> u,
                      std::span<const double> theta, double s);
double e_density_norm(const DiscreteSpace& space, const MaterialModel& model,
                      std::span<const double> u, std::span<const double> v, double s);

/// Quadrature-point values of e(u) : e(u) over the whole mesh.
std::vector<double> dissipation_density_samples(const DiscreteSpace& space,
                                                std::span<const double> u);

}  // namespace heatduct
