#pragma once

#include <functional>
#include <string>
#include <vector>

#include "heatduct/fixed_point.hpp"
#include "heatduct/material.hpp"
#include "heatduct/space.hpp"

namespace heatduct {

using MatrixFn = std::function<Mat3(const Vec3&)>;  // G[i][j] = d u_i / d x_j

/// Closed-form solution with hand-derived derivatives and forcings.
/// Empty members are not part of the case (a heat-only case has no u).
struct ManufacturedCase {
  std::string name;
  Vec3 dims{1.0, 1.0, 1.0};
  VectorFn u;
  MatrixFn grad_u;
  ScalarFn P;
  ScalarFn theta;
  VectorFn grad_theta;
  VectorFn f_momentum;  // momentum forcing on top of buoyancy
  ScalarFn h_heat;      // heat forcing on top of dissipation
  ScalarFn theta_D;     // lifting used for the temperature boundary data
  VectorFn g;           // body force of coupled cases
  bool dirichlet_compatible = true;  // u* = 0 on GammaD (coupled cases)
  bool neumann_compatible = true;    // do-nothing and zero heat flux hold on GammaN
};

/// Stokes cases, solved with u = u* on GammaD and the natural condition on
/// the open ends. Polynomial: reproduced exactly by Taylor-Hood.
ManufacturedCase stokes_polynomial_case(const Vec3& dims, double nu);
/// Trigonometric, zero on GammaD, do-nothing compatible.
ManufacturedCase stokes_trig_case(const Vec3& dims, double nu, double amplitude = 1.0);

/// Poisson cases for -lambda Laplace theta = h with theta = theta* on GammaD.
ManufacturedCase heat_quadratic_case(const Vec3& dims, double lambda);
ManufacturedCase heat_trig_case(const Vec3& dims, double lambda);
/// Normal derivative nonzero on the open ends: the discrete problem imposes
/// zero flux there, so convergence stalls.
ManufacturedCase heat_incompatible_case(const Vec3& dims, double lambda);

/// Coupled case built on stokes_trig_case and a temperature that equals
/// theta_wall on GammaD; forcings include the convection, buoyancy and
/// dissipation corrections for `model` and body force `g`.
ManufacturedCase coupled_case(const Vec3& dims, const MaterialModel& model, const Vec3& g,
                              double amplitude, double theta_wall = 0.0);

struct CompatibilityReport {
  double max_wall_velocity = 0.0;
  double max_do_nothing_residual = 0.0;
  double max_heat_flux = 0.0;
  double max_divergence = 0.0;
  bool dirichlet_ok = false;
  bool neumann_ok = false;
};

/// Samples the boundary conditions and div u* on Gauss points of every
/// boundary facet of `space`.
CompatibilityReport check_compatibility(const DiscreteSpace& space, const ManufacturedCase& c,
                                        double nu);

struct StudyRow {
  std::array<int, 3> divisions{};
  double h = 0.0;
  double err_L2 = 0.0;
  double err_H1 = 0.0;
  double order_L2 = 0.0;  // log2 ratio to the previous level (0 on the first)
  double order_H1 = 0.0;
};

struct StudyTable {
  std::string name;
  std::vector<StudyRow> rows;
  bool monotone = true;  // false if some error failed to decrease
  double fitted_L2 = 0.0;  // least-squares slope of log err against log h
  double fitted_H1 = 0.0;
};

std::string study_csv(const StudyTable& table);

/// Errors of nodal fields against the closed-form solution.
double l2_error(const DiscreteSpace& space, std::span<const double> field, const VectorFn& u);
double h1_error(const DiscreteSpace& space, std::span<const double> field, const VectorFn& u,
                const MatrixFn& grad_u);
double l2_error(const DiscreteSpace& space, std::span<const double> field, const ScalarFn& f);
double h1_error(const DiscreteSpace& space, std::span<const double> field, const ScalarFn& f,
                const VectorFn& grad_f);

struct StokesSolution {
  std::vector<double> u;
  std::vector<double> P;
};

/// -nu Laplace u + grad P = f_momentum, div u = 0, u = u* on GammaD.
StokesSolution solve_stokes_case(const DiscreteSpace& space, const ManufacturedCase& c,
                                 double nu);
/// -lambda Laplace theta = h_heat, theta = theta* on GammaD.
std::vector<double> solve_heat_case(const DiscreteSpace& space, const ManufacturedCase& c,
                                    double lambda);

/// Convergence studies over a list of division triples on boxes of size
/// case.dims. Velocity errors are H1 (full norm) and L2.
StudyTable mms_stokes_study(const ManufacturedCase& c, double nu,
                            const std::vector<std::array<int, 3>>& levels, int quad_order = 5);
StudyTable mms_heat_study(const ManufacturedCase& c, double lambda,
                          const std::vector<std::array<int, 3>>& levels, int quad_order = 5);

struct CoupledReport {
  bool converged = false;
  std::string failure;
  int outer_iterations = 0;
  double err_u_L2 = 0.0;
  double err_u_H1 = 0.0;
  double err_theta_L2 = 0.0;
  double err_theta_H1 = 0.0;
  IterationTrace trace;
};

/// Runs the outer loop on the manufactured problem. Divergence is reported,
/// not thrown.
CoupledReport coupled_mms(const DiscreteSpace& space, const ManufacturedCase& c,
                          const MaterialModel& model, const SolverSettings& settings);

}  // namespace heatduct
