#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "heatduct/forms.hpp"
#include "heatduct/linsolve.hpp"
#include "heatduct/material.hpp"
#include "heatduct/space.hpp"

namespace heatduct {

struct SolverSettings {
  double inner_tol = 1e-12;   // H1 norm of successive momentum iterates
  double outer_tol = 1e-10;   // H1 norm of successive temperature corrections
  double linear_tol = 1e-13;  // relative CG residual of the heat solve
  int max_inner = 200;
  int max_outer = 50;
  double damping = 1.0;  // outer relaxation factor in (0, 1]
};

/// Data of one coupled run. `momentum_source` and `heat_source` are extra
/// loads on top of buoyancy and dissipation (used by manufactured cases);
/// leave them empty otherwise.
struct Problem {
  MaterialModel material;
  VectorFn g;
  ScalarFn theta_D;
  VectorFn momentum_source;
  ScalarFn heat_source;
  SolverSettings settings;
};

/// One iterate of the coupled system. theta = theta_D + vartheta.
struct State {
  std::vector<double> u;
  std::vector<double> P;
  std::vector<double> theta;
  std::vector<double> vartheta;
};

struct InnerTrace {
  std::vector<double> increments;  // ||w_k - w_{k-1}||_H1, k = 1, 2, ...
  std::vector<double> ratios;      // beta_hat_k = increments[k] / increments[k-1], k >= 2
};

struct FaceFlow {
  double min_flux = 0.0;
  double inflow_fraction = 0.0;
};

/// u.n sampled at the Gauss points of the open ends; face 0 is x = 0,
/// face 1 is x = Lx.
struct BackwardFlow {
  double min_flux = 0.0;
  double inflow_fraction = 0.0;
  std::array<FaceFlow, 2> faces{};
};

struct OuterRecord {
  int iter = 0;
  int inner_iters = 0;
  double beta_hat = 0.0;  // largest inner ratio of this outer step (0 if none)
  double d_theta_norm = 0.0;
  double r_momentum = 0.0;
  double r_heat = 0.0;
  double min_flux = 0.0;
  double inflow_fraction = 0.0;
  double wall_seconds = 0.0;
  InnerTrace inner;
};

struct IterationTrace {
  std::vector<OuterRecord> records;
  bool converged = false;
};

/// CSV with header iter,inner_iters,beta_hat,d_theta_norm,r_momentum,r_heat,
/// min_flux,inflow_fraction. Wall time is left out so reruns compare equal.
std::string trace_csv(const IterationTrace& trace);

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, IterationTrace outer, InnerTrace inner)
      : std::runtime_error(what), trace(std::move(outer)), inner(std::move(inner)) {}
  IterationTrace trace;
  InnerTrace inner;
};

struct InnerResult {
  std::vector<double> u;
  std::vector<double> P;
  InnerTrace trace;
};

struct Residuals {
  double r_momentum = 0.0;
  double r_heat = 0.0;
};

struct OuterResult {
  State state;
  IterationTrace trace;
};

/// Momentum contraction, linearized heat step and the outer Picard loop
/// on a fixed discrete space. The saddle factorization is computed once and
/// reused by every inner step.
class CoupledSolver {
 public:
  CoupledSolver(const DiscreteSpace& space, Problem problem);

  const DiscreteSpace& space() const { return *space_; }
  const Problem& problem() const { return problem_; }
  const std::vector<double>& theta_D() const { return theta_D_; }

  /// Iterates w_k = K(w_{k-1}) from u_init with the temperature frozen.
  /// Throws DivergenceError after 3 consecutive ratios >= 1 or when
  /// max_inner is exhausted.
  InnerResult inner_momentum_solve(std::span<const double> theta_frozen,
                                   std::span<const double> u_init) const;

  /// Homogeneous temperature correction for velocity u and frozen full
  /// temperature theta_frozen.
  std::vector<double> heat_solve(std::span<const double> u,
                                 std::span<const double> theta_frozen) const;

  /// Outer loop from vartheta = 0.
  OuterResult outer_loop() const;

  Residuals weak_residual(const State& state) const;

  /// H1 norm of a scalar or component-blocked vector nodal field.
  double h1_norm(std::span<const double> field) const;

 private:
  const DiscreteSpace* space_;
  Problem problem_;
  SparseMatrix saddle_;          // unconstrained
  SparseLU saddle_lu_;           // constrained
  SparseMatrix kappa_;           // unconstrained
  SparseMatrix kappa_constrained_;
  SparseMatrix h1_;              // scalar mass + stiffness
  std::vector<double> theta_D_;
  std::vector<double> lifting_;  // kappa(theta_D, phi_i)
  std::vector<double> momentum_src_;
  std::vector<double> heat_src_;
};

BackwardFlow backward_flow_measure(const DiscreteSpace& space, std::span<const double> u);

/// alpha1 nu int e(u):e(u), i.e. the sum of the dissipation load entries.
double total_dissipation(const DiscreteSpace& space, const MaterialModel& model,
                         std::span<const double> u);

/// int f over the domain for a scalar nodal field.
double integral(const DiscreteSpace& space, std::span<const double> f);
double domain_volume(const DiscreteSpace& space);

}  // namespace heatduct
