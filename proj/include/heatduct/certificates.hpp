#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "heatduct/fixed_point.hpp"
#include "heatduct/material.hpp"
#include "heatduct/space.hpp"

namespace heatduct {

/// Empirical lower bounds for the form and embedding constants, each the
/// running maximum of its defining ratio over random smooth fields.
struct ConstantEstimates {
  double C_b = 0.0;
  double C_d = 0.0;
  double C_e = 0.0;
  double C_eps = 0.0;
  double C_1 = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
  double s = 2.0;
  double r = 2.0;
  /// history[k] holds the five maxima after k + 1 samples (C_b, C_d, C_e, C_eps, C_1).
  std::vector<std::array<double, 5>> history;
};

/// Random smooth test fields on the box [0,L]. Velocities are curls of
/// potentials vanishing to second order on the walls, so they are
/// divergence free and vanish on y, z walls. Wall scalars vanish on the
/// y, z walls; free scalars do not.
VectorFn random_solenoidal_field(const Vec3& dims, std::mt19937_64& rng);
ScalarFn random_wall_scalar(const Vec3& dims, std::mt19937_64& rng);
ScalarFn random_free_scalar(const Vec3& dims, std::mt19937_64& rng, double amplitude = 1.0);

/// Requires samples >= 100 and s, r in the admissible exponent range.
ConstantEstimates estimate_constants(const DiscreteSpace& space, const MaterialModel& model,
                                     int samples, std::uint64_t seed, double s = 2.0,
                                     double r = 2.0, int workers = 0);

struct SmallnessResult {
  std::optional<double> beta;  // empty means ABSENT
  double beta_raw = 0.0;       // 4 C_b rho_sharp rho0 ||g||
  double g_norm = 0.0;
  double first_threshold = 0.0;   // 1 / (4 C_b rho_sharp rho0), bound on ||g|| for beta = 1
  double second_threshold = 0.0;  // 1 / (2 C_eps C_d cV rho_sharp^2)
  double headroom = 0.0;          // second_threshold - ||g||
  std::optional<double> ball_radius;  // beta / (2 C_b rho0)
  bool ok = false;
};

/// Smallest beta in (0, 1) with ||g|| <= beta / (4 C_b rho_sharp rho0) and
/// beta / (4 C_b rho_sharp rho0) < 1 / (2 C_eps C_d cV rho_sharp^2), if any.
SmallnessResult smallness_check(const ConstantEstimates& est, const MaterialModel& model,
                                double g_norm);

/// Norm surrogates of one state.
struct StateNorms {
  double u = 0.0;      // max(broken W^{2,s}, load norm / nu)
  double theta = 0.0;  // broken W^{2,r} of the full temperature
  double u_w2 = 0.0;
  double u_load = 0.0;  // ||rho(theta) g + f - rho0 (u.grad) u||_{L^s} / nu
};

StateNorms state_norms(const DiscreteSpace& space, const Problem& problem, const State& state,
                       double s = 2.0, double r = 2.0);

struct UniquenessResult {
  double R1 = 0.0;
  double R2 = 0.0;
  // Coefficients of ||sigma|| and ||z|| in the two inequalities before adding.
  double sigma_heat = 0.0;
  double z_heat = 0.0;
  double sigma_momentum = 0.0;
  double z_momentum = 0.0;
  bool ok = false;
  std::string grouping;
};

/// R1 collects every coefficient of the temperature difference and R2 every
/// coefficient of the velocity difference after adding the two inequalities.
/// Throws std::invalid_argument for r <= 3/2.
UniquenessResult uniqueness_certificate(const StateNorms& n1, const StateNorms& n2,
                                        const ConstantEstimates& est,
                                        const MaterialModel& model, double g_norm, double r);

struct CertificateReport {
  ConstantEstimates constants;
  SmallnessResult smallness;
  UniquenessResult uniqueness;
  StateNorms norms1;
  StateNorms norms2;
  bool smallness_ok = false;
  bool uniqueness_ok = false;
};

CertificateReport make_certificate(const ConstantEstimates& est, const MaterialModel& model,
                                   double g_norm, const StateNorms& n1, const StateNorms& n2,
                                   double r);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;  // +infinity when unbounded
  bool hi_closed = true;
};

/// Admissible r for a given s: [6/5, 3s/(2(3-s))] for s < 3 and [6/5, inf)
/// for s >= 3. Throws std::invalid_argument unless 4/3 <= s < s0.
Interval admissible_sr(double s);

}  // namespace heatduct
