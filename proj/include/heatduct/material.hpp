#pragma once

#include <string>
#include <vector>

namespace heatduct {

enum class DensityLawKind {
  Constant,           // rho = rho0
  ClampedBoussinesq,  // rho0 (1 - alpha_v (theta - theta_ref)) clamped to [rho_min, rho0]
  Linear,             // unclamped linear law; not globally admissible
};

struct DensityLaw {
  DensityLawKind kind = DensityLawKind::ClampedBoussinesq;
  double alpha_v = 0.0;
  double theta_ref = 0.0;
  double rho_min = 0.0;  // clamp floor of the clamped law
};

/// Physical constants and the temperature-dependent density law.
struct MaterialModel {
  double nu = 1.0;
  double rho0 = 1.0;
  double cV = 1.0;
  double lambda = 1.0;
  double alpha1 = 0.0;
  DensityLaw rho_law;
  double rho_sharp = 1.0;
  double C_rho = 0.0;
};

/// Builds a model with the clamped Boussinesq law (floor rho0/2) and the
/// tightest constants rho_sharp = rho0, C_rho = rho0 * alpha_v.
MaterialModel make_boussinesq_material(double nu, double rho0, double cV,
                                       double lambda, double alpha1,
                                       double alpha_v, double theta_ref = 0.0);

double density(const MaterialModel& model, double theta);

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> violations;
  /// Largest sampled difference quotient; a lower bound for C_rho.
  double empirical_C_rho = 0.0;
};

/// Samples the density law at `samples` points of [-t_max, t_max] and checks
/// positivity, monotonicity, the bound rho <= rho_sharp and the Lipschitz
/// constant. Never throws; violations are listed in the report.
ValidationReport validate(const MaterialModel& model, double t_max = 1e3,
                          int samples = 10000);

std::string to_string(DensityLawKind kind);
DensityLawKind density_law_from_string(const std::string& name);

}  // namespace heatduct
