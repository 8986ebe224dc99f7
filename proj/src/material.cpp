#include "heatduct/material.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace heatduct {

MaterialModel make_boussinesq_material(double nu, double rho0, double cV,
                                       double lambda, double alpha1,
                                       double alpha_v, double theta_ref) {
  MaterialModel m;
  m.nu = nu;
  m.rho0 = rho0;
  m.cV = cV;
  m.lambda = lambda;
  m.alpha1 = alpha1;
  m.rho_law = {DensityLawKind::ClampedBoussinesq, alpha_v, theta_ref, 0.5 * rho0};
  m.rho_sharp = rho0;
  m.C_rho = rho0 * std::abs(alpha_v);
  return m;
}

double density(const MaterialModel& model, double theta) {
  const auto& law = model.rho_law;
  switch (law.kind) {
    case DensityLawKind::Constant:
      return model.rho0;
    case DensityLawKind::Linear:
      return model.rho0 * (1.0 - law.alpha_v * (theta - law.theta_ref));
    case DensityLawKind::ClampedBoussinesq:
      break;
  }
  const double raw = model.rho0 * (1.0 - law.alpha_v * (theta - law.theta_ref));
  return std::clamp(raw, law.rho_min, model.rho0);
}

ValidationReport validate(const MaterialModel& model, double t_max, int samples) {
  ValidationReport report;
  auto fail = [&](const std::string& msg) {
    report.ok = false;
    if (std::find(report.violations.begin(), report.violations.end(), msg) ==
        report.violations.end())
      report.violations.push_back(msg);
  };
  if (!(model.nu > 0.0)) fail("nu must be positive");
  if (!(model.rho0 > 0.0)) fail("rho0 must be positive");
  if (!(model.cV > 0.0)) fail("cV must be positive");
  if (!(model.lambda > 0.0)) fail("lambda must be positive");
  if (!(model.alpha1 >= 0.0)) fail("alpha1 must be nonnegative");
  if (samples < 2) samples = 2;

  const double h = 2.0 * t_max / (samples - 1);
  double prev = density(model, -t_max);
  double prev_t = -t_max;
  for (int i = 0; i < samples; ++i) {
    const double t = -t_max + h * i;
    const double r = density(model, t);
    if (!std::isfinite(r)) fail("density is not finite");
    if (!(r > 0.0)) {
      std::ostringstream os;
      os << "positivity: density <= 0 on the sampled range";
      fail(os.str());
    }
    if (r > model.rho_sharp * (1.0 + 1e-14)) fail("bound: density exceeds rho_sharp");
    if (i > 0) {
      if (r > prev * (1.0 + 1e-14) + 1e-300) fail("monotonicity: density increases with temperature");
      const double slope = std::abs(r - prev) / (t - prev_t);
      report.empirical_C_rho = std::max(report.empirical_C_rho, slope);
    }
    prev = r;
    prev_t = t;
  }
  if (report.empirical_C_rho > model.C_rho * (1.0 + 1e-9) + 1e-14)
    fail("lipschitz: sampled slope exceeds C_rho");
  return report;
}

std::string to_string(DensityLawKind kind) {
  switch (kind) {
    case DensityLawKind::Constant: return "constant";
    case DensityLawKind::ClampedBoussinesq: return "clamped_boussinesq";
    case DensityLawKind::Linear: return "linear";
  }
  return "unknown";
}

DensityLawKind density_law_from_string(const std::string& name) {
  if (name == "constant") return DensityLawKind::Constant;
  if (name == "clamped_boussinesq") return DensityLawKind::ClampedBoussinesq;
  if (name == "linear") return DensityLawKind::Linear;
  throw std::invalid_argument("unknown density law '" + name + "'");
}

}  // namespace heatduct
