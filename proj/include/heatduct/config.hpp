#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "heatduct/fixed_point.hpp"
#include "heatduct/material.hpp"
#include "heatduct/spectrum.hpp"
#include "heatduct/types.hpp"

namespace heatduct {

/// Named closed-form field from the built-in registry plus its parameters.
///   vector fields:  constant gx gy gz
///   scalar fields:  constant c | linear c0 cx cy cz | cosine_x c0 amp
struct FieldSpec {
  std::string name;
  std::vector<double> params;
  friend bool operator==(const FieldSpec&, const FieldSpec&) = default;
};

struct RunConfig {
  // [geometry]
  Vec3 dims{1.0, 1.0, 1.0};
  std::array<int, 3> divisions{1, 1, 1};
  int quad_order = 5;
  // [material]
  double nu = 1.0;
  double rho0 = 1.0;
  double cV = 1.0;
  double lambda = 1.0;
  double alpha1 = 0.0;
  DensityLawKind density_law = DensityLawKind::ClampedBoussinesq;
  double alpha_v = 0.0;
  double theta_ref = 0.0;
  std::optional<double> rho_min;    // default rho0 / 2
  std::optional<double> rho_sharp;  // default rho0
  std::optional<double> C_rho;      // default rho0 |alpha_v|
  // [forcing]
  FieldSpec g{"constant", {0.0, 0.0, 0.0}};
  FieldSpec theta_D{"constant", {0.0}};
  // [solver]
  SolverSettings solver;
  // [certify]
  int samples = 200;
  double s = 2.0;
  double r = 2.0;
  // [spectrum]
  SpectrumOptions spectrum;
  int csv_nre = 0;
  int csv_nim = 0;
  // [mms]
  std::string mms_case = "stokes_trig";
  std::vector<std::array<int, 3>> mms_levels{{2, 2, 8}, {4, 4, 16}, {8, 8, 32}};
  double mms_amplitude = 1.0;
  // [output]
  std::string out_dir = "out";
  std::uint64_t seed = 0;
};

/// Every problem found while parsing, one message per line ("line N: ...").
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  std::vector<std::string> errors;
};

/// Line-based format: "[section]" headers, "key = value" entries, '#'
/// comments. Required: geometry.dims, geometry.divisions, material.nu,
/// material.rho0, material.cV, material.lambda, forcing.g.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical text with every key; parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& config);

MaterialModel material_from(const RunConfig& config);
VectorFn make_vector_field(const FieldSpec& spec);
ScalarFn make_scalar_field(const FieldSpec& spec, const Vec3& dims);
Problem problem_from(const RunConfig& config);

}  // namespace heatduct
