#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace heatduct {

using Complex = std::complex<double>;

/// Symbol of the Stokes pencil at a Dirichlet/Neumann edge with opening
/// angle pi/2:  f(z) = z^2 - 4 cos^2(z pi/2) - sin^2(z pi/2).
Complex mellin_symbol(Complex z);
Complex mellin_symbol_derivative(Complex z);

/// Closed rectangle re_min <= Re z <= re_max, |Im z| <= im_max.
struct Strip {
  double re_min = 0.1;
  double re_max = 1.9;
  double im_max = 5.0;
};

struct Root {
  Complex z;
  double residual = 0.0;       // |f(z)|
  int newton_iterations = 0;
};

/// Raised when the argument-principle count and the polished roots disagree.
class MissedRootError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Winding number of f around the boundary of [x0,x1] x [y0,y1], from the
/// accumulated phase along the contour (`points_per_side` samples per side,
/// refined locally where the phase moves quickly).
int winding_count(double x0, double x1, double y0, double y1, int points_per_side = 1000);

/// All zeros of f in the strip: argument-principle box counting, recursive
/// subdivision and Newton polishing, cross-checked against a sign-change scan
/// of the real axis. Every returned root has |f(z)| < tol.
std::vector<Root> find_roots(const Strip& strip, double tol = 1e-12);

/// Real roots of f in [a, b] located by sign changes on `samples` points and
/// refined by bisection.
std::vector<double> real_axis_scan(double a, double b, int samples = 20000);

/// z_k = 2k + 1, k = 0..k_max: the zeros of cos(z pi/2) with Re z > 0.
std::vector<double> scalar_exponents(int k_max);

struct SpectrumOptions {
  Strip strip{0.05, 4.5, 3.0};
  int k_max = 3;
  double tol = 1e-12;
};

struct SpectrumResult {
  Strip strip;
  int winding_total = 0;
  std::vector<Root> stokes_roots;
  std::vector<double> scalar_roots;
  double mu_M = 0.0;
  double s0 = 0.0;
};

/// Upper regularity exponent s0 = 2 / (2 - mu).
double sobolev_exponent_bound(double mu);

struct RegularityBounds {
  double mu_M = 0.0;
  double s0 = 0.0;
  double z0 = 0.0;  // the non-trivial real root in (1, 2)
};

/// mu_M = smallest real part above 1 among all computed eigenvalues;
/// s0 = 2 / (2 - mu_M). Throws std::runtime_error if an eigenvalue other
/// than z = 1 lies in the strip 0 < Re z < mu_M.
RegularityBounds regularity_bounds(const SpectrumResult& spectrum);

SpectrumResult compute_spectrum(const SpectrumOptions& options = {});

/// Bounds for the default spectrum, computed once.
const RegularityBounds& default_regularity_bounds();

/// Per-component verdicts of max(0, 2 - mu_M) < delta_i + 2/p < 2.
/// Throws std::invalid_argument for p <= 1 or delta_i <= -2/p.
std::vector<bool> weighted_admissibility(std::span<const double> delta, double p, double mu_M);

/// CSV samples (re, im, abs, arg) of f on a grid over the strip with nre x nim
/// intervals, endpoints included.
std::string symbol_samples_csv(const Strip& strip, int nre, int nim);

}  // namespace heatduct
