#include "heatduct/spectrum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

namespace heatduct {

namespace {

constexpr double kPi = std::numbers::pi;

// Contour sample landed (numerically) on a zero of f.
struct ContourHit {};

double phase_step(Complex fa, Complex fb) { return std::arg(fb / fa); }

double segment_phase(Complex za, Complex zb, Complex fa, Complex fb, int depth) {
  const double dphi = phase_step(fa, fb);
  if (std::abs(dphi) <= kPi / 4.0 || depth > 40) return dphi;
  const Complex zm = 0.5 * (za + zb);
  const Complex fm = mellin_symbol(zm);
  if (std::abs(fm) < 1e-14) throw ContourHit{};
  return segment_phase(za, zm, fa, fm, depth + 1) + segment_phase(zm, zb, fm, fb, depth + 1);
}

double contour_phase(double x0, double x1, double y0, double y1, int n) {
  const std::array<Complex, 5> corners = {Complex(x0, y0), Complex(x1, y0), Complex(x1, y1),
                                          Complex(x0, y1), Complex(x0, y0)};
  double total = 0.0;
  for (int side = 0; side < 4; ++side) {
    const Complex a = corners[side], b = corners[side + 1];
    Complex zprev = a;
    Complex fprev = mellin_symbol(a);
    if (std::abs(fprev) < 1e-14) throw ContourHit{};
    for (int k = 1; k <= n; ++k) {
      const Complex z = a + (b - a) * (static_cast<double>(k) / n);
      const Complex fz = mellin_symbol(z);
      if (std::abs(fz) < 1e-14) throw ContourHit{};
      total += segment_phase(zprev, z, fprev, fz, 0);
      zprev = z;
      fprev = fz;
    }
  }
  return total;
}

struct Box {
  double x0, x1, y0, y1;
};

bool newton(Complex start, Root& out) {
  Complex z = start;
  for (int it = 1; it <= 80; ++it) {
    const Complex fz = mellin_symbol(z);
    const Complex d = mellin_symbol_derivative(z);
    if (std::abs(d) == 0.0) return false;
    const Complex step = fz / d;
    z -= step;
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    if (std::abs(step) <= 1e-14 * std::max(1.0, std::abs(z))) {
      out.z = z;
      out.residual = std::abs(mellin_symbol(z));
      out.newton_iterations = it;
      return true;
    }
  }
  return false;
}

bool inside(const Box& b, Complex z, double margin) {
  return z.real() >= b.x0 - margin && z.real() <= b.x1 + margin && z.imag() >= b.y0 - margin &&
         z.imag() <= b.y1 + margin;
}

int count_in(const Box& b, int n) {
  return static_cast<int>(std::lround(contour_phase(b.x0, b.x1, b.y0, b.y1, n) / (2.0 * kPi)));
}

void search(const Box& b, int count, int depth, int n, std::vector<Root>& out) {
  if (count <= 0) return;
  const double w = b.x1 - b.x0, h = b.y1 - b.y0;
  if (count == 1) {
    Root r;
    if (newton(Complex(0.5 * (b.x0 + b.x1), 0.5 * (b.y0 + b.y1)), r) && inside(b, r.z, 1e-12)) {
      out.push_back(r);
      return;
    }
  }
  if (depth > 60 || std::max(w, h) < 1e-10)
    throw MissedRootError("root search failed to isolate " + std::to_string(count) +
                          " zero(s) near " + std::to_string(b.x0) + "+" +
                          std::to_string(b.y0) + "i");
  static constexpr std::array<double, 5> fractions = {0.5713, 0.4329, 0.6181, 0.3719, 0.5257};
  for (double f : fractions) {
    Box lo = b, hi = b;
    if (w >= h) {
      lo.x1 = hi.x0 = b.x0 + f * w;
    } else {
      lo.y1 = hi.y0 = b.y0 + f * h;
    }
    try {
      const int c1 = count_in(lo, n);
      const int c2 = count_in(hi, n);
      if (c1 + c2 != count || c1 < 0 || c2 < 0) continue;
      search(lo, c1, depth + 1, n, out);
      search(hi, c2, depth + 1, n, out);
      return;
    } catch (const ContourHit&) {
      continue;
    }
  }
  throw MissedRootError("could not split a box without crossing a zero");
}

}  // namespace

Complex mellin_symbol(Complex z) {
  const Complex c = std::cos(z * (kPi / 2.0));
  const Complex s = std::sin(z * (kPi / 2.0));
  return z * z - 4.0 * c * c - s * s;
}

Complex mellin_symbol_derivative(Complex z) {
  return 2.0 * z + (1.5 * kPi) * std::sin(kPi * z);
}

int winding_count(double x0, double x1, double y0, double y1, int points_per_side) {
  try {
    return static_cast<int>(
        std::lround(contour_phase(x0, x1, y0, y1, points_per_side) / (2.0 * kPi)));
  } catch (const ContourHit&) {
    throw std::runtime_error("a zero of the symbol lies on the counting contour");
  }
}

std::vector<double> real_axis_scan(double a, double b, int samples) {
  std::vector<double> roots;
  auto fr = [](double x) { return mellin_symbol(Complex(x, 0.0)).real(); };
  double xp = a, fp = fr(a);
  for (int k = 1; k <= samples; ++k) {
    const double x = a + (b - a) * k / samples;
    const double fx = fr(x);
    if (fp == 0.0) {
      roots.push_back(xp);
    } else if (fp * fx < 0.0) {
      double lo = xp, hi = x, flo = fp;
      for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = fr(mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    xp = x;
    fp = fx;
  }
  if (fp == 0.0 && (roots.empty() || roots.back() != xp)) roots.push_back(xp);
  return roots;
}

std::vector<Root> find_roots(const Strip& strip, double tol) {
  if (!(strip.re_min < strip.re_max) || !(strip.im_max >= 0.0) || !(tol > 0.0))
    throw std::invalid_argument("invalid strip or tolerance");
  constexpr int n = 1000;
  // Grow the box slightly so zeros on the closed boundary are counted.
  const double pad = 1e-9;
  Box top{strip.re_min - pad, strip.re_max + pad, -strip.im_max - pad, strip.im_max + pad};
  int total = 0;
  for (int attempt = 0;; ++attempt) {
    try {
      total = count_in(top, n);
      break;
    } catch (const ContourHit&) {
      if (attempt > 5) throw std::runtime_error("counting contour keeps hitting a zero");
      top.x0 -= pad;
      top.x1 += pad;
      top.y0 -= pad;
      top.y1 += pad;
    }
  }

  std::vector<Root> roots;
  search(top, total, 0, n, roots);
  if (static_cast<int>(roots.size()) != total)
    throw MissedRootError("winding count " + std::to_string(total) + " but " +
                          std::to_string(roots.size()) + " roots polished");
  for (auto& r : roots) {
    if (std::abs(r.z.imag()) < 1e-13) r.z = Complex(r.z.real(), 0.0);
    if (!(r.residual < tol))
      throw MissedRootError("polished root residual " + std::to_string(r.residual) +
                            " above tolerance");
  }
  std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) {
    if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
    return a.z.imag() < b.z.imag();
  });

  // Every real sign change must be among the polished roots.
  for (double x : real_axis_scan(strip.re_min, strip.re_max)) {
    const bool matched = std::any_of(roots.begin(), roots.end(), [&](const Root& r) {
      return std::abs(r.z - Complex(x, 0.0)) < 1e-8;
    });
    if (!matched)
      throw MissedRootError("real-axis scan found a zero at " + std::to_string(x) +
                            " missed by the contour search");
  }
  return roots;
}

std::vector<double> scalar_exponents(int k_max) {
  if (k_max < 0) throw std::invalid_argument("k_max must be nonnegative");
  std::vector<double> out;
  for (int k = 0; k <= k_max; ++k) out.push_back(2.0 * k + 1.0);
  return out;
}

double sobolev_exponent_bound(double mu) {
  if (!(mu < 2.0)) throw std::invalid_argument("mu_M must be below 2");
  return 2.0 / (2.0 - mu);
}

RegularityBounds regularity_bounds(const SpectrumResult& spectrum) {
  std::vector<Complex> eig;
  for (const auto& r : spectrum.stokes_roots) eig.push_back(r.z);
  for (double z : spectrum.scalar_roots) eig.emplace_back(z, 0.0);

  constexpr double kSame = 1e-9;
  double mu = std::numeric_limits<double>::infinity();
  for (const auto& z : eig)
    if (z.real() > 1.0 + kSame) mu = std::min(mu, z.real());
  if (!std::isfinite(mu)) throw std::runtime_error("no eigenvalue with real part above 1");

  for (const auto& z : eig) {
    const bool is_one = std::abs(z - Complex(1.0, 0.0)) < kSame;
    if (!is_one && z.real() > 0.0 && z.real() < mu - kSame)
      throw std::runtime_error("eigenvalue other than 1 inside the strip 0 < Re z < mu_M");
  }

  RegularityBounds b;
  b.mu_M = mu;
  b.s0 = sobolev_exponent_bound(mu);
  for (const auto& r : spectrum.stokes_roots)
    if (r.z.imag() == 0.0 && r.z.real() > 1.0 + kSame && r.z.real() < 2.0 - kSame) {
      b.z0 = r.z.real();
      break;
    }
  return b;
}

SpectrumResult compute_spectrum(const SpectrumOptions& options) {
  SpectrumResult res;
  res.strip = options.strip;
  res.stokes_roots = find_roots(options.strip, options.tol);
  res.winding_total = static_cast<int>(res.stokes_roots.size());
  res.scalar_roots = scalar_exponents(options.k_max);
  const auto b = regularity_bounds(res);
  res.mu_M = b.mu_M;
  res.s0 = b.s0;
  return res;
}

const RegularityBounds& default_regularity_bounds() {
  static const RegularityBounds bounds = regularity_bounds(compute_spectrum());
  return bounds;
}

std::vector<bool> weighted_admissibility(std::span<const double> delta, double p, double mu_M) {
  if (!(p > 1.0)) throw std::invalid_argument("integrability exponent p must exceed 1");
  std::vector<bool> out;
  const double lower = std::max(0.0, 2.0 - mu_M);
  for (double d : delta) {
    if (!(d > -2.0 / p)) throw std::invalid_argument("weight exponent must exceed -2/p");
    const double v = d + 2.0 / p;
    out.push_back(lower < v && v < 2.0);
  }
  return out;
}

std::string symbol_samples_csv(const Strip& strip, int nre, int nim) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "re,im,abs,arg\n";
  for (int j = 0; j <= nim; ++j)
    for (int i = 0; i <= nre; ++i) {
      const double x = strip.re_min + (strip.re_max - strip.re_min) * i / std::max(nre, 1);
      const double y = -strip.im_max + 2.0 * strip.im_max * j / std::max(nim, 1);
      const Complex f = mellin_symbol(Complex(x, y));
      os << x << ',' << y << ',' << std::abs(f) << ',' << std::arg(f) << '\n';
    }
  return os.str();
}

}  // namespace heatduct
