#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "heatduct/spectrum.hpp"

using namespace heatduct;

TEST_CASE("symbol values") {
  CHECK(std::abs(mellin_symbol(1.0)) < 1e-15);
  CHECK(std::abs(mellin_symbol(2.0)) < 1e-14);
  CHECK(std::abs(mellin_symbol(0.0) - Complex(-4.0)) < 1e-15);
}

TEST_CASE("symbol derivative matches a difference quotient") {
  const Complex z(1.7, 0.4);
  const double h = 1e-6;
  const Complex fd = (mellin_symbol(z + h) - mellin_symbol(z - h)) / (2 * h);
  CHECK(std::abs(fd - mellin_symbol_derivative(z)) < 1e-8);
}

TEST_CASE("conjugate symmetry") {
  for (const Complex z : {Complex(0.3, 2.0), Complex(2.5, -1.1), Complex(3.9, 0.7)})
    CHECK(std::abs(mellin_symbol(std::conj(z)) - std::conj(mellin_symbol(z))) < 1e-13);
}

TEST_CASE("two roots in the anchor strip") {
  CHECK(winding_count(0.1, 1.9, -5, 5) == 2);
  const auto roots = find_roots(Strip{0.1, 1.9, 5.0});
  REQUIRE(roots.size() == 2);
  CHECK(roots[0].z.real() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(roots[1].z.real() == doctest::Approx(1.352317).epsilon(1e-6));
  for (const auto& r : roots) {
    CHECK(std::abs(r.z.imag()) < 1e-12);
    CHECK(r.residual < 1e-12);
  }
}

TEST_CASE("root at 2") {
  const auto roots = find_roots(Strip{1.8, 2.2, 0.5});
  REQUIRE(roots.size() == 1);
  CHECK(std::abs(roots[0].z - Complex(2.0)) < 1e-12);
}

TEST_CASE("empty strip") {
  CHECK(winding_count(0.1, 0.9, -5, 5) == 0);
  CHECK(find_roots(Strip{0.1, 0.9, 5.0}).empty());
  CHECK(real_axis_scan(0.1, 0.9).empty());
}

TEST_CASE("complex roots come in conjugate pairs") {
  const auto roots = find_roots(Strip{0.05, 4.5, 3.0});
  int complex_count = 0;
  for (const auto& r : roots) {
    if (std::abs(r.z.imag()) < 1e-10) continue;
    ++complex_count;
    bool paired = false;
    for (const auto& s : roots) paired |= std::abs(s.z - std::conj(r.z)) < 1e-10;
    CHECK(paired);
  }
  CHECK(complex_count % 2 == 0);
}

TEST_CASE("scalar exponents") {
  CHECK(scalar_exponents(0) == std::vector<double>{1.0});
  CHECK(scalar_exponents(2) == std::vector<double>{1.0, 3.0, 5.0});
  for (double z : scalar_exponents(2)) CHECK(std::abs(std::cos(z * std::numbers::pi / 2)) < 1e-15);
  for (double z : scalar_exponents(20))
    CHECK(std::abs(std::cos(z * std::numbers::pi / 2)) < 1e-15 * z);
  CHECK_THROWS_AS(scalar_exponents(-1), std::invalid_argument);
}

TEST_CASE("regularity bounds") {
  const auto& b = default_regularity_bounds();
  CHECK(std::abs(b.mu_M - 1.352317) < 1e-5);
  CHECK(std::abs(b.z0 - 1.352317) < 1e-5);
  CHECK(std::abs(b.s0 - 3.087930) < 1e-5);
  CHECK(sobolev_exponent_bound(1.0) == doctest::Approx(2.0));
  // 2/s > 2 - mu  iff  s < s0
  CHECK(2.0 / (b.s0 * 0.999) > 2.0 - b.mu_M);
  CHECK(2.0 / (b.s0 * 1.001) < 2.0 - b.mu_M);
}

TEST_CASE("mu_M is the smallest real part above 1 over both families") {
  const auto sp = compute_spectrum();
  double mu = 1e300;
  for (const auto& r : sp.stokes_roots)
    if (r.z.real() > 1 + 1e-9) mu = std::min(mu, r.z.real());
  for (double z : sp.scalar_roots)
    if (z > 1 + 1e-9) mu = std::min(mu, z);
  CHECK(sp.mu_M == mu);
  CHECK(sp.mu_M < 3.0);
}

TEST_CASE("weighted admissibility") {
  const double mu = 1.352317;
  const std::vector<double> zero{0.0};
  CHECK(weighted_admissibility(zero, 2.0, mu)[0]);
  CHECK_FALSE(weighted_admissibility(zero, 4.0, mu)[0]);
  for (double s : {1.4, 2.0, 2.5, 3.0, 3.08})
    CHECK(weighted_admissibility(zero, s, mu)[0]);
  CHECK_THROWS_AS(weighted_admissibility(zero, 1.0, mu), std::invalid_argument);
  const std::vector<double> low{-1.5};
  CHECK_THROWS_AS(weighted_admissibility(low, 2.0, mu), std::invalid_argument);
}

TEST_CASE("symbol samples") {
  const auto csv = symbol_samples_csv(Strip{0.5, 1.5, 1.0}, 3, 2);
  CHECK(csv.rfind("re,im,abs,arg\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 4 * 3);
}
