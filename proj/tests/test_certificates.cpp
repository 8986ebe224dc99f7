#include <doctest.h>

#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "heatduct/certificates.hpp"
#include "heatduct/fixed_point.hpp"
#include "heatduct/forms.hpp"
#include "heatduct/mesh.hpp"
#include "heatduct/spectrum.hpp"

using namespace heatduct;

namespace {

ConstantEstimates hand_constants() {
  ConstantEstimates e;
  e.C_b = 0.01;
  e.C_d = 0.02;
  e.C_e = 0.03;
  e.C_eps = 1.5;
  e.C_1 = 0.5;
  return e;
}

MaterialModel hand_model() {
  MaterialModel m;
  m.nu = 0.8;
  m.rho0 = 1.0;
  m.cV = 2.0;
  m.alpha1 = 0.5;
  m.rho_sharp = 1.2;
  m.C_rho = 0.1;
  return m;
}

const DiscreteSpace& coarse() {
  static const DiscreteSpace s = build_spaces(build_channel_mesh(1, 1, 2, 2, 2, 4), 4);
  return s;
}

}  // namespace

TEST_CASE("smallness by hand substitution") {
  const auto e = hand_constants();
  const auto m = hand_model();
  // 4 C_b rho_sharp rho0 = 0.048, second threshold 1 / (2 * 1.5 * 0.02 * 2 * 1.44)
  const auto r = smallness_check(e, m, 3.0);
  REQUIRE(r.beta.has_value());
  CHECK(*r.beta == doctest::Approx(0.144).epsilon(1e-14));
  CHECK(r.first_threshold == doctest::Approx(1 / 0.048).epsilon(1e-14));
  CHECK(r.second_threshold == doctest::Approx(1 / 0.1728).epsilon(1e-14));
  CHECK(r.headroom == doctest::Approx(1 / 0.1728 - 3.0).epsilon(1e-14));
  REQUIRE(r.ball_radius.has_value());
  CHECK(*r.ball_radius == doctest::Approx(7.2).epsilon(1e-14));
  CHECK(r.ok);

  // beta = 0.48 < 1 but ||g|| = 10 breaks the second inequality
  const auto big = smallness_check(e, m, 10.0);
  CHECK_FALSE(big.beta.has_value());
  CHECK_FALSE(big.ok);
  CHECK(big.beta_raw == doctest::Approx(0.48));
}

TEST_CASE("zero load gives a machine positive beta") {
  const auto r = smallness_check(hand_constants(), hand_model(), 0.0);
  REQUIRE(r.beta.has_value());
  CHECK(*r.beta == std::numeric_limits<double>::min());
  CHECK(r.ok);
  CHECK_THROWS_AS(smallness_check(hand_constants(), hand_model(), -1.0), std::invalid_argument);
}

TEST_CASE("beta = 1 is ABSENT") {
  ConstantEstimates e = hand_constants();
  e.C_b = 0.25;
  e.C_d = 1e-6;
  MaterialModel m = hand_model();
  m.rho_sharp = 1.0;
  const auto r = smallness_check(e, m, 1.0);
  CHECK(r.beta_raw == 1.0);
  CHECK_FALSE(r.beta.has_value());
  CHECK_FALSE(r.ok);
}

TEST_CASE("half the threshold against the direct inequalities") {
  for (double cd : {0.02, 1e-5}) {
    ConstantEstimates e = hand_constants();
    e.C_d = cd;
    const auto m = hand_model();
    const double coeff = 4 * e.C_b * m.rho_sharp * m.rho0;
    const double g = 0.5 / coeff;
    const auto r = smallness_check(e, m, g);
    CHECK(r.beta_raw == doctest::Approx(0.5));
    const bool second = g < 1 / (2 * e.C_eps * e.C_d * m.cV * m.rho_sharp * m.rho_sharp);
    CHECK(r.ok == second);
    CHECK(r.ok == (cd < 0.01));
  }
}

TEST_CASE("uniqueness by hand substitution") {
  const auto e = hand_constants();
  const auto m = hand_model();
  StateNorms n1, n2;
  n1.u = 2;
  n1.theta = 4;
  n2.u = 1;
  n2.theta = 5;
  const auto r = uniqueness_certificate(n1, n2, e, m, 3.0, 2.0);
  CHECK(r.sigma_heat == doctest::Approx(0.102).epsilon(1e-13));
  CHECK(r.z_heat == doctest::Approx(0.324).epsilon(1e-13));
  CHECK(r.sigma_momentum == doctest::Approx(0.15 * 0.102).epsilon(1e-13));
  CHECK(r.z_momentum == doctest::Approx(0.15 * 0.324 + 0.03).epsilon(1e-13));
  CHECK(r.R1 == doctest::Approx(0.1173).epsilon(1e-13));
  CHECK(r.R2 == doctest::Approx(0.4026).epsilon(1e-13));
  CHECK(r.ok);
  CHECK_FALSE(r.grouping.empty());
}

TEST_CASE("uniqueness edge cases") {
  const StateNorms zero;
  const auto r = uniqueness_certificate(zero, zero, hand_constants(), hand_model(), 5.0, 2.0);
  CHECK(r.R1 == 0.0);
  CHECK(r.R2 == 0.0);
  CHECK(r.ok);
  CHECK_THROWS_AS(uniqueness_certificate(zero, zero, hand_constants(), hand_model(), 1, 1.5),
                  std::invalid_argument);
  CHECK_NOTHROW(uniqueness_certificate(zero, zero, hand_constants(), hand_model(), 1, 1.51));
}

TEST_CASE("verdicts are monotone in the data") {
  const auto e = hand_constants();
  const auto m = hand_model();
  double prev_beta = -1, prev_r1 = -1, prev_r2 = -1;
  bool failed = false;
  for (double k = 0.25; k <= 64; k *= 2) {
    StateNorms n;
    n.u = 0.5 * k;
    n.theta = 0.3 * k;
    const auto rep = make_certificate(e, m, k, n, n, 2.0);
    CHECK(rep.smallness.beta_raw > prev_beta);
    CHECK(rep.uniqueness.R1 >= prev_r1);
    CHECK(rep.uniqueness.R2 >= prev_r2);
    if (failed) {
      CHECK_FALSE(rep.smallness_ok);
    }
    failed = failed || !rep.smallness_ok;
    prev_beta = rep.smallness.beta_raw;
    prev_r1 = rep.uniqueness.R1;
    prev_r2 = rep.uniqueness.R2;
  }
  CHECK(failed);
}

TEST_CASE("admissible r") {
  const auto a = admissible_sr(2.0);
  CHECK(a.lo == doctest::Approx(1.2));
  CHECK(a.hi == doctest::Approx(3.0));
  CHECK(a.hi_closed);
  const auto b = admissible_sr(3.0);
  CHECK(b.lo == doctest::Approx(1.2));
  CHECK(std::isinf(b.hi));
  CHECK_FALSE(b.hi_closed);
  const auto c = admissible_sr(4.0 / 3.0);
  CHECK(c.lo == doctest::Approx(1.2));
  CHECK(c.hi == doctest::Approx(1.2));
  CHECK_THROWS_AS(admissible_sr(1.3), std::invalid_argument);
  CHECK_THROWS_AS(admissible_sr(default_regularity_bounds().s0), std::invalid_argument);
  CHECK_NOTHROW(admissible_sr(3.08));
}

TEST_CASE("random fields satisfy their wall conditions") {
  const Vec3 dims{1.5, 1, 2};
  std::mt19937_64 rng(17);
  for (int k = 0; k < 10; ++k) {
    const auto u = random_solenoidal_field(dims, rng);
    const auto t = random_wall_scalar(dims, rng);
    for (double a : {0.0, 0.3, 0.77, 1.0}) {
      for (const Vec3& p : {Vec3{a * 1.5, 0, 0.4}, Vec3{a * 1.5, 1, 1.1}, Vec3{0.2, a, 0},
                            Vec3{1.4, a, 2}}) {
        CHECK(norm(u(p)) < 1e-13);
        CHECK(std::abs(t(p)) < 1e-13);
      }
    }
    // divergence by central differences
    const Vec3 p{0.4, 0.35, 1.3};
    const double h = 1e-5;
    double div = 0;
    for (int i = 0; i < 3; ++i) {
      Vec3 a = p, b = p;
      a[i] += h;
      b[i] -= h;
      div += (u(a)[i] - u(b)[i]) / (2 * h);
    }
    CHECK(std::abs(div) < 1e-6 * (1 + norm(u(p))));
  }
}

TEST_CASE("constant estimates") {
  const auto& s = coarse();
  const auto m = make_boussinesq_material(1, 1, 1, 1, 0.5, 0.1);
  const auto a = estimate_constants(s, m, 100, 42);
  const auto b = estimate_constants(s, m, 200, 42);
  const auto c = estimate_constants(s, m, 100, 42, 2.0, 2.0, 1);
  CHECK_THROWS_AS(estimate_constants(s, m, 99, 42), std::invalid_argument);

  SUBCASE("positive and finite") {
    for (double v : {a.C_b, a.C_d, a.C_e, a.C_eps, a.C_1}) {
      CHECK(v > 0.0);
      CHECK(std::isfinite(v));
    }
    CHECK(a.samples == 100);
    CHECK(a.seed == 42);
    CHECK(a.history.size() == 100);
  }
  SUBCASE("running maxima") {
    for (std::size_t k = 1; k < b.history.size(); ++k)
      for (int j = 0; j < 5; ++j) CHECK(b.history[k][j] >= b.history[k - 1][j]);
    CHECK(b.C_b >= a.C_b);
    CHECK(b.C_d >= a.C_d);
    CHECK(b.C_e >= a.C_e);
    CHECK(b.C_eps >= a.C_eps);
    CHECK(b.C_1 >= a.C_1);
    // the first 100 draws are shared
    CHECK(b.history[99] == a.history[99]);
  }
  SUBCASE("deterministic and independent of the worker count") {
    CHECK(c.history == a.history);
    const auto d = estimate_constants(s, m, 100, 43);
    CHECK(d.C_b != a.C_b);
  }
}

TEST_CASE("state norms") {
  const auto& s = coarse();
  Problem p;
  p.material = make_boussinesq_material(1, 1, 1, 1, 0, 0.1);
  p.g = [](const Vec3&) { return Vec3{0, 0, -2}; };
  State st;
  st.u.assign(s.n_velocity(), 0.0);
  st.P.assign(s.n_pressure(), 0.0);
  st.theta.assign(s.n_scalar(), 0.0);
  st.vartheta = st.theta;
  const auto n = state_norms(s, p, st);
  // load norm of rho0 g over a volume of 2
  CHECK(n.u_load == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-13));
  CHECK(n.u_w2 == 0.0);
  CHECK(n.u == n.u_load);
  CHECK(n.theta == 0.0);
}

TEST_CASE("estimates are stable under refinement of the acceptance channel") {
  const auto m = make_boussinesq_material(1, 1, 1, 1, 0.5, 0.1);
  const auto coarse_est =
      estimate_constants(build_spaces(build_channel_mesh(1, 1, 4, 4, 4, 16), 4), m, 100, 0);
  const auto fine_est =
      estimate_constants(build_spaces(build_channel_mesh(1, 1, 4, 8, 8, 32), 4), m, 100, 0);
  const std::array<double, 5> a = coarse_est.history.back();
  const std::array<double, 5> b = fine_est.history.back();
  for (int j = 0; j < 5; ++j) {
    INFO("constant " << j << ": " << a[j] << " -> " << b[j]);
    CHECK(std::abs(b[j] - a[j]) < 0.2 * a[j]);
  }
}
