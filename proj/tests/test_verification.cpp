#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "heatduct/mesh.hpp"
#include "heatduct/verification.hpp"

using namespace heatduct;

namespace {

constexpr double kPi = std::numbers::pi;

// f + a e1 + b e2 + ab e1 e2 with e1^2 = e2^2 = 0
struct HD {
  double f = 0, a = 0, b = 0, ab = 0;
};
HD operator+(HD x, HD y) { return {x.f + y.f, x.a + y.a, x.b + y.b, x.ab + y.ab}; }
HD operator-(HD x, HD y) { return {x.f - y.f, x.a - y.a, x.b - y.b, x.ab - y.ab}; }
HD operator*(HD x, HD y) {
  return {x.f * y.f, x.f * y.a + x.a * y.f, x.f * y.b + x.b * y.f,
          x.f * y.ab + x.a * y.b + x.b * y.a + x.ab * y.f};
}
HD operator*(double s, HD x) { return {s * x.f, s * x.a, s * x.b, s * x.ab}; }
HD operator*(HD x, double s) { return s * x; }
HD operator+(double s, HD x) { return {s + x.f, x.a, x.b, x.ab}; }
HD chain(HD x, double f0, double f1, double f2) {
  return {f0, f1 * x.a, f1 * x.b, f1 * x.ab + f2 * x.a * x.b};
}
HD sin(HD x) { return chain(x, std::sin(x.f), std::cos(x.f), -std::sin(x.f)); }
HD cos(HD x) { return chain(x, std::cos(x.f), -std::sin(x.f), -std::cos(x.f)); }

using HD3 = std::array<HD, 3>;

HD3 seed(const Vec3& p, int dir) {
  HD3 x;
  for (int i = 0; i < 3; ++i) x[i] = {p[i], i == dir ? 1.0 : 0.0, i == dir ? 1.0 : 0.0, 0.0};
  return x;
}

struct Trig {
  double a, ky, kz, amp, nu;
  std::array<HD, 4> operator()(const HD3& x) const {  // u_x, u_y, u_z, P
    const HD sy = sin(ky * x[1]), sz = sin(kz * x[2]);
    const HD ux = sin(a * x[0]) * ky * sin(2 * ky * x[1]) * sz + sy * sy * sz * sz;
    const HD uy = -a * cos(a * x[0]) * sy * sy * sz;
    const HD P = nu * a * cos(a * x[0]) * ky * sin(2 * ky * x[1]) * sz;
    return {amp * ux, amp * uy, HD{}, amp * P};
  }
};

struct Derivs {
  Vec3 val{};
  Mat3 grad{};  // grad[i][j] = d_j of component i
  Vec3 lap{};
};

template <class F>
std::array<Derivs, 4> differentiate(const F& f, const Vec3& p, int n) {
  std::array<Derivs, 4> d{};
  for (int dir = 0; dir < 3; ++dir) {
    const auto r = f(seed(p, dir));
    for (int c = 0; c < n; ++c) {
      d[c / 3].val[c % 3] = r[c].f;
      d[c / 3].grad[c % 3][dir] = r[c].a;
      d[c / 3].lap[c % 3] += r[c].ab;
    }
  }
  return d;
}

Vec3 random_point(const Vec3& dims, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  return {dims[0] * u(rng), dims[1] * u(rng), dims[2] * u(rng)};
}

double mat_diff(const Mat3& a, const Mat3& b) {
  double m = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m = std::max(m, std::abs(a[i][j] - b[i][j]));
  return m;
}

// Scalar pieces packed as HD arrays of width 4 so they reuse differentiate.
struct Pack1 {
  std::function<HD(const HD3&)> g;
  std::array<HD, 4> operator()(const HD3& x) const { return {g(x), HD{}, HD{}, HD{}}; }
};

}  // namespace

TEST_CASE("trigonometric Stokes forcing against an independent derivative") {
  const Vec3 dims{1.3, 1.0, 2.2};
  const double nu = 0.7, amp = 1.9;
  const auto c = stokes_trig_case(dims, nu, amp);
  const Trig t{kPi / dims[0], kPi / dims[1], kPi / dims[2], amp, nu};
  std::mt19937_64 rng(5);
  double worst_f = 0, worst_div = 0, worst_grad = 0, worst_u = 0;
  for (int k = 0; k < 1000; ++k) {
    const Vec3 p = random_point(dims, rng);
    std::array<Derivs, 4> d{};
    // components 0..2 are u, 3 is P
    for (int dir = 0; dir < 3; ++dir) {
      const auto r = t(seed(p, dir));
      for (int i = 0; i < 3; ++i) {
        d[0].val[i] = r[i].f;
        d[0].grad[i][dir] = r[i].a;
        d[0].lap[i] += r[i].ab;
      }
      d[1].val[0] = r[3].f;
      d[1].grad[0][dir] = r[3].a;
    }
    const Vec3 gradP = d[1].grad[0];
    const Vec3 f = gradP - nu * d[0].lap;
    worst_f = std::max(worst_f, norm(f - c.f_momentum(p)));
    worst_u = std::max(worst_u, norm(d[0].val - c.u(p)) + std::abs(d[1].val[0] - c.P(p)));
    worst_div = std::max(worst_div,
                         std::abs(d[0].grad[0][0] + d[0].grad[1][1] + d[0].grad[2][2]));
    worst_grad = std::max(worst_grad, mat_diff(d[0].grad, c.grad_u(p)));
  }
  CHECK(worst_u < 1e-12);
  CHECK(worst_grad < 1e-11);
  CHECK(worst_div < 1e-11);
  CHECK(worst_f < 1e-10);
}

TEST_CASE("heat product forcing against an independent derivative") {
  const Vec3 dims{2.0, 1.0, 1.5};
  const double lambda = 1.7;
  const double kx = kPi / dims[0], ky = kPi / dims[1], kz = kPi / dims[2];
  for (bool cosine : {true, false}) {
    const auto c = cosine ? heat_trig_case(dims, lambda) : heat_incompatible_case(dims, lambda);
    const Pack1 th{[=](const HD3& x) {
      const HD fx = cosine ? cos(kx * x[0]) : sin(kx * x[0]);
      return 1.0 + x[1] + fx * sin(ky * x[1]) * sin(kz * x[2]);
    }};
    std::mt19937_64 rng(6);
    double worst = 0, worst_g = 0;
    for (int k = 0; k < 1000; ++k) {
      const Vec3 p = random_point(dims, rng);
      const auto d = differentiate(th, p, 1);
      worst = std::max(worst, std::abs(-lambda * d[0].lap[0] - c.h_heat(p)) +
                                  std::abs(d[0].val[0] - c.theta(p)));
      worst_g = std::max(worst_g, norm(d[0].grad[0] - c.grad_theta(p)));
    }
    CHECK(worst < 1e-10);
    CHECK(worst_g < 1e-12);
  }
}

TEST_CASE("coupled forcings against an independent derivative") {
  const Vec3 dims{1.0, 1.0, 2.0};
  const auto m = make_boussinesq_material(0.9, 1.1, 1.3, 0.8, 0.6, 0.2, 0.1);
  const Vec3 g{0.3, -0.2, -1.5};
  const double amp = 0.4, tw = 0.25;
  const auto c = coupled_case(dims, m, g, amp, tw);
  const Trig t{kPi / dims[0], kPi / dims[1], kPi / dims[2], amp, m.nu};
  const double kx = kPi / dims[0], ky = kPi / dims[1], kz = kPi / dims[2];
  const Pack1 th{[=](const HD3& x) {
    return tw + amp * (cos(kx * x[0]) * sin(ky * x[1]) * sin(kz * x[2]));
  }};
  std::mt19937_64 rng(7);
  double worst_f = 0, worst_h = 0;
  for (int k = 0; k < 1000; ++k) {
    const Vec3 p = random_point(dims, rng);
    Derivs u{}, P{};
    for (int dir = 0; dir < 3; ++dir) {
      const auto r = t(seed(p, dir));
      for (int i = 0; i < 3; ++i) {
        u.val[i] = r[i].f;
        u.grad[i][dir] = r[i].a;
        u.lap[i] += r[i].ab;
      }
      P.grad[0][dir] = r[3].a;
    }
    const auto d = differentiate(th, p, 1);
    const double theta = d[0].val[0];
    const Vec3 gt = d[0].grad[0];
    const double rho = std::clamp(m.rho0 * (1 - 0.2 * (theta - 0.1)), m.rho_law.rho_min, m.rho0);
    Vec3 conv{};
    for (int i = 0; i < 3; ++i) conv[i] = m.rho0 * dot(u.grad[i], u.val);
    const Vec3 f = P.grad[0] - m.nu * u.lap + conv - rho * g;
    double ee = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double e = 0.5 * (u.grad[i][j] + u.grad[j][i]);
        ee += e * e;
      }
    const double h = -m.lambda * d[0].lap[0] + m.cV * rho * dot(u.val, gt) - m.alpha1 * m.nu * ee;
    worst_f = std::max(worst_f, norm(f - c.f_momentum(p)));
    worst_h = std::max(worst_h, std::abs(h - c.h_heat(p)));
  }
  CHECK(worst_f < 1e-10);
  CHECK(worst_h < 1e-10);
}

TEST_CASE("compatibility flags") {
  const Vec3 dims{1, 1, 2};
  const auto s = build_spaces(build_channel_mesh(1, 1, 2, 2, 2, 4), 4);
  const auto trig = check_compatibility(s, stokes_trig_case(dims, 1.0), 1.0);
  CHECK(trig.dirichlet_ok);
  CHECK(trig.neumann_ok);
  CHECK(trig.max_divergence < 1e-12);
  const auto poly = check_compatibility(s, stokes_polynomial_case(dims, 1.0), 1.0);
  CHECK_FALSE(poly.dirichlet_ok);
  CHECK(poly.neumann_ok);
  CHECK(heat_trig_case(dims, 1.0).neumann_compatible);
  const auto bad = check_compatibility(s, heat_incompatible_case(dims, 1.0), 1.0);
  CHECK_FALSE(bad.neumann_ok);
  CHECK(bad.max_heat_flux > 0.1);
}

TEST_CASE("Taylor-Hood reproduces the polynomial Stokes case") {
  const double nu = 1.3;
  const Vec3 dims{1, 1, 2};
  const auto c = stokes_polynomial_case(dims, nu);
  const auto s = build_spaces(build_channel_mesh(1, 1, 2, 2, 2, 3), 4);
  const auto sol = solve_stokes_case(s, c, nu);
  CHECK(l2_error(s, sol.u, c.u) < 1e-10);
  CHECK(h1_error(s, sol.u, c.u, c.grad_u) < 1e-9);
  double worst_p = 0;
  for (double v : sol.P) worst_p = std::max(worst_p, std::abs(v - nu));
  CHECK(worst_p < 1e-9);
}

TEST_CASE("Q2 reproduces the quadratic heat case") {
  const auto c = heat_quadratic_case({1, 1, 1}, 0.6);
  const auto s = build_spaces(build_channel_mesh(1, 1, 1, 2, 2, 2), 4);
  const auto th = solve_heat_case(s, c, 0.6);
  CHECK(l2_error(s, th, c.theta) < 1e-11);
  CHECK(h1_error(s, th, c.theta, c.grad_theta) < 1e-10);
}

TEST_CASE("heat orders and the incompatible stall") {
  const Vec3 dims{1, 1, 1};
  const std::vector<std::array<int, 3>> levels{{2, 2, 2}, {4, 4, 4}, {8, 8, 8}};
  const auto good = mms_heat_study(heat_trig_case(dims, 1.0), 1.0, levels);
  REQUIRE(good.rows.size() == 3);
  CHECK(good.monotone);
  CHECK(good.rows[2].order_H1 >= 1.8);
  CHECK(good.rows[2].order_L2 >= 2.5);
  CHECK(good.fitted_H1 >= 1.8);

  const auto bad = mms_heat_study(heat_incompatible_case(dims, 1.0), 1.0, levels);
  INFO("incompatible orders " << bad.rows[2].order_L2 << " " << bad.rows[2].order_H1);
  CHECK(bad.rows[2].order_H1 < 1.0);
  CHECK(bad.rows[2].err_H1 > 10 * good.rows[2].err_H1);
}

TEST_CASE("Stokes study on a unit cube") {
  const auto c = stokes_trig_case({1, 1, 1}, 1.0);
  const auto t = mms_stokes_study(c, 1.0, {{2, 2, 2}, {4, 4, 4}, {8, 8, 8}});
  REQUIRE(t.rows.size() == 3);
  CHECK(t.monotone);
  CHECK(t.rows[0].order_H1 == 0.0);
  CHECK(t.fitted_H1 >= 1.8);
  CHECK(t.fitted_L2 >= 2.5);
  const auto csv = study_csv(t);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("fitted order against the per-step orders") {
  const auto c = heat_trig_case({1, 1, 1}, 1.0);
  const auto two = mms_heat_study(c, 1.0, {{2, 2, 2}, {4, 4, 4}});
  CHECK(two.fitted_H1 == doctest::Approx(two.rows[1].order_H1).epsilon(1e-12));
  CHECK(two.fitted_L2 == doctest::Approx(two.rows[1].order_L2).epsilon(1e-12));
  const auto three = mms_heat_study(c, 1.0, {{1, 1, 1}, {2, 2, 2}, {4, 4, 4}});
  const double lo = std::min(three.rows[1].order_H1, three.rows[2].order_H1);
  const double hi = std::max(three.rows[1].order_H1, three.rows[2].order_H1);
  CHECK(three.fitted_H1 >= lo - 1e-12);
  CHECK(three.fitted_H1 <= hi + 1e-12);
  const auto one = mms_heat_study(c, 1.0, {{2, 2, 2}});
  CHECK(one.fitted_H1 == 0.0);
}

TEST_CASE("coupled manufactured runs") {
  const Vec3 dims{1, 1, 2};
  const auto m = make_boussinesq_material(1, 1, 1, 1, 0.5, 0.1);
  const Vec3 g{0, 0, -1};
  SolverSettings st;
  const auto coarse = build_spaces(build_channel_mesh(1, 1, 2, 2, 2, 4), 4);
  const auto fine = build_spaces(build_channel_mesh(1, 1, 2, 4, 4, 8), 4);

  SUBCASE("zero amplitude is exact") {
    const auto r = coupled_mms(coarse, coupled_case(dims, m, g, 0.0, 0.3), m, st);
    CHECK(r.converged);
    CHECK(r.err_u_H1 < 1e-10);
    CHECK(r.err_theta_H1 < 1e-10);
  }
  SUBCASE("small amplitude converges under refinement") {
    const auto c = coupled_case(dims, m, g, 0.3, 0.3);
    const auto a = coupled_mms(coarse, c, m, st);
    const auto b = coupled_mms(fine, c, m, st);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    CHECK(b.err_u_H1 < 0.35 * a.err_u_H1);
    CHECK(b.err_theta_H1 < 0.35 * a.err_theta_H1);
    CHECK(b.outer_iterations <= st.max_outer);
  }
  SUBCASE("large amplitude is reported, not thrown") {
    const auto c = coupled_case(dims, m, g, 300.0, 0.3);
    CoupledReport r;
    CHECK_NOTHROW(r = coupled_mms(coarse, c, m, st));
    CHECK_FALSE(r.converged);
    CHECK_FALSE(r.failure.empty());
  }
}
