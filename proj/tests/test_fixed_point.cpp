#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "heatduct/fixed_point.hpp"
#include "heatduct/forms.hpp"
#include "heatduct/linsolve.hpp"
#include "heatduct/mesh.hpp"
#include "heatduct/space.hpp"

using namespace heatduct;

namespace {

MaterialModel constant_density(double nu = 1.0) {
  MaterialModel m;
  m.nu = nu;
  m.rho_law.kind = DensityLawKind::Constant;
  return m;
}

VectorFn constant(const Vec3& g) {
  return [g](const Vec3&) { return g; };
}

const DiscreteSpace& duct() {
  static const DiscreteSpace s = build_spaces(build_channel_mesh(1, 1, 1, 2, 8, 8), 4);
  return s;
}

const DiscreteSpace& small() {
  static const DiscreteSpace s = build_spaces(build_channel_mesh(1, 1, 2, 2, 2, 4), 4);
  return s;
}

double max_abs(std::span<const double> v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Mixed convection problem on the small mesh: vertical gravity, a
// temperature difference along the channel and buoyancy.
Problem mixed_problem(double G, double alpha1 = 0.0) {
  Problem p;
  p.material = make_boussinesq_material(1, 1, 1, 1, alpha1, 0.1);
  p.g = constant({G, 0, -G});
  p.theta_D = [](const Vec3& x) { return 0.5 * std::cos(3.14159265358979 * x[0]); };
  return p;
}

}  // namespace

TEST_CASE("inner iteration with zero data") {
  const auto& s = small();
  Problem p;
  p.material = constant_density();
  const CoupledSolver solver(s, p);
  const std::vector<double> theta(s.n_scalar(), 0.0), u0(s.n_velocity(), 0.0);
  const auto r = solver.inner_momentum_solve(theta, u0);
  CHECK(r.trace.increments.size() == 1);
  CHECK(max_abs(r.u) == 0.0);
  CHECK(max_abs(r.P) == 0.0);
}

TEST_CASE("duct flow") {
  const auto& s = duct();
  const double F = 2.0, nu = 0.5;
  Problem p;
  p.material = constant_density(nu);
  p.g = constant({F, 0, 0});
  const CoupledSolver solver(s, p);
  const auto out = solver.outer_loop();
  CHECK(out.trace.converged);
  CHECK(out.trace.records.size() == 1);

  const auto lat = s.lattice_size();
  const std::size_t n = s.n_scalar();
  for (int i = 0; i < lat[0]; ++i) {
    const auto c = s.lattice_index(i, lat[1] / 2, lat[2] / 2);
    CHECK(out.state.u[c] == doctest::Approx(0.0736713 * F / nu).epsilon(0.02));
    CHECK(std::abs(out.state.u[n + c]) < 1e-10);
    CHECK(std::abs(out.state.u[2 * n + c]) < 1e-10);
  }
  CHECK(max_abs(out.state.P) < 1e-6 * F);

  const auto bf = backward_flow_measure(s, out.state.u);
  CHECK(bf.faces[0].inflow_fraction == doctest::Approx(1.0));
  CHECK(bf.faces[1].inflow_fraction == 0.0);
  CHECK(bf.faces[0].min_flux < -0.98 * 0.0736713 * F / nu);
  CHECK(bf.min_flux == bf.faces[0].min_flux);
}

TEST_CASE("inner contraction ratio tracks the forcing") {
  const auto& s = small();
  std::vector<double> beta;
  for (double G : {8.0, 4.0, 2.0}) {
    const CoupledSolver solver(s, mixed_problem(G));
    const std::vector<double> theta = solver.theta_D(), u0(s.n_velocity(), 0.0);
    const auto r = solver.inner_momentum_solve(theta, u0);
    REQUIRE(r.trace.ratios.size() >= 2);
    beta.push_back(r.trace.ratios[1]);
  }
  CHECK(beta[0] > beta[1]);
  CHECK(beta[1] > beta[2]);
  CHECK(beta[0] / beta[1] == doctest::Approx(2.0).epsilon(0.3));
  CHECK(beta[1] / beta[2] == doctest::Approx(2.0).epsilon(0.3));
}

TEST_CASE("inner divergence is reported with its trace") {
  const auto& s = small();
  const CoupledSolver solver(s, mixed_problem(4000.0));
  const std::vector<double> theta = solver.theta_D(), u0(s.n_velocity(), 0.0);
  try {
    solver.inner_momentum_solve(theta, u0);
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& e) {
    CHECK(e.inner.increments.size() >= 2);
  }
}

TEST_CASE("heat step with no flow and constant wall data") {
  const auto& s = small();
  Problem p;
  p.material = constant_density();
  p.theta_D = [](const Vec3&) { return 3.0; };
  const CoupledSolver solver(s, p);
  const std::vector<double> u(s.n_velocity(), 0.0);
  const auto v = solver.heat_solve(u, solver.theta_D());
  CHECK(max_abs(v) < 1e-12);
}

TEST_CASE("heat step with linear wall data matches a direct solve") {
  const auto& s = small();
  Problem p;
  p.material = constant_density();
  p.material.lambda = 0.7;
  p.theta_D = [](const Vec3& x) { return x[0]; };
  const CoupledSolver solver(s, p);
  const std::vector<double> u(s.n_velocity(), 0.0);
  const auto v = solver.heat_solve(u, solver.theta_D());

  // kappa(theta, phi) = 0 with theta = x on GammaD, solved by LU
  const auto k = assemble_kappa(s, p.material).matrix;
  const auto x = solver.theta_D();
  auto rhs = k * std::span<const double>(x);
  for (auto& r : rhs) r = -r;
  for (auto r : s.dirichlet_theta()) rhs[r] = 0.0;
  const auto corr = SparseLU(apply_dirichlet(k, s.dirichlet_theta())).solve(rhs);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(v[i] - corr[i]) < 1e-10);
  for (auto r : s.dirichlet_theta()) CHECK(v[r] == 0.0);
}

TEST_CASE("heat step with shear dissipation matches a direct solve") {
  const auto& s = small();
  Problem p;
  p.material = constant_density(2.0);
  p.material.alpha1 = 0.5;  // alpha1 nu e:e = 1/2 for u = (y, 0, 0)
  p.material.cV = 1.5;
  p.theta_D = [](const Vec3& x) { return 1 + x[1] * x[2]; };
  const CoupledSolver solver(s, p);
  const auto u = s.interpolate(constant({0, 0, 0}));
  const auto shear = s.interpolate(VectorFn([](const Vec3& x) { return Vec3{x[1], 0, 0}; }));
  const auto frozen = s.interpolate(ScalarFn([](const Vec3& x) { return x[0] * x[0] + x[2]; }));
  const auto v = solver.heat_solve(shear, frozen);

  const auto half = assemble_source(s, ScalarFn([](const Vec3&) { return 0.5; })).values;
  const auto d = assemble_d_load(s, p.material, frozen, shear, frozen).values;
  const auto k = assemble_kappa(s, p.material).matrix;
  const auto lift = k * std::span<const double>(solver.theta_D());
  std::vector<double> rhs(s.n_scalar());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = half[i] - d[i] - lift[i];
  for (auto r : s.dirichlet_theta()) rhs[r] = 0.0;
  const auto ref = SparseLU(apply_dirichlet(k, s.dirichlet_theta())).solve(rhs);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(v[i] - ref[i]) < 1e-10);
  (void)u;
}

TEST_CASE("outer loop with zero data") {
  const auto& s = small();
  Problem p;
  p.material = make_boussinesq_material(1, 1, 1, 1, 0.3, 0.1);
  p.theta_D = [](const Vec3&) { return 2.5; };
  const CoupledSolver solver(s, p);
  const auto out = solver.outer_loop();
  CHECK(out.trace.converged);
  CHECK(out.trace.records.size() == 1);
  CHECK(max_abs(out.state.u) == 0.0);
  for (double t : out.state.theta) CHECK(std::abs(t - 2.5) < 1e-12);
  const auto r = solver.weak_residual(out.state);
  CHECK(r.r_momentum == 0.0);
  CHECK(r.r_heat < 1e-12);
}

TEST_CASE("residual of the rest state is the buoyancy load") {
  const auto& s = small();
  Problem p = mixed_problem(3.0);
  const CoupledSolver solver(s, p);
  State st;
  st.u.assign(s.n_velocity(), 0.0);
  st.P.assign(s.n_pressure(), 0.0);
  st.theta = solver.theta_D();
  st.vartheta.assign(s.n_scalar(), 0.0);
  auto b = assemble_buoyancy(s, p.material, st.theta, p.g).values;
  zero_rows(b, s.dirichlet_u());
  CHECK(solver.weak_residual(st).r_momentum == doctest::Approx(norm2(b)).epsilon(1e-14));
}

TEST_CASE("coupled run converges to a discrete fixed point") {
  const auto& s = small();
  Problem p = mixed_problem(6.0, 0.5);
  const CoupledSolver solver(s, p);
  const auto out = solver.outer_loop();
  REQUIRE(out.trace.converged);
  const auto& last = out.trace.records.back();
  CHECK(last.d_theta_norm <= p.settings.outer_tol);
  const auto r = solver.weak_residual(out.state);
  CHECK(r.r_momentum <= 10 * p.settings.outer_tol);
  CHECK(r.r_heat <= 10 * p.settings.outer_tol);
  for (const auto& rec : out.trace.records) {
    CHECK(rec.d_theta_norm >= 0);
    CHECK(rec.beta_hat >= 0);
    CHECK(rec.beta_hat < 1);
  }
  for (auto i : s.dirichlet_u()) CHECK(out.state.u[i] == 0.0);
  for (auto i : s.dirichlet_theta()) CHECK(out.state.vartheta[i] == 0.0);
  for (std::size_t i = 0; i < s.n_scalar(); ++i)
    CHECK(out.state.theta[i] == solver.theta_D()[i] + out.state.vartheta[i]);
}

TEST_CASE("trace CSV is reproducible") {
  const auto& s = small();
  const CoupledSolver solver(s, mixed_problem(5.0, 0.2));
  const auto a = trace_csv(solver.outer_loop().trace);
  const auto b = trace_csv(solver.outer_loop().trace);
  CHECK(a == b);
  CHECK(a.rfind("iter,inner_iters,beta_hat,d_theta_norm,r_momentum,r_heat,min_flux,"
                "inflow_fraction\n",
                0) == 0);
}

TEST_CASE("dissipation is nonnegative on every iterate") {
  const auto& s = small();
  const Problem p = mixed_problem(6.0, 0.5);
  const CoupledSolver solver(s, p);
  std::vector<double> u(s.n_velocity(), 0.0), vt(s.n_scalar(), 0.0);
  auto theta = solver.theta_D();
  for (int n = 0; n < 8; ++n) {
    u = solver.inner_momentum_solve(theta, u).u;
    CHECK(total_dissipation(s, p.material, u) >= 0.0);
    vt = solver.heat_solve(u, theta);
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = solver.theta_D()[i] + vt[i];
  }
}

TEST_CASE("viscous heating raises the temperature") {
  const auto& s = small();
  const auto cold = CoupledSolver(s, mixed_problem(6.0, 0.0)).outer_loop().state;
  const auto warm = CoupledSolver(s, mixed_problem(6.0, 0.05)).outer_loop().state;
  CHECK(integral(s, warm.theta) > integral(s, cold.theta));
  // alpha1 = 0: the temperature is the pure convection-conduction solution
  const CoupledSolver plain(s, mixed_problem(6.0, 0.0));
  const auto again = plain.heat_solve(cold.u, cold.theta);
  for (std::size_t i = 0; i < again.size(); ++i)
    CHECK(std::abs(again[i] - cold.vartheta[i]) < 1e-9);
}

TEST_CASE("constant temperature shifts commute with a constant density") {
  const auto& s = small();
  Problem p = mixed_problem(6.0, 0.3);
  p.material.rho_law.kind = DensityLawKind::Constant;
  Problem q = p;
  q.theta_D = [f = p.theta_D](const Vec3& x) { return f(x) + 7.0; };
  const auto a = CoupledSolver(s, p).outer_loop().state;
  const auto b = CoupledSolver(s, q).outer_loop().state;
  for (std::size_t i = 0; i < a.u.size(); ++i) CHECK(std::abs(a.u[i] - b.u[i]) < 1e-10);
  for (std::size_t i = 0; i < a.theta.size(); ++i)
    CHECK(std::abs(b.theta[i] - a.theta[i] - 7.0) < 1e-9);

  // the clamped law is not shift invariant, so the flow changes
  Problem pr = mixed_problem(6.0, 0.3), qr = pr;
  qr.theta_D = [f = pr.theta_D](const Vec3& x) { return f(x) + 2.0; };
  const auto c = CoupledSolver(s, pr).outer_loop().state;
  const auto d = CoupledSolver(s, qr).outer_loop().state;
  double diff = 0;
  for (std::size_t i = 0; i < c.u.size(); ++i) diff = std::max(diff, std::abs(c.u[i] - d.u[i]));
  CHECK(diff > 1e-6);
}

TEST_CASE("damping") {
  const auto& s = small();
  Problem p = mixed_problem(6.0, 0.3);
  const auto plain = CoupledSolver(s, p).outer_loop();
  p.settings.damping = 0.6;
  const auto damped = CoupledSolver(s, p).outer_loop();
  CHECK(damped.trace.converged);
  CHECK(damped.trace.records.size() > plain.trace.records.size());
  for (std::size_t i = 0; i < plain.state.theta.size(); ++i)
    CHECK(std::abs(plain.state.theta[i] - damped.state.theta[i]) < 1e-8);
  p.settings.damping = 0.0;
  CHECK_THROWS_AS(CoupledSolver(s, p), std::invalid_argument);
  p.settings.damping = 1.5;
  CHECK_THROWS_AS(CoupledSolver(s, p), std::invalid_argument);
}

TEST_CASE("outer iteration cap") {
  const auto& s = small();
  Problem p = mixed_problem(6.0, 0.3);
  p.settings.max_outer = 1;
  try {
    CoupledSolver(s, p).outer_loop();
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& e) {
    CHECK(e.trace.records.size() == 1);
    CHECK_FALSE(e.trace.converged);
  }
}

TEST_CASE("backward flow measure") {
  const auto& s = small();
  const std::vector<double> zero(s.n_velocity(), 0.0);
  const auto z = backward_flow_measure(s, zero);
  CHECK(z.min_flux == 0.0);
  CHECK(z.inflow_fraction == 0.0);

  // recirculating profile: out through the upper half, in through the lower
  const auto u = s.interpolate(VectorFn([](const Vec3& x) { return Vec3{x[1] - 0.5, 0, 0}; }));
  const auto bf = backward_flow_measure(s, u);
  CHECK(bf.faces[1].inflow_fraction == doctest::Approx(0.5));
  CHECK(bf.faces[0].inflow_fraction == doctest::Approx(0.5));
  CHECK(bf.min_flux < -0.3);
}

TEST_CASE("integrals") {
  const auto& s = small();
  CHECK(domain_volume(s) == doctest::Approx(2.0));
  const auto f = s.interpolate(ScalarFn([](const Vec3& x) { return x[2] * x[2]; }));
  CHECK(integral(s, f) == doctest::Approx(8.0 / 3.0).epsilon(1e-13));
}
