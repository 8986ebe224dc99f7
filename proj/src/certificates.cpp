#include "heatduct/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "heatduct/forms.hpp"
#include "heatduct/linsolve.hpp"
#include "heatduct/parallel.hpp"
#include "heatduct/spectrum.hpp"

namespace heatduct {

namespace {

constexpr double kPi = std::numbers::pi;

constexpr int kModes = 2;

// Low-mode trigonometric factor on [0, L] times sin(pi t / L)^env.
struct Trig1D {
  double L = 1.0;
  std::array<double, kModes> a{}, b{};
  int env = 0;

  double g(double t) const {
    double s = 0.0;
    for (int k = 0; k < kModes; ++k) s += a[k] * std::cos(k * kPi * t / L) + b[k] * std::sin(k * kPi * t / L);
    return s;
  }
  double dg(double t) const {
    double s = 0.0;
    for (int k = 0; k < kModes; ++k) {
      const double w = k * kPi / L;
      s += w * (-a[k] * std::sin(w * t) + b[k] * std::cos(w * t));
    }
    return s;
  }
  double value(double t) const { return std::pow(std::sin(kPi * t / L), env) * g(t); }
  double deriv(double t) const {
    const double sn = std::sin(kPi * t / L);
    const double cs = std::cos(kPi * t / L);
    const double e = std::pow(sn, env);
    const double de = env == 0 ? 0.0 : env * std::pow(sn, env - 1) * cs * kPi / L;
    return de * g(t) + e * dg(t);
  }
};

Trig1D draw(double L, int env, std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Trig1D f;
  f.L = L;
  f.env = env;
  for (int k = 0; k < kModes; ++k) {
    f.a[k] = n01(rng) / (1.0 + k);
    f.b[k] = n01(rng) / (1.0 + k);
  }
  return f;
}

double sup_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

VectorFn random_solenoidal_field(const Vec3& dims, std::mt19937_64& rng) {
  // psi3 e_z with psi3 = A(x) B(y) C(z), and psi2 e_y with psi2 = D(x) E(y) F(z).
  const Trig1D A = draw(dims[0], 0, rng), B = draw(dims[1], 2, rng), C = draw(dims[2], 1, rng);
  const Trig1D D = draw(dims[0], 0, rng), E = draw(dims[1], 1, rng), F = draw(dims[2], 2, rng);
  return [=](const Vec3& p) {
    const double x = p[0], y = p[1], z = p[2];
    const double a = A.value(x), da = A.deriv(x), b = B.value(y), db = B.deriv(y),
                 c = C.value(z);
    const double d = D.value(x), dd = D.deriv(x), e = E.value(y), f = F.value(z),
                 df = F.deriv(z);
    return Vec3{a * db * c - d * e * df, -da * b * c, dd * e * f};
  };
}

ScalarFn random_wall_scalar(const Vec3& dims, std::mt19937_64& rng) {
  const Trig1D A = draw(dims[0], 0, rng), B = draw(dims[1], 1, rng), C = draw(dims[2], 1, rng);
  return [=](const Vec3& p) { return A.value(p[0]) * B.value(p[1]) * C.value(p[2]); };
}

ScalarFn random_free_scalar(const Vec3& dims, std::mt19937_64& rng, double amplitude) {
  const Trig1D A = draw(dims[0], 0, rng), B = draw(dims[1], 0, rng), C = draw(dims[2], 0, rng);
  return [=](const Vec3& p) {
    return amplitude * A.value(p[0]) * B.value(p[1]) * C.value(p[2]);
  };
}

ConstantEstimates estimate_constants(const DiscreteSpace& space, const MaterialModel& model,
                                     int samples, std::uint64_t seed, double s, double r,
                                     int workers) {
  if (samples < 100) throw std::invalid_argument("estimate_constants needs at least 100 samples");
  check_sobolev_exponent(s);
  check_sobolev_exponent(r);
  const Vec3 dims = space.mesh().dims;

  struct Draw {
    VectorFn u, v;
    ScalarFn theta, frozen, f;
  };
  // Fields are drawn sequentially so the stream, and hence the result, does
  // not depend on the worker count.
  std::mt19937_64 rng(seed);
  std::vector<Draw> draws(static_cast<std::size_t>(samples));
  for (auto& d : draws) {
    d.u = random_solenoidal_field(dims, rng);
    d.v = random_solenoidal_field(dims, rng);
    d.theta = random_wall_scalar(dims, rng);
    d.frozen = random_free_scalar(dims, rng, 5.0);
    d.f = random_free_scalar(dims, rng);
  }

  const auto kappa = apply_dirichlet(assemble_kappa(space, model).matrix, space.dirichlet_theta());
  const auto mass = assemble_scalar_mass(space);
  MaterialModel unit_e = model;
  unit_e.alpha1 = 1.0;
  unit_e.nu = 1.0;

  std::vector<std::array<double, 5>> ratios(draws.size());
  parallel_for(
      draws.size(),
      [&](std::size_t i) {
        const auto& d = draws[i];
        const auto u = space.interpolate(d.u);
        const auto v = space.interpolate(d.v);
        const auto th = space.interpolate(d.theta);
        const auto fr = space.interpolate(d.frozen);
        const auto f = space.interpolate(d.f);
        const double nu_ = discrete_norm(space, u, NormKind::BrokenW2, s);
        const double nv = discrete_norm(space, v, NormKind::BrokenW2, s);
        const double nth = discrete_norm(space, th, NormKind::BrokenW2, r);
        auto& out = ratios[i];
        out[0] = convection_density_norm(space, model, u, v, s) / (model.rho0 * nu_ * nv);
        out[1] = d_density_norm(space, model, fr, u, th, r) / (model.rho_sharp * model.cV * nu_ * nth);
        out[2] = e_density_norm(space, unit_e, u, v, r) / (nu_ * nv);

        auto load = mass * std::span<const double>(f);
        zero_rows(load, space.dirichlet_theta());
        auto sol = solve_spd(kappa, load, 1e-12).x;
        zero_rows(sol, space.dirichlet_theta());
        const double nf = discrete_norm(space, f, NormKind::Lebesgue, r);
        out[3] = discrete_norm(space, sol, NormKind::BrokenW2, r) / nf;
        out[4] = sup_abs(sol) / nf;
      },
      workers);

  ConstantEstimates est;
  est.samples = samples;
  est.seed = seed;
  est.s = s;
  est.r = r;
  std::array<double, 5> m{};
  for (const auto& q : ratios) {
    for (int k = 0; k < 5; ++k)
      if (std::isfinite(q[k])) m[k] = std::max(m[k], q[k]);
    est.history.push_back(m);
  }
  est.C_b = m[0];
  est.C_d = m[1];
  est.C_e = m[2];
  est.C_eps = m[3];
  est.C_1 = m[4];
  return est;
}

SmallnessResult smallness_check(const ConstantEstimates& est, const MaterialModel& model,
                                double g_norm) {
  if (!(g_norm >= 0.0)) throw std::invalid_argument("||g|| must be nonnegative");
  SmallnessResult res;
  res.g_norm = g_norm;
  const double coeff = 4.0 * est.C_b * model.rho_sharp * model.rho0;
  res.first_threshold = 1.0 / coeff;
  res.second_threshold =
      1.0 / (2.0 * est.C_eps * est.C_d * model.cV * model.rho_sharp * model.rho_sharp);
  res.headroom = res.second_threshold - g_norm;
  res.beta_raw = coeff * g_norm;
  const double beta = std::max(res.beta_raw, std::numeric_limits<double>::min());
  // The second condition reads beta / coeff < second_threshold.
  if (beta < 1.0 && beta / coeff < res.second_threshold) {
    res.beta = beta;
    res.ball_radius = beta / (2.0 * est.C_b * model.rho0);
    res.ok = true;
  }
  return res;
}

StateNorms state_norms(const DiscreteSpace& space, const Problem& problem, const State& state,
                       double s, double r) {
  const auto& model = problem.material;
  StateNorms n;
  n.u_w2 = discrete_norm(space, state.u, NormKind::BrokenW2, s);
  n.theta = discrete_norm(space, state.theta, NormKind::BrokenW2, r);

  CellValues cv(space);
  double sum = 0.0;
  for (std::size_t c = 0; c < space.n_cells(); ++c) {
    cv.reinit(c);
    for (std::size_t q = 0; q < cv.n_points(); ++q) {
      const Vec3 x = cv.point(q);
      const Vec3 w = cv.vector_value(state.u, q);
      const Mat3 gu = cv.vector_gradient(state.u, q);
      Vec3 load = density(model, cv.value(state.theta, q)) * (problem.g ? problem.g(x) : Vec3{});
      if (problem.momentum_source) load = load + problem.momentum_source(x);
      for (int i = 0; i < 3; ++i) load[i] -= model.rho0 * dot(gu[i], w);
      sum += std::pow(norm(load), s) * cv.JxW(q);
    }
  }
  n.u_load = std::pow(sum, 1.0 / s) / model.nu;
  n.u = std::max(n.u_w2, n.u_load);
  return n;
}

UniquenessResult uniqueness_certificate(const StateNorms& n1, const StateNorms& n2,
                                        const ConstantEstimates& est,
                                        const MaterialModel& m, double g_norm, double r) {
  if (!(r > 1.5)) throw std::invalid_argument("uniqueness certificate needs r > 3/2");
  UniquenessResult res;
  const double cg = est.C_1 * m.C_rho * g_norm;
  res.sigma_heat = m.cV * est.C_1 * est.C_eps * est.C_d * m.C_rho * n1.u * n2.theta +
                   m.cV * est.C_eps * m.rho_sharp * est.C_d * n2.u;
  res.z_heat = m.cV * est.C_eps * m.rho_sharp * est.C_d * n1.theta +
               m.alpha1 * m.nu * est.C_e * (n1.u + n2.u);
  res.sigma_momentum = cg * res.sigma_heat;
  res.z_momentum = cg * res.z_heat + m.rho0 * est.C_b * (n1.u + n2.u);
  res.R1 = res.sigma_heat + res.sigma_momentum;
  res.R2 = res.z_heat + res.z_momentum;
  res.ok = res.R1 < 1.0 && res.R2 < 1.0;
  res.grouping =
      "R1 = total coefficient of the temperature difference, R2 = total coefficient of the "
      "velocity difference, after adding the heat and momentum inequalities";
  return res;
}

CertificateReport make_certificate(const ConstantEstimates& est, const MaterialModel& model,
                                   double g_norm, const StateNorms& n1, const StateNorms& n2,
                                   double r) {
  CertificateReport rep;
  rep.constants = est;
  rep.smallness = smallness_check(est, model, g_norm);
  rep.uniqueness = uniqueness_certificate(n1, n2, est, model, g_norm, r);
  rep.norms1 = n1;
  rep.norms2 = n2;
  rep.smallness_ok = rep.smallness.ok;
  rep.uniqueness_ok = rep.uniqueness.ok;
  return rep;
}

Interval admissible_sr(double s) {
  check_sobolev_exponent(s);
  Interval iv;
  iv.lo = 6.0 / 5.0;
  if (s < 3.0) {
    iv.hi = 3.0 * s / (2.0 * (3.0 - s));
    iv.hi_closed = true;
  } else {
    iv.hi = std::numeric_limits<double>::infinity();
    iv.hi_closed = false;
  }
  return iv;
}

}  // namespace heatduct
