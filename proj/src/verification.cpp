#include "heatduct/verification.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "heatduct/forms.hpp"
#include "heatduct/linsolve.hpp"

namespace heatduct {

namespace {

constexpr double kPi = std::numbers::pi;

Vec3 mat_vec(const Mat3& g, const Vec3& w) { return {dot(g[0], w), dot(g[1], w), dot(g[2], w)}; }

// Trigonometric Stokes pair on [0,Lx]x[0,Ly]x[0,Lz]:
//   u = (s S'(y) Z(z) + S(y) T(z), -a c S(y) Z(z), 0),  P = nu a c S'(y) Z(z)
// with s = sin(a x), c = cos(a x), a = pi/Lx, S = sin^2(ky y), Z = sin(kz z),
// T = sin^2(kz z).
struct TrigStokes {
  double a, ky, kz, nu, amp;

  struct Parts {
    double s, c, S, S1, S2, S3, Z, Z1, Z2, T, T1, T2;
  };
  Parts parts(const Vec3& p) const {
    Parts q{};
    q.s = std::sin(a * p[0]);
    q.c = std::cos(a * p[0]);
    const double sy = std::sin(2.0 * ky * p[1]), cy = std::cos(2.0 * ky * p[1]);
    q.S = 0.5 * (1.0 - cy);
    q.S1 = ky * sy;
    q.S2 = 2.0 * ky * ky * cy;
    q.S3 = -4.0 * ky * ky * ky * sy;
    q.Z = std::sin(kz * p[2]);
    q.Z1 = kz * std::cos(kz * p[2]);
    q.Z2 = -kz * kz * q.Z;
    const double sz = std::sin(2.0 * kz * p[2]), cz = std::cos(2.0 * kz * p[2]);
    q.T = 0.5 * (1.0 - cz);
    q.T1 = kz * sz;
    q.T2 = 2.0 * kz * kz * cz;
    return q;
  }
  Vec3 u(const Vec3& p) const {
    const auto q = parts(p);
    return amp * Vec3{q.s * q.S1 * q.Z + q.S * q.T, -a * q.c * q.S * q.Z, 0.0};
  }
  Mat3 grad(const Vec3& p) const {
    const auto q = parts(p);
    Mat3 g{};
    g[0] = {a * q.c * q.S1 * q.Z, q.s * q.S2 * q.Z + q.S1 * q.T, q.s * q.S1 * q.Z1 + q.S * q.T1};
    g[1] = {a * a * q.s * q.S * q.Z, -a * q.c * q.S1 * q.Z, -a * q.c * q.S * q.Z1};
    g[2] = {0.0, 0.0, 0.0};
    for (auto& row : g)
      for (auto& v : row) v *= amp;
    return g;
  }
  Vec3 laplacian(const Vec3& p) const {
    const auto q = parts(p);
    const double lx = -a * a * q.s * q.S1 * q.Z + q.s * q.S3 * q.Z + q.s * q.S1 * q.Z2 +
                      q.S2 * q.T + q.S * q.T2;
    const double ly = a * a * a * q.c * q.S * q.Z - a * q.c * q.S2 * q.Z - a * q.c * q.S * q.Z2;
    return amp * Vec3{lx, ly, 0.0};
  }
  double P(const Vec3& p) const {
    const auto q = parts(p);
    return amp * nu * a * q.c * q.S1 * q.Z;
  }
  Vec3 gradP(const Vec3& p) const {
    const auto q = parts(p);
    return amp * nu * a * Vec3{-a * q.s * q.S1 * q.Z, q.c * q.S2 * q.Z, q.c * q.S1 * q.Z1};
  }
};

TrigStokes make_trig(const Vec3& dims, double nu, double amp) {
  return {kPi / dims[0], kPi / dims[1], kPi / dims[2], nu, amp};
}

MaterialModel viscosity_only(double nu) {
  MaterialModel m;
  m.nu = nu;
  return m;
}

// Physical Gauss points of a boundary facet.
template <class F>
void for_facet_points(const ChannelMesh& mesh, const Facet& f, int order, F&& fn) {
  const auto rule = gauss_legendre(order);
  const auto& v = f.vertices;
  for (std::size_t i = 0; i < rule.points.size(); ++i)
    for (std::size_t j = 0; j < rule.points.size(); ++j) {
      const double s = rule.points[i], t = rule.points[j];
      const Vec3 x = (1 - s) * (1 - t) * mesh.vertices[v[0]] + s * (1 - t) * mesh.vertices[v[1]] +
                     s * t * mesh.vertices[v[2]] + (1 - s) * t * mesh.vertices[v[3]];
      fn(x);
    }
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> dirichlet_values(std::span<const double> full,
                                     std::span<const std::size_t> rows, std::size_t total) {
  std::vector<double> x(total, 0.0);
  for (auto r : rows) x[r] = full[r];
  return x;
}

}  // namespace

ManufacturedCase stokes_polynomial_case(const Vec3& dims, double nu) {
  ManufacturedCase c;
  c.name = "stokes_polynomial";
  c.dims = dims;
  c.u = [](const Vec3& p) {
    const double x = p[0], y = p[1], z = p[2];
    return Vec3{x + y * y + y * z, -y + z * z, y * y};
  };
  c.grad_u = [](const Vec3& p) {
    const double y = p[1], z = p[2];
    return Mat3{{{1.0, 2.0 * y + z, y}, {0.0, -1.0, 2.0 * z}, {0.0, 2.0 * y, 0.0}}};
  };
  c.P = [nu](const Vec3&) { return nu; };
  c.f_momentum = [nu](const Vec3&) { return Vec3{-2.0 * nu, -2.0 * nu, -2.0 * nu}; };
  c.dirichlet_compatible = false;
  c.neumann_compatible = true;
  return c;
}

ManufacturedCase stokes_trig_case(const Vec3& dims, double nu, double amplitude) {
  const TrigStokes t = make_trig(dims, nu, amplitude);
  ManufacturedCase c;
  c.name = "stokes_trig";
  c.dims = dims;
  c.u = [t](const Vec3& p) { return t.u(p); };
  c.grad_u = [t](const Vec3& p) { return t.grad(p); };
  c.P = [t](const Vec3& p) { return t.P(p); };
  c.f_momentum = [t](const Vec3& p) { return t.gradP(p) - t.nu * t.laplacian(p); };
  return c;
}

ManufacturedCase heat_quadratic_case(const Vec3& dims, double lambda) {
  ManufacturedCase c;
  c.name = "heat_quadratic";
  c.dims = dims;
  c.theta = [](const Vec3& p) { return p[1] * p[1] + p[1] * p[2] + 2.0 * p[2] * p[2]; };
  c.grad_theta = [](const Vec3& p) {
    return Vec3{0.0, 2.0 * p[1] + p[2], p[1] + 4.0 * p[2]};
  };
  c.h_heat = [lambda](const Vec3&) { return -6.0 * lambda; };
  c.theta_D = c.theta;
  c.dirichlet_compatible = false;
  return c;
}

namespace {

ManufacturedCase heat_product_case(const Vec3& dims, double lambda, bool cosine_x) {
  const double kx = kPi / dims[0], ky = kPi / dims[1], kz = kPi / dims[2];
  const double k2 = kx * kx + ky * ky + kz * kz;
  ManufacturedCase c;
  c.dims = dims;
  auto fx = [=](double x) { return cosine_x ? std::cos(kx * x) : std::sin(kx * x); };
  auto dfx = [=](double x) { return cosine_x ? -kx * std::sin(kx * x) : kx * std::cos(kx * x); };
  // Offset 1 + y keeps the wall data nonzero.
  c.theta = [=](const Vec3& p) {
    return 1.0 + p[1] + fx(p[0]) * std::sin(ky * p[1]) * std::sin(kz * p[2]);
  };
  c.grad_theta = [=](const Vec3& p) {
    const double sy = std::sin(ky * p[1]), sz = std::sin(kz * p[2]);
    return Vec3{dfx(p[0]) * sy * sz, 1.0 + fx(p[0]) * ky * std::cos(ky * p[1]) * sz,
                fx(p[0]) * sy * kz * std::cos(kz * p[2])};
  };
  c.h_heat = [=](const Vec3& p) {
    return lambda * k2 * fx(p[0]) * std::sin(ky * p[1]) * std::sin(kz * p[2]);
  };
  c.theta_D = c.theta;
  c.dirichlet_compatible = false;
  c.neumann_compatible = cosine_x;
  return c;
}

}  // namespace

ManufacturedCase heat_trig_case(const Vec3& dims, double lambda) {
  auto c = heat_product_case(dims, lambda, true);
  c.name = "heat_trig";
  return c;
}

ManufacturedCase heat_incompatible_case(const Vec3& dims, double lambda) {
  auto c = heat_product_case(dims, lambda, false);
  c.name = "heat_incompatible";
  return c;
}

ManufacturedCase coupled_case(const Vec3& dims, const MaterialModel& m, const Vec3& g,
                              double amplitude, double theta_wall) {
  const TrigStokes t = make_trig(dims, m.nu, amplitude);
  const double kx = kPi / dims[0], ky = kPi / dims[1], kz = kPi / dims[2];
  const double k2 = kx * kx + ky * ky + kz * kz;
  ManufacturedCase c;
  c.name = "coupled_trig";
  c.dims = dims;
  c.u = [t](const Vec3& p) { return t.u(p); };
  c.grad_u = [t](const Vec3& p) { return t.grad(p); };
  c.P = [t](const Vec3& p) { return t.P(p); };
  auto bump = [=](const Vec3& p) {
    return std::cos(kx * p[0]) * std::sin(ky * p[1]) * std::sin(kz * p[2]);
  };
  c.theta = [=](const Vec3& p) { return theta_wall + amplitude * bump(p); };
  c.grad_theta = [=](const Vec3& p) {
    const double cx = std::cos(kx * p[0]), sx = std::sin(kx * p[0]);
    const double sy = std::sin(ky * p[1]), cy = std::cos(ky * p[1]);
    const double sz = std::sin(kz * p[2]), cz = std::cos(kz * p[2]);
    return amplitude * Vec3{-kx * sx * sy * sz, ky * cx * cy * sz, kz * cx * sy * cz};
  };
  c.theta_D = [theta_wall](const Vec3&) { return theta_wall; };
  c.g = [g](const Vec3&) { return g; };
  const auto theta = c.theta;
  const auto grad_theta = c.grad_theta;
  c.f_momentum = [=](const Vec3& p) {
    const Vec3 w = t.u(p);
    const Vec3 conv = m.rho0 * mat_vec(t.grad(p), w);
    return t.gradP(p) - m.nu * t.laplacian(p) + conv - density(m, theta(p)) * g;
  };
  c.h_heat = [=](const Vec3& p) {
    const Mat3 e = symmetric_part(t.grad(p));
    return m.lambda * amplitude * k2 * bump(p) +
           m.cV * density(m, theta(p)) * dot(t.u(p), grad_theta(p)) -
           m.alpha1 * m.nu * contract(e, e);
  };
  return c;
}

CompatibilityReport check_compatibility(const DiscreteSpace& space, const ManufacturedCase& c,
                                        double nu) {
  CompatibilityReport rep;
  const auto& mesh = space.mesh();
  for (const auto& f : mesh.facets) {
    const Vec3 n = facet_normal(mesh, f);
    for_facet_points(mesh, f, 4, [&](const Vec3& x) {
      if (f.tag == BoundaryTag::GammaD) {
        if (c.u) rep.max_wall_velocity = std::max(rep.max_wall_velocity, norm(c.u(x)));
      } else {
        if (c.u && c.grad_u && c.P) {
          const Vec3 r = nu * mat_vec(c.grad_u(x), n) - c.P(x) * n;
          rep.max_do_nothing_residual = std::max(rep.max_do_nothing_residual, norm(r));
        }
        if (c.grad_theta)
          rep.max_heat_flux = std::max(rep.max_heat_flux, std::abs(dot(c.grad_theta(x), n)));
      }
    });
  }
  if (c.grad_u) {
    CellValues cv(space);
    for (std::size_t cell = 0; cell < space.n_cells(); ++cell) {
      cv.reinit(cell);
      for (std::size_t q = 0; q < cv.n_points(); ++q) {
        const Mat3 g = c.grad_u(cv.point(q));
        rep.max_divergence = std::max(rep.max_divergence, std::abs(g[0][0] + g[1][1] + g[2][2]));
      }
    }
  }
  rep.dirichlet_ok = rep.max_wall_velocity < 1e-12;
  rep.neumann_ok = rep.max_do_nothing_residual < 1e-12 && rep.max_heat_flux < 1e-12;
  return rep;
}

double l2_error(const DiscreteSpace& space, std::span<const double> field, const VectorFn& u) {
  CellValues cv(space);
  double s = 0.0;
  for (std::size_t c = 0; c < space.n_cells(); ++c) {
    cv.reinit(c);
    for (std::size_t q = 0; q < cv.n_points(); ++q) {
      const Vec3 d = cv.vector_value(field, q) - u(cv.point(q));
      s += dot(d, d) * cv.JxW(q);
    }
  }
  return std::sqrt(s);
}

double h1_error(const DiscreteSpace& space, std::span<const double> field, const VectorFn& u,
                const MatrixFn& grad_u) {
  CellValues cv(space);
  double s = 0.0;
  for (std::size_t c = 0; c < space.n_cells(); ++c) {
    cv.reinit(c);
    for (std::size_t q = 0; q < cv.n_points(); ++q) {
      const Vec3 x = cv.point(q);
      const Vec3 d = cv.vector_value(field, q) - u(x);
      const Mat3 gh = cv.vector_gradient(field, q);
      const Mat3 ge = grad_u(x);
      double g2 = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) g2 += (gh[i][j] - ge[i][j]) * (gh[i][j] - ge[i][j]);
      s += (dot(d, d) + g2) * cv.JxW(q);
    }
  }
  return std::sqrt(s);
}

double l2_error(const DiscreteSpace& space, std::span<const double> field, const ScalarFn& f) {
  CellValues cv(space);
  double s = 0.0;
  for (std::size_t c = 0; c < space.n_cells(); ++c) {
    cv.reinit(c);
    for (std::size_t q = 0; q < cv.n_points(); ++q) {
      const double d = cv.value(field, q) - f(cv.point(q));
      s += d * d * cv.JxW(q);
    }
  }
  return std::sqrt(s);
}

double h1_error(const DiscreteSpace& space, std::span<const double> field, const ScalarFn& f,
                const VectorFn& grad_f) {
  CellValues cv(space);
  double s = 0.0;
  for (std::size_t c = 0; c < space.n_cells(); ++c) {
    cv.reinit(c);
    for (std::size_t q = 0; q < cv.n_points(); ++q) {
      const Vec3 x = cv.point(q);
      const double d = cv.value(field, q) - f(x);
      const Vec3 dg = cv.gradient(field, q) - grad_f(x);
      s += (d * d + dot(dg, dg)) * cv.JxW(q);
    }
  }
  return std::sqrt(s);
}

StokesSolution solve_stokes_case(const DiscreteSpace& space, const ManufacturedCase& c,
                                 double nu) {
  const auto model = viscosity_only(nu);
  const auto nv = space.n_velocity();
  const auto np = space.n_pressure();
  const auto k = assemble_saddle(space, model).matrix;
  const auto kc = constrained_saddle(space, model);

  auto full = space.interpolate(c.u);
  full.resize(nv + np, 0.0);
  const auto xd = dirichlet_values(full, space.dirichlet_u(), nv + np);
  std::vector<double> rhs(nv + np, 0.0);
  if (c.f_momentum) {
    const auto f = assemble_source(space, c.f_momentum).values;
    std::copy(f.begin(), f.end(), rhs.begin());
  }
  const auto kx = k * std::span<const double>(xd);
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] -= kx[i];
  for (auto r : space.dirichlet_u()) rhs[r] = xd[r];

  const auto x = solve_saddle(kc, rhs);
  StokesSolution sol;
  sol.u.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(nv));
  sol.P.assign(x.begin() + static_cast<std::ptrdiff_t>(nv), x.end());
  return sol;
}

std::vector<double> solve_heat_case(const DiscreteSpace& space, const ManufacturedCase& c,
                                    double lambda) {
  MaterialModel model;
  model.lambda = lambda;
  const auto k = assemble_kappa(space, model).matrix;
  const auto kc = apply_dirichlet(k, space.dirichlet_theta());
  const auto n = space.n_scalar();
  const auto full = space.interpolate(c.theta_D ? c.theta_D : c.theta);
  const auto xd = dirichlet_values(full, space.dirichlet_theta(), n);
  std::vector<double> rhs(n, 0.0);
  if (c.h_heat) rhs = assemble_source(space, c.h_heat).values;
  const auto kx = k * std::span<const double>(xd);
  for (std::size_t i = 0; i < n; ++i) rhs[i] -= kx[i];
  for (auto r : space.dirichlet_theta()) rhs[r] = xd[r];
  return solve_spd(kc, rhs, 1e-14).x;
}

namespace {

void fill_orders(StudyTable& t) {
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    auto& r = t.rows[i];
    const auto& p = t.rows[i - 1];
    const double lh = std::log(p.h / r.h);
    r.order_L2 = std::log(p.err_L2 / r.err_L2) / lh;
    r.order_H1 = std::log(p.err_H1 / r.err_H1) / lh;
    if (!(r.err_L2 < p.err_L2) || !(r.err_H1 < p.err_H1)) t.monotone = false;
  }
  if (t.rows.size() < 2) return;
  const auto slope = [&](auto err) {
    double mx = 0, my = 0;
    for (const auto& r : t.rows) {
      mx += std::log(r.h);
      my += std::log(err(r));
    }
    mx /= t.rows.size();
    my /= t.rows.size();
    double sxy = 0, sxx = 0;
    for (const auto& r : t.rows) {
      const double dx = std::log(r.h) - mx;
      sxy += dx * (std::log(err(r)) - my);
      sxx += dx * dx;
    }
    return sxy / sxx;
  };
  t.fitted_L2 = slope([](const StudyRow& r) { return r.err_L2; });
  t.fitted_H1 = slope([](const StudyRow& r) { return r.err_H1; });
}

}  // namespace

StudyTable mms_stokes_study(const ManufacturedCase& c, double nu,
                            const std::vector<std::array<int, 3>>& levels, int quad_order) {
  StudyTable t;
  t.name = c.name;
  for (const auto& d : levels) {
    const auto mesh = build_channel_mesh(c.dims[0], c.dims[1], c.dims[2], d[0], d[1], d[2]);
    const DiscreteSpace space(mesh, quad_order);
    const auto sol = solve_stokes_case(space, c, nu);
    StudyRow r;
    r.divisions = d;
    r.h = c.dims[0] / d[0];
    r.err_L2 = l2_error(space, sol.u, c.u);
    r.err_H1 = h1_error(space, sol.u, c.u, c.grad_u);
    t.rows.push_back(r);
  }
  fill_orders(t);
  return t;
}

StudyTable mms_heat_study(const ManufacturedCase& c, double lambda,
                          const std::vector<std::array<int, 3>>& levels, int quad_order) {
  StudyTable t;
  t.name = c.name;
  for (const auto& d : levels) {
    const auto mesh = build_channel_mesh(c.dims[0], c.dims[1], c.dims[2], d[0], d[1], d[2]);
    const DiscreteSpace space(mesh, quad_order);
    const auto th = solve_heat_case(space, c, lambda);
    StudyRow r;
    r.divisions = d;
    r.h = c.dims[0] / d[0];
    r.err_L2 = l2_error(space, th, c.theta);
    r.err_H1 = h1_error(space, th, c.theta, c.grad_theta);
    t.rows.push_back(r);
  }
  fill_orders(t);
  return t;
}

std::string study_csv(const StudyTable& t) {
  std::ostringstream os;
  os << "case,nx,ny,nz,h,err_L2,err_H1,order_L2,order_H1\n";
  for (const auto& r : t.rows)
    os << t.name << ',' << r.divisions[0] << ',' << r.divisions[1] << ',' << r.divisions[2]
       << ',' << fmt17(r.h) << ',' << fmt17(r.err_L2) << ',' << fmt17(r.err_H1) << ','
       << fmt17(r.order_L2) << ',' << fmt17(r.order_H1) << '\n';
  return os.str();
}

CoupledReport coupled_mms(const DiscreteSpace& space, const ManufacturedCase& c,
                          const MaterialModel& model, const SolverSettings& settings) {
  Problem prob;
  prob.material = model;
  prob.g = c.g;
  prob.theta_D = c.theta_D;
  prob.momentum_source = c.f_momentum;
  prob.heat_source = c.h_heat;
  prob.settings = settings;
  CoupledReport rep;
  const CoupledSolver solver(space, prob);
  try {
    auto out = solver.outer_loop();
    rep.converged = true;
    rep.trace = std::move(out.trace);
    rep.outer_iterations = static_cast<int>(rep.trace.records.size());
    rep.err_u_L2 = l2_error(space, out.state.u, c.u);
    rep.err_u_H1 = h1_error(space, out.state.u, c.u, c.grad_u);
    rep.err_theta_L2 = l2_error(space, out.state.theta, c.theta);
    rep.err_theta_H1 = h1_error(space, out.state.theta, c.theta, c.grad_theta);
  } catch (const DivergenceError& e) {
    rep.converged = false;
    rep.failure = e.what();
    rep.trace = e.trace;
    rep.outer_iterations = static_cast<int>(rep.trace.records.size());
  }
  return rep;
}

}  // namespace heatduct
