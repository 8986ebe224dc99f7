#include "heatduct/fixed_point.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace heatduct {

namespace {

std::vector<double> diff(std::span<const double> a, std::span<const double> b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string trace_csv(const IterationTrace& trace) {
  std::ostringstream os;
  os << "iter,inner_iters,beta_hat,d_theta_norm,r_momentum,r_heat,min_flux,inflow_fraction\n";
  for (const auto& r : trace.records)
    os << r.iter << ',' << r.inner_iters << ',' << fmt17(r.beta_hat) << ','
       << fmt17(r.d_theta_norm) << ',' << fmt17(r.r_momentum) << ',' << fmt17(r.r_heat) << ','
       << fmt17(r.min_flux) << ',' << fmt17(r.inflow_fraction) << '\n';
  return os.str();
}

CoupledSolver::CoupledSolver(const DiscreteSpace& space, Problem problem)
    : space_(&space),
      problem_(std::move(problem)),
      saddle_(assemble_saddle(space, problem_.material).matrix),
      saddle_lu_(constrained_saddle(space, problem_.material)) {
  const auto& s = problem_.settings;
  if (!(s.damping > 0.0 && s.damping <= 1.0))
    throw std::invalid_argument("damping must lie in (0, 1]");
  if (!(s.inner_tol > 0.0) || !(s.outer_tol > 0.0) || !(s.linear_tol > 0.0))
    throw std::invalid_argument("tolerances must be positive");
  if (!problem_.g) problem_.g = [](const Vec3&) { return Vec3{0.0, 0.0, 0.0}; };
  if (!problem_.theta_D) problem_.theta_D = [](const Vec3&) { return 0.0; };

  kappa_ = assemble_kappa(space, problem_.material).matrix;
  kappa_constrained_ = apply_dirichlet(kappa_, space.dirichlet_theta());
  h1_ = add(assemble_scalar_mass(space), assemble_scalar_stiffness(space));
  theta_D_ = space.interpolate(problem_.theta_D);
  lifting_ = kappa_ * std::span<const double>(theta_D_);
  if (problem_.momentum_source)
    momentum_src_ = assemble_source(space, problem_.momentum_source).values;
  else
    momentum_src_.assign(space.n_velocity(), 0.0);
  if (problem_.heat_source)
    heat_src_ = assemble_source(space, problem_.heat_source).values;
  else
    heat_src_.assign(space.n_scalar(), 0.0);
}

double CoupledSolver::h1_norm(std::span<const double> field) const {
  const auto n = space_->n_scalar();
  if (field.size() != n && field.size() != 3 * n)
    throw std::invalid_argument("field size matches neither scalar nor vector layout");
  double sum = 0.0;
  std::vector<double> tmp(n);
  for (std::size_t off = 0; off < field.size(); off += n) {
    const auto f = field.subspan(off, n);
    h1_.multiply(f, tmp);
    sum += dot(f, tmp);
  }
  return std::sqrt(std::max(sum, 0.0));
}

InnerResult CoupledSolver::inner_momentum_solve(std::span<const double> theta_frozen,
                                                std::span<const double> u_init) const {
  const auto& space = *space_;
  const auto nv = space.n_velocity();
  const auto np = space.n_pressure();
  if (u_init.size() != nv) throw std::invalid_argument("u_init has the wrong size");

  auto base = assemble_buoyancy(space, problem_.material, theta_frozen, problem_.g).values;
  for (std::size_t i = 0; i < nv; ++i) base[i] += momentum_src_[i];

  InnerResult res;
  res.u.assign(u_init.begin(), u_init.end());
  zero_rows(res.u, space.dirichlet_u());
  res.P.assign(np, 0.0);

  std::vector<double> rhs(nv + np, 0.0);
  int above_one = 0;
  for (int k = 1; k <= problem_.settings.max_inner; ++k) {
    const auto conv = assemble_convection_load(space, problem_.material, res.u).values;
    for (std::size_t i = 0; i < nv; ++i) rhs[i] = base[i] - conv[i];
    for (auto r : space.dirichlet_u()) rhs[r] = 0.0;
    const auto x = saddle_lu_.solve(rhs);
    std::vector<double> w(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(nv));
    const double inc = h1_norm(diff(w, res.u));
    res.trace.increments.push_back(inc);
    res.u = std::move(w);
    res.P.assign(x.begin() + static_cast<std::ptrdiff_t>(nv), x.end());
    if (k >= 2) {
      const double prev = res.trace.increments[k - 2];
      const double ratio = prev > 0.0 ? inc / prev : 0.0;
      res.trace.ratios.push_back(ratio);
      above_one = ratio >= 1.0 ? above_one + 1 : 0;
    }
    if (inc <= problem_.settings.inner_tol) return res;
    if (above_one >= 3)
      throw DivergenceError("inner momentum iteration diverges (contraction ratio >= 1 for 3 "
                            "consecutive steps)",
                            {}, res.trace);
    if (!std::isfinite(inc))
      throw DivergenceError("inner momentum iteration produced non-finite values", {},
                            res.trace);
  }
  throw DivergenceError("inner momentum iteration hit the iteration cap", {}, res.trace);
}

std::vector<double> CoupledSolver::heat_solve(std::span<const double> u,
                                              std::span<const double> theta_frozen) const {
  const auto& space = *space_;
  const auto& model = problem_.material;
  const auto e = assemble_e_load(space, model, u, u).values;
  const auto d = assemble_d_load(space, model, theta_frozen, u, theta_frozen).values;
  std::vector<double> rhs(space.n_scalar());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = e[i] - d[i] - lifting_[i] + heat_src_[i];
  zero_rows(rhs, space.dirichlet_theta());
  if (norm2(rhs) == 0.0) return std::vector<double>(rhs.size(), 0.0);
  auto cg = solve_spd(kappa_constrained_, rhs, problem_.settings.linear_tol);
  zero_rows(cg.x, space.dirichlet_theta());
  return std::move(cg.x);
}

OuterResult CoupledSolver::outer_loop() const {
  using Clock = std::chrono::steady_clock;
  const auto& space = *space_;
  const auto& st = problem_.settings;
  OuterResult out;
  State& s = out.state;
  s.u.assign(space.n_velocity(), 0.0);
  s.P.assign(space.n_pressure(), 0.0);
  s.vartheta.assign(space.n_scalar(), 0.0);
  s.theta = theta_D_;

  for (int n = 1; n <= st.max_outer; ++n) {
    const auto t0 = Clock::now();
    InnerResult inner;
    try {
      inner = inner_momentum_solve(s.theta, s.u);
    } catch (DivergenceError& e) {
      throw DivergenceError(e.what(), out.trace, e.inner);
    }
    s.u = std::move(inner.u);
    s.P = std::move(inner.P);
    auto next = heat_solve(s.u, s.theta);
    if (st.damping < 1.0)
      for (std::size_t i = 0; i < next.size(); ++i)
        next[i] = s.vartheta[i] + st.damping * (next[i] - s.vartheta[i]);
    const double dnorm = h1_norm(diff(next, s.vartheta));
    s.vartheta = std::move(next);
    for (std::size_t i = 0; i < s.theta.size(); ++i) s.theta[i] = theta_D_[i] + s.vartheta[i];

    OuterRecord rec;
    rec.iter = n;
    rec.inner_iters = static_cast<int>(inner.trace.increments.size());
    for (double r : inner.trace.ratios) rec.beta_hat = std::max(rec.beta_hat, r);
    rec.d_theta_norm = dnorm;
    const auto res = weak_residual(s);
    rec.r_momentum = res.r_momentum;
    rec.r_heat = res.r_heat;
    const auto bf = backward_flow_measure(space, s.u);
    rec.min_flux = bf.min_flux;
    rec.inflow_fraction = bf.inflow_fraction;
    rec.inner = std::move(inner.trace);
    rec.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    out.trace.records.push_back(std::move(rec));

    if (!std::isfinite(dnorm))
      throw DivergenceError("outer loop produced non-finite temperature", out.trace, {});
    if (dnorm <= st.outer_tol) {
      out.trace.converged = true;
      return out;
    }
  }
  throw DivergenceError("outer loop hit the iteration cap", out.trace, {});
}

Residuals CoupledSolver::weak_residual(const State& state) const {
  const auto& space = *space_;
  const auto& model = problem_.material;
  const auto nv = space.n_velocity();
  const auto np = space.n_pressure();

  std::vector<double> x(nv + np);
  std::copy(state.u.begin(), state.u.end(), x.begin());
  std::copy(state.P.begin(), state.P.end(), x.begin() + static_cast<std::ptrdiff_t>(nv));
  auto rm = saddle_ * std::span<const double>(x);
  const auto buoy = assemble_buoyancy(space, model, state.theta, problem_.g).values;
  const auto conv = assemble_convection_load(space, model, state.u).values;
  for (std::size_t i = 0; i < nv; ++i) rm[i] -= buoy[i] + momentum_src_[i] - conv[i];
  zero_rows(rm, space.dirichlet_u());

  auto rh = kappa_ * std::span<const double>(state.theta);
  const auto d = assemble_d_load(space, model, state.theta, state.u, state.theta).values;
  const auto e = assemble_e_load(space, model, state.u, state.u).values;
  for (std::size_t i = 0; i < rh.size(); ++i) rh[i] += d[i] - e[i] - heat_src_[i];
  zero_rows(rh, space.dirichlet_theta());
  return {norm2(rm), norm2(rh)};
}

BackwardFlow backward_flow_measure(const DiscreteSpace& space, std::span<const double> u) {
  const auto& mesh = space.mesh();
  const auto n = space.n_scalar();
  if (u.size() != 3 * n) throw std::invalid_argument("velocity has the wrong size");
  const auto rule = gauss_legendre(space.quadrature().order);

  std::array<double, 2> area{}, inflow{};
  std::array<double, 2> minf{std::numeric_limits<double>::infinity(),
                             std::numeric_limits<double>::infinity()};
  for (const auto& f : mesh.facets) {
    if (f.tag != BoundaryTag::GammaN) continue;
    const int side = f.plane;  // 0: x = 0, 1: x = Lx
    const Vec3 nrm = facet_normal(mesh, f);
    const auto dofs = space.cell_scalar_dofs(f.cell);
    const double xi = side == 0 ? 0.0 : 1.0;
    for (std::size_t a = 0; a < rule.points.size(); ++a)
      for (std::size_t b = 0; b < rule.points.size(); ++b) {
        const Vec3 ref{xi, rule.points[a], rule.points[b]};
        // The trilinear map is linear in each reference variable, so these
        // central differences are exact tangents.
        const Vec3 ty = 0.5 * (map_to_physical(mesh, f.cell, {xi, ref[1] + 0.5, ref[2]}) -
                               map_to_physical(mesh, f.cell, {xi, ref[1] - 0.5, ref[2]}));
        const Vec3 tz = 0.5 * (map_to_physical(mesh, f.cell, {xi, ref[1], ref[2] + 0.5}) -
                               map_to_physical(mesh, f.cell, {xi, ref[1], ref[2] - 0.5}));
        const double ds = norm(cross(ty, tz)) * rule.weights[a] * rule.weights[b];
        const auto phi = q2_shape_values(ref);
        Vec3 val{};
        for (int c = 0; c < 3; ++c)
          for (int i = 0; i < kScalarNodesPerCell; ++i) val[c] += phi[i] * u[c * n + dofs[i]];
        const double flux = dot(val, nrm);
        area[side] += ds;
        if (flux < 0.0) inflow[side] += ds;
        minf[side] = std::min(minf[side], flux);
      }
  }
  BackwardFlow bf;
  for (int s = 0; s < 2; ++s) {
    bf.faces[s].min_flux = std::isfinite(minf[s]) ? minf[s] : 0.0;
    bf.faces[s].inflow_fraction = area[s] > 0.0 ? inflow[s] / area[s] : 0.0;
  }
  bf.min_flux = std::min(bf.faces[0].min_flux, bf.faces[1].min_flux);
  const double total = area[0] + area[1];
  bf.inflow_fraction = total > 0.0 ? (inflow[0] + inflow[1]) / total : 0.0;
  return bf;
}

double total_dissipation(const DiscreteSpace& space, const MaterialModel& model,
                         std::span<const double> u) {
  const auto e = assemble_e_load(space, model, u, u).values;
  double s = 0.0;
  for (double v : e) s += v;
  return s;
}

double integral(const DiscreteSpace& space, std::span<const double> f) {
  if (f.size() != space.n_scalar()) throw std::invalid_argument("expected a scalar field");
  CellValues cv(space);
  double s = 0.0;
  for (std::size_t c = 0; c < space.n_cells(); ++c) {
    cv.reinit(c);
    for (std::size_t q = 0; q < cv.n_points(); ++q) s += cv.value(f, q) * cv.JxW(q);
  }
  return s;
}

double domain_volume(const DiscreteSpace& space) {
  CellValues cv(space);
  double s = 0.0;
  for (std::size_t c = 0; c < space.n_cells(); ++c) {
    cv.reinit(c);
    for (std::size_t q = 0; q < cv.n_points(); ++q) s += cv.JxW(q);
  }
  return s;
}

}  // namespace heatduct
