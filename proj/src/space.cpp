#include "heatduct/space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace heatduct {

GaussRule1D gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("Gauss rule needs at least one point");
  GaussRule1D rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? x : p1;
      const double pnm1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[n - 1 - i] = 0.5 * (x + 1.0);
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

Quadrature tensor_gauss(int points_per_direction) {
  const auto g = gauss_legendre(points_per_direction);
  Quadrature q;
  q.order = points_per_direction;
  for (int k = 0; k < points_per_direction; ++k)
    for (int j = 0; j < points_per_direction; ++j)
      for (int i = 0; i < points_per_direction; ++i) {
        q.points.push_back({g.points[i], g.points[j], g.points[k]});
        q.weights.push_back(g.weights[i] * g.weights[j] * g.weights[k]);
      }
  return q;
}

namespace {

constexpr std::array<std::array<int, 3>, 8> kHexCorners = {
    {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
     {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}}};

// Quadratic Lagrange basis on nodes 0, 1/2, 1.
double lag2(int a, double t) {
  switch (a) {
    case 0: return 2.0 * (t - 0.5) * (t - 1.0);
    case 1: return -4.0 * t * (t - 1.0);
    default: return 2.0 * t * (t - 0.5);
  }
}
double dlag2(int a, double t) {
  switch (a) {
    case 0: return 4.0 * t - 3.0;
    case 1: return -8.0 * t + 4.0;
    default: return 4.0 * t - 1.0;
  }
}
double d2lag2(int a) { return a == 1 ? -8.0 : 4.0; }

double lag1(int a, double t) { return a == 0 ? 1.0 - t : t; }
double dlag1(int a) { return a == 0 ? -1.0 : 1.0; }

Mat3 inverse(const Mat3& m, double& det) {
  det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
        m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
        m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  const double inv = 1.0 / det;
  Mat3 r{};
  r[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) * inv;
  r[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv;
  r[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv;
  r[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) * inv;
  r[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv;
  r[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv;
  r[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) * inv;
  r[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv;
  r[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv;
  return r;
}

}  // namespace

std::array<double, kScalarNodesPerCell> q2_shape_values(const Vec3& ref) {
  std::array<double, kScalarNodesPerCell> out{};
  for (int c = 0; c < 3; ++c)
    for (int b = 0; b < 3; ++b)
      for (int a = 0; a < 3; ++a)
        out[a + 3 * b + 9 * c] = lag2(a, ref[0]) * lag2(b, ref[1]) * lag2(c, ref[2]);
  return out;
}

Vec3 map_to_physical(const ChannelMesh& mesh, std::size_t cell, const Vec3& ref) {
  Vec3 x{};
  const auto& verts = mesh.cells[cell];
  for (int v = 0; v < 8; ++v) {
    const auto& c = kHexCorners[v];
    const double w = lag1(c[0], ref[0]) * lag1(c[1], ref[1]) * lag1(c[2], ref[2]);
    x = x + w * mesh.vertices[verts[v]];
  }
  return x;
}

DiscreteSpace::DiscreteSpace(ChannelMesh mesh, int quad_order,
                             BoundaryPolicy policy)
    : mesh_(std::move(mesh)), policy_(policy) {
  if (quad_order < 3)
    throw std::invalid_argument(
        "quadrature order must be at least 3 points per direction");
  quadrature_ = tensor_gauss(quad_order);
  const auto [nx, ny, nz] = mesh_.divisions;
  lattice_ = {2 * nx + 1, 2 * ny + 1, 2 * nz + 1};

  nodes_.resize(static_cast<std::size_t>(lattice_[0]) * lattice_[1] * lattice_[2]);
  dirichlet_node_.assign(nodes_.size(), 0);
  for (int k = 0; k < lattice_[2]; ++k)
    for (int j = 0; j < lattice_[1]; ++j)
      for (int i = 0; i < lattice_[0]; ++i) {
        const int ci = std::min(i / 2, nx - 1);
        const int cj = std::min(j / 2, ny - 1);
        const int ck = std::min(k / 2, nz - 1);
        const Vec3 ref{0.5 * (i - 2 * ci), 0.5 * (j - 2 * cj), 0.5 * (k - 2 * ck)};
        const auto n = lattice_index(i, j, k);
        nodes_[n] = map_to_physical(mesh_, mesh_.cell_index(ci, cj, ck), ref);
        const bool on_wall =
            j == 0 || j == lattice_[1] - 1 || k == 0 || k == lattice_[2] - 1;
        const bool on_end = i == 0 || i == lattice_[0] - 1;
        if (on_wall || (policy_ == BoundaryPolicy::AllDirichlet && on_end))
          dirichlet_node_[n] = 1;
      }

  for (std::size_t n = 0; n < nodes_.size(); ++n)
    if (dirichlet_node_[n]) dirichlet_theta_.push_back(n);
  for (std::size_t c = 0; c < 3; ++c)
    for (auto n : dirichlet_theta_) dirichlet_u_.push_back(c * nodes_.size() + n);
}

std::size_t DiscreteSpace::lattice_index(int i, int j, int k) const {
  return static_cast<std::size_t>(i) +
         static_cast<std::size_t>(lattice_[0]) *
             (static_cast<std::size_t>(j) +
              static_cast<std::size_t>(lattice_[1]) * static_cast<std::size_t>(k));
}

std::array<std::size_t, kScalarNodesPerCell> DiscreteSpace::cell_scalar_dofs(
    std::size_t cell) const {
  const auto [ci, cj, ck] = mesh_.cell_coords(cell);
  std::array<std::size_t, kScalarNodesPerCell> dofs{};
  for (int c = 0; c < 3; ++c)
    for (int b = 0; b < 3; ++b)
      for (int a = 0; a < 3; ++a)
        dofs[a + 3 * b + 9 * c] = lattice_index(2 * ci + a, 2 * cj + b, 2 * ck + c);
  return dofs;
}

std::vector<double> DiscreteSpace::interpolate(const ScalarFn& f) const {
  std::vector<double> out(nodes_.size());
  for (std::size_t n = 0; n < nodes_.size(); ++n) out[n] = f(nodes_[n]);
  return out;
}

std::vector<double> DiscreteSpace::interpolate(const VectorFn& f) const {
  const auto n = nodes_.size();
  std::vector<double> out(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 v = f(nodes_[i]);
    for (std::size_t c = 0; c < 3; ++c) out[c * n + i] = v[c];
  }
  return out;
}

std::vector<double> DiscreteSpace::interpolate_pressure(const ScalarFn& f) const {
  std::vector<double> out(mesh_.n_vertices());
  for (std::size_t v = 0; v < out.size(); ++v) out[v] = f(mesh_.vertices[v]);
  return out;
}

DiscreteSpace build_spaces(const ChannelMesh& mesh, int quad_order,
                           BoundaryPolicy policy) {
  return DiscreteSpace(mesh, quad_order, policy);
}

CellValues::CellValues(const DiscreteSpace& space)
    : space_(&space),
      n_q_(space.quadrature().size()),
      n_scalar_(space.n_scalar()) {
  const auto& quad = space.quadrature();
  phi_.resize(n_q_ * 27);
  ref_dphi_.resize(n_q_ * 27);
  ref_d2phi_.resize(n_q_ * 27);
  psi_.resize(n_q_ * 8);
  ref_dpsi_.resize(n_q_ * 8);
  for (std::size_t q = 0; q < n_q_; ++q) {
    const auto& p = quad.points[q];
    for (int c = 0; c < 3; ++c)
      for (int b = 0; b < 3; ++b)
        for (int a = 0; a < 3; ++a) {
          const int loc = a + 3 * b + 9 * c;
          const double lx = lag2(a, p[0]), ly = lag2(b, p[1]), lz = lag2(c, p[2]);
          const double dx = dlag2(a, p[0]), dy = dlag2(b, p[1]), dz = dlag2(c, p[2]);
          phi_[q * 27 + loc] = lx * ly * lz;
          ref_dphi_[q * 27 + loc] = {dx * ly * lz, lx * dy * lz, lx * ly * dz};
          Mat3 h{};
          h[0][0] = d2lag2(a) * ly * lz;
          h[1][1] = lx * d2lag2(b) * lz;
          h[2][2] = lx * ly * d2lag2(c);
          h[0][1] = h[1][0] = dx * dy * lz;
          h[0][2] = h[2][0] = dx * ly * dz;
          h[1][2] = h[2][1] = lx * dy * dz;
          ref_d2phi_[q * 27 + loc] = h;
        }
    for (int v = 0; v < 8; ++v) {
      const auto& c = kHexCorners[v];
      psi_[q * 8 + v] = lag1(c[0], p[0]) * lag1(c[1], p[1]) * lag1(c[2], p[2]);
      ref_dpsi_[q * 8 + v] = {dlag1(c[0]) * lag1(c[1], p[1]) * lag1(c[2], p[2]),
                              lag1(c[0], p[0]) * dlag1(c[1]) * lag1(c[2], p[2]),
                              lag1(c[0], p[0]) * lag1(c[1], p[1]) * dlag1(c[2])};
    }
  }
  x_.resize(n_q_);
  jxw_.resize(n_q_);
  dphi_.resize(n_q_ * 27);
  d2phi_.resize(n_q_ * 27);
}

void CellValues::reinit(std::size_t cell) {
  cell_ = cell;
  dofs_ = space_->cell_scalar_dofs(cell);
  const auto& mesh = space_->mesh();
  const auto& verts = mesh.cells[cell];
  const auto& quad = space_->quadrature();
  for (std::size_t q = 0; q < n_q_; ++q) {
    Mat3 jac{};  // jac[i][j] = d x_i / d ref_j
    Vec3 x{};
    for (int v = 0; v < 8; ++v) {
      const auto& xv = mesh.vertices[verts[v]];
      const auto& g = ref_dpsi_[q * 8 + v];
      const double w = psi_[q * 8 + v];
      for (int i = 0; i < 3; ++i) {
        x[i] += w * xv[i];
        for (int j = 0; j < 3; ++j) jac[i][j] += xv[i] * g[j];
      }
    }
    double det = 0.0;
    const Mat3 inv = inverse(jac, det);  // inv[j][i] = d ref_j / d x_i
    if (!(det > 0.0)) throw std::runtime_error("degenerate or inverted cell");
    x_[q] = x;
    jxw_[q] = quad.weights[q] * det;
    for (int a = 0; a < 27; ++a) {
      const auto& gr = ref_dphi_[q * 27 + a];
      Vec3 g{};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) g[i] += inv[j][i] * gr[j];
      dphi_[q * 27 + a] = g;
      const auto& hr = ref_d2phi_[q * 27 + a];
      Mat3 h{};
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) {
          double s = 0.0;
          for (int j = 0; j < 3; ++j)
            for (int l = 0; l < 3; ++l) s += inv[j][i] * hr[j][l] * inv[l][k];
          h[i][k] = s;
        }
      d2phi_[q * 27 + a] = h;
    }
  }
}

double CellValues::value(std::span<const double> f, std::size_t q) const {
  double s = 0.0;
  for (int a = 0; a < 27; ++a) s += f[dofs_[a]] * phi_[q * 27 + a];
  return s;
}

Vec3 CellValues::gradient(std::span<const double> f, std::size_t q) const {
  Vec3 g{};
  for (int a = 0; a < 27; ++a) g = g + f[dofs_[a]] * dphi_[q * 27 + a];
  return g;
}

Mat3 CellValues::hessian(std::span<const double> f, std::size_t q) const {
  Mat3 h{};
  for (int a = 0; a < 27; ++a) {
    const double c = f[dofs_[a]];
    const auto& ha = d2phi_[q * 27 + a];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) h[i][j] += c * ha[i][j];
  }
  return h;
}

Vec3 CellValues::vector_value(std::span<const double> u, std::size_t q) const {
  Vec3 v{};
  for (std::size_t c = 0; c < 3; ++c) v[c] = value(u.subspan(c * n_scalar_, n_scalar_), q);
  return v;
}

Mat3 CellValues::vector_gradient(std::span<const double> u, std::size_t q) const {
  Mat3 g{};
  for (std::size_t c = 0; c < 3; ++c) g[c] = gradient(u.subspan(c * n_scalar_, n_scalar_), q);
  return g;
}

double CellValues::pressure_value(std::span<const double> p, std::size_t q) const {
  const auto& pd = space_->cell_pressure_dofs(cell_);
  double s = 0.0;
  for (int a = 0; a < 8; ++a) s += p[pd[a]] * psi_[q * 8 + a];
  return s;
}

}  // namespace heatduct
