#pragma once

// Closed-form fixtures shared by the unit tests and the acceptance binary.

#include <random>

#include "heatduct/mesh.hpp"
#include "heatduct/space.hpp"
#include "heatduct/types.hpp"

namespace heatduct::oracle {

/// Random field with tensor degree <= 2, div u = 0 exactly and u.n = 0 on
/// the y and z walls of the box [0,Lx]x[0,Ly]x[0,Lz]:
///   u_y = y (Ly - y) p(x),  u_z = z (Lz - z) q(x),  p, q linear,
///   u_x = -P(x) (Ly - 2y) - Q(x) (Lz - 2z) + a(y, z),  P' = p, Q' = q.
inline VectorFn random_quadratic_solenoidal(const Vec3& dims, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double p0 = n(rng), p1 = n(rng), q0 = n(rng), q1 = n(rng);
  std::array<double, 6> a{};
  for (auto& c : a) c = n(rng);
  const double ly = dims[1], lz = dims[2];
  return [=](const Vec3& x) {
    const double X = x[0], y = x[1], z = x[2];
    const double P = p0 * X + 0.5 * p1 * X * X, Q = q0 * X + 0.5 * q1 * X * X;
    const double ayz = a[0] + a[1] * y + a[2] * z + a[3] * y * y + a[4] * y * z + a[5] * z * z;
    return Vec3{-P * (ly - 2 * y) - Q * (lz - 2 * z) + ayz, y * (ly - y) * (p0 + p1 * X),
                z * (lz - z) * (q0 + q1 * X)};
  };
}

/// Random vector field of total degree <= 2.
inline VectorFn random_quadratic(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::array<std::array<double, 10>, 3> c{};
  for (auto& row : c)
    for (auto& v : row) v = n(rng);
  return [=](const Vec3& x) {
    const std::array<double, 10> m{1,           x[0],        x[1],        x[2],
                                   x[0] * x[0], x[1] * x[1], x[2] * x[2], x[0] * x[1],
                                   x[1] * x[2], x[0] * x[2]};
    Vec3 v{};
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 10; ++k) v[i] += c[i][k] * m[k];
    return v;
  };
}

/// (rho0/2) sum over the open-end facets of int (u.n)|v|^2 dA, by a tensor
/// Gauss rule on each facet.
inline double outflow_term(const ChannelMesh& mesh, double rho0, const VectorFn& u,
                           const VectorFn& v, int points = 5) {
  const auto rule = gauss_legendre(points);
  double total = 0.0;
  for (const auto& f : mesh.facets) {
    if (f.tag != BoundaryTag::GammaN) continue;
    const Vec3 nrm = facet_normal(mesh, f);
    const auto& p = f.vertices;
    const Vec3 &v0 = mesh.vertices[p[0]], &v1 = mesh.vertices[p[1]], &v2 = mesh.vertices[p[2]],
               &v3 = mesh.vertices[p[3]];
    for (std::size_t i = 0; i < rule.points.size(); ++i)
      for (std::size_t j = 0; j < rule.points.size(); ++j) {
        const double s = rule.points[i], t = rule.points[j];
        const Vec3 x = (1 - s) * (1 - t) * v0 + s * (1 - t) * v1 + s * t * v2 + (1 - s) * t * v3;
        const Vec3 ds = (1 - t) * (v1 - v0) + t * (v2 - v3);
        const Vec3 dt = (1 - s) * (v3 - v0) + s * (v2 - v1);
        const Vec3 vx = v(x);
        total += rule.weights[i] * rule.weights[j] * norm(cross(ds, dt)) * dot(u(x), nrm) *
                 dot(vx, vx);
      }
  }
  return 0.5 * rho0 * total;
}

}  // namespace heatduct::oracle
