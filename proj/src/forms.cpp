#include "heatduct/forms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "heatduct/spectrum.hpp"

namespace heatduct {

namespace {

SparseMatrix assemble_scalar_bilinear(const DiscreteSpace& space, bool stiffness, double coeff) {
  const auto n = space.n_scalar();
  TripletBuilder tb(n, n);
  tb.reserve(space.n_cells() * 27 * 27);
  CellValues cv(space);
  double local[27][27];
  for (std::size_t c = 0; c < space.n_cells(); ++c) {
    cv.reinit(c);
    for (auto& row : local) std::fill(std::begin(row), std::end(row), 0.0);
    for (std::size_t q = 0; q < cv.n_points(); ++q) {
      const double w = cv.JxW(q) * coeff;
      for (int i = 0; i < 27; ++i)
        for (int j = 0; j < 27; ++j)
          local[i][j] += w * (stiffness ? dot(cv.grad(q, i), cv.grad(q, j))
                                        : cv.shape(q, i) * cv.shape(q, j));
    }
    const auto& dofs = cv.dofs();
    for (int i = 0; i < 27; ++i)
      for (int j = 0; j < 27; ++j) tb.add(dofs[i], dofs[j], local[i][j]);
  }
  return tb.build();
}

bool is_vector_field(const DiscreteSpace& space, std::span<const double> f) {
  if (f.size() == space.n_velocity()) return true;
  if (f.size() == space.n_scalar()) return false;
  throw std::invalid_argument("field size matches neither scalar nor vector layout");
}

}  // namespace

SparseMatrix assemble_scalar_stiffness(const DiscreteSpace& space, double coeff) {
  return assemble_scalar_bilinear(space, true, coeff);
}

SparseMatrix assemble_scalar_mass(const DiscreteSpace& space) {
  return assemble_scalar_bilinear(space, false, 1.0);
}

AssembledOperator assemble_a(const DiscreteSpace& space, const MaterialModel& model) {
  return {repeat_diagonal(assemble_scalar_stiffness(space, model.nu), 3),
          OperatorKind::AViscous, true};
}

AssembledOperator assemble_kappa(const DiscreteSpace& space, const MaterialModel& model) {
  return {assemble_scalar_stiffness(space, model.lambda), OperatorKind::Kappa, true};
}

SparseMatrix assemble_divergence(const DiscreteSpace& space) {
  const auto n = space.n_scalar();
  TripletBuilder tb(space.n_pressure(), space.n_velocity());
  tb.reserve(space.n_cells() * 8 * 81);
  CellValues cv(space);
  double local[8][3][27];
  for (std::size_t c = 0; c < space.n_cells(); ++c) {
    cv.reinit(c);
    for (auto& a : local)
      for (auto& b : a) std::fill(std::begin(b), std::end(b), 0.0);
    for (std::size_t q = 0; q < cv.n_points(); ++q)
      for (int p = 0; p < 8; ++p) {
        const double w = cv.JxW(q) * cv.pressure_shape(q, p);
        for (int comp = 0; comp < 3; ++comp)
          for (int i = 0; i < 27; ++i) local[p][comp][i] += w * cv.grad(q, i)[comp];
      }
    const auto& pd = space.cell_pressure_dofs(c);
    const auto& dofs = cv.dofs();
    for (int p = 0; p < 8; ++p)
      for (std::size_t comp = 0; comp < 3; ++comp)
        for (int i = 0; i < 27; ++i) tb.add(pd[p], comp * n + dofs[i], local[p][comp][i]);
  }
  return tb.build();
}

AssembledOperator assemble_saddle(const DiscreteSpace& space, const MaterialModel& model) {
  const auto a = assemble_a(space, model).matrix;
  const auto b = assemble_divergence(space).scaled(-1.0);
  const auto bt = b.transpose();
  return {block_matrix({{&a, &bt}, {&b, nullptr}}, {space.n_velocity(), space.n_pressure()},
                       {space.n_velocity(), space.n_pressure()}),
          OperatorKind::MixedSaddle, true};
}

SparseMatrix apply_dirichlet(const SparseMatrix& a, std::span<const std::size_t> rows) {
  std::vector<char> mask(a.rows(), 0);
  for (auto r : rows) mask[r] = 1;
  TripletBuilder tb(a.rows(), a.cols());
  tb.reserve(a.nnz());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (mask[i]) {
      tb.add(i, i, 1.0);
      continue;
    }
    for (std::size_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
      const auto j = a.col_idx()[k];
      if (j < mask.size() && mask[j]) continue;
      tb.add(i, j, a.values()[k]);
    }
  }
  return tb.build();
}

SparseMatrix constrained_saddle(const DiscreteSpace& space, const MaterialModel& model,
                                bool pin_pressure) {
  std::vector<std::size_t> rows = space.dirichlet_u();
  if (pin_pressure) rows.push_back(space.n_velocity());
  return apply_dirichlet(assemble_saddle(space, model).matrix, rows);
}

AssembledOperator assemble_b(const DiscreteSpace& space, const MaterialModel& model,
                             std::span<const double> u0) {
  const auto n = space.n_scalar();
  TripletBuilder tb(n, n);
  tb.reserve(space.n_cells() * 27 * 27);
  CellValues cv(space);
  double local[27][27];
  for (std::size_t c = 0; c < space.n_cells(); ++c) {
    cv.reinit(c);
    for (auto& row : local) std::fill(std::begin(row), std::end(row), 0.0);
    for (std::size_t q = 0; q < cv.n_points(); ++q) {
      const Vec3 w = cv.vector_value(u0, q);
      const double jxw = cv.JxW(q) * model.rho0;
      for (int j = 0; j < 27; ++j) {
        const double adv = dot(w, cv.grad(q, j)) * jxw;
        for (int i = 0; i < 27; ++i) local[i][j] += adv * cv.shape(q, i);
      }
    }
    const auto& dofs = cv.dofs();
    for (int i = 0; i < 27; ++i)
      for (int j = 0; j < 27; ++j) tb.add(dofs[i], dofs[j], local[i][j]);
  }
  return {repeat_diagonal(tb.build(), 3), OperatorKind::BConvection, false};
}

LoadVector assemble_convection_load(const DiscreteSpace& space, const MaterialModel& model,
                                    std::span<const double> u0) {
  const auto n = space.n_scalar();
  std::vector<double> out(3 * n, 0.0);
  CellValues cv(space);
  for (std::size_t c = 0; c < space.n_cells(); ++c) {
    cv.reinit(c);
    const auto& dofs = cv.dofs();
    for (std::size_t q = 0; q < cv.n_points(); ++q) {
      const Vec3 w = cv.vector_value(u0, q);
      const Mat3 g = cv.vector_gradient(u0, q);
      Vec3 adv{};
      for (int i = 0; i < 3; ++i) adv[i] = model.rho0 * dot(g[i], w);
      for (int a = 0; a < 27; ++a) {
        const double phi = cv.shape(q, a) * cv.JxW(q);
        for (std::size_t comp = 0; comp < 3; ++comp) out[comp * n + dofs[a]] += adv[comp] * phi;
      }
    }
  }
  return {std::move(out), LoadKind::ConvectionLoad};
}

LoadVector assemble_d_load(const DiscreteSpace& space, const MaterialModel& model,
                           std::span<const double> theta_frozen, std::span<const double> u,
                           std::span<const double> theta_transported) {
  std::vector<double> out(space.n_scalar(), 0.0);
  CellValues cv(space);
  for (std::size_t c = 0; c < space.n_cells(); ++c) {
    cv.reinit(c);
    const auto& dofs = cv.dofs();
    for (std::size_t q = 0; q < cv.n_points(); ++q) {
      const double rho = density(model, cv.value(theta_frozen, q));
      const double val =
          model.cV * rho * dot(cv.vector_value(u, q), cv.gradient(theta_transported, q)) *
          cv.JxW(q);
      for (int a = 0; a < 27; ++a) out[dofs[a]] += val * cv.shape(q, a);
    }
  }
  return {std::move(out), LoadKind::ConvectionLoad};
}

LoadVector assemble_e_load(const DiscreteSpace& space, const MaterialModel& model,
                           std::span<const double> u, std::span<const double> v) {
  std::vector<double> out(space.n_scalar(), 0.0);
  CellValues cv(space);
  const double coeff = model.alpha1 * model.nu;
  for (std::size_t c = 0; c < space.n_cells(); ++c) {
    cv.reinit(c);
    const auto& dofs = cv.dofs();
    for (std::size_t q = 0; q < cv.n_points(); ++q) {
      const Mat3 eu = symmetric_part(cv.vector_gradient(u, q));
      const Mat3 ev = symmetric_part(cv.vector_gradient(v, q));
      const double val = coeff * contract(eu, ev) * cv.JxW(q);
      for (int a = 0; a < 27; ++a) out[dofs[a]] += val * cv.shape(q, a);
    }
  }
  return {std::move(out), LoadKind::Dissipation};
}

LoadVector assemble_buoyancy(const DiscreteSpace& space, const MaterialModel& model,
                             std::span<const double> theta, const VectorFn& g) {
  const auto n = space.n_scalar();
  std::vector<double> out(3 * n, 0.0);
  CellValues cv(space);
  for (std::size_t c = 0; c < space.n_cells(); ++c) {
    cv.reinit(c);
    const auto& dofs = cv.dofs();
    for (std::size_t q = 0; q < cv.n_points(); ++q) {
      const double rho = density(model, cv.value(theta, q));
      const Vec3 f = (rho * cv.JxW(q)) * g(cv.point(q));
      for (int a = 0; a < 27; ++a)
        for (std::size_t comp = 0; comp < 3; ++comp)
          out[comp * n + dofs[a]] += f[comp] * cv.shape(q, a);
    }
  }
  return {std::move(out), LoadKind::Buoyancy};
}

LoadVector assemble_source(const DiscreteSpace& space, const VectorFn& f) {
  const auto n = space.n_scalar();
  std::vector<double> out(3 * n, 0.0);
  CellValues cv(space);
  for (std::size_t c = 0; c < space.n_cells(); ++c) {
    cv.reinit(c);
    const auto& dofs = cv.dofs();
    for (std::size_t q = 0; q < cv.n_points(); ++q) {
      const Vec3 v = cv.JxW(q) * f(cv.point(q));
      for (int a = 0; a < 27; ++a)
        for (std::size_t comp = 0; comp < 3; ++comp)
          out[comp * n + dofs[a]] += v[comp] * cv.shape(q, a);
    }
  }
  return {std::move(out), LoadKind::Source};
}

LoadVector assemble_source(const DiscreteSpace& space, const ScalarFn& f) {
  std::vector<double> out(space.n_scalar(), 0.0);
  CellValues cv(space);
  for (std::size_t c = 0; c < space.n_cells(); ++c) {
    cv.reinit(c);
    const auto& dofs = cv.dofs();
    for (std::size_t q = 0; q < cv.n_points(); ++q) {
      const double v = cv.JxW(q) * f(cv.point(q));
      for (int a = 0; a < 27; ++a) out[dofs[a]] += v * cv.shape(q, a);
    }
  }
  return {std::move(out), LoadKind::Source};
}

void zero_rows(std::vector<double>& v, std::span<const std::size_t> rows) {
  for (auto r : rows) v[r] = 0.0;
}

void check_sobolev_exponent(double s) {
  const double s0 = default_regularity_bounds().s0;
  if (!(s >= 4.0 / 3.0) || !(s < s0))
    throw std::invalid_argument("exponent s = " + std::to_string(s) +
                                " outside the admissible range [4/3, " + std::to_string(s0) +
                                ")");
}

double discrete_norm(const DiscreteSpace& space, std::span<const double> field, NormKind which,
                     double s) {
  if (which != NormKind::H1) check_sobolev_exponent(s);
  const bool vec = is_vector_field(space, field);
  const auto n = space.n_scalar();
  const int ncomp = vec ? 3 : 1;
  CellValues cv(space);
  double sum = 0.0;
  for (std::size_t c = 0; c < space.n_cells(); ++c) {
    cv.reinit(c);
    for (std::size_t q = 0; q < cv.n_points(); ++q) {
      double v2 = 0.0, g2 = 0.0, h2 = 0.0;
      for (int comp = 0; comp < ncomp; ++comp) {
        const auto f = field.subspan(static_cast<std::size_t>(comp) * n, n);
        const double v = cv.value(f, q);
        v2 += v * v;
        if (which != NormKind::Lebesgue) {
          const Vec3 g = cv.gradient(f, q);
          g2 += dot(g, g);
        }
        if (which == NormKind::BrokenW2) {
          const Mat3 h = cv.hessian(f, q);
          h2 += contract(h, h);
        }
      }
      switch (which) {
        case NormKind::Lebesgue:
          sum += std::pow(std::sqrt(v2), s) * cv.JxW(q);
          break;
        case NormKind::H1:
          sum += (v2 + g2) * cv.JxW(q);
          break;
        case NormKind::BrokenW2:
          sum += (std::pow(std::sqrt(v2), s) + std::pow(std::sqrt(g2), s) +
                  std::pow(std::sqrt(h2), s)) *
                 cv.JxW(q);
          break;
      }
    }
  }
  return which == NormKind::H1 ? std::sqrt(sum) : std::pow(sum, 1.0 / s);
}

double broken_w2_seminorm(const DiscreteSpace& space, std::span<const double> field, double s) {
  check_sobolev_exponent(s);
  const bool vec = is_vector_field(space, field);
  const auto n = space.n_scalar();
  const int ncomp = vec ? 3 : 1;
  CellValues cv(space);
  double sum = 0.0;
  for (std::size_t c = 0; c < space.n_cells(); ++c) {
    cv.reinit(c);
    for (std::size_t q = 0; q < cv.n_points(); ++q) {
      double h2 = 0.0;
      for (int comp = 0; comp < ncomp; ++comp) {
        const Mat3 h = cv.hessian(field.subspan(static_cast<std::size_t>(comp) * n, n), q);
        h2 += contract(h, h);
      }
      sum += std::pow(std::sqrt(h2), s) * cv.JxW(q);
    }
  }
  return std::pow(sum, 1.0 / s);
}

double lebesgue_norm(const DiscreteSpace& space, const VectorFn& f, double s) {
  CellValues cv(space);
  double sum = 0.0;
  for (std::size_t c = 0; c < space.n_cells(); ++c) {
    cv.reinit(c);
    for (std::size_t q = 0; q < cv.n_points(); ++q)
      sum += std::pow(norm(f(cv.point(q))), s) * cv.JxW(q);
  }
  return std::pow(sum, 1.0 / s);
}

double lebesgue_norm(const DiscreteSpace& space, const ScalarFn& f, double s) {
  CellValues cv(space);
  double sum = 0.0;
  for (std::size_t c = 0; c < space.n_cells(); ++c) {
    cv.reinit(c);
    for (std::size_t q = 0; q < cv.n_points(); ++q)
      sum += std::pow(std::abs(f(cv.point(q))), s) * cv.JxW(q);
  }
  return std::pow(sum, 1.0 / s);
}

double convection_density_norm(const DiscreteSpace& space, const MaterialModel& model,
                               std::span<const double> u, std::span<const double> v, double s) {
  CellValues cv(space);
  double sum = 0.0;
  for (std::size_t c = 0; c < space.n_cells(); ++c) {
    cv.reinit(c);
    for (std::size_t q = 0; q < cv.n_points(); ++q) {
      const Vec3 w = cv.vector_value(u, q);
      const Mat3 g = cv.vector_gradient(v, q);
      const Vec3 adv{dot(g[0], w), dot(g[1], w), dot(g[2], w)};
      sum += std::pow(model.rho0 * norm(adv), s) * cv.JxW(q);
    }
  }
  return std::pow(sum, 1.0 / s);
}

double d_density_norm(const DiscreteSpace& space, const MaterialModel& model,
                      std::span<const double> vartheta, std::span<const double> u,
                      std::span<const double> theta, double s) {
  CellValues cv(space);
  double sum = 0.0;
  for (std::size_t c = 0; c < space.n_cells(); ++c) {
    cv.reinit(c);
    for (std::size_t q = 0; q < cv.n_points(); ++q) {
      const double val = model.cV * density(model, cv.value(vartheta, q)) *
                         dot(cv.vector_value(u, q), cv.gradient(theta, q));
      sum += std::pow(std::abs(val), s) * cv.JxW(q);
    }
  }
  return std::pow(sum, 1.0 / s);
}

double e_density_norm(const DiscreteSpace& space, const MaterialModel& model,
                      std::span<const double> u, std::span<const double> v, double s) {
  CellValues cv(space);
  double sum = 0.0;
  const double coeff = model.alpha1 * model.nu;
  for (std::size_t c = 0; c < space.n_cells(); ++c) {
    cv.reinit(c);
    for (std::size_t q = 0; q < cv.n_points(); ++q) {
      const double val = coeff * contract(symmetric_part(cv.vector_gradient(u, q)),
                                          symmetric_part(cv.vector_gradient(v, q)));
      sum += std::pow(std::abs(val), s) * cv.JxW(q);
    }
  }
  return std::pow(sum, 1.0 / s);
}

std::vector<double> dissipation_density_samples(const DiscreteSpace& space,
                                                std::span<const double> u) {
  std::vector<double> out;
  out.reserve(space.n_cells() * space.quadrature().size());
  CellValues cv(space);
  for (std::size_t c = 0; c < space.n_cells(); ++c) {
    cv.reinit(c);
    for (std::size_t q = 0; q < cv.n_points(); ++q) {
      const Mat3 e = symmetric_part(cv.vector_gradient(u, q));
      out.push_back(contract(e, e));
    }
  }
  return out;
}

}  // namespace heatduct
