#include "heatduct/run.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <ostream>

#include "json.hpp"

#include "heatduct/certificates.hpp"
#include "heatduct/fixed_point.hpp"
#include "heatduct/forms.hpp"
#include "heatduct/spectrum.hpp"
#include "heatduct/verification.hpp"
#include "heatduct/vtk_io.hpp"

namespace heatduct {

namespace {

using nlohmann::ordered_json;

std::string path_in(const RunConfig& c, const std::string& name) {
  return (std::filesystem::path(c.out_dir) / name).string();
}

void write_json(const RunConfig& c, const std::string& name, const ordered_json& j) {
  write_text_file(path_in(c, name), j.dump(2) + "\n");
}

ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

ordered_json trace_json(const IterationTrace& t) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : t.records) {
    ordered_json inner = ordered_json::array();
    for (double x : r.inner.ratios) inner.push_back(number(x));
    arr.push_back({{"iter", r.iter},
                   {"inner_iters", r.inner_iters},
                   {"beta_hat", number(r.beta_hat)},
                   {"inner_ratios", inner},
                   {"d_theta_norm", number(r.d_theta_norm)},
                   {"r_momentum", number(r.r_momentum)},
                   {"r_heat", number(r.r_heat)},
                   {"min_flux", number(r.min_flux)},
                   {"inflow_fraction", number(r.inflow_fraction)}});
  }
  return arr;
}

struct Setup {
  ChannelMesh mesh;
  DiscreteSpace space;
  Problem problem;
  explicit Setup(const RunConfig& c)
      : mesh(build_channel_mesh(c.dims[0], c.dims[1], c.dims[2], c.divisions[0],
                                c.divisions[1], c.divisions[2])),
        space(mesh, c.quad_order),
        problem(problem_from(c)) {}
};

ordered_json state_summary(const Setup& s, const CoupledSolver& solver, const State& st) {
  const auto bf = backward_flow_measure(s.space, st.u);
  const auto res = solver.weak_residual(st);
  const double vol = domain_volume(s.space);
  return {{"u_h1", number(solver.h1_norm(st.u))},
          {"vartheta_h1", number(solver.h1_norm(st.vartheta))},
          {"mean_theta", number(integral(s.space, st.theta) / vol)},
          {"total_dissipation", number(total_dissipation(s.space, s.problem.material, st.u))},
          {"r_momentum", number(res.r_momentum)},
          {"r_heat", number(res.r_heat)},
          {"backward_flow",
           {{"min_flux", number(bf.min_flux)},
            {"inflow_fraction", number(bf.inflow_fraction)},
            {"inlet_face", {{"min_flux", number(bf.faces[0].min_flux)},
                            {"inflow_fraction", number(bf.faces[0].inflow_fraction)}}},
            {"outlet_face", {{"min_flux", number(bf.faces[1].min_flux)},
                             {"inflow_fraction", number(bf.faces[1].inflow_fraction)}}}}}};
}

int run_solve(const RunConfig& c, std::ostream& log, std::ostream& err) {
  const Setup s(c);
  const CoupledSolver solver(s.space, s.problem);
  log << "solve: " << s.space.n_velocity() + s.space.n_pressure() << " saddle dofs, "
      << s.space.n_scalar() << " temperature dofs\n";
  write_text_file(path_in(c, "mesh.vtk"), vtk_mesh(s.mesh));
  write_text_file(path_in(c, "facets.vtk"), vtk_facets(s.mesh));
  try {
    const auto out = solver.outer_loop();
    write_text_file(path_in(c, "trace.csv"), trace_csv(out.trace));
    write_text_file(path_in(c, "state.vtk"), vtk_state(s.space, out.state));
    ordered_json j = {{"subcommand", "solve"},
                      {"converged", true},
                      {"outer_iterations", out.trace.records.size()},
                      {"final_d_theta_norm", number(out.trace.records.back().d_theta_norm)},
                      {"state", state_summary(s, solver, out.state)},
                      {"trace", trace_json(out.trace)}};
    write_json(c, "solve.json", j);
    log << "solve: converged in " << out.trace.records.size() << " outer iterations\n";
    return kExitOk;
  } catch (const DivergenceError& e) {
    write_text_file(path_in(c, "trace.csv"), trace_csv(e.trace));
    ordered_json ratios = ordered_json::array();
    for (double x : e.inner.ratios) ratios.push_back(number(x));
    write_json(c, "solve.json",
               {{"subcommand", "solve"},
                {"converged", false},
                {"failure", e.what()},
                {"trace", trace_json(e.trace)},
                {"failing_inner_ratios", ratios}});
    err << "solve: " << e.what() << '\n';
    return kExitDivergence;
  }
}

ordered_json constants_json(const ConstantEstimates& e) {
  return {{"empirical", true},
          {"samples", e.samples},
          {"seed", e.seed},
          {"s", e.s},
          {"r", e.r},
          {"C_b", number(e.C_b)},
          {"C_d", number(e.C_d)},
          {"C_e", number(e.C_e)},
          {"C_eps", number(e.C_eps)},
          {"C_1", number(e.C_1)}};
}

ordered_json norms_json(const StateNorms& n) {
  return {{"u", number(n.u)},
          {"u_broken_w2", number(n.u_w2)},
          {"u_load", number(n.u_load)},
          {"theta_broken_w2", number(n.theta)}};
}

int run_certify(const RunConfig& c, std::ostream& log, std::ostream& err) {
  const Setup s(c);
  const CoupledSolver solver(s.space, s.problem);
  OuterResult out;
  try {
    out = solver.outer_loop();
  } catch (const DivergenceError& e) {
    err << "certify: solve failed: " << e.what() << '\n';
    write_json(c, "certificate.json",
               {{"subcommand", "certify"}, {"converged", false}, {"failure", e.what()}});
    return kExitDivergence;
  }
  log << "certify: estimating constants from " << c.samples << " samples\n";
  const auto est = estimate_constants(s.space, s.problem.material, c.samples, c.seed, c.s, c.r);
  const double g_norm = lebesgue_norm(s.space, s.problem.g, c.s);
  const auto n1 = state_norms(s.space, s.problem, out.state, c.s, c.r);
  const auto rep = make_certificate(est, s.problem.material, g_norm, n1, n1, c.r);

  std::string hist = "sample,C_b,C_d,C_e,C_eps,C_1\n";
  for (std::size_t k = 0; k < est.history.size(); ++k) {
    hist += std::to_string(k + 1);
    for (double v : est.history[k]) {
      char buf[40];
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      hist += buf;
    }
    hist += '\n';
  }
  write_text_file(path_in(c, "constants.csv"), hist);

  const auto& sm = rep.smallness;
  const auto& un = rep.uniqueness;
  const auto sr = admissible_sr(c.s);
  ordered_json j = {
      {"subcommand", "certify"},
      {"converged", true},
      {"constants", constants_json(est)},
      {"inputs", {{"g_norm", number(g_norm)}, {"state1", norms_json(n1)}, {"state2", norms_json(n1)}}},
      {"smallness",
       {{"beta", sm.beta ? ordered_json(*sm.beta) : ordered_json("ABSENT")},
        {"beta_raw", number(sm.beta_raw)},
        {"g_threshold_beta_one", number(sm.first_threshold)},
        {"g_threshold_second", number(sm.second_threshold)},
        {"second_headroom", number(sm.headroom)},
        {"ball_radius", sm.ball_radius ? ordered_json(*sm.ball_radius) : ordered_json("ABSENT")},
        {"ok", sm.ok}}},
      {"uniqueness",
       {{"R1", number(un.R1)},
        {"R2", number(un.R2)},
        {"heat_sigma_coefficient", number(un.sigma_heat)},
        {"heat_z_coefficient", number(un.z_heat)},
        {"momentum_sigma_coefficient", number(un.sigma_momentum)},
        {"momentum_z_coefficient", number(un.z_momentum)},
        {"grouping", un.grouping},
        {"ok", un.ok}}},
      {"admissible_r", {{"lo", sr.lo}, {"hi", number(sr.hi)}, {"hi_closed", sr.hi_closed}}},
      {"verdicts", {{"smallness_ok", rep.smallness_ok}, {"uniqueness_ok", rep.uniqueness_ok}}}};
  write_json(c, "certificate.json", j);
  log << "certify: smallness " << (rep.smallness_ok ? "ok" : "failed") << ", uniqueness "
      << (rep.uniqueness_ok ? "ok" : "failed") << '\n';
  return rep.smallness_ok && rep.uniqueness_ok ? kExitOk : kExitCertificate;
}

int run_spectrum(const RunConfig& c, std::ostream& log, std::ostream&) {
  const auto res = compute_spectrum(c.spectrum);
  const auto bounds = regularity_bounds(res);
  ordered_json roots = ordered_json::array();
  for (const auto& r : res.stokes_roots)
    roots.push_back({{"re", r.z.real()},
                     {"im", r.z.imag()},
                     {"residual", r.residual},
                     {"newton_iterations", r.newton_iterations}});
  const double delta = 0.0;
  const auto adm = weighted_admissibility(std::span<const double>(&delta, 1), c.s, res.mu_M);
  ordered_json j = {
      {"subcommand", "spectrum"},
      {"strip", {{"re_min", res.strip.re_min}, {"re_max", res.strip.re_max},
                 {"im_max", res.strip.im_max}}},
      {"winding_total", res.winding_total},
      {"stokes_roots", roots},
      {"scalar_roots", res.scalar_roots},
      {"f_at_1", std::abs(mellin_symbol(1.0))},
      {"f_at_2", std::abs(mellin_symbol(2.0))},
      {"z0", bounds.z0},
      {"mu_M", res.mu_M},
      {"s0", res.s0},
      {"s0_formula", "2/(2 - mu_M)"},
      {"s0_formula_note",
       "the variant 2/(Re z0 + 2) evaluates to " + std::to_string(2.0 / (bounds.z0 + 2.0)) +
           ", which contradicts max(0, 2 - mu_M) < 2/s; 2/(2 - mu_M) is used"},
      {"weighted_admissibility", {{"delta", delta}, {"p", c.s}, {"pass", static_cast<bool>(adm[0])}}}};
  write_json(c, "spectrum.json", j);
  if (c.csv_nre > 0 && c.csv_nim > 0)
    write_text_file(path_in(c, "symbol_samples.csv"),
                    symbol_samples_csv(c.spectrum.strip, c.csv_nre, c.csv_nim));
  log << "spectrum: " << res.winding_total << " roots, mu_M = " << res.mu_M << ", s0 = " << res.s0
      << '\n';
  return kExitOk;
}

ordered_json table_json(const StudyTable& t) {
  ordered_json rows = ordered_json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"divisions", r.divisions},
                    {"h", r.h},
                    {"err_L2", number(r.err_L2)},
                    {"err_H1", number(r.err_H1)},
                    {"order_L2", number(r.order_L2)},
                    {"order_H1", number(r.order_H1)}});
  return {{"case", t.name},
          {"monotone", t.monotone},
          {"fitted_order_L2", number(t.fitted_L2)},
          {"fitted_order_H1", number(t.fitted_H1)},
          {"rows", rows}};
}

int run_mms(const RunConfig& c, std::ostream& log, std::ostream& err) {
  const auto& name = c.mms_case;
  if (name == "coupled") {
    const auto model = material_from(c);
    const auto& gp = c.g.params;
    const Vec3 g{gp[0], gp[1], gp[2]};
    const auto mc = coupled_case(c.dims, model, g, c.mms_amplitude, 0.0);
    ordered_json levels = ordered_json::array();
    bool all = true;
    for (const auto& d : c.mms_levels) {
      const auto mesh = build_channel_mesh(c.dims[0], c.dims[1], c.dims[2], d[0], d[1], d[2]);
      const DiscreteSpace space(mesh, c.quad_order);
      const auto rep = coupled_mms(space, mc, model, c.solver);
      all = all && rep.converged;
      levels.push_back({{"divisions", d},
                        {"converged", rep.converged},
                        {"failure", rep.failure},
                        {"outer_iterations", rep.outer_iterations},
                        {"err_u_L2", number(rep.err_u_L2)},
                        {"err_u_H1", number(rep.err_u_H1)},
                        {"err_theta_L2", number(rep.err_theta_L2)},
                        {"err_theta_H1", number(rep.err_theta_H1)},
                        {"trace", trace_json(rep.trace)}});
      log << "mms coupled " << d[0] << 'x' << d[1] << 'x' << d[2] << ": "
          << (rep.converged ? "converged" : "diverged") << '\n';
    }
    write_json(c, "mms.json", {{"subcommand", "mms"}, {"case", name},
                               {"amplitude", c.mms_amplitude}, {"levels", levels}});
    if (!all) err << "mms: coupled outer loop did not converge on every level\n";
    return all ? kExitOk : kExitDivergence;
  }

  StudyTable t;
  if (name == "stokes_trig")
    t = mms_stokes_study(stokes_trig_case(c.dims, c.nu, c.mms_amplitude), c.nu, c.mms_levels,
                         c.quad_order);
  else if (name == "stokes_polynomial")
    t = mms_stokes_study(stokes_polynomial_case(c.dims, c.nu), c.nu, c.mms_levels, c.quad_order);
  else if (name == "heat_trig")
    t = mms_heat_study(heat_trig_case(c.dims, c.lambda), c.lambda, c.mms_levels, c.quad_order);
  else if (name == "heat_quadratic")
    t = mms_heat_study(heat_quadratic_case(c.dims, c.lambda), c.lambda, c.mms_levels,
                       c.quad_order);
  else
    t = mms_heat_study(heat_incompatible_case(c.dims, c.lambda), c.lambda, c.mms_levels,
                       c.quad_order);
  write_text_file(path_in(c, "mms_" + name + ".csv"), study_csv(t));
  write_json(c, "mms.json", {{"subcommand", "mms"}, {"table", table_json(t)}});
  for (const auto& r : t.rows)
    log << "mms " << name << ' ' << r.divisions[0] << 'x' << r.divisions[1] << 'x'
        << r.divisions[2] << ": L2 " << r.err_L2 << ", H1 " << r.err_H1 << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::string& subcommand, const RunConfig& config, std::ostream& log,
        std::ostream& err) {
  try {
    if (subcommand == "solve") return run_solve(config, log, err);
    if (subcommand == "certify") return run_certify(config, log, err);
    if (subcommand == "spectrum") return run_spectrum(config, log, err);
    if (subcommand == "mms") return run_mms(config, log, err);
    err << "unknown subcommand '" << subcommand << "'\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << e.what();
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

int run(const RunOptions& options, std::ostream& log, std::ostream& err) {
  RunConfig config;
  try {
    config = load_config(options.config_path);
  } catch (const ConfigError& e) {
    err << e.what();
    return kExitConfig;
  }
  if (options.out_dir) config.out_dir = *options.out_dir;
  if (options.seed) config.seed = *options.seed;
  return run(options.subcommand, config, log, err);
}

}  // namespace heatduct
