#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "gevrey_flow/config.hpp"
#include "gevrey_flow/diagnostics.hpp"
#include "gevrey_flow/dynamics.hpp"
#include "gevrey_flow/initial_data.hpp"
#include "gevrey_flow/model.hpp"
#include "gevrey_flow/output.hpp"
#include "gevrey_flow/stochastic.hpp"

namespace gevrey_flow {

enum exit_code : int { exit_pass = 0, exit_check_failed = 1, exit_config_error = 2 };

struct CliOptions {
  std::string subcommand;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
};

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"params",         "omega-mc",      "simulate",
                                              "verify-decay",   "property-suite", "picard-compare"};
  return names;
}

namespace detail {

// Gevrey spec of a schedule evaluated at t = 0.
inline GevreyNormSpec initial_spec(const NormSchedule& sch, const ModelConfig& cfg) {
  return {sch.radius(cfg.alpha, cfg.epsilon), sch.kappa, sch.r, cfg.s};
}

inline SpectralField make_initial_data(const RunConfig& rc) {
  const InitialDataSpec& id = rc.init;
  switch (id.kind) {
    case InitialDataSpec::Kind::zero: return SpectralField(rc.lattice);
    case InitialDataSpec::Kind::cosine: {
      SpectralField f = cosine_field(rc.lattice, id.mode, id.amplitude);
      return id.norm ? scale_to_norm(f, initial_spec(rc.norms.front(), rc.model), *id.norm) : f;
    }
    case InitialDataSpec::Kind::random_analytic: {
      SpectralField f = random_analytic_field(rc.lattice, id.seed, id.decay, id.amplitude);
      return id.norm ? scale_to_norm(f, initial_spec(rc.norms.front(), rc.model), *id.norm) : f;
    }
  }
  return SpectralField(rc.lattice);
}

inline double path_dt(const RunConfig& rc) {
  return rc.stochastic.path_dt ? *rc.stochastic.path_dt : rc.integrator.dt;
}

struct DrawnPath {
  BrownianPath path;
  std::uint64_t seed;
  std::size_t attempts;
};

// Path number `run` of a batch. With require_omega, candidates are drawn
// until one passes the grid check of the barrier over its horizon.
inline DrawnPath draw_path(const RunConfig& rc, std::uint64_t seed, std::size_t run, double horizon,
                           std::size_t& cursor) {
  const double dt = path_dt(rc);
  if (!rc.stochastic.brownian) return {BrownianPath::zero(horizon, dt), 0, 1};
  const ModelConfig& m = rc.model;
  for (std::size_t attempt = 1;; ++attempt) {
    const std::uint64_t s = path_seed(seed, cursor++);
    BrownianPath p = sample_path(horizon, dt, s);
    if (!rc.stochastic.require_omega || omega_verdict(p, m.alpha, m.beta, m.nu).member) {
      return {std::move(p), s, attempt};
    }
    if (attempt >= rc.stochastic.max_rejections) {
      throw std::runtime_error("no path in the barrier event after " + std::to_string(attempt) +
                               " draws for run " + std::to_string(run));
    }
  }
}

inline std::string out_path(const CliOptions& opt, const std::string& name) {
  const std::filesystem::path p(name);
  return p.is_absolute() ? name : (std::filesystem::path(opt.out_dir) / p).string();
}

inline void write_metadata(const CliOptions& opt, std::uint64_t seed) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  write_json(out_path(opt, "metadata.json"), json{{"subcommand", opt.subcommand},
                                                  {"config", opt.config_path},
                                                  {"seed", seed},
                                                  {"timestamp", buf}});
}

inline bool zero_mode_clean(const std::vector<SimState>& snaps) {
  for (const auto& s : snaps) {
    if (s.rho.coeff({0, 0}) != cplx{0.0, 0.0}) return false;
  }
  return true;
}

inline double worst_hermitian_defect(const std::vector<SimState>& snaps) {
  double d = 0.0;
  for (const auto& s : snaps) d = std::max(d, s.rho.hermitian_defect());
  return d;
}

inline std::string json_name(const RunConfig& rc, const CliOptions& opt) {
  return rc.outputs.json.empty() ? opt.subcommand + ".json" : rc.outputs.json;
}

// --- subcommands ---------------------------------------------------------

inline int run_params(const RunConfig& rc, const CliOptions& opt, json& doc, std::ostream& log) {
  std::optional<double> initial_norm;
  if (rc.init.kind != InitialDataSpec::Kind::zero) {
    initial_norm = gevrey_norm(make_initial_data(rc), initial_spec(rc.norms.front(), rc.model));
  }
  const DerivedParams p = compute_derived_params(rc.model, rc.checks.sigma, rc.checks.r,
                                                 rc.checks.smallness_constant, initial_norm,
                                                 rc.checks.zeta_tol);
  doc = to_json(p, rc.model);
  if (initial_norm) doc["initial_norm"] = *initial_norm;
  log << "zeta = " << format_double(p.zeta.value) << " in [" << format_double(p.zeta.bracket.lower)
      << ", " << format_double(p.zeta.bracket.upper) << "]\n";
  for (const auto& c : p.admissibility.conditions) {
    log << "  " << (c.passed ? "ok   " : "FAIL ") << c.name << ": " << c.detail << '\n';
  }
  (void)opt;
  if (!p.zeta.tolerance_met) {
    log << "check failed: zeta bracket wider than zeta_tol\n";
    return exit_check_failed;
  }
  return exit_pass;
}

inline int run_omega_mc(const RunConfig& rc, std::uint64_t seed, json& doc, std::ostream& log) {
  const ModelConfig& m = rc.model;
  const OmegaMcResult r = omega_probability_mc(m.alpha, m.beta, m.nu, rc.stochastic.n_paths,
                                               rc.stochastic.horizon, rc.stochastic.mc_dt, seed);
  const double exact = omega_probability_closed_form(m.alpha, m.beta, m.nu);
  const double z = r.standard_error > 0.0 ? std::abs(r.estimate - exact) / r.standard_error : 0.0;
  const bool ok = std::abs(r.estimate - exact) <= 3.0 * r.standard_error + 1e-12;
  doc = to_json(r);
  doc["closed_form"] = exact;
  doc["z_score"] = z;
  doc["within_3_se"] = ok;
  log << "estimate " << format_double(r.estimate) << " +- " << format_double(r.standard_error)
      << " (closed form " << format_double(exact) << ", horizon " << format_double(r.horizon)
      << ")\n";
  if (!ok) log << "check failed: estimate more than 3 standard errors from the closed form\n";
  return ok ? exit_pass : exit_check_failed;
}

inline int run_simulate(const RunConfig& rc, const CliOptions& opt, std::uint64_t seed, json& doc,
                        std::ostream& log) {
  const SpectralField rho0 = make_initial_data(rc);
  std::size_t cursor = 0;
  const DrawnPath dp = draw_path(rc, seed, 0, rc.T, cursor);
  const SimulationResult res = simulate(rho0, dp.path, rc.T, rc.integrator, rc.model, rc.norms);
  write_series_csv(out_path(opt, rc.outputs.csv), res);
  if (!rc.outputs.field_dump.empty()) {
    write_field_dump(out_path(opt, rc.outputs.field_dump), res.snapshots,
                     rc.outputs.field_dump_stride);
  }
  const bool mass_ok = !rc.integrator.enforce_zero_mode || zero_mode_clean(res.snapshots);
  const double herm = worst_hermitian_defect(res.snapshots);
  const bool herm_ok = herm <= 1e-12;
  doc = {{"steps", res.steps},
         {"snapshots", res.snapshots.size()},
         {"path_seed", dp.seed},
         {"aborted", res.aborted},
         {"diagnostic", res.diagnostic},
         {"blowup_ratio", res.blowup_ratio},
         {"omega_violation_time",
          res.omega_violation_time ? json(*res.omega_violation_time) : json(nullptr)},
         {"max_zero_mode_residual", res.max_zero_mode_residual},
         {"zero_mode_exact", mass_ok},
         {"hermitian_defect", herm}};
  json finals = json::object();
  for (const auto& s : res.norms) {
    if (!s.values.empty()) finals[s.name] = json_number(s.values.back());
  }
  doc["final_norms"] = finals;
  log << "simulated " << res.steps << " steps" << (res.aborted ? " (aborted: " + res.diagnostic + ")" : "")
      << '\n';
  if (!mass_ok) log << "check failed: zero mode not exactly 0\n";
  if (!herm_ok) log << "check failed: Hermitian symmetry lost\n";
  return mass_ok && herm_ok ? exit_pass : exit_check_failed;
}

inline int run_verify_decay(const RunConfig& rc, const CliOptions& opt, std::uint64_t seed,
                            json& doc, std::ostream& log) {
  const ModelConfig& m = rc.model;
  const ZetaResult z = compute_zeta(m, rc.checks.zeta_tol);
  doc["zeta"] = to_json(z);
  bool ok = z.tolerance_met && z.bracket.lower > 0.0;
  if (!ok) log << "check failed: zeta not certified positive\n";
  const double zeta = z.value;
  const SpectralField rho0 = make_initial_data(rc);
  const NormSchedule& sch = rc.norms.front();
  const double norm0 = gevrey_norm(rho0, initial_spec(sch, m));
  const double mnorm = m.matrix.operator_norm();
  doc["initial_norm"] = norm0;
  doc["smallness_threshold"] =
      mnorm > 0.0 ? json_number(zeta / (rc.checks.smallness_constant * mnorm)) : json("inf");
  const double tol = rc.checks.decay_tolerance;
  const double t_lo = rc.checks.fit_t_lo.value_or(0.0);
  const double t_hi = rc.checks.fit_t_hi.value_or(rc.T);
  json runs = json::array();
  std::size_t cursor = 0;
  for (std::size_t run = 0; run < rc.stochastic.n_runs; ++run) {
    const DrawnPath dp = draw_path(rc, seed, run, rc.T, cursor);
    const SimulationResult res = simulate(rho0, dp.path, rc.T, rc.integrator, m, rc.norms);
    if (run == 0) write_series_csv(out_path(opt, rc.outputs.csv), res);
    json r{{"run", run}, {"path_seed", dp.seed}, {"draws", dp.attempts}, {"aborted", res.aborted}};
    bool run_ok = !res.aborted;
    if (res.aborted) r["diagnostic"] = res.diagnostic;
    if (!res.aborted) {
      const NormSeries& series = res.norms.front();
      const auto theorem = theorem_form_check(series, zeta, tol);
      const auto fit = fit_decay(series, t_lo, t_hi);
      const auto mono = monotonicity_check(series);
      double min_margin = INFINITY;
      if (zeta > 0.0) {
        for (const auto& st : res.snapshots) {
          min_margin = std::min(min_margin, smallness_margin(st, sch, m, rc.checks.smallness_constant, zeta));
        }
      }
      const bool fit_ok = fit.rate <= -0.5 * zeta + tol * zeta;
      const bool mass_ok = zero_mode_clean(res.snapshots);
      r["theorem_form"] = {{"holds", theorem.holds}, {"worst_ratio", theorem.worst_ratio}};
      r["fit"] = to_json(fit);
      r["fit_ok"] = fit_ok;
      r["monotone"] = mono.monotone;
      if (mono.first_violation_time) r["first_monotonicity_violation"] = *mono.first_violation_time;
      r["min_smallness_margin"] = json_number(min_margin);
      r["zero_mode_exact"] = mass_ok;
      r["omega_violation_time"] =
          res.omega_violation_time ? json(*res.omega_violation_time) : json(nullptr);
      run_ok = theorem.holds && fit_ok && mono.monotone && mass_ok && min_margin > 0.0;
      log << "run " << run << ": rate " << format_double(fit.rate) << " (need <= "
          << format_double(-0.5 * zeta + tol * zeta) << "), worst ratio "
          << format_double(theorem.worst_ratio) << (run_ok ? "" : "  FAIL") << '\n';
    } else {
      log << "run " << run << ": aborted: " << res.diagnostic << '\n';
    }
    r["passed"] = run_ok;
    ok = ok && run_ok;
    runs.push_back(r);
  }
  doc["runs"] = runs;
  doc["passed"] = ok;
  return ok ? exit_pass : exit_check_failed;
}

inline int run_property_suite(const RunConfig& rc, const CliOptions& opt, std::uint64_t seed,
                              json& doc, std::ostream& log) {
  (void)opt;
  bool ok = true;
  const auto note = [&](const std::string& name, bool passed, const std::string& detail) {
    log << (passed ? "ok   " : "FAIL ") << name << ": " << detail << '\n';
    ok = ok && passed;
  };

  const EmbeddingReport emb = embedding_suite(rc.checks.n_fields, seed);
  json e = json::array();
  for (const auto& c : emb.inequalities) {
    e.push_back(to_json(c));
    note("embedding " + c.name, c.passed(),
         std::to_string(c.violations) + " violations in " + std::to_string(c.checks) +
             ", empirical constant " + format_double(c.empirical_constant));
  }
  doc["embeddings"] = e;

  const BilinearBoundReport bb = bilinear_bound_suite(rc.checks.n_bilinear_samples, seed + 1);
  doc["bilinear_bound"] = {{"samples", bb.samples},
                           {"max_ratio", bb.max_ratio},
                           {"derived_bound", bb.derived_bound},
                           {"exceedances", bb.exceedances}};
  note("bilinear bound shape", bb.passed(),
       "max ratio " + format_double(bb.max_ratio) + " vs C_g (2 pi)^-d <= " + format_double(bb.derived_bound));

  const Lattice oracle_lat(rc.model.d, rc.checks.oracle_K);
  double conv_diff = 0.0;
  {
    std::mt19937_64 rng(seed + 2);
    for (std::size_t i = 0; i < rc.checks.oracle_fields; ++i) {
      const SpectralField f = random_analytic_field(oracle_lat, rng(), 0.2);
      const SpectralField g = random_analytic_field(oracle_lat, rng(), 0.2);
      const SpectralField ref = dealias(convolve_product(dealias(f), dealias(g)));
      conv_diff = std::max(conv_diff, max_abs_diff(ref, convolve_product_fast(f, g)));
    }
  }
  doc["convolution_oracle"] = {{"fields", rc.checks.oracle_fields}, {"max_abs_diff", conv_diff}};
  note("convolution fast vs direct", conv_diff < 1e-12, "max abs diff " + format_double(conv_diff));

  const OracleReport orc = bilinear_oracle_suite(rc.model, oracle_lat, rc.checks.oracle_fields,
                                                 rc.checks.oracle_taus, seed + 3);
  doc["bilinear_oracle"] = {{"trials", orc.trials}, {"max_relative_diff", orc.max_relative_diff}};
  note("bilinear fast vs direct", orc.max_relative_diff <= 1e-10,
       "max relative diff " + format_double(orc.max_relative_diff));

  const SpectralField rho0 = make_initial_data(rc);
  const double m = rc.checks.rescale_m;
  std::size_t cursor = 0;
  const double horizon = std::max(rc.T, rc.T / m);
  const DrawnPath dp = draw_path(rc, seed + 4, 0, horizon, cursor);
  const RescaleReport rs = rescale_equivalence_check(rc.model, m, dp.path, rho0, rc.T, rc.integrator);
  const double rs_tol = 10.0 * rc.checks.integrator_tolerance;
  doc["rescale_equivalence"] = {{"m", m},
                                {"max_discrepancy", rs.max_discrepancy},
                                {"relative_discrepancy", rs.relative_discrepancy},
                                {"compared_times", rs.compared_times},
                                {"tolerance", rs_tol}};
  note("rescale equivalence", !rs.aborted && rs.max_discrepancy <= rs_tol,
       "max discrepancy " + format_double(rs.max_discrepancy) +
           (rs.aborted ? " (aborted: " + rs.diagnostic + ")" : ""));

  IntegratorConfig short_run = rc.integrator;
  short_run.snapshot_stride = 1;
  const double t_short = std::min(rc.T, 200.0 * rc.integrator.dt);
  const double t_grid = std::round(t_short / rc.integrator.dt) * rc.integrator.dt;
  const SimulationResult sim = simulate(rho0, dp.path, t_grid, short_run, rc.model);
  const DissipationReport dis = dissipation_check(sim.snapshots, rc.model, rc.integrator.dealias);
  doc["dissipation"] = {{"checks", dis.checks}, {"violations", dis.violations},
                        {"worst_excess", dis.worst_excess}};
  note("per-mode dissipation inequality", dis.passed() && !sim.aborted,
       std::to_string(dis.violations) + " violations in " + std::to_string(dis.checks));
  doc["passed"] = ok;
  return ok ? exit_pass : exit_check_failed;
}

inline int run_picard_compare(const RunConfig& rc, const CliOptions& opt, std::uint64_t seed,
                              json& doc, std::ostream& log) {
  (void)opt;
  const CheckSpec& ck = rc.checks;
  const SpectralField rho0 = make_initial_data(rc);
  RunConfig fine = rc;
  fine.stochastic.path_dt = ck.picard_quad_dt;
  std::size_t cursor = 0;
  std::vector<BrownianPath> paths;
  json seeds = json::array();
  for (std::size_t run = 0; run < rc.stochastic.n_runs; ++run) {
    DrawnPath dp = draw_path(fine, seed, run, ck.picard_T, cursor);
    seeds.push_back(dp.seed);
    paths.push_back(std::move(dp.path));
  }

  PicardOptions po;
  po.n_iter = ck.picard_iters;
  po.quad_dt = ck.picard_quad_dt;
  po.fast = rc.integrator.dealias;
  po.overflow_cap = rc.integrator.overflow_cap;
  const RichardsonReport rep = richardson_study(rho0, paths, ck.picard_T, rc.model, po, ck.picard_dts,
                                                rc.integrator);
  doc["picard"] = {{"iterations", ck.picard_iters},
                   {"final_distances", rep.picard_final_distance},
                   {"contracting", rep.contracting}};
  if (!rep.contracting) log << "warning: non-contraction on at least one path\n";
  doc["path_seeds"] = seeds;
  json rows = json::array();
  for (const auto& r : rep.rows) {
    rows.push_back({{"dt", r.dt}, {"rms_terminal_diff", r.rms_diff}, {"max_terminal_diff", r.max_diff}});
    log << "dt " << format_double(r.dt) << ": terminal diff rms " << format_double(r.rms_diff)
        << ", max " << format_double(r.max_diff) << '\n';
  }
  const double finest = rep.rows.front().max_diff;
  const bool diff_ok = finest <= ck.picard_tolerance;
  const bool order_ok = rep.order >= 1.0;
  doc["heun"] = rows;
  doc["observed_order"] = json_number(rep.order);
  doc["finest_diff_ok"] = diff_ok;
  doc["order_ok"] = order_ok;
  log << "observed order " << format_double(rep.order) << " over " << rep.n_paths << " paths\n";
  if (!diff_ok) log << "check failed: terminal diff at the finest step exceeds picard_tolerance\n";
  if (!order_ok) log << "check failed: observed order below 1\n";
  return diff_ok && order_ok ? exit_pass : exit_check_failed;
}

}  // namespace detail

/// Runs one subcommand; writes <out>/<subcommand>.json (or the configured
/// name) and <out>/metadata.json. Returns the process exit code.
inline int run_cli(const CliOptions& opt, std::ostream& log = std::cout,
                   std::ostream& err = std::cerr) {
  RunConfig rc;
  try {
    rc = load_config(opt.config_path);
  } catch (const config_error& e) {
    err << e.what() << '\n';
    return exit_config_error;
  }
  const std::uint64_t seed = opt.seed.value_or(rc.stochastic.seed);
  try {
    std::filesystem::create_directories(opt.out_dir);
    json doc;
    int code = exit_pass;
    if (opt.subcommand == "params") {
      code = detail::run_params(rc, opt, doc, log);
    } else if (opt.subcommand == "omega-mc") {
      code = detail::run_omega_mc(rc, seed, doc, log);
    } else if (opt.subcommand == "simulate") {
      code = detail::run_simulate(rc, opt, seed, doc, log);
    } else if (opt.subcommand == "verify-decay") {
      code = detail::run_verify_decay(rc, opt, seed, doc, log);
    } else if (opt.subcommand == "property-suite") {
      code = detail::run_property_suite(rc, opt, seed, doc, log);
    } else if (opt.subcommand == "picard-compare") {
      code = detail::run_picard_compare(rc, opt, seed, doc, log);
    } else {
      err << "unknown subcommand '" << opt.subcommand << "'\n";
      return exit_config_error;
    }
    doc["exit_code"] = code;
    write_json(detail::out_path(opt, detail::json_name(rc, opt)), doc);
    detail::write_metadata(opt, seed);
    return code;
  } catch (const config_error& e) {
    err << e.what() << '\n';
    return exit_config_error;
  } catch (const std::exception& e) {
    err << "check failed: " << e.what() << '\n';
    return exit_check_failed;
  }
}

}  // namespace gevrey_flow
