#include "evykit/commands.hpp"

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "evykit/csv.hpp"
#include "evykit/estimation.hpp"
#include "evykit/simulate.hpp"
#include "evykit/version.hpp"
#include "evykit/viability.hpp"
#include "evykit/yields.hpp"

namespace evy {

namespace {

std::string fmt3(double x) {  // human reports: 3 significant figures
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::string fmt6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::ofstream open_output(const std::string& out_dir,
                          const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw io_error("cannot create output directory '" + out_dir +
                   "': " + ec.message());
  }
  const auto path = std::filesystem::path(out_dir) / name;
  std::ofstream out(path);
  if (!out) {
    throw io_error("cannot write '" + path.string() + "'");
  }
  return out;
}

void provenance(std::ostream& os, const RunConfig& cfg) {
  os << "# evykit " << kVersion << "\n";
  os << "# config-hash: " << cfg.config_hash << "\n";
  os << "# generated: " << timestamp_utc() << "\n";
}

const LVParams& need_model(const RunConfig& cfg) {
  if (!cfg.model) {
    throw config_error("missing required section [model]");
  }
  return *cfg.model;
}

const ConstraintSet& need_constraints(const RunConfig& cfg) {
  if (!cfg.constraints) {
    throw config_error("missing required section [constraints]");
  }
  return *cfg.constraints;
}

const char* branch_name(EvyBranch b) {
  return b == EvyBranch::EquilibriumCapped ? "equilibrium-capped"
                                           : "initial-state-capped";
}

GridGeometry geometry_from(const RunConfig& cfg, const LVParams& p) {
  GridGeometry geom = lv_default_geometry(p.R, p.K, p.alpha);
  geom.cells = {cfg.grid.y_cells, cfg.grid.z_cells};
  if (cfg.grid.y_min) geom.bounds[0][0] = *cfg.grid.y_min;
  if (cfg.grid.y_max) geom.bounds[0][1] = *cfg.grid.y_max;
  if (cfg.grid.z_min) geom.bounds[1][0] = *cfg.grid.z_min;
  if (cfg.grid.z_max) geom.bounds[1][1] = *cfg.grid.z_max;
  try {
    geom.validate();
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("invalid [grid]: ") + e.what());
  }
  return geom;
}

}  // namespace

void cmd_evy(const RunConfig& cfg, const std::string& out_dir) {
  const LVParams& params = need_model(cfg);
  const ConstraintSet& constraints = need_constraints(cfg);
  const LotkaVolterraModel model(params);

  const bool favorable = favorable_conditions(model, constraints);
  const BiomassState floors(constraints.min_biomass);
  const BiomassState state0 = cfg.initial ? *cfg.initial : floors;

  const EvyResult result = evy(model, constraints, state0);

  const double g_prey = model.growth_factor(0, floors,
                                            constraints.min_biomass[0] > 0.0
                                                ? constraints.min_catch[0] /
                                                      constraints.min_biomass[0]
                                                : 0.0);
  const double g_pred = model.growth_factor(1, floors,
                                            constraints.min_biomass[1] > 0.0
                                                ? constraints.min_catch[1] /
                                                      constraints.min_biomass[1]
                                                : 0.0);

  const bool prey_ok = constraints.min_catch[0] <= result.evy[0];
  const bool pred_ok = constraints.min_catch[1] <= result.evy[1];

  {
    auto csv = open_output(out_dir, "evy.csv");
    provenance(csv, cfg);
    csv << "species,evy,equilibrium_cap,binding_branch\n";
    csv << "prey," << csv_double(result.evy[0]) << ','
        << csv_double(result.equilibrium_caps[0]) << ','
        << branch_name(result.binding_branch[0]) << '\n';
    csv << "predator," << csv_double(result.evy[1]) << ','
        << csv_double(result.equilibrium_caps[1]) << ','
        << branch_name(result.binding_branch[1]) << '\n';
  }
  {
    auto rep = open_output(out_dir, "evy_report.txt");
    provenance(rep, cfg);
    rep << "favorable_conditions = " << (favorable ? "true" : "false") << "\n";
    rep << "growth_factor_prey_at_floors = " << fmt6(g_prey) << "\n";
    rep << "growth_factor_predator_at_floors = " << fmt6(g_pred) << "\n";
    rep << "equilibrium_catch_prey = " << fmt3(result.equilibrium_caps[0])
        << "\n";
    rep << "equilibrium_catch_predator = "
        << fmt3(result.equilibrium_caps[1]) << "\n";
    rep << "evy_prey = " << fmt3(result.evy[0]) << "\n";
    rep << "evy_predator = " << fmt3(result.evy[1]) << "\n";
    rep << "binding_branch_prey = " << branch_name(result.binding_branch[0])
        << "\n";
    rep << "binding_branch_predator = "
        << branch_name(result.binding_branch[1]) << "\n";
    rep << "requested_catch_prey = " << fmt3(constraints.min_catch[0]) << "\n";
    rep << "requested_catch_predator = " << fmt3(constraints.min_catch[1])
        << "\n";
    rep << "requested_catches_achievable = "
        << ((prey_ok && pred_ok) ? "true" : "false") << "\n";
    if (!prey_ok) {
      rep << "audit: requested prey catch floor "
          << fmt3(constraints.min_catch[0])
          << " exceeds the guaranteed yield " << fmt3(result.evy[0]) << "\n";
    }
    if (!pred_ok) {
      rep << "audit: requested predator catch floor "
          << fmt3(constraints.min_catch[1])
          << " exceeds the guaranteed yield " << fmt3(result.evy[1]) << "\n";
    }
  }
  if (!prey_ok || !pred_ok) {
    throw std::domain_error(
        "requested minimal catches exceed the ecosystem viable yields (see "
        "evy_report.txt)");
  }
}

void cmd_kernel(const RunConfig& cfg, const std::string& out_dir) {
  const LVParams& params = need_model(cfg);
  const ConstraintSet& constraints = need_constraints(cfg);
  const LotkaVolterraModel model(params);
  const GridGeometry geom = geometry_from(cfg, params);

  const KernelGrid grid =
      grid_kernel(model, constraints, geom, cfg.grid.max_iters);

  {
    auto csv = open_output(out_dir, "kernel_grid.csv");
    provenance(csv, cfg);
    grid.export_csv(csv);
  }

  double agreement = -1.0;
  if (favorable_conditions(model, constraints)) {
    const AnalyticKernel analytic(model, constraints);
    std::size_t agree = 0;
    const auto& final = grid.final_layer();
    for (std::size_t flat = 0; flat < final.size(); ++flat) {
      const bool a = analytic.contains(geom.center_state(flat));
      if (a == (final[flat] != 0)) ++agree;
    }
    agreement = 100.0 * static_cast<double>(agree) /
                static_cast<double>(final.size());
  }

  {
    auto rep = open_output(out_dir, "kernel_summary.txt");
    provenance(rep, cfg);
    rep << "grid_cells = " << geom.cells[0] << "x" << geom.cells[1] << "\n";
    rep << "y_bounds = [" << fmt6(geom.bounds[0][0]) << ", "
        << fmt6(geom.bounds[0][1]) << "]\n";
    rep << "z_bounds = [" << fmt6(geom.bounds[1][0]) << ", "
        << fmt6(geom.bounds[1][1]) << "]\n";
    rep << "layers_computed = " << grid.layer_count() << "\n";
    for (std::size_t k = 0; k < grid.layer_count(); ++k) {
      rep << "layer_" << k << "_members = " << grid.member_count(k) << "\n";
    }
    rep << "stationary_iteration = " << grid.stationary_iteration() << "\n";
    rep << "kernel_empty = "
        << (grid.member_count(grid.layer_count() - 1) == 0 ? "true" : "false")
        << "\n";
    if (agreement >= 0.0) {
      rep << "analytic_agreement_percent = " << fmt6(agreement) << "\n";
    } else {
      rep << "analytic_agreement_percent = n/a (unfavorable conditions)\n";
    }
  }
}

void cmd_fit(const RunConfig& cfg, const std::string& data_csv,
             const std::string& out_dir) {
  const LVParams& guess = need_model(cfg);

  std::ifstream in(data_csv);
  if (!in) {
    throw io_error("cannot read data file '" + data_csv + "'");
  }
  const ObservationSeries series = read_observations_csv(in, data_csv);

  FitConfig fc;
  fc.initial_guess = guess;
  fc.cg_max_iters = cfg.fit.cg_max_iters;
  fc.grad_step_rel = cfg.fit.grad_step_rel;
  fc.converge_tol = cfg.fit.converge_tol;
  fc.grad_tol = cfg.fit.grad_tol;
  if (cfg.fit.weight_prey || cfg.fit.weight_predator) {
    const Weights defaults = default_weights(series);
    Weights w(series.size());
    for (std::size_t t = 0; t < series.size(); ++t) {
      w[t][0] = cfg.fit.weight_prey ? *cfg.fit.weight_prey : defaults[t][0];
      w[t][1] =
          cfg.fit.weight_predator ? *cfg.fit.weight_predator : defaults[t][1];
    }
    fc.weights = std::move(w);
  }

  if (fc.weights.empty()) fc.weights = default_weights(series);
  const double initial_objective = wrss(guess, series, fc.weights);

  const FitResult result = fit(series, fc);

  {
    auto csv = open_output(out_dir, "fit_params.csv");
    provenance(csv, cfg);
    csv << "param,value\n";
    csv << "R," << csv_double(result.params.R) << "\n";
    csv << "L," << csv_double(result.params.L) << "\n";
    csv << "K," << csv_double(result.params.K) << "\n";
    csv << "alpha," << csv_double(result.params.alpha) << "\n";
    csv << "beta," << csv_double(result.params.beta) << "\n";
    csv << "kappa," << csv_double(result.params.kappa()) << "\n";
  }
  {
    auto csv = open_output(out_dir, "fit_trajectory.csv");
    provenance(csv, cfg);
    csv << "year,biomass_prey_obs,biomass_pred_obs,biomass_prey_fit,"
           "biomass_pred_fit\n";
    for (std::size_t t = 0; t < series.size(); ++t) {
      csv << series.years[t] << ','
          << csv_double(series.biomass_obs[t][0]) << ','
          << csv_double(series.biomass_obs[t][1]) << ','
          << csv_double(result.trajectory_pred[t][0]) << ','
          << csv_double(result.trajectory_pred[t][1]) << '\n';
    }
  }
  {
    auto rep = open_output(out_dir, "fit_report.txt");
    provenance(rep, cfg);
    rep << "records = " << series.size() << "\n";
    rep << "objective_initial = " << fmt6(initial_objective) << "\n";
    rep << "objective_final = " << fmt6(result.objective) << "\n";
    rep << "converged = " << (result.converged ? "true" : "false") << "\n";
    rep << "iterations = " << result.iterations << "\n";
    rep << "R = " << fmt6(result.params.R) << "\n";
    rep << "L = " << fmt6(result.params.L) << "\n";
    rep << "K = " << fmt6(result.params.K) << "\n";
    rep << "alpha = " << fmt6(result.params.alpha) << "\n";
    rep << "beta = " << fmt6(result.params.beta) << "\n";
    rep << "kappa = " << fmt6(result.params.kappa()) << "\n";
  }
}

void cmd_simulate(const RunConfig& cfg, const std::string& out_dir) {
  const LVParams& params = need_model(cfg);
  const ConstraintSet& constraints = need_constraints(cfg);
  if (!cfg.initial) {
    throw config_error("missing required section [initial]");
  }
  if (!cfg.simulate.present) {
    throw config_error("missing required section [simulate]");
  }
  const SimulateBlock& sim = cfg.simulate;

  HarvestPolicy policy;
  if (sim.policy == "constant_effort") {
    if (!sim.effort_prey || !sim.effort_predator) {
      throw config_error(
          "policy constant_effort needs effort_prey and effort_predator");
    }
    policy =
        HarvestPolicy::constant_effort(EffortVector{*sim.effort_prey,
                                                    *sim.effort_predator});
  } else if (sim.policy == "constant_catch") {
    if (!sim.catch_prey || !sim.catch_predator) {
      throw config_error(
          "policy constant_catch needs catch_prey and catch_predator");
    }
    policy = HarvestPolicy::constant_catch({*sim.catch_prey,
                                            *sim.catch_predator});
  } else if (sim.policy == "viable_min") {
    policy = HarvestPolicy::viable_min();
  } else {
    policy = HarvestPolicy::viable_greedy();
  }

  const LotkaVolterraModel model(params);
  const Trajectory traj =
      run(model, *cfg.initial, policy, constraints, sim.horizon);
  const AuditReport report = audit(traj, constraints);

  {
    auto csv = open_output(out_dir, "trajectory.csv");
    provenance(csv, cfg);
    write_trajectory_csv(csv, traj);
  }
  {
    auto rep = open_output(out_dir, "simulate_report.txt");
    provenance(rep, cfg);
    rep << "policy = " << sim.policy << "\n";
    rep << "horizon = " << sim.horizon << "\n";
    const auto& last = traj.steps.back();
    rep << "final_biomass_prey = " << fmt3(last.state[0]) << "\n";
    rep << "final_biomass_predator = " << fmt3(last.state[1]) << "\n";
    std::size_t extinctions = 0;
    for (const auto& row : traj.steps) extinctions += row.extinction ? 1 : 0;
    rep << "extinction_events = " << extinctions << "\n";
    rep << "audit_violations = " << report.violations.size() << "\n";
    rep << "audit_biomass_ok = " << (report.biomass_ok ? "true" : "false")
        << "\n";
    rep << "audit_catch_ok = " << (report.catch_ok ? "true" : "false") << "\n";
    rep << "audit_first_violation_year = " << report.first_violation_year
        << "\n";
    for (const auto& v : report.violations) {
      rep << "violation: year " << v.year << ": " << v.what << "\n";
    }
  }
}

void cmd_msy(const RunConfig& cfg, const std::string& out_dir) {
  const LVParams& params = need_model(cfg);
  const ConstraintSet& constraints = need_constraints(cfg);
  const LotkaVolterraModel model(params);

  EffortBox box;
  box.lo = {0.0, 0.0};
  const double v_max = cfg.msy.v_max ? *cfg.msy.v_max : params.R - 1.0;
  const double w_max =
      cfg.msy.w_max
          ? *cfg.msy.w_max
          : std::max(0.0, params.L + params.beta * params.kappa() - 1.0);
  box.hi = {v_max, w_max};

  MsyOptions options;
  options.grid_points = cfg.msy.grid_points;
  options.refine_rounds = cfg.msy.refine_rounds;
  const auto results = msy_multispecies(model, constraints, box, options);
  const SchaeferMsy schaefer = msy_schaefer(params.R, params.K);

  {
    auto csv = open_output(out_dir, "msy.csv");
    provenance(csv, cfg);
    csv << "objective,found,msy,effort_prey,effort_predator,biomass_prey,"
           "biomass_pred,viable\n";
    const char* names[2] = {"prey", "predator"};
    for (std::size_t i = 0; i < 2; ++i) {
      const MsyResult& r = results[i];
      csv << names[i] << ',' << (r.found ? 1 : 0) << ','
          << csv_double(r.msy) << ',';
      if (r.found) {
        csv << csv_double(r.equilibrium.efforts[0]) << ','
            << csv_double(r.equilibrium.efforts[1]) << ','
            << csv_double(r.equilibrium.state[0]) << ','
            << csv_double(r.equilibrium.state[1]);
      } else {
        csv << "0,0,0,0";
      }
      csv << ',' << (r.viable ? 1 : 0) << '\n';
    }
  }
  {
    auto rep = open_output(out_dir, "msy_report.txt");
    provenance(rep, cfg);
    rep << "effort_box = [0, " << fmt6(v_max) << "] x [0, " << fmt6(w_max)
        << "]\n";
    const char* names[2] = {"prey", "predator"};
    for (std::size_t i = 0; i < 2; ++i) {
      const MsyResult& r = results[i];
      rep << "msy_" << names[i] << " = "
          << (r.found ? fmt3(r.msy) : std::string("none")) << "\n";
      if (r.found) {
        rep << "msy_" << names[i] << "_efforts = ("
            << fmt6(r.equilibrium.efforts[0]) << ", "
            << fmt6(r.equilibrium.efforts[1]) << ")\n";
        rep << "msy_" << names[i] << "_equilibrium = ("
            << fmt3(r.equilibrium.state[0]) << ", "
            << fmt3(r.equilibrium.state[1]) << ")\n";
        rep << "msy_" << names[i] << "_viable = "
            << (r.viable ? "true" : "false") << "\n";
      }
    }
    rep << "schaefer_msy_prey_alone = " << fmt3(schaefer.msy) << "\n";
    rep << "schaefer_biomass = " << fmt3(schaefer.biomass) << "\n";
    rep << "schaefer_effort = " << fmt6(schaefer.effort) << "\n";
  }
}

void cmd_audit(const RunConfig& cfg, const std::string& data_csv,
               const std::string& out_dir) {
  const ConstraintSet& constraints = need_constraints(cfg);

  std::ifstream in(data_csv);
  if (!in) {
    throw io_error("cannot read data file '" + data_csv + "'");
  }
  const Trajectory traj = read_trajectory_csv(in, data_csv);
  const AuditReport report = audit(traj, constraints);

  auto rep = open_output(out_dir, "audit_report.txt");
  provenance(rep, cfg);
  rep << "rows = " << traj.steps.size() << "\n";
  rep << "violations = " << report.violations.size() << "\n";
  rep << "biomass_ok = " << (report.biomass_ok ? "true" : "false") << "\n";
  rep << "catch_ok = " << (report.catch_ok ? "true" : "false") << "\n";
  rep << "first_violation_year = " << report.first_violation_year << "\n";
  for (const auto& v : report.violations) {
    rep << "violation: year " << v.year << ": " << v.what << "\n";
  }
}

}  // namespace evy
