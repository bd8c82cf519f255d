// Command-line front end. Each subcommand writes CSV/JSON into the output
// directory together with manifest.json.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nlaa/bragg.hpp"
#include "nlaa/errors.hpp"
#include "nlaa/fit.hpp"
#include "run_config.hpp"

using namespace nlaa;
using cli::RunConfig;

namespace {

enum Exit { kOk = 0, kConfig = 2, kNumerical = 3, kUnidentifiable = 4 };

template <class F>
std::string to_text(F&& write) {
  std::ostringstream os;
  write(os);
  return os.str();
}

int run_solve(const RunConfig& rc, Manifest& m) {
  if (rc.model.self_trapping_risk()) std::cerr << "warning: |U/J| > 1.5, self-trapping regime\n";
  const auto s = solve_state(rc.model, rc.kind, rc.solver);
  json out = to_json(s);
  out["model"] = to_json(rc.model);
  m.write_file("solution.json", out.dump(2) + "\n");
  m.write_file("state.csv", to_text([&](std::ostream& os) {
    CsvWriter w(os);
    w.header({"j", "re", "im", "n"});
    for (int j = 0; j < s.state.size(); ++j) {
      w.cell(j).cell(s.state[j].real()).cell(s.state[j].imag()).cell(std::norm(s.state[j]));
      w.end_row();
    }
  }));
  std::cout << to_string(s.kind) << " r=" << fmt(participation_ratio(s.state)) << " mu=" << fmt(s.mu)
            << " E=" << fmt(s.energy) << " residual=" << fmt(s.residual) << "\n";
  if (!s.converged) {
    std::cerr << "solver did not reach the residual tolerance\n";
    return kNumerical;
  }
  return kOk;
}

int run_evolve(const RunConfig& rc, Manifest& m) {
  const auto tr = transport_experiment(rc.model, rc.t_final, rc.evolve);
  m.write_file("trajectory.csv", to_text([&](std::ostream& os) { write_trajectory_csv(os, tr); }));
  m.note("max_norm_drift", tr.max_norm_drift);
  m.note("max_energy_drift", tr.max_energy_drift);
  std::cout << "t=" << fmt(rc.t_final) << " <d>=" << fmt(tr.frames.back().width) << " r=" << fmt(tr.frames.back().r)
            << "\n";
  return kOk;
}

int run_interaction_sweep(const RunConfig& rc, Manifest& m) {
  std::vector<Trajectory> trs;
  for (double U : rc.u_values) {
    ModelParams p = rc.model;
    p.U = U;
    EvolveOptions eo = rc.evolve;
    eo.keep_density = false;
    trs.push_back(transport_experiment(p, rc.t_final, eo));
  }
  m.write_file("width_vs_time.csv", to_text([&](std::ostream& os) {
    CsvWriter w(os);
    std::vector<std::string> cols{"t"};
    for (double U : rc.u_values) cols.push_back("d_U" + fmt(U));
    w.header(cols);
    for (std::size_t f = 0; f < trs.front().frames.size(); ++f) {
      w.cell(trs.front().frames[f].t);
      for (const auto& tr : trs) w.cell(tr.frames[f].width);
      w.end_row();
    }
  }));
  m.write_file("sweep_summary.csv", to_text([&](std::ostream& os) {
    CsvWriter w(os);
    w.header({"u_over_j", "t_final", "d_final", "r_final", "max_norm_drift"});
    for (std::size_t i = 0; i < trs.size(); ++i) {
      w.cell(rc.u_values[i]).cell(rc.t_final).cell(trs[i].frames.back().width).cell(trs[i].frames.back().r);
      w.cell(trs[i].max_norm_drift);
      w.end_row();
    }
  }));
  return kOk;
}

int run_ramp(const RunConfig& rc, Manifest& m) {
  const auto res = ramp_prepare(rc.model, rc.ramp, rc.evolve);
  const auto exact = solve_state(rc.model, rc.kind, rc.solver);
  m.write_file("ramp_trajectory.csv", to_text([&](std::ostream& os) { write_trajectory_csv(os, res.trajectory); }));
  const json summary = {{"kind", to_string(rc.kind)},
                        {"initial_site", res.initial_site},
                        {"duration_hbar_over_j", rc.ramp.duration},
                        {"duration_ms", rc.units.time_to_ms(rc.ramp.duration)},
                        {"hold_ms", rc.units.time_to_ms(rc.ramp.hold)},
                        {"r_ramped", participation_ratio(res.state)},
                        {"r_exact", participation_ratio(exact.state)},
                        {"exact_converged", exact.converged}};
  m.write_file("ramp_summary.json", summary.dump(2) + "\n");
  std::cout << "r_ramped=" << fmt(summary["r_ramped"]) << " r_exact=" << fmt(summary["r_exact"]) << "\n";
  return exact.converged ? kOk : kNumerical;
}

ScanGrid grid_for(const RunConfig& rc, StateKind kind) {
  ScanGrid g;
  g.delta_over_j = rc.delta_grid;
  g.u_over_j = rc.u_grid;
  g.recipe.L = rc.model.L;
  g.recipe.phi = rc.model.phi;
  g.recipe.beta = rc.model.beta;
  g.recipe.kind = kind;
  g.recipe.preparation = rc.preparation;
  g.recipe.solver = rc.solver;
  g.recipe.ramp = rc.ramp;
  g.recipe.evolve = rc.evolve;
  return g;
}

ScanOptions scan_options(const RunConfig& rc) {
  ScanOptions so;
  so.workers = rc.workers;
  so.store = rc.store;
  return so;
}

int count_invalid(const ScanResult& r) {
  int n = 0;
  for (const auto& row : r.cells)
    for (const auto& c : row) n += !c.valid;
  return n;
}

int run_scan(const RunConfig& rc, Manifest& m) {
  const auto res = scan_phase_diagram(grid_for(rc, rc.kind), scan_options(rc));
  const std::string k = to_string(rc.kind);
  m.write_file("r_matrix_" + k + ".csv", to_text([&](std::ostream& os) { write_r_matrix_csv(os, res); }));
  m.write_file("transitions.csv", to_text([&](std::ostream& os) { write_transitions_csv(os, {res}); }));
  m.note("r_c", res.r_c);
  m.note("invalid_cells", count_invalid(res));
  m.note("reused_cells", res.reused_cells);
  std::cout << "r_c=" << fmt(res.r_c) << " invalid cells=" << count_invalid(res) << "\n";
  return kOk;
}

int run_phases(const RunConfig& rc, Manifest& m) {
  const auto gs = scan_phase_diagram(grid_for(rc, StateKind::ground), scan_options(rc));
  const auto es = scan_phase_diagram(grid_for(rc, StateKind::highest_excited), scan_options(rc));
  m.write_file("r_matrix_gs.csv", to_text([&](std::ostream& os) { write_r_matrix_csv(os, gs); }));
  m.write_file("r_matrix_es.csv", to_text([&](std::ostream& os) { write_r_matrix_csv(os, es); }));
  m.write_file("transitions.csv", to_text([&](std::ostream& os) { write_transitions_csv(os, {gs, es}); }));
  m.write_file("phase_map.csv", to_text([&](std::ostream& os) {
    CsvWriter w(os);
    w.header({"u_over_j", "delta_over_j", "phase"});
    for (std::size_t iu = 0; iu < rc.u_grid.size(); ++iu) {
      const double g = gs.transitions[iu].effective(), e = es.transitions[iu].effective();
      for (double d : rc.delta_grid) {
        w.cell(rc.u_grid[iu]).cell(d);
        w.cell(std::isnan(g) || std::isnan(e) ? std::string("undetermined")
                                              : to_string(classify_phase(d, rc.u_grid[iu], g, e)));
        w.end_row();
      }
    }
  }));
  m.note("r_c", gs.r_c);
  return kOk;
}

int run_alpha_star(const RunConfig& rc, Manifest& m) {
  AlphaStarOptions ao;
  ao.L = rc.model.L;
  ao.phi = rc.model.phi;
  ao.beta = rc.model.beta;
  ao.delta_lo = rc.delta_grid.front();
  ao.delta_hi = rc.delta_grid.back();
  ao.delta_step = rc.delta_grid.size() > 1 ? rc.delta_grid[1] - rc.delta_grid[0] : 0.05;
  ao.energy_definition = rc.energy_definition;
  ao.solver = rc.solver;
  const auto rows = extract_alpha_star_curve(rc.u_values, ao, rc.workers);
  m.write_file("alpha_star.csv", to_text([&](std::ostream& os) { write_alpha_star_csv(os, rows); }));
  if (rows.size() >= 2) {
    std::vector<double> u, a_mu, a_e;
    for (const auto& r : rows) {
      u.push_back(r.U);
      a_mu.push_back(r.alpha_star_mu);
      a_e.push_back(r.alpha_star_energy);
    }
    const auto fm = fit_line(u, a_mu), fe = fit_line(u, a_e);
    json s = {{"slope_mu", fm.slope}, {"r2_mu", fm.r2}, {"slope_E", fe.slope}, {"r2_E", fe.r2}};
    m.write_file("alpha_star_fit.json", s.dump(2) + "\n");
    std::cout << "slope(mu)=" << fmt(fm.slope) << " R2=" << fmt(fm.r2) << "  slope(E)=" << fmt(fe.slope)
              << " R2=" << fmt(fe.r2) << "\n";
  }
  return kOk;
}

int run_gaa_me(const RunConfig& rc, Manifest& m) {
  GaaParams gp;
  gp.L = rc.model.L;
  gp.J = rc.model.J;
  gp.delta = rc.model.delta;
  gp.beta = rc.model.beta;
  gp.phi = rc.model.phi;
  gp.alpha = rc.gaa_alpha;
  const auto c = gaa_classify_spectrum(gp);
  m.write_file("gaa_levels.csv", to_text([&](std::ostream& os) {
    CsvWriter w(os);
    w.header({"energy", "r", "localized", "predicted_localized", "agrees"});
    for (const auto& l : c.levels) {
      w.cell(l.energy).cell(l.r).cell(int(l.localized)).cell(int(l.predicted_localized)).cell(int(l.agrees()));
      w.end_row();
    }
  }));
  m.write_file("mobility_edge_line.csv", to_text([&](std::ostream& os) {
    // E_c(Delta) at this alpha, for plotting against the classified spectrum.
    CsvWriter w(os);
    w.header({"delta_over_j", "e_c"});
    if (gp.alpha != 0.0)
      for (double d : linspace_step(0.0, 4.0, 0.05)) {
        w.cell(d).cell(d == 0.0 ? 2.0 * std::abs(gp.J) / gp.alpha : gaa_mobility_edge(gp.J, d, gp.alpha));
        w.end_row();
      }
  }));
  json s = {{"alpha", gp.alpha},
            {"L", gp.L},
            {"delta_over_j", gp.delta},
            {"r_threshold", c.r_threshold},
            {"threshold_from_gap", c.threshold_from_gap},
            {"misclassified_fraction", c.misclassified_fraction}};
  s["mobility_edge"] = c.mobility_edge ? json(*c.mobility_edge) : json(nullptr);
  m.write_file("gaa_summary.json", s.dump(2) + "\n");
  std::cout << "misclassified fraction " << fmt(c.misclassified_fraction) << "\n";
  return kOk;
}

int run_fit(const RunConfig& rc, Manifest& m) {
  std::vector<FitPoint> data;
  if (rc.fit_input) {
    std::ifstream in(*rc.fit_input);
    if (!in) throw ConfigError("cannot open fit input " + rc.fit_input->string());
    data = read_fit_csv(in);
  } else {
    CellRecipe rec;
    rec.L = rc.model.L;
    rec.phi = rc.model.phi;
    rec.beta = rc.model.beta;
    rec.kind = rc.kind;
    rec.preparation = rc.preparation;
    rec.solver = rc.solver;
    rec.ramp = rc.ramp;
    rec.evolve = rc.evolve;
    data = synthesize_measurement(rec, rc.model.U, rc.delta_grid, rc.noise, rc.seed);
  }
  m.write_file("fit_data.csv", to_text([&](std::ostream& os) { write_fit_points_csv(os, data); }));
  FitResult fr = fit_transition(data);
  json j = {{"A", fr.A},   {"B", fr.B},         {"gamma", fr.gamma},     {"delta_c", fr.delta_c},
            {"rss", fr.rss}, {"n_points", fr.n_points}, {"n_left", fr.n_left}, {"theta_at_zero", 1}};
  if (rc.bootstrap > 0) {
    const auto b = bootstrap_delta_c(data, rc.bootstrap, rc.seed, rc.workers);
    fr.delta_c_stderr = b.stderr_delta_c;
    j["delta_c_stderr"] = b.stderr_delta_c;
    j["bootstrap"] = {{"resamples", b.resamples}, {"failures", b.failures}, {"mean_delta_c", b.mean_delta_c}};
  }
  m.write_file("fit_result.json", j.dump(2) + "\n");
  m.write_file("fit_curve.csv", to_text([&](std::ostream& os) { write_fitted_curve_csv(os, fr, data); }));
  std::cout << "delta_c=" << fmt(fr.delta_c) << " A=" << fmt(fr.A) << " gamma=" << fmt(fr.gamma)
            << " B=" << fmt(fr.B) << "\n";
  return kOk;
}

int run_bragg(const RunConfig& rc, Manifest& m) {
  const auto s = bragg_detunings(rc.model, rc.recoil);
  m.write_file("bragg_schedule.csv", to_text([&](std::ostream& os) {
    CsvWriter w(os);
    w.header({"j", "detuning_over_2pi_khz", "detuning_over_j", "phase_rad"});
    for (std::size_t i = 0; i < s.labels.size(); ++i) {
      w.cell(s.labels[i]).cell(rc.units.energy_to_hz(s.detunings[i]) * 1e-3).cell(s.detunings[i]).cell(s.phases[i]);
      w.end_row();
    }
  }));
  m.note("design_residual", bragg_design_residual(s, rc.model));
  return kOk;
}

int dispatch(const RunConfig& rc) {
  Manifest m(rc.out, rc.command, rc.echo);
  int code = kOk;
  const auto& c = rc.command;
  if (c == "solve") code = run_solve(rc, m);
  else if (c == "evolve") code = run_evolve(rc, m);
  else if (c == "interaction-sweep") code = run_interaction_sweep(rc, m);
  else if (c == "ramp") code = run_ramp(rc, m);
  else if (c == "scan") code = run_scan(rc, m);
  else if (c == "phases") code = run_phases(rc, m);
  else if (c == "alpha-star") code = run_alpha_star(rc, m);
  else if (c == "gaa-me") code = run_gaa_me(rc, m);
  else if (c == "fit") code = run_fit(rc, m);
  else if (c == "bragg-schedule") code = run_bragg(rc, m);
  m.note("exit_code", code);
  const auto path = m.finish();
  std::cout << "wrote " << path.string() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear Aubry-Andre lattice toolkit"};
  app.require_subcommand(1);
  std::optional<std::string> config;
  cli::Overrides ov;
  for (const auto& name : cli::subcommands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON configuration file");
    sub->add_option("--L", ov.L, "number of lattice sites");
    sub->add_option("--delta-over-j", ov.delta_over_j, "quasiperiodic amplitude Delta/J");
    sub->add_option("--u-over-j", ov.u_over_j, "interaction U/J");
    sub->add_option("--phi", ov.phi, "disorder phase in radians, or 'mirror'");
    sub->add_option("--kind", ov.kind, "gs or es")->check(CLI::IsMember({"gs", "es"}));
    sub->add_option("--preparation", ov.preparation, "exact or ramped")->check(CLI::IsMember({"exact", "ramped"}));
    sub->add_option("--seed", ov.seed, "RNG seed");
    sub->add_option("--workers", ov.workers, "worker threads");
    sub->add_option("--out", ov.out, std::string("output directory (default $") + cli::kOutDirEnv + " or nlaa-out)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    std::optional<std::filesystem::path> cfg_path;
    if (config) cfg_path = *config;
    return dispatch(cli::build_config(command, cfg_path, ov));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const UnidentifiableError& e) {
    std::cerr << "unidentifiable: " << e.what() << "\n";
    return kUnidentifiable;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
}
