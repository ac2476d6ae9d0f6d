#include "hinfdae/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "hinfdae/daesim.hpp"
#include "hinfdae/io.hpp"
#include "hinfdae/robust.hpp"
#include "hinfdae/synth.hpp"

namespace hinfdae::cli {
namespace {

namespace fs = std::filesystem;
using io::json;

struct Options {
  std::string model, filter, scenario, sdp_path, out = ".";
  double mu = 0.25;
  std::string structure = "dynamic";
  std::string mode = "max-gamma";
  std::optional<double> dt, horizon;
  double tol_gap = 1e-8, tol_feas = 1e-8;
  int samples = 64;
  bool dump_sdp = false;
};

std::string out_path(const Options& o, const std::string& name) {
  std::error_code ec;
  fs::create_directories(o.out, ec);
  if (ec) throw Error(ErrorKind::Usage, "cannot create output directory \"" + o.out + "\"");
  return (fs::path(o.out) / name).string();
}

sdp::SolverSettings solver_settings(const Options& o) {
  sdp::SolverSettings s;
  s.tol_gap = o.tol_gap;
  s.tol_feas = o.tol_feas;
  s.validate();
  return s;
}

synth::FilterStructure structure_of(const std::string& s, const DescriptorPlant& plant) {
  if (s == "dynamic") return synth::FilterStructure::dynamic();
  if (s == "static") return synth::FilterStructure::static_gain();
  if (s == "general") {
    return synth::FilterStructure::general(Matrix::Identity(plant.n(), plant.n()), Matrix::Zero(plant.n(), plant.p()),
                                           synth::E3Mode::Variable);
  }
  throw Error(ErrorKind::Usage, "unknown structure \"" + s + "\"");
}

DescriptorPlant load_plant(const Options& o) { return io::plant_from_json(io::read_json(o.model)); }

int cmd_validate(const Options& o, std::ostream& out) {
  const DescriptorPlant plant = load_plant(o);
  const ValidationReport rep = validate_plant(plant);
  json j;
  j["schema"] = io::kSchemaVersion;
  j["rank_E"] = rep.rank_E;
  j["regular"] = rep.regular;
  j["impulse_free"] = to_string(rep.impulse_free);
  j["observable"] = to_string(rep.observable);
  json eig = json::array();
  for (const auto& [re, im] : rep.finite_eigenvalues) eig.push_back(json::array({re, im}));
  j["finite_eigenvalues"] = eig;
  j["messages"] = rep.messages;
  j["ok"] = rep.ok();
  io::write_json(out_path(o, "validation.json"), j);
  out << "rank(E) = " << rep.rank_E << ", regular = " << (rep.regular ? "yes" : "no")
      << ", impulse-free = " << to_string(rep.impulse_free) << ", observable = " << to_string(rep.observable)
      << "\n";
  for (const auto& [re, im] : rep.finite_eigenvalues) out << "finite eigenvalue " << re << " + " << im << "i\n";
  for (const auto& m : rep.messages) out << "note: " << m << "\n";
  if (!rep.ok()) {
    throw Error(ErrorKind::Validation, rep.messages.empty() ? "plant failed validation" : rep.messages.front());
  }
  return 0;
}

int cmd_synth(const Options& o, std::ostream& out) {
  const DescriptorPlant plant = load_plant(o);
  synth::SynthesisSettings settings;
  settings.solver = solver_settings(o);
  synth::ModeSpec mode;
  if (o.mode == "min-mu") {
    mode = synth::ModeSpec::min_mu(0.0, 0.0);
  } else if (o.mode != "max-gamma") {
    throw Error(ErrorKind::Usage, "unknown mode \"" + o.mode + "\"");
  }
  const synth::FilterStructure structure = structure_of(o.structure, plant);
  if (o.dump_sdp) {
    const lmi::LmiProgram program = structure.kind == synth::StructureKind::StaticGain
                                        ? synth::build_static_program(plant, o.mu, settings)
                                        : synth::build_program(plant, o.mu, structure, synth::ModeSpec{}, settings);
    io::write_json(out_path(o, "sdp.json"), io::sdp_to_json(lmi::canonicalize(program)));
  }
  const synth::SynthesisResult res = synth::synthesize(plant, o.mu, structure, settings, mode);
  io::write_json(out_path(o, "synthesis.json"), io::result_to_json(res));
  const synth::CertificateReport cert = synth::verify_certificate(plant, res, 1e-7);
  out << std::setprecision(8);
  out << "structure " << synth::to_string(res.structure) << ", mu = " << res.mu << "\n";
  out << "gamma* = " << res.gamma_star << " (alpha1 = " << res.alpha1 << ", alpha2 = " << res.alpha2 << ")\n";
  out << "solver " << sdp::to_string(res.solver.status) << " after " << res.solver.iterations << " iterations\n";
  out << "certificate " << (cert.ok() ? "verified" : "FAILED") << " at tol 1e-7\n";
  for (const auto& c : cert.checks) {
    if (!c.passed) out << "  failed: " << c.name << " (" << c.value << ")\n";
  }
  return 0;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const DescriptorPlant plant = load_plant(o);
  if (o.filter.empty()) throw Error(ErrorKind::Usage, "simulate needs --filter");
  const synth::SynthesisResult res = io::result_from_json(io::read_json(o.filter));
  daesim::Scenario sc;
  if (!o.scenario.empty()) sc = io::scenario_from_json(io::read_json(o.scenario));
  if (o.dt) sc.dt = *o.dt;
  if (o.horizon) sc.tf = sc.t0 + *o.horizon;
  const int n = plant.n();
  const Vector xg = sc.x0_plant.value_or(Vector::Zero(n));
  const Vector xfg = sc.x0_filter.value_or(Vector::Zero(n));
  const daesim::Trajectory tr = daesim::run_scenario(plant, res.filter, sc, xg, xfg);
  std::ostringstream csv;
  daesim::write_csv(csv, tr);
  io::write_text(out_path(o, "trajectory.csv"), csv.str());
  json j;
  j["schema"] = io::kSchemaVersion;
  j["steps"] = tr.stats.steps;
  j["newton_iterations"] = tr.stats.newton_iterations;
  j["max_algebraic_residual"] = tr.stats.max_algebraic_residual;
  j["x0_plant"] = io::vector_to_json(tr.x.row(0).transpose());
  j["x0_filter"] = io::vector_to_json(tr.x_filter.row(0).transpose());
  j["error_initial"] = tr.e.row(0).norm();
  j["error_final"] = tr.e.bottomRows(1).norm();
  j["mu"] = res.mu;
  if (tr.gain) {
    j["gain"] = *tr.gain;
    j["gain_within_mu"] = *tr.gain <= res.mu;
  }
  io::write_json(out_path(o, "simulation.json"), j);
  out << std::setprecision(6);
  out << tr.stats.steps << " steps, max algebraic residual " << tr.stats.max_algebraic_residual << "\n";
  out << "|e(t0)| = " << tr.e.row(0).norm() << ", |e(tf)| = " << tr.e.bottomRows(1).norm() << "\n";
  if (tr.gain) {
    out << "measured gain " << *tr.gain << (*tr.gain <= res.mu ? " <= " : " > ") << "mu = " << res.mu << "\n";
  }
  return 0;
}

int cmd_robust(const Options& o, std::ostream& out) {
  if (o.filter.empty()) throw Error(ErrorKind::Usage, "robust needs --filter");
  const DescriptorPlant plant = load_plant(o);
  const synth::SynthesisResult res = io::result_from_json(io::read_json(o.filter));
  json j;
  j["schema"] = io::kSchemaVersion;
  j["gamma_star"] = res.gamma_star;
  j["nominal"] = std::hypot(plant.gamma1, plant.gamma2);
  for (auto region : {robust::Region::Exact, robust::Region::Conservative}) {
    const robust::UncertaintyBudget b{plant.gamma1, plant.gamma2, res.gamma_star, region};
    j[std::string("max_uniform_delta_") + robust::to_string(region)] = robust::max_uniform_delta(b);
  }
  const robust::UncertaintyBudget b{plant.gamma1, plant.gamma2, res.gamma_star, robust::Region::Exact};
  j["empty"] = b.empty();
  std::ostringstream csv;
  robust::write_boundary_csv(csv, robust::region_boundary(b, o.samples));
  io::write_text(out_path(o, "boundary.csv"), csv.str());
  io::write_json(out_path(o, "robust.json"), j);
  out << std::setprecision(8);
  out << "gamma* = " << res.gamma_star << ", nominal |(gamma1, gamma2)| = " << j["nominal"].get<double>() << "\n";
  out << "max uniform increment: exact " << j["max_uniform_delta_exact"].get<double>() << ", conservative "
      << j["max_uniform_delta_conservative"].get<double>() << "\n";
  if (b.empty()) out << "budget empty: gamma* is below the nominal Lipschitz norm\n";
  return 0;
}

int cmd_sdp_solve(const Options& o, std::ostream& out) {
  if (o.sdp_path.empty()) throw Error(ErrorKind::Usage, "sdp-solve needs --sdp");
  const lmi::SdpStandardForm form = io::sdp_from_json(io::read_json(o.sdp_path));
  const sdp::SdpSolution sol = sdp::solve(form, solver_settings(o));
  io::write_json(out_path(o, "solution.json"), io::solution_to_json(sol));
  out << std::setprecision(10);
  out << sdp::to_string(sol.status) << " after " << sol.iterations << " iterations, objective " << sol.objective
      << "\n";
  switch (sol.status) {
    case sdp::Status::Optimal:
      return 0;
    case sdp::Status::PrimalInfeasible:
      throw Error(ErrorKind::Infeasible, "primal infeasible");
    case sdp::Status::DualInfeasible:
      throw Error(ErrorKind::Infeasible, "dual infeasible (objective unbounded)");
    default:
      throw Error(ErrorKind::Numerical, std::string("solver stopped with ") + sdp::to_string(sol.status));
  }
}

std::string single_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage:
      return 1;
    case ErrorKind::Dimension:
    case ErrorKind::Parse:
    case ErrorKind::Validation:
    case ErrorKind::Domain:
      return 2;
    case ErrorKind::Infeasible:
      return 3;
    case ErrorKind::Numerical:
      return 4;
  }
  return 4;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Robust H-infinity filter synthesis and simulation for nonlinear descriptor systems", "hinfdae"};
  app.require_subcommand(1);

  auto add_out = [&o](CLI::App* c) { c->add_option("--out", o.out, "Output directory"); };
  auto add_tol = [&o](CLI::App* c) {
    c->add_option("--tol-gap", o.tol_gap, "Relative duality gap tolerance")->check(CLI::PositiveNumber);
    c->add_option("--tol-feas", o.tol_feas, "Feasibility tolerance")->check(CLI::PositiveNumber);
  };

  CLI::App* validate = app.add_subcommand("validate", "Check rank, regularity, impulse-freeness, observability");
  validate->add_option("--model", o.model, "Plant JSON")->required();
  add_out(validate);

  CLI::App* synth = app.add_subcommand("synth", "Synthesize a filter");
  synth->add_option("--model", o.model, "Plant JSON")->required();
  synth->add_option("--mu", o.mu, "Attenuation level");
  synth->add_option("--structure", o.structure, "dynamic | static | general")
      ->check(CLI::IsMember({"dynamic", "static", "general"}));
  synth->add_option("--mode", o.mode, "max-gamma | min-mu")->check(CLI::IsMember({"max-gamma", "min-mu"}));
  synth->add_flag("--dump-sdp", o.dump_sdp, "Also write the canonical SDP as sdp.json");
  add_tol(synth);
  add_out(synth);

  CLI::App* simulate = app.add_subcommand("simulate", "Simulate plant and filter");
  simulate->add_option("--model", o.model, "Plant JSON")->required();
  simulate->add_option("--filter", o.filter, "Synthesis JSON")->required();
  simulate->add_option("--scenario", o.scenario, "Scenario JSON");
  simulate->add_option("--dt", o.dt, "Step size");
  simulate->add_option("--horizon", o.horizon, "Simulated time span");
  add_out(simulate);

  CLI::App* rob = app.add_subcommand("robust", "Lipschitz-uncertainty budget of a synthesized filter");
  rob->add_option("--model", o.model, "Plant JSON")->required();
  rob->add_option("--filter", o.filter, "Synthesis JSON")->required();
  rob->add_option("--samples", o.samples, "Boundary points per arc");
  add_out(rob);

  CLI::App* sdp_solve = app.add_subcommand("sdp-solve", "Solve an SDP dump");
  sdp_solve->add_option("--sdp", o.sdp_path, "SDP JSON")->required();
  add_tol(sdp_solve);
  add_out(sdp_solve);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error[usage]: " << single_line(e.what()) << "\n";
    return 1;
  }

  try {
    if (validate->parsed()) return cmd_validate(o, out);
    if (synth->parsed()) return cmd_synth(o, out);
    if (simulate->parsed()) return cmd_simulate(o, out);
    if (rob->parsed()) return cmd_robust(o, out);
    return cmd_sdp_solve(o, out);
  } catch (const Error& e) {
    err << "error[" << to_string(e.kind()) << "]: " << single_line(e.what()) << "\n";
    return exit_code(e.kind());
  } catch (const io::json::exception& e) {
    err << "error[parse]: " << single_line(e.what()) << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error[numerical]: " << single_line(e.what()) << "\n";
    return 4;
  }
}

}  // namespace hinfdae::cli
