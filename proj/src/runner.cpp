#include "darkloop/runner.hpp"

#include "darkloop/dynamics.hpp"
#include "darkloop/experiments.hpp"
#include "darkloop/feasibility.hpp"
#include "darkloop/model.hpp"
#include "darkloop/pre_elimination.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

namespace darkloop::cli {

namespace {

namespace ex = darkloop::experiments;
namespace dyn = darkloop::dynamics;
using linalg::Ket;

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string sci(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

ex::RunOptions run_options(const RunConfig& cfg) {
  ex::RunOptions o;
  o.dt = cfg.dt;
  o.check_convergence = cfg.check_convergence;
  o.sample_every = cfg.sample_every;
  o.basis = cfg.collective_basis ? dyn::Basis::collective : dyn::Basis::product;
  return o;
}

// Collects summary lines and artifacts for one run.
struct Outcome {
  std::ostringstream summary;
  const dyn::Trajectory* trajectory = nullptr;
  std::vector<SweepRow> sweep;
  bool physics_failed = false;

  void line(const std::string& key, const std::string& value) {
    summary << key << ": " << value << "\n";
  }
};

void describe_convergence(Outcome& o, const ex::Convergence& c) {
  if (!c.checked) {
    o.line("dt_halving_delta", "not checked");
    return;
  }
  o.line("dt_halving_delta", "fidelity " + sci(c.fidelity_delta) + ", trace distance " +
                                 sci(c.trace_distance) +
                                 (c.converged() ? " (converged)" : " (NOT converged)"));
}

void describe_monitors(Outcome& o, const dyn::Trajectory& traj) {
  const auto m = traj.extrema();
  o.line("monitors", "max_trace_dev " + sci(m.max_trace_deviation) + ", min_eig " +
                         sci(m.min_eigenvalue) + ", max_leakage " + sci(m.max_leakage) +
                         ", max_purity " + fmt(m.max_purity));
  if (traj.ok()) {
    o.line("status", "ok");
  } else {
    o.line("status", "FAILED at step " + std::to_string(traj.failure_step.value_or(0)) +
                         ": " + traj.failure_reason);
    o.physics_failed = true;
  }
}

ex::LoopSpec loop_spec(const RunConfig& cfg, double r0, double t3) {
  ex::LoopSpec spec = cfg.experiment == Experiment::cz ? ex::LoopSpec::controlled_z(t3)
                                                       : ex::LoopSpec::cphase(r0, t3);
  if (cfg.phi0) spec.phi0 = *cfg.phi0;
  if (cfg.t1) spec.t1 = *cfg.t1;
  if (cfg.t2) spec.t2 = *cfg.t2;
  return spec;
}

SweepRow run_point(const RunConfig& cfg, double r0, double t) {
  const ex::RunOptions opts = run_options(cfg);
  SweepRow row;
  row.r0 = r0;
  row.t = t;
  switch (cfg.experiment) {
    case Experiment::ramp:
    case Experiment::loop: {
      const auto rep = cfg.experiment == Experiment::ramp ? ex::run_ramp_fidelity(r0, t, opts)
                                                          : ex::run_loop_fidelity(r0, t, opts);
      row.phi0 = cfg.experiment == Experiment::ramp ? 0.0 : 2.0 * std::numbers::pi;
      row.fidelity = rep.fidelity;
      row.converged = rep.convergence.converged();
      row.ok = rep.ok();
      break;
    }
    default: {
      const ex::LoopSpec spec = loop_spec(cfg, r0, t);
      const auto rep = ex::run_cphase(spec, opts,
                                      cfg.experiment == Experiment::two_reservoirs
                                          ? ex::Reservoir::independent
                                          : ex::Reservoir::collective);
      row.r0 = spec.r0;
      row.phi0 = spec.phi0;
      row.fidelity = rep.fidelity;
      row.chi1 = rep.chi1;
      row.chi12 = rep.chi12;
      row.delta = rep.delta;
      row.has_phases = rep.phases_reliable;
      row.converged = rep.convergence.converged();
      row.ok = rep.ok();
      break;
    }
  }
  return row;
}

void run_sweep(const RunConfig& cfg, Outcome& o) {
  const double fixed_t = cfg.experiment == Experiment::ramp || cfg.experiment == Experiment::loop
                             ? cfg.t.value_or(0.0)
                             : cfg.t3.value_or(0.0);
  const std::vector<double> r0s =
      cfg.sweep_r0 ? cfg.sweep_r0->values()
                   : std::vector<double>{cfg.experiment == Experiment::cz ? model::cz_point()
                                                                          : cfg.r0.value_or(0.0)};
  const std::vector<double> ts = cfg.sweep_t ? cfg.sweep_t->values() : std::vector<double>{fixed_t};

  std::vector<std::pair<double, double>> grid;
  for (double r0 : r0s)
    for (double t : ts) grid.emplace_back(r0, t);

  // Workers fill rows by index; output order is the grid order.
  std::vector<SweepRow> rows(grid.size());
  std::vector<std::string> errors(grid.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        rows[i] = run_point(cfg, grid[i].first, grid[i].second);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(cfg.jobs, grid.size()));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (!e.empty()) throw std::invalid_argument(e);
  }

  o.line("sweep_points", std::to_string(rows.size()));
  for (const auto& row : rows) {
    o.summary << "  r0 " << fmt(row.r0) << "  T " << fmt(row.t) << "  phi0 " << fmt(row.phi0)
              << "  F " << fmt(row.fidelity);
    if (row.has_phases) {
      o.summary << "  chi1 " << fmt(row.chi1) << "  chi12 " << fmt(row.chi12) << "  Delta "
                << fmt(row.delta);
    }
    o.summary << (row.converged ? "" : "  NOT-CONVERGED") << (row.ok ? "" : "  FAILED") << "\n";
    if (!row.ok) o.physics_failed = true;
  }
  o.line("dt_halving_delta", "per point, see converged column");
  o.sweep = std::move(rows);
}

void run_fidelity(const RunConfig& cfg, Outcome& o, ex::FidelityReport& keep) {
  const ex::RunOptions opts = run_options(cfg);
  keep = cfg.experiment == Experiment::ramp ? ex::run_ramp_fidelity(*cfg.r0, *cfg.t, opts)
                                            : ex::run_loop_fidelity(*cfg.r0, *cfg.t, opts);
  o.line("r0", fmt(*cfg.r0));
  o.line("T", fmt(*cfg.t));
  o.line(cfg.experiment == Experiment::ramp ? "F_r" : "F_p", fmt(keep.fidelity));
  o.line("dt", fmt(keep.trajectory.dt));
  describe_convergence(o, keep.convergence);
  describe_monitors(o, keep.trajectory);
  o.trajectory = &keep.trajectory;
}

void run_gate(const RunConfig& cfg, Outcome& o, ex::GateReport& keep) {
  const ex::RunOptions opts = run_options(cfg);
  const ex::LoopSpec spec = loop_spec(cfg, cfg.r0.value_or(0.0), *cfg.t3);
  const auto reservoir = cfg.experiment == Experiment::two_reservoirs
                             ? ex::Reservoir::independent
                             : ex::Reservoir::collective;
  keep = ex::run_cphase(spec, opts, reservoir);
  o.line("reservoir", reservoir == ex::Reservoir::collective ? "collective" : "independent");
  o.line("r0", fmt(spec.r0));
  o.line("phi0", fmt(spec.phi0));
  o.line("T1,T2,T3", fmt(spec.t1) + "," + fmt(spec.t2) + "," + fmt(spec.t3));
  o.line("fidelity", fmt(keep.fidelity));
  if (cfg.experiment == Experiment::cz) {
    o.line("controlled_z_fidelity", fmt(ex::controlled_z_fidelity(keep)));
  }
  if (keep.phases_reliable) {
    o.line("chi1", fmt(keep.chi1) + " (expected " + fmt(ex::wrap_phase(keep.expected_chi1)) + ")");
    o.line("chi12",
           fmt(keep.chi12) + " (expected " + fmt(ex::wrap_phase(keep.expected_chi12)) + ")");
    o.line("Delta", fmt(keep.delta) + " (expected " + fmt(keep.expected_delta) + ")");
  } else {
    o.line("phases", "UNRELIABLE (|<e2|rho|e1>| = " + sci(keep.coherence) + ")");
  }
  describe_convergence(o, keep.convergence);
  describe_monitors(o, keep.trajectory);
  o.trajectory = &keep.trajectory;
}

void run_holonomy(const RunConfig& cfg, Outcome& o) {
  const double t3 = cfg.t3.value_or(1000.0);
  const ex::LoopSpec spec = loop_spec(cfg, *cfg.r0, t3);
  const dyn::Schedule schedule = spec.schedule();
  const auto u = dyn::adiabatic_propagate(schedule, cfg.steps);
  const auto u_fine = dyn::adiabatic_propagate(schedule, 2 * cfg.steps);
  double off = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) off = std::max(off, std::abs(u(i, j)));
  o.line("r0", fmt(spec.r0));
  o.line("phi0", fmt(spec.phi0));
  o.line("steps", std::to_string(cfg.steps));
  const double chi1 = std::arg(u(1, 1));
  const double chi12 = std::arg(u(3, 3));
  o.line("chi1", fmt(chi1) + " (expected " +
                     fmt(ex::wrap_phase(-model::nu1(spec.r0) * spec.phi0)) + ")");
  o.line("chi12", fmt(chi12) + " (expected " +
                      fmt(ex::wrap_phase(-model::nu12(spec.r0) * spec.phi0)) + ")");
  o.line("Delta", fmt(ex::wrap_phase(chi12 - 2.0 * chi1)));
  o.line("max_offdiagonal", sci(off));
  o.line("dt_halving_delta", "max |U(2 steps) - U(steps)| " +
                                 sci(linalg::max_abs(u_fine - u)));
  o.line("status", "ok");
}

void run_elimination(const RunConfig& cfg, Outcome& o, dyn::PreEliminationRun& keep) {
  const double r0 = *cfg.r0;
  const double phi = cfg.phi.value_or(0.0);
  const double duration = cfg.t.value_or(10.0);
  const auto& m = model::default_model();
  const Ket initial = 0.5 * (m.e_basis[0] + m.e_basis[1] + m.e_basis[2] + m.e_basis[9]);
  const dyn::DensityMatrix rho0 = dyn::pure_state(initial);

  dyn::EvolveOptions opts;
  opts.dt = cfg.dt;
  opts.sample_every = cfg.sample_every;
  const auto params = dyn::PreEliminationModel::from_reduced(r0, 1.0, cfg.kappa_ratio, cfg.n_max);
  keep = dyn::evolve_pre_elimination(params, phi, rho0, duration, opts);
  const auto doubled = dyn::evolve_pre_elimination(
      dyn::PreEliminationModel::from_reduced(r0, 1.0, cfg.kappa_ratio, 2 * cfg.n_max), phi, rho0,
      duration, opts);

  const dyn::Schedule schedule = dyn::Schedule::constant(r0, phi, duration);
  const auto reduced = dyn::evolve(rho0, schedule, 1.0, opts);
  opts.dt *= 0.5;
  const auto reduced_fine = dyn::evolve(rho0, schedule, 1.0, opts);

  o.line("r0", fmt(r0));
  o.line("phi", fmt(phi));
  o.line("T", fmt(duration));
  o.line("beta_r,beta_s,kappa", fmt(params.beta_r) + "," + fmt(params.beta_s) + "," +
                                    fmt(params.kappa));
  o.line("trace_distance_vs_reduced",
         fmt(linalg::trace_distance(keep.reduced_final, reduced.final_state)));
  o.line("cutoff_doubling_delta",
         sci(linalg::trace_distance(keep.reduced_final, doubled.reduced_final)));
  o.line("mean_photon_number", sci(keep.mean_photon_number));
  o.line("dt_halving_delta", "reduced model trace distance " +
                                 sci(linalg::trace_distance(reduced.final_state,
                                                            reduced_fine.final_state)));
  describe_monitors(o, keep.trajectory);
  if (!reduced.ok() || !doubled.trajectory.ok()) o.physics_failed = true;
  o.trajectory = &keep.trajectory;
}

void run_feasibility(const RunConfig& cfg, Outcome& o) {
  const double t3 = cfg.t3.value_or(1100.0);
  const auto rep = ex::feasibility(cfg.physical, t3);
  o.line("beta_MHz", fmt(rep.beta));
  o.line("Gamma_MHz", fmt(rep.gamma_reduced));
  o.line("gamma_eff_MHz", sci(rep.gamma_eff));
  o.line("kappa_eff_MHz", sci(rep.kappa_eff));
  o.line("Gamma_over_gamma_eff", sci(rep.gamma_ratio));
  o.line("T3_over_inverse_Gamma", fmt(t3));
  o.line("gate_time_ms", fmt(rep.gate_time_ms));
  o.line("kappa_eff_below_gamma_eff", rep.kappa_eff_below_gamma_eff ? "yes" : "no");
  for (const auto& w : rep.warnings) o.line("warning", w);
  o.line("dt_halving_delta", "n/a (no time integration)");
  o.line("status", "ok");
}

void run_dfs_check(const RunConfig& cfg, Outcome& o) {
  const auto& m = model::default_model();
  const double r = *cfg.r0;
  const double phi = *cfg.phi;
  const auto jump = model::jump_operator(m, r, phi);
  double worst = 0.0;
  std::vector<Ket> dark;
  for (int j = 1; j <= model::kDfsDim; ++j) {
    dark.push_back(model::dfs_state(m, j, r, phi));
    worst = std::max(worst, (jump * dark.back()).norm());
  }
  std::vector<Ket> e_span(m.e_basis.begin(), m.e_basis.end());
  const auto kernel = linalg::nullspace(jump);
  o.line("r0", fmt(r));
  o.line("phi", fmt(phi));
  o.line("max_norm_R_psi_dark", sci(worst));
  o.line("kernel_dim_full_space", std::to_string(kernel.size()));
  o.line("kernel_dim_in_e_span",
         std::to_string(linalg::intersection_dimension(kernel, e_span)));
  o.line("kernel_contains_dark_states",
         linalg::intersection_dimension(kernel, dark) == dark.size() ? "yes" : "no");
  o.line("dt_halving_delta", "n/a (no time integration)");
  const bool pass = worst <= 1e-10;
  o.line("status", pass ? "ok" : "FAILED (dark states not annihilated)");
  if (!pass) o.physics_failed = true;
}

}  // namespace

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "r0,T,phi0,fidelity,chi1,chi12,Delta,converged\n";
  char buf[256];
  for (const auto& r : rows) {
    if (r.has_phases) {
      std::snprintf(buf, sizeof buf, "%.12e,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e,%d\n", r.r0,
                    r.t, r.phi0, r.fidelity, r.chi1, r.chi12, r.delta, r.converged ? 1 : 0);
    } else {
      std::snprintf(buf, sizeof buf, "%.12e,%.12e,%.12e,%.12e,,,,%d\n", r.r0, r.t, r.phi0,
                    r.fidelity, r.converged ? 1 : 0);
    }
    os << buf;
  }
}

int run(const RunConfig& cfg, std::ostream& out) {
  Outcome o;
  o.line("experiment", to_string(cfg.experiment));

  ex::FidelityReport fidelity_report;
  ex::GateReport gate_report;
  dyn::PreEliminationRun elimination;

  const bool sweep = cfg.sweep_r0 || cfg.sweep_t;
  switch (cfg.experiment) {
    case Experiment::ramp:
    case Experiment::loop:
      if (sweep) run_sweep(cfg, o);
      else run_fidelity(cfg, o, fidelity_report);
      break;
    case Experiment::cphase:
    case Experiment::cz:
    case Experiment::two_reservoirs:
      if (sweep) run_sweep(cfg, o);
      else run_gate(cfg, o, gate_report);
      break;
    case Experiment::holonomy:
      run_holonomy(cfg, o);
      break;
    case Experiment::validate_elimination:
      run_elimination(cfg, o, elimination);
      break;
    case Experiment::feasibility:
      run_feasibility(cfg, o);
      break;
    case Experiment::dfs_check:
      run_dfs_check(cfg, o);
      break;
  }

  const std::string summary = o.summary.str();
  out << summary;

  const std::filesystem::path dir(cfg.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::ofstream(dir / "summary.txt") << summary;
  if (cfg.csv) {
    if (!o.sweep.empty()) {
      std::ofstream csv(dir / "sweep.csv");
      write_sweep_csv(csv, o.sweep);
    } else if (o.trajectory != nullptr) {
      std::ofstream csv(dir / "trajectory.csv");
      o.trajectory->write_csv(csv);
    }
  }
  return o.physics_failed ? kExitPhysics : kExitOk;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = parse_config(args);
    return run(cfg, out);
  } catch (const HelpRequested& help) {
    out << help.text;
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "darkloop: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "darkloop: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace darkloop::cli
