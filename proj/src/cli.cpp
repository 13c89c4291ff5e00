#include "sgns/cli.hpp"

#include "sgns/convergence.hpp"
#include "sgns/csv_io.hpp"
#include "sgns/diagnostics.hpp"
#include "sgns/errors.hpp"
#include "sgns/lemma_suite.hpp"
#include "sgns/parallel.hpp"
#include "sgns/perturbation.hpp"
#include "sgns/solver.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace sgns {

namespace fs = std::filesystem;

fs::path resolve_output_directory(const RunManifest& manifest, const RunConfig& config) {
  if (manifest.output_directory) return *manifest.output_directory;
  const fs::path dir = config.solver.output.directory;
  if (const char* root = std::getenv(kOutputRootVariable); root != nullptr && *root != '\0') {
    return fs::path(root) / dir;
  }
  return dir;
}

namespace {

// Summary files use the same "key = value" layout as the lemma report.
void write_summary(const fs::path& path, const std::vector<std::pair<std::string, std::string>>& entries,
                   std::uint64_t seed, std::ostream& log) {
  write_file(path, [&](std::ostream& out) {
    write_preamble(out, seed);
    for (const auto& [k, v] : entries) out << k << " = " << v << '\n';
  });
  for (const auto& [k, v] : entries) log << k << " = " << v << '\n';
}

std::string flag(bool b) { return b ? "true" : "false"; }

std::string seconds_since(std::chrono::steady_clock::time_point start) {
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream out;
  out.precision(3);
  out << std::fixed << s << " s";
  return out.str();
}

// ---------------------------------------------------------------------------

int run_solve(const RunConfig& config, const fs::path& dir, std::ostream& log) {
  const SolverConfig& c = config.solver;
  const auto start = std::chrono::steady_clock::now();
  const Trajectory traj = solve(c);
  const std::uint64_t seed = c.seed;

  write_file(dir / "config.json", [&](std::ostream& out) { out << config_to_json(config); });
  write_csv_file(dir / "basis.csv", seed, [&](std::ostream& out) { traj.basis.write_manifest_csv(out); });

  static const std::vector<std::pair<std::string, std::string>> columns{
      {"energy", "velocity^2*density*area"},
      {"dissipation", "velocity^2"},
      {"forcing_power", "velocity^2*density*area/time"},
      {"energy_residual", "velocity^2*density*area"},
      {"galerkin_residual", "1"},
      {"rho_min", "density"},
      {"rho_max", "density"},
      {"mass", "density*area"}};
  write_csv_file(dir / "trajectory.csv", seed, [&](std::ostream& out) {
    std::vector<std::string> names{"t"}, units{"time"};
    for (const auto& [name, unit] : columns) {
      names.push_back(name);
      units.push_back(unit);
    }
    CsvWriter csv(out, names, units);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      std::vector<CsvCell> row{traj.times[i]};
      for (const auto& col : columns) row.emplace_back(traj.series.at(col.first)[i]);
      csv.row(row);
    }
  });
  write_csv_file(dir / "velocity.csv", seed, [&](std::ostream& out) {
    CsvWriter csv(out, {"t", "index", "coefficient"}, {"time", "count", "velocity*length"});
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      const Eigen::VectorXd& coeff = traj.velocity[i].coefficients;
      for (Eigen::Index j = 0; j < coeff.size(); ++j) csv.row({traj.times[i], static_cast<std::int64_t>(j), coeff[j]});
    }
  });
  write_csv_file(dir / "monitors.csv", seed, [&](std::ostream& out) { attach_monitors(traj).write_csv(out); });

  // Density snapshots in the binary layout, the final state also as CSV.
  for (std::size_t k = 0; k < traj.density.size(); ++k) {
    const std::size_t step = traj.density_index[k] * traj.stride;
    write_file(dir / "snapshots" / ("density_" + std::to_string(step) + ".bin"),
               [&](std::ostream& out) { write_binary(out, traj.density[k].values); });
  }
  FieldTransform transform(traj.basis, c.grid_size);
  const VectorGridField u_final = transform.synthesize(traj.velocity.back());
  write_csv_file(dir / "snapshots" / "density_final.csv", seed,
                 [&](std::ostream& out) { write_csv(out, traj.density.back().values); });
  write_csv_file(dir / "snapshots" / "velocity_final.csv", seed, [&](std::ostream& out) { write_csv(out, u_final); });

  // The run passes when the state stayed finite, the density respected its
  // bounds and every stored state satisfies the Galerkin equations.
  const double alpha = c.initial_density.alpha;
  const double beta = c.initial_density.beta;
  double rho_lo = kInfinity, rho_hi = -kInfinity, galerkin = 0.0;
  bool finite = true;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    rho_lo = std::min(rho_lo, traj.series.at("rho_min")[i]);
    rho_hi = std::max(rho_hi, traj.series.at("rho_max")[i]);
    galerkin = std::max(galerkin, traj.series.at("galerkin_residual")[i]);
    finite = finite && traj.velocity[i].finite();
  }
  const bool bounds_ok = rho_lo >= alpha - 1e-12 && rho_hi <= beta + 1e-12;
  const bool galerkin_ok = galerkin <= 1e-8;
  const bool pass = finite && bounds_ok && galerkin_ok;
  write_summary(dir / "summary.txt",
                {{"steps", std::to_string(c.step_count())},
                 {"basis_size", std::to_string(c.basis_size)},
                 {"final_energy", format_number(traj.series.at("energy").back())},
                 {"density.min", format_number(rho_lo)},
                 {"density.max", format_number(rho_hi)},
                 {"density.within_bounds", flag(bounds_ok)},
                 {"galerkin_residual.max", format_number(galerkin)},
                 {"galerkin_residual.pass", flag(galerkin_ok)},
                 {"finite", flag(finite)},
                 {"elapsed", seconds_since(start)},
                 {"pass", flag(pass)}},
                seed, log);
  return pass ? kExitPass : kExitCheckFailure;
}

// ---------------------------------------------------------------------------

int run_converge(const RunConfig& config, std::optional<std::size_t> threads, const fs::path& dir,
                 std::ostream& log) {
  if (!config.study) throw ConfigError("study", "the converge command needs a study block");
  const StudySection& s = *config.study;
  const SolverConfig& c = config.solver;
  const auto start = std::chrono::steady_clock::now();
  StudyPlan plan = plan_from_shells(c, s.n_shells, s.n_ref_shell, s.r_list, s.p0,
                                    s.times.empty() ? std::vector<double>{0.0, c.t_end} : s.times);
  plan.threads = threads.value_or(s.threads);
  plan.budget_seconds = s.budget_seconds;
  const ConvergenceReport report = run_study(plan);

  write_csv_file(dir / "convergence.csv", c.seed, [&](std::ostream& out) { report.write_csv(out); });

  std::vector<std::pair<std::string, std::string>> entries;
  auto list = [](const auto& values) {
    std::ostringstream out;
    for (std::size_t i = 0; i < values.size(); ++i) out << (i ? " " : "") << values[i];
    return out.str();
  };
  entries.emplace_back("study.n_list", list(plan.n_list));
  entries.emplace_back("study.n_ref", std::to_string(plan.n_ref));
  entries.emplace_back("study.p0", std::isinf(plan.p0) ? "inf" : format_number(plan.p0));
  entries.emplace_back("study.completed_n", list(report.completed_n));
  entries.emplace_back("study.partial", flag(report.partial));

  bool pass = !report.partial;
  if (!report.partial) {
    const bool bounded = report.velocity_bounded(2.0);
    const bool decreasing = report.velocity_decreasing();
    bool slopes = true;
    for (double t : plan.times) {
      if (t <= 0.0) continue;
      std::vector<double> lambda, errors;
      for (std::size_t n : plan.n_list) {
        lambda.push_back(report.lambda_next(n));
        errors.push_back(report.velocity_error(n, t));
      }
      const RateFit fit = fit_rate(lambda, errors);
      const std::string at = "[t=" + format_number(t) + "]";
      entries.emplace_back("velocity.slope" + at, format_number(fit.slope));
      entries.emplace_back("velocity.constant" + at, format_number(fit.constant));
      slopes = slopes && fit.slope <= -0.5;
    }
    entries.emplace_back("velocity.normalized_bounded_2x", flag(bounded));
    entries.emplace_back("velocity.strictly_decreasing", flag(decreasing));
    entries.emplace_back("velocity.slope_at_most_minus_half", flag(slopes));
    const bool zero = report.density_zero_at_start();
    entries.emplace_back("density.zero_at_start", flag(zero));
    pass = bounded && decreasing && slopes && zero;
    for (double r : plan.r_list) {
      const GrowthCheck g = check_density_growth(report, r);
      const std::string at = "[r=" + format_number(r) + "]";
      entries.emplace_back("density.t_fit" + at, format_number(g.t_fit));
      entries.emplace_back("density.c_fit" + at, format_number(g.c_fit));
      entries.emplace_back("density.worst_ratio" + at, format_number(g.worst_ratio));
      entries.emplace_back("density.linear_growth" + at, flag(g.pass));
      pass = pass && g.pass;
    }
  }
  entries.emplace_back("elapsed", seconds_since(start));
  entries.emplace_back("pass", flag(pass));
  write_summary(dir / "summary.txt", entries, c.seed, log);
  return pass ? kExitPass : kExitCheckFailure;
}

// ---------------------------------------------------------------------------

int run_perturb(const RunConfig& config, std::optional<std::size_t> threads, const fs::path& dir,
                std::ostream& log) {
  if (!config.perturbation) throw ConfigError("perturbation", "the perturb command needs a perturbation block");
  const PerturbationSection& p = *config.perturbation;
  const SolverConfig& c = config.solver;
  const SpectralBasis basis = build_basis(c.basis_size);

  struct Job {
    std::uint64_t seed;
    double t0;
    StabilityEstimate estimate;
    std::vector<double> eta_norm;
  };
  std::vector<Job> jobs;
  for (std::uint64_t seed : p.seeds) {
    for (double t0 : p.t0_list) jobs.push_back({seed, t0, {}, {}});
  }

  // Inadmissible requests are input errors; catch them before any run starts.
  std::vector<PerturbationSpec> specs;
  for (const Job& job : jobs) {
    try {
      specs.push_back(make_perturbation(p.parameters(job.t0), basis, c.grid_size, job.seed));
    } catch (const InvalidArgument& e) {
      throw ConfigError("perturbation", e.what());
    }
  }
  const std::size_t workers = threads.value_or(1);
  parallel_for(jobs.size(), workers, [&](std::size_t k) {
    const PerturbedRun run = run_perturbed(c, specs[k], p.horizon);
    jobs[k].estimate = estimate_decay(run, p.p0);
    jobs[k].eta_norm = eta_gradient_norm(run.eta, p.p0);
  });

  write_csv_file(dir / "perturbation.csv", c.seed, [&](std::ostream& out) {
    CsvWriter csv(out, {"seed", "t0", "s", "F_hat", "eta_grad_norm"}, {"1", "time", "time", "1", "density/length"});
    for (const Job& job : jobs) {
      for (std::size_t i = 0; i < job.estimate.s.size(); ++i) {
        csv.row({static_cast<std::int64_t>(job.seed), job.t0, job.estimate.s[i], job.estimate.F_hat[i],
                 job.eta_norm[i]});
      }
    }
  });

  std::vector<std::pair<std::string, std::string>> entries;
  bool all_decayed = true;
  for (const Job& job : jobs) {
    const std::string at = "[seed=" + std::to_string(job.seed) + ",t0=" + format_number(job.t0) + "]";
    entries.emplace_back("F_hat_at_horizon" + at, format_number(job.estimate.F_hat.back()));
    entries.emplace_back("M1_hat" + at, format_number(job.estimate.M1_hat));
    entries.emplace_back("M2_hat" + at, format_number(job.estimate.M2_hat));
    entries.emplace_back("decayed" + at, flag(job.estimate.decayed));
    all_decayed = all_decayed && job.estimate.decayed;
  }
  entries.emplace_back("decay_threshold", format_number(kDecayThreshold));
  entries.emplace_back("pass", flag(all_decayed));
  write_summary(dir / "summary.txt", entries, c.seed, log);
  return all_decayed ? kExitPass : kExitCheckFailure;
}

// ---------------------------------------------------------------------------

int run_check_lemmas(std::uint64_t seed, const fs::path& dir, std::ostream& log) {
  const SuiteReport report = default_lemma_suite(seed);
  write_summary(dir / "lemmas.txt", report.entries, seed, log);
  return report.pass ? kExitPass : kExitCheckFailure;
}

}  // namespace

int run(const RunManifest& manifest, std::ostream& log, std::ostream& err) {
  try {
    RunConfig config;
    if (manifest.config_path) {
      config = parse_config(*manifest.config_path);
    } else if (manifest.command != "check-lemmas") {
      throw ConfigError("", "--config is required for " + manifest.command);
    }
    if (manifest.seed) config.solver.seed = *manifest.seed;
    if (manifest.threads && *manifest.threads == 0) throw ConfigError("threads", "must be >= 1");
    const fs::path dir = resolve_output_directory(manifest, config);

    if (manifest.command == "solve") return run_solve(config, dir, log);
    if (manifest.command == "converge") return run_converge(config, manifest.threads, dir, log);
    if (manifest.command == "perturb") return run_perturb(config, manifest.threads, dir, log);
    if (manifest.command == "check-lemmas") {
      // Without a config or --seed the suite runs with seed 1.
      const bool seeded = manifest.config_path.has_value() || manifest.seed.has_value();
      return run_check_lemmas(seeded ? config.solver.seed : 1, dir, log);
    }
    throw ConfigError("", "unknown command '" + manifest.command + "'");
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const InvalidArgument& e) {
    // Inputs that pass parsing but are rejected by a solver precondition.
    err << "invalid input: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailure;
  }
}

int run_command_line(int argc, char** argv) {
  CLI::App app{"Spectral semi-Galerkin solver for variable-density incompressible flow on the torus"};
  app.require_subcommand(1);
  RunManifest manifest;
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  struct Command {
    const char* name;
    const char* help;
    bool needs_config;
  };
  const Command commands[] = {
      {"solve", "Integrate one run and write trajectory, monitors and snapshots", true},
      {"converge", "Run the reference/truncation convergence study", true},
      {"perturb", "Evolve seeded perturbations and estimate their decay envelope", true},
      {"check-lemmas", "Run the seeded inequality check suite", false},
  };
  for (const Command& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    auto* config_opt = sub->add_option("--config", config_path, "JSON run description");
    if (cmd.needs_config) config_opt->required();
    sub->add_option("--out", out_dir, "Output directory (overrides the config and SGNS_OUTPUT_ROOT)");
    sub->add_option("--seed", seed, "Seed overriding the config");
    sub->add_option("--threads", threads, "Worker threads for independent runs")->check(CLI::PositiveNumber);
    sub->callback([&, sub, name = std::string(cmd.name)] {
      manifest.command = name;
      if (sub->count("--config")) manifest.config_path = config_path;
      if (sub->count("--out")) manifest.output_directory = out_dir;
      if (sub->count("--seed")) manifest.seed = seed;
      if (sub->count("--threads")) manifest.threads = threads;
    });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfigError;
  }
  return run(manifest, std::cout, std::cerr);
}

}  // namespace sgns
