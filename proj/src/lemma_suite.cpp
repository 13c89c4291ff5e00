#include "sgns/lemma_suite.hpp"

#include "sgns/catalog.hpp"
#include "sgns/convergence.hpp"
#include "sgns/csv_io.hpp"
#include "sgns/diagnostics.hpp"
#include "sgns/errors.hpp"
#include "sgns/solver.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace sgns {

RautmannSuite rautmann_suite(std::size_t trials, std::size_t basis_size, std::uint64_t seed) {
  if (basis_size < 2) throw InvalidArgument("rautmann_suite: basis_size must be >= 2");
  const SpectralBasis basis = build_basis(basis_size);
  SeededRandom rng(seed);
  RautmannSuite out;
  out.trials = trials;
  out.basis_size = basis_size;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    // Envelopes from flat to steep, and every fourth spectrum sparse.
    const double decay = 2.0 * rng.uniform();
    const bool sparse = trial % 4 == 3;
    SpectralVelocity v(basis_size);
    for (std::size_t j = 0; j < basis_size; ++j) {
      if (sparse && rng.uniform() < 0.7) continue;
      v.coefficients[static_cast<Eigen::Index>(j)] = rng.normal() * std::pow(1.0 + basis.eigenvalue(j), -decay);
    }
    for (std::size_t k = 0; k < basis_size; ++k) {
      out.max_ratio = std::max(out.max_ratio, rautmann_check(v, basis, k).max());
    }
  }
  for (std::size_t k = 0; k < basis_size; ++k) {
    SpectralVelocity e(basis_size);
    e.coefficients[static_cast<Eigen::Index>(k)] = 1.0;
    const RautmannRatios r = rautmann_check(e, basis, k);
    for (double ratio : {r.tail_vs_gradient, r.tail_vs_stokes, r.tail_gradient_vs_stokes}) {
      out.single_mode_defect = std::max(out.single_mode_defect, std::abs(ratio - 1.0));
    }
  }
  out.pass = out.max_ratio <= 1.0 + 1e-12 && out.single_mode_defect <= 1e-12;
  return out;
}

std::pair<std::vector<double>, std::vector<double>> spike_train(double base, double a2, double w, double dt,
                                                                double t_end) {
  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  const auto width_steps = static_cast<long long>(std::llround(w / dt));
  std::vector<double> t(steps + 1), h(steps + 1, base);
  // The w/dt + 1 spike samples of one pulse carry trapezoid mass
  // height * (w + dt); this height makes that exactly a2.
  const double height = a2 / (w + dt);
  for (std::size_t k = 0; k <= steps; ++k) {
    t[k] = static_cast<double>(k) * dt;
    // Sample k lies in a spike when some integer j has j - w <= t_k <= j.
    const auto per_unit = static_cast<long long>(std::llround(1.0 / dt));
    const long long phase = (per_unit - static_cast<long long>(k) % per_unit) % per_unit;
    if (k > 0 && phase <= width_steps) h[k] += height;
  }
  return {t, h};
}

WeightedBoundSuite weighted_bound_suite(std::size_t families, std::uint64_t seed) {
  WeightedBoundSuite out;
  out.families = families;
  {
    const double dt = 1e-3;
    std::vector<double> t, h;
    for (std::size_t k = 0; k <= 30000; ++k) {
      t.push_back(static_cast<double>(k) * dt);
      h.push_back(1.0);
    }
    out.constant_sup = weighted_bound_check(t, h, 1.0, 0.0).sup_value;
  }
  bool all = true;
  SeededRandom rng(seed);
  for (std::size_t f = 0; f < families; ++f) {
    const double dt = 1e-3;
    const double base = 2.0 * rng.uniform();
    const double a2 = 0.1 + 2.0 * rng.uniform();
    const double w = dt * static_cast<double>(1 + static_cast<int>(rng.uniform() * 100.0));
    const auto [t, h] = spike_train(base, a2, w, dt, 12.0);
    // A window shorter than one period can clip two pulses; a1 = base + 2 a2
    // covers that.
    const WeightedBoundResult r = weighted_bound_check(t, h, base + 2.0 * a2, a2);
    out.worst_fraction = std::max(out.worst_fraction, r.sup_value / r.bound);
    all = all && r.pass;
  }
  out.pass = all && std::abs(out.constant_sup - 1.0) <= 1e-6;
  return out;
}

MassSpectrumSuite mass_spectrum_suite(std::size_t basis_size, int grid_size, double alpha, double beta,
                                      std::uint64_t seed) {
  const SpectralBasis basis = build_basis(basis_size);
  SeededRandom rng(seed);
  GridField g(grid_size);
  for (double& v : g.values) v = alpha + (beta - alpha) * rng.uniform();
  const Eigen::MatrixXd m = assemble_mass_matrix(DensityField(g, alpha, beta), basis, basis_size);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  const Eigen::MatrixXd unit =
      assemble_mass_matrix(DensityField(GridField(grid_size, 1.0), 1.0, 1.0), basis, basis_size);

  MassSpectrumSuite out;
  out.basis_size = basis_size;
  out.min_eigenvalue = eig.eigenvalues().minCoeff();
  out.max_eigenvalue = eig.eigenvalues().maxCoeff();
  out.identity_defect =
      (unit - Eigen::MatrixXd::Identity(unit.rows(), unit.cols())).cwiseAbs().maxCoeff();
  out.pass = out.min_eigenvalue >= alpha - 1e-8 && out.max_eigenvalue <= beta + 1e-8 && out.identity_defect <= 1e-10;
  return out;
}

DecompositionSuite decomposition_suite(std::uint64_t seed) {
  SolverConfig c;
  c.grid_size = 32;
  c.dt = 0.01;
  c.t_end = 0.2;
  c.seed = seed;
  c.initial_velocity.catalog = "smooth_random";
  c.initial_density = {"blob", 0.5, 1.5, 1.0, 0.6};
  c.forcing.kind = ForcingSpec::Kind::Steady;
  c.forcing.amplitude = 1.0;
  c.forcing.modes = {{1, 1, Phase::Cosine}, {2, -1, Phase::Sine}};
  c.output.stride = 5;

  const std::size_t n = modes_up_to_shell(9);
  c.basis_size = n;
  const Trajectory approx = solve(c);
  const Trajectory ref = reference_solve(c, modes_up_to_shell(25));
  const ErrorDecomposition d = decompose(ref, approx, n);

  DecompositionSuite out;
  out.max_gradient_tail = d.max_gradient_tail();
  out.max_l2_tail = d.max_l2_tail();
  for (std::size_t i = 0; i < d.times.size(); ++i) {
    const double l2 = norms(ref.velocity[i], ref.basis).l2;
    out.max_parseval_defect = std::max(out.max_parseval_defect, d.parseval_defect[i] / std::max(l2 * l2, 1e-300));
  }
  out.pass = out.max_gradient_tail <= 1.0 + 1e-12 && out.max_l2_tail <= 1.0 + 1e-12 && out.max_parseval_defect <= 1e-12;
  return out;
}

namespace {

std::string flag(bool b) { return b ? "true" : "false"; }

}  // namespace

SuiteReport default_lemma_suite(std::uint64_t seed) {
  SuiteReport report;
  auto add = [&](const std::string& key, const std::string& value) { report.entries.emplace_back(key, value); };
  auto num = [&](const std::string& key, double value) { add(key, format_number(value)); };

  const RautmannSuite r = rautmann_suite(1000, 48, seed);
  add("rautmann.trials", std::to_string(r.trials));
  add("rautmann.basis_size", std::to_string(r.basis_size));
  num("rautmann.max_ratio", r.max_ratio);
  num("rautmann.single_mode_defect", r.single_mode_defect);
  add("rautmann.pass", flag(r.pass));

  const WeightedBoundSuite l = weighted_bound_suite(50, seed);
  num("weighted_bound.constant", kWeightedBoundConstant);
  num("weighted_bound.constant_h.sup", l.constant_sup);
  add("weighted_bound.spike_families", std::to_string(l.families));
  num("weighted_bound.spike_worst_fraction_of_bound", l.worst_fraction);
  add("weighted_bound.pass", flag(l.pass));

  const MassSpectrumSuite m = mass_spectrum_suite(64, 32, 0.5, 1.5, seed);
  add("mass_matrix.basis_size", std::to_string(m.basis_size));
  num("mass_matrix.min_eigenvalue", m.min_eigenvalue);
  num("mass_matrix.max_eigenvalue", m.max_eigenvalue);
  num("mass_matrix.identity_defect", m.identity_defect);
  add("mass_matrix.pass", flag(m.pass));

  const DecompositionSuite d = decomposition_suite(seed);
  num("decomposition.max_gradient_tail_ratio", d.max_gradient_tail);
  num("decomposition.max_l2_tail_ratio", d.max_l2_tail);
  num("decomposition.max_parseval_defect", d.max_parseval_defect);
  add("decomposition.pass", flag(d.pass));

  report.pass = r.pass && l.pass && m.pass && d.pass;
  add("pass", flag(report.pass));
  return report;
}

}  // namespace sgns
