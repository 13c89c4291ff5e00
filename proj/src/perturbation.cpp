#include "sgns/perturbation.hpp"

#include "sgns/catalog.hpp"
#include "sgns/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sgns {

namespace {

std::size_t steps_for(double span, double dt, const char* what) {
  const double ratio = span / dt;
  if (!(span >= 0.0) || std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
    throw InvalidArgument(std::string(what) + " must be a non-negative multiple of dt");
  }
  return static_cast<std::size_t>(std::llround(ratio));
}

double grid_max_abs(const GridField& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

void PerturbationSpec::validate(const SpectralBasis& basis) const {
  if (!(p0 >= 6.0)) throw InvalidArgument("perturbation p0 must be >= 6");
  const Norms nx = norms(xi0, basis);
  if (!(nx.dirichlet < delta)) throw InvalidArgument("perturbation violates ||grad xi0|| < delta");
  if (!(nx.stokes < A)) throw InvalidArgument("perturbation violates ||P Laplace xi0|| < A");
  if (!(grid_max_abs(eta0) < B)) throw InvalidArgument("perturbation violates ||eta0||_inf < B");
}

PerturbationSpec make_perturbation(const PerturbationParameters& params, const SpectralBasis& basis, int n,
                                   std::uint64_t seed) {
  if (!(params.delta > 0.0) || !(params.A > 0.0) || !(params.B > 0.0)) {
    throw InvalidArgument("make_perturbation: delta, A and B must be positive");
  }
  if (!(params.p0 >= 6.0)) throw InvalidArgument("make_perturbation: p0 must be >= 6");

  std::vector<std::size_t> band;
  if (params.single_mode) {
    if (*params.single_mode >= basis.size()) throw InvalidArgument("make_perturbation: single mode outside basis");
    band.push_back(*params.single_mode);
  } else {
    for (std::size_t j = 0; j < basis.size() && basis.eigenvalue(j) <= params.band_shell; ++j) band.push_back(j);
  }
  if (band.empty()) throw InvalidArgument("make_perturbation: empty perturbation band");
  const double lambda_min = basis.eigenvalue(band.front());
  const double target = 0.9 * params.delta;
  // Every xi0 in the band has ||P Laplace xi0|| >= sqrt(lambda_min) ||grad xi0||.
  if (target * std::sqrt(lambda_min) >= params.A) {
    throw InvalidArgument("make_perturbation: ||grad xi0|| = 0.9 delta forces ||P Laplace xi0|| >= A in this band");
  }

  SeededRandom rng(mix64(seed ^ 0x7065727475726232ULL));
  SpectralVelocity xi(basis.size());
  for (std::size_t j : band) xi.coefficients[static_cast<Eigen::Index>(j)] = rng.normal();
  auto rescale = [&] {
    const double g = norms(xi, basis).dirichlet;
    if (g == 0.0) throw InternalError("make_perturbation: degenerate draw");
    xi.coefficients *= target / g;
  };
  rescale();
  // Tilt towards the bottom of the band until the Stokes norm fits under A.
  for (int iter = 0; norms(xi, basis).stokes >= params.A; ++iter) {
    if (iter == 200) throw InternalError("make_perturbation: tilt loop did not converge");
    for (std::size_t j : band) xi.coefficients[static_cast<Eigen::Index>(j)] *= lambda_min / basis.eigenvalue(j);
    rescale();
  }

  GridField eta(n);
  if (params.eta_wavenumber > 0) {
    const int K = params.eta_wavenumber;
    std::vector<std::tuple<int, int, double, double>> terms;
    for (int k1 = 0; k1 <= K; ++k1)
      for (int k2 = -K; k2 <= K; ++k2) {
        if (!is_canonical_wavevector(k1, k2)) continue;
        const double a = rng.normal();
        const double b = rng.normal();
        terms.emplace_back(k1, k2, a, b);
      }
    eta = GridField::sample(n, [&](double x, double y) {
      double v = 0.0;
      for (const auto& [k1, k2, a, b] : terms) v += a * std::cos(k1 * x + k2 * y) + b * std::sin(k1 * x + k2 * y);
      return v;
    });
    const double m = grid_max_abs(eta);
    for (double& v : eta.values) v *= 0.9 * params.B / m;
  }

  PerturbationSpec spec{params.t0, std::move(xi), std::move(eta), params.delta, params.A, params.B, params.p0};
  spec.validate(basis);
  return spec;
}

PerturbationSpec zero_perturbation(double t0, std::size_t basis_size, int n) {
  return {t0, SpectralVelocity(basis_size), GridField(n), 1.0, 1.0, 1.0, kInfinity};
}

PerturbedRun run_perturbed(const SolverConfig& base, const PerturbationSpec& spec, double horizon,
                           const SolveOptions& options) {
  base.validate();
  const std::size_t steps0 = steps_for(spec.t0, base.dt, "t0");
  const std::size_t steps = steps_for(horizon, base.dt, "horizon");
  if (spec.xi0.basis_size() != base.basis_size) throw InvalidArgument("run_perturbed: xi0 size differs from basis");
  if (spec.eta0.n != base.grid_size) throw InvalidArgument("run_perturbed: eta0 grid differs from config");

  SolverState start;
  {
    SolverConfig to_t0 = base;
    to_t0.t_end = static_cast<double>(steps0) * base.dt;
    to_t0.output.stride = steps0 == 0 ? 1 : steps0;
    to_t0.output.density_stride = 0;
    start = solve(to_t0, options).final_state();
  }

  SolverState perturbed = start;
  perturbed.velocity.coefficients += spec.xi0.coefficients;
  GridField rho_hat = start.density.values;
  for (std::size_t p = 0; p < rho_hat.values.size(); ++p) rho_hat.values[p] += spec.eta0.values[p];
  const auto [lo, hi] = std::minmax_element(rho_hat.values.begin(), rho_hat.values.end());
  if (!(*lo > 0.0)) throw InvalidArgument("run_perturbed: rho(t0) + eta0 is not strictly positive");
  // Keep the base bounds inside the limiter range: with eta0 = 0 both runs
  // then clamp identically and xi stays exactly zero.
  const double alpha = std::min(*lo, start.density.alpha), beta = std::max(*hi, start.density.beta);
  perturbed.density = DensityField(std::move(rho_hat), alpha, beta);

  SolverConfig window = base;
  window.output.density_stride = base.output.stride;
  PerturbedRun out;
  out.base = solve_from(window, start, steps, options);
  out.perturbed = solve_from(window, perturbed, steps, options);
  for (std::size_t i = 0; i < out.base.times.size(); ++i) {
    out.s.push_back(out.base.times[i] - start.t);
    out.xi.emplace_back(out.perturbed.velocity[i].coefficients - out.base.velocity[i].coefficients);
    out.xi_rate.emplace_back(out.perturbed.velocity_rate[i].coefficients - out.base.velocity_rate[i].coefficients);
    out.eta.push_back(out.perturbed.density[i].values - out.base.density[i].values);
  }
  return out;
}

StabilityEstimate estimate_decay(const std::vector<double>& s, const std::vector<double>& gradient_norms) {
  if (s.size() != gradient_norms.size() || s.empty()) throw InvalidArgument("estimate_decay: series size mismatch");
  const double g0 = gradient_norms.front();
  if (!(g0 > 0.0)) throw InvalidArgument("estimate_decay: ||grad xi0|| must be nonzero");
  StabilityEstimate e;
  e.s = s;
  e.F_hat.resize(s.size());
  double running = 0.0;
  for (std::size_t i = s.size(); i-- > 0;) {
    running = std::max(running, gradient_norms[i] / g0);
    e.F_hat[i] = running;
  }
  e.M2_hat = e.F_hat.front();
  for (double& f : e.F_hat) f /= e.M2_hat;
  e.decayed = e.F_hat.back() < kDecayThreshold;
  return e;
}

StabilityEstimate estimate_decay(const PerturbedRun& run, double p0) {
  std::vector<double> g;
  g.reserve(run.xi.size());
  for (const auto& x : run.xi) g.push_back(norms(x, run.base.basis).dirichlet);
  StabilityEstimate e = estimate_decay(run.s, g);
  for (double v : eta_gradient_norm(run.eta, p0)) e.M1_hat = std::max(e.M1_hat, v);
  return e;
}

std::vector<double> eta_gradient_norm(const std::vector<GridField>& eta, double p0) {
  std::vector<double> out;
  out.reserve(eta.size());
  for (const GridField& e : eta) out.push_back(lp_norm(gradient(e), p0));
  return out;
}

}  // namespace sgns
