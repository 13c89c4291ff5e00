#include "sgns/solver.hpp"

#include "sgns/catalog.hpp"
#include "sgns/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sgns {

const char* to_string(ForcingSpec::Kind kind) {
  switch (kind) {
    case ForcingSpec::Kind::Zero: return "zero";
    case ForcingSpec::Kind::Steady: return "steady";
    case ForcingSpec::Kind::Periodic: return "periodic";
  }
  return "zero";
}

double ForcingSpec::time_factor(double t) const {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::Steady: return 1.0;
    case Kind::Periodic: return std::cos(omega * t);
  }
  return 0.0;
}

VectorGridField ForcingSpec::profile(int n) const {
  VectorGridField out(n);
  if (kind == Kind::Zero) return out;
  for (const WaveMode& m : modes) {
    const VectorGridField w = evaluate_mode(m, n);
    for (std::size_t p = 0; p < out.x.values.size(); ++p) {
      out.x.values[p] += amplitude * w.x.values[p];
      out.y.values[p] += amplitude * w.y.values[p];
    }
  }
  return out;
}

std::size_t SolverConfig::step_count() const {
  if (!(dt > 0.0)) return 0;
  return static_cast<std::size_t>(std::llround(t_end / dt));
}

void SolverConfig::validate() const {
  if (basis_size == 0) throw InvalidArgument("basis_size must be >= 1");
  require_power_of_two(grid_size);
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InvalidArgument("t_end must be >= 0");
  const double ratio = t_end / dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
    throw InvalidArgument("t_end must be an integer multiple of dt");
  }
  const std::size_t capacity = grid_capacity(grid_size);
  if (basis_size > capacity) {
    throw InvalidArgument("basis_size " + std::to_string(basis_size) + " exceeds the dealiasing capacity " +
                          std::to_string(capacity) + " of grid_size " + std::to_string(grid_size));
  }
  if (output.stride == 0) throw InvalidArgument("output.stride must be >= 1");
  const std::size_t steps = step_count();
  if (steps > 0 && steps % output.stride != 0) throw InvalidArgument("output.stride must divide the step count");
  if (output.density_stride != 0 && steps > 0 && steps % output.density_stride != 0) {
    throw InvalidArgument("output.density_stride must divide the step count");
  }
  if (!(initial_density.alpha > 0.0)) throw InvalidArgument("initial_density.alpha must be positive");
  if (!(initial_density.beta >= initial_density.alpha)) {
    throw InvalidArgument("initial_density.beta must be >= alpha");
  }
  if (forcing.kind != ForcingSpec::Kind::Zero) {
    if (!std::isfinite(forcing.amplitude)) throw InvalidArgument("forcing.amplitude must be finite");
    for (const WaveMode& m : forcing.modes) {
      if (m.k1 == 0 && m.k2 == 0) throw InvalidArgument("forcing modes need a nonzero wavevector");
    }
  }
}

const DensityField* Trajectory::density_at(std::size_t time_index) const {
  const auto it = std::find(density_index.begin(), density_index.end(), time_index);
  if (it == density_index.end()) return nullptr;
  return &density[static_cast<std::size_t>(it - density_index.begin())];
}

SolverState Trajectory::final_state() const {
  if (times.empty() || density.empty()) throw InvalidArgument("final_state: empty trajectory");
  if (density_index.back() + 1 != times.size()) throw InternalError("final_state: final density not stored");
  return {times.back(), velocity.back(), density.back()};
}

// ---------------------------------------------------------------------------

GalerkinSystem::GalerkinSystem(SpectralBasis basis, int n, ForcingSpec forcing)
    : transform_(std::move(basis), n), forcing_(std::move(forcing)), forcing_profile_(forcing_.profile(n)) {}

VectorGridField GalerkinSystem::forcing_field(double t) const {
  VectorGridField f = forcing_profile_;
  const double s = forcing_.time_factor(t);
  for (double& v : f.x.values) v *= s;
  for (double& v : f.y.values) v *= s;
  return f;
}

VectorGridField GalerkinSystem::weighted_field(const VectorGridField& f, const DensityField& rho) const {
  if (rho.n() != grid_size()) throw InvalidArgument("density grid does not match the solver grid");
  VectorGridField out = f;
  for (std::size_t p = 0; p < out.x.values.size(); ++p) {
    out.x.values[p] *= rho.values.values[p];
    out.y.values[p] *= rho.values.values[p];
  }
  return out;
}

Eigen::MatrixXd GalerkinSystem::mass_matrix(const DensityField& rho) {
  if (rho.n() != grid_size()) throw InvalidArgument("mass_matrix: density grid does not match the solver grid");
  const FourierMoments moments(transform_.fft(), rho.values);
  const SpectralBasis& b = basis();
  const Eigen::Index n = static_cast<Eigen::Index>(b.size());
  Eigen::MatrixXd m(n, n);
  const double c2 = kModeNormalization * kModeNormalization;
  for (Eigen::Index j = 0; j < n; ++j) {
    const WaveMode& mj = b.mode(static_cast<std::size_t>(j));
    for (Eigen::Index k = 0; k <= j; ++k) {
      const WaveMode& mk = b.mode(static_cast<std::size_t>(k));
      const double pp = mj.polarization_x() * mk.polarization_x() + mj.polarization_y() * mk.polarization_y();
      double value = 0.0;
      if (pp != 0.0) {
        const int d1 = mj.k1 - mk.k1, d2 = mj.k2 - mk.k2;
        const int s1 = mj.k1 + mk.k1, s2 = mj.k2 + mk.k2;
        const bool cj = mj.phase == Phase::Cosine;
        const bool ck = mk.phase == Phase::Cosine;
        double integral;
        if (cj && ck) {
          integral = 0.5 * (moments.cos_moment(d1, d2) + moments.cos_moment(s1, s2));
        } else if (!cj && !ck) {
          integral = 0.5 * (moments.cos_moment(d1, d2) - moments.cos_moment(s1, s2));
        } else if (!cj && ck) {
          integral = 0.5 * (moments.sin_moment(s1, s2) + moments.sin_moment(d1, d2));
        } else {
          integral = 0.5 * (moments.sin_moment(s1, s2) - moments.sin_moment(d1, d2));
        }
        value = c2 * pp * integral;
      }
      m(j, k) = value;
      m(k, j) = value;
    }
  }
  return m;
}

namespace {

VectorGridField advective_term(const FieldTransform::VelocityWithGradient& g) {
  VectorGridField out(g.u.n());
  for (std::size_t p = 0; p < out.x.values.size(); ++p) {
    const double ux = g.u.x.values[p];
    const double uy = g.u.y.values[p];
    out.x.values[p] = ux * g.dux_dx.values[p] + uy * g.dux_dy.values[p];
    out.y.values[p] = ux * g.duy_dx.values[p] + uy * g.duy_dy.values[p];
  }
  return out;
}

}  // namespace

Eigen::VectorXd GalerkinSystem::nonlinear_term(const SpectralVelocity& v, const DensityField& rho) {
  const auto g = transform_.synthesize_with_gradient(v);
  return transform_.analyze(weighted_field(advective_term(g), rho)).coefficients;
}

Eigen::VectorXd GalerkinSystem::forcing_term(const DensityField& rho, double t) {
  if (forcing_.kind == ForcingSpec::Kind::Zero) return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis().size()));
  return transform_.analyze(weighted_field(forcing_field(t), rho)).coefficients;
}

Eigen::VectorXd GalerkinSystem::explicit_term(const SpectralVelocity& v, const DensityField& rho, double t) {
  const auto g = transform_.synthesize_with_gradient(v);
  VectorGridField a = advective_term(g);
  const VectorGridField f = forcing_field(t);
  for (std::size_t p = 0; p < a.x.values.size(); ++p) {
    a.x.values[p] = f.x.values[p] - a.x.values[p];
    a.y.values[p] = f.y.values[p] - a.y.values[p];
  }
  return transform_.analyze(weighted_field(a, rho)).coefficients;
}

Eigen::VectorXd GalerkinSystem::rhs(const SpectralVelocity& v, const DensityField& rho, double t) {
  return explicit_term(v, rho, t) - basis().eigenvalues().cwiseProduct(v.coefficients);
}

GalerkinSystem::EnergyTerms GalerkinSystem::energy_terms(const SpectralVelocity& v, const DensityField& rho,
                                                         double t) {
  const Eigen::VectorXd& c = v.coefficients;
  EnergyTerms e;
  e.energy = 0.5 * c.dot(mass_matrix(rho) * c);
  e.dissipation = c.dot(basis().eigenvalues().cwiseProduct(c));
  e.forcing_power = forcing_term(rho, t).dot(c);
  return e;
}

Eigen::MatrixXd assemble_mass_matrix(const DensityField& rho, const SpectralBasis& basis, std::size_t n) {
  if (n > basis.size()) throw InvalidArgument("assemble_mass_matrix: n exceeds basis size");
  GalerkinSystem system(basis.truncated(n), rho.n(), ForcingSpec{});
  return system.mass_matrix(rho);
}

Eigen::VectorXd nonlinear_term(const SpectralVelocity& v, const DensityField& rho, const SpectralBasis& basis) {
  if (v.basis_size() != basis.size()) throw InvalidArgument("nonlinear_term: coefficient count differs from basis");
  GalerkinSystem system(basis, rho.n(), ForcingSpec{});
  return system.nonlinear_term(v, rho);
}

Eigen::VectorXd forcing_term(const DensityField& rho, const ForcingSpec& forcing, double t,
                             const SpectralBasis& basis, std::size_t n) {
  if (n > basis.size()) throw InvalidArgument("forcing_term: n exceeds basis size");
  GalerkinSystem system(basis.truncated(n), rho.n(), forcing);
  return system.forcing_term(rho, t);
}

// ---------------------------------------------------------------------------

SemiGalerkinStepper::SemiGalerkinStepper(SpectralBasis basis, int n, ForcingSpec forcing)
    : system_(std::move(basis), n, std::move(forcing)) {}

SolverState SemiGalerkinStepper::step(const SolverState& state, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("step: dt must be positive");
  const VelocitySampler sampler(system_.transform(), state.velocity);
  const VelocityPair pair{&sampler, &sampler};
  SolverState next;
  next.t = state.t + dt;
  next.density = advect(state.density, pair, dt);

  const Eigen::MatrixXd m = system_.mass_matrix(next.density);
  const Eigen::VectorXd& lambda = system_.basis().eigenvalues();
  Eigen::MatrixXd a = m;
  a.diagonal() += 0.5 * dt * lambda;
  const Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    throw InternalError("step: mass matrix lost positive definiteness (grid too coarse for the density)");
  }
  const Eigen::VectorXd& c = state.velocity.coefficients;
  const Eigen::VectorXd bc = m * c - 0.5 * dt * lambda.cwiseProduct(c);

  const Eigen::VectorXd g0 = system_.explicit_term(state.velocity, next.density, state.t);
  const SpectralVelocity predictor(llt.solve(bc + dt * g0));
  const Eigen::VectorXd g1 = system_.explicit_term(predictor, next.density, next.t);
  const Eigen::VectorXd rhs = bc + 0.5 * dt * (g0 + g1);
  next.velocity = SpectralVelocity(llt.solve(rhs));

  const double scale = rhs.norm();
  if (scale > 0.0) {
    max_step_residual_ = std::max(max_step_residual_, (a * next.velocity.coefficients - rhs).norm() / scale);
  }
  if (!next.velocity.finite()) throw InternalError("step: non-finite coefficients");
  return next;
}

StateEvaluation SemiGalerkinStepper::evaluate(const SolverState& state) {
  const Eigen::MatrixXd m = system_.mass_matrix(state.density);
  const Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw InternalError("evaluate: mass matrix is not positive definite (grid too coarse for the density)");
  }
  const Eigen::VectorXd& c = state.velocity.coefficients;
  const Eigen::VectorXd& lambda = system_.basis().eigenvalues();
  const Eigen::VectorXd force = system_.forcing_term(state.density, state.t);
  const Eigen::VectorXd rhs = force - system_.nonlinear_term(state.velocity, state.density) - lambda.cwiseProduct(c);

  StateEvaluation e;
  e.rate = SpectralVelocity(llt.solve(rhs));
  e.energy = 0.5 * c.dot(m * c);
  e.dissipation = c.dot(lambda.cwiseProduct(c));
  e.forcing_power = force.dot(c);
  const double scale = rhs.norm();
  e.galerkin_residual = scale > 0.0 ? (m * e.rate.coefficients - rhs).norm() / scale : 0.0;
  return e;
}

// ---------------------------------------------------------------------------

SolverState initial_state(const SolverConfig& config, FieldTransform& transform) {
  SolverState s;
  s.t = 0.0;
  s.velocity = make_initial_velocity(config.initial_velocity, transform, config.seed);
  s.density = make_initial_density(config.initial_density, config.grid_size);
  return s;
}

namespace {

void check_deadline(const SolveOptions& options) {
  if (options.deadline && std::chrono::steady_clock::now() > *options.deadline) {
    throw BudgetExceeded("solve: wall-clock budget exceeded");
  }
}

Trajectory run(const SolverConfig& config, SemiGalerkinStepper& stepper, const SolverState& start,
               std::size_t steps, const SolveOptions& options) {
  Trajectory traj;
  traj.config = config;
  traj.basis = stepper.system().basis();
  traj.stride = config.output.stride == 0 ? 1 : config.output.stride;
  const std::size_t density_stride = config.output.density_stride;
  for (const char* name : {"energy", "dissipation", "forcing_power", "energy_residual", "galerkin_residual",
                           "rho_min", "rho_max", "mass"}) {
    traj.series[name];
  }

  double window_min = start.density.min();
  double window_max = start.density.max();
  auto store = [&](const SolverState& s, std::size_t step_index, double defect) {
    const StateEvaluation e = stepper.evaluate(s);
    traj.times.push_back(s.t);
    traj.velocity.push_back(s.velocity);
    traj.velocity_rate.push_back(e.rate);
    traj.series["energy"].push_back(e.energy);
    traj.series["dissipation"].push_back(e.dissipation);
    traj.series["forcing_power"].push_back(e.forcing_power);
    traj.series["energy_residual"].push_back(defect);
    traj.series["galerkin_residual"].push_back(e.galerkin_residual);
    traj.series["rho_min"].push_back(window_min);
    traj.series["rho_max"].push_back(window_max);
    traj.series["mass"].push_back(s.density.mass());
    const bool keep_density = step_index == 0 || step_index == steps ||
                              (density_stride != 0 && step_index % density_stride == 0);
    if (keep_density) {
      traj.density_index.push_back(traj.times.size() - 1);
      traj.density.push_back(s.density);
    }
  };

  store(start, 0, 0.0);
  SolverState state = start;
  GalerkinSystem::EnergyTerms before = stepper.system().energy_terms(state.velocity, state.density, state.t);
  const double dt = config.dt;
  for (std::size_t k = 1; k <= steps; ++k) {
    check_deadline(options);
    // Keep the step-start time exact so long runs do not drift off the grid of stored times.
    SolverState next = stepper.step(state, dt);
    next.t = start.t + static_cast<double>(k) * dt;
    const GalerkinSystem::EnergyTerms after = stepper.system().energy_terms(next.velocity, next.density, next.t);
    const double defect = after.energy - before.energy + 0.5 * dt * (before.dissipation + after.dissipation) -
                          0.5 * dt * (before.forcing_power + after.forcing_power);
    window_min = std::min(window_min, next.density.min());
    window_max = std::max(window_max, next.density.max());
    if (k % traj.stride == 0 || k == steps) {
      store(next, k, defect);
      window_min = next.density.min();
      window_max = next.density.max();
    }
    before = after;
    state = std::move(next);
  }
  return traj;
}

}  // namespace

Trajectory solve(const SolverConfig& config, const SolveOptions& options) {
  config.validate();
  SemiGalerkinStepper stepper(build_basis(config.basis_size), config.grid_size, config.forcing);
  const SolverState start = initial_state(config, stepper.system().transform());
  return run(config, stepper, start, config.step_count(), options);
}

Trajectory solve_from(const SolverConfig& config, const SolverState& start, std::size_t steps,
                      const SolveOptions& options) {
  SolverConfig c = config;
  c.t_end = static_cast<double>(steps) * config.dt;
  c.validate();
  if (start.velocity.basis_size() != c.basis_size) {
    throw InvalidArgument("solve_from: start state has " + std::to_string(start.velocity.basis_size()) +
                          " coefficients, config expects " + std::to_string(c.basis_size));
  }
  if (start.density.n() != c.grid_size) throw InvalidArgument("solve_from: start density grid differs from config");
  SemiGalerkinStepper stepper(build_basis(c.basis_size), c.grid_size, c.forcing);
  return run(c, stepper, start, steps, options);
}

Trajectory reference_solve(const SolverConfig& config, std::size_t n_ref, const SolveOptions& options) {
  SolverConfig c = config;
  c.basis_size = n_ref;
  return solve(c, options);
}

}  // namespace sgns
