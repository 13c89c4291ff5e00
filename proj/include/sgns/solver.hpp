#pragma once

// Spectral semi-Galerkin solver for the variable-density incompressible
// Navier-Stokes system on the 2pi-periodic torus with unit viscosity:
//
//   (rho u_t, phi) + (rho u.grad u, phi) + (grad u, grad phi) = (rho f, phi)
//   rho_t + u.grad rho = 0
//
// for every phi in span{w^1..w^n}. Velocity lives in the first n Stokes
// modes; the density is a full grid field moved by semi-Lagrangian transport.

#include "sgns/density_transport.hpp"
#include "sgns/field_transform.hpp"
#include "sgns/spectral_basis.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sgns {

/// Closed-form body force per unit mass: amplitude * s(t) * sum_m w^m, with
/// s = 1 (steady), cos(omega t) (periodic) or 0 (zero).
struct ForcingSpec {
  enum class Kind { Zero, Steady, Periodic };

  Kind kind = Kind::Zero;
  double amplitude = 0.0;
  double omega = 1.0;
  std::vector<WaveMode> modes;

  double time_factor(double t) const;
  /// Spatial profile at unit time factor.
  VectorGridField profile(int n) const;

  bool operator==(const ForcingSpec&) const = default;
};

const char* to_string(ForcingSpec::Kind kind);

struct InitialVelocitySpec {
  std::string catalog = "zero";  // zero | shear | taylor_green | smooth_random | coefficients
  double amplitude = 1.0;
  double width = 2.0;  // spectral width for smooth_random
  std::vector<double> coefficients;

  bool operator==(const InitialVelocitySpec&) const = default;
};

struct InitialDensitySpec {
  std::string catalog = "uniform";  // uniform | blob | stratified
  double alpha = 1.0;
  double beta = 1.0;
  double value = 1.0;  // uniform
  double width = 0.6;  // blob

  bool operator==(const InitialDensitySpec&) const = default;
};

struct OutputSpec {
  std::size_t stride = 1;          // velocity/monitor storage stride in steps
  std::size_t density_stride = 0;  // 0: store density at t = 0 and t_end only
  std::string directory = "out";

  bool operator==(const OutputSpec&) const = default;
};

struct SolverConfig {
  static constexpr double kViscosity = 1.0;

  std::size_t basis_size = 0;
  int grid_size = 0;
  double dt = 0.0;
  double t_end = 0.0;
  ForcingSpec forcing;
  InitialVelocitySpec initial_velocity;
  InitialDensitySpec initial_density;
  OutputSpec output;
  std::uint64_t seed = 0;

  /// round(t_end / dt); validate() requires the ratio to be integral.
  std::size_t step_count() const;
  /// Throws InvalidArgument naming the violated constraint.
  void validate() const;

  bool operator==(const SolverConfig&) const = default;
};

struct SolverState {
  double t = 0.0;
  SpectralVelocity velocity;
  DensityField density;
};

struct Trajectory {
  SolverConfig config;
  SpectralBasis basis;
  std::vector<double> times;
  std::vector<SpectralVelocity> velocity;
  /// u_t = M(rho)^{-1} * rhs at each stored time.
  std::vector<SpectralVelocity> velocity_rate;
  /// density[i] is the density at times[density_index[i]].
  std::vector<std::size_t> density_index;
  std::vector<DensityField> density;
  /// energy, dissipation, forcing_power, energy_residual, galerkin_residual,
  /// rho_min, rho_max, mass. energy_residual[i] is the balance defect of the
  /// last step ending at times[i]; rho_min/rho_max cover every step since the
  /// previous stored time, not only the stored states.
  std::map<std::string, std::vector<double>> series;
  /// Steps between stored times.
  std::size_t stride = 1;

  const DensityField* density_at(std::size_t time_index) const;
  SolverState final_state() const;
};

/// Terms of the Galerkin system for one basis, grid and forcing.
class GalerkinSystem {
 public:
  GalerkinSystem(SpectralBasis basis, int n, ForcingSpec forcing);

  const SpectralBasis& basis() const { return transform_.basis(); }
  int grid_size() const { return transform_.grid_size(); }
  FieldTransform& transform() { return transform_; }

  /// M_jk = (rho w^k, w^j) by grid quadrature.
  Eigen::MatrixXd mass_matrix(const DensityField& rho);
  /// b_j = (rho u.grad u, w^j)
  Eigen::VectorXd nonlinear_term(const SpectralVelocity& v, const DensityField& rho);
  /// F_j = (rho f(t), w^j)
  Eigen::VectorXd forcing_term(const DensityField& rho, double t);
  /// F - b, evaluated with one set of transforms.
  Eigen::VectorXd explicit_term(const SpectralVelocity& v, const DensityField& rho, double t);
  /// -Lambda C + F - b
  Eigen::VectorXd rhs(const SpectralVelocity& v, const DensityField& rho, double t);

  /// Body force on the grid at time t.
  VectorGridField forcing_field(double t) const;

  struct EnergyTerms {
    double energy = 0.0;         // 1/2 (rho u, u)
    double dissipation = 0.0;    // ||grad u||^2
    double forcing_power = 0.0;  // (rho f, u)
  };
  /// Energy balance terms of a state; needs no factorisation.
  EnergyTerms energy_terms(const SpectralVelocity& v, const DensityField& rho, double t);

 private:
  VectorGridField weighted_field(const VectorGridField& f, const DensityField& rho) const;

  FieldTransform transform_;
  ForcingSpec forcing_;
  VectorGridField forcing_profile_;
};

Eigen::MatrixXd assemble_mass_matrix(const DensityField& rho, const SpectralBasis& basis, std::size_t n);
Eigen::VectorXd nonlinear_term(const SpectralVelocity& v, const DensityField& rho, const SpectralBasis& basis);
Eigen::VectorXd forcing_term(const DensityField& rho, const ForcingSpec& forcing, double t,
                             const SpectralBasis& basis, std::size_t n);

/// Diagnostics of one state, computed with a fresh factorisation of M(rho).
struct StateEvaluation {
  SpectralVelocity rate;  // u_t
  double energy = 0.0;         // 1/2 (rho u, u)
  double dissipation = 0.0;    // ||grad u||^2
  double forcing_power = 0.0;  // (rho f, u)
  double galerkin_residual = 0.0;  // ||M u_t - rhs|| / ||rhs||
};

/// Lie splitting per step: density advected with the step-start velocity,
/// then the coefficients advanced by Crank-Nicolson diffusion with a Heun
/// predictor-corrector for the explicit terms, all stages sharing one
/// Cholesky factorisation of M(rho) + dt/2 Lambda.
class SemiGalerkinStepper {
 public:
  SemiGalerkinStepper(SpectralBasis basis, int n, ForcingSpec forcing);

  SolverState step(const SolverState& state, double dt);
  StateEvaluation evaluate(const SolverState& state);
  GalerkinSystem& system() { return system_; }
  /// Largest relative solve residual seen by step() since construction.
  double max_step_residual() const { return max_step_residual_; }

 private:
  GalerkinSystem system_;
  double max_step_residual_ = 0.0;
};

/// Raised by solve() when its wall-clock deadline passes.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolveOptions {
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

/// Initial state from the config catalogs (velocity by exact projection).
SolverState initial_state(const SolverConfig& config, FieldTransform& transform);

Trajectory solve(const SolverConfig& config, const SolveOptions& options = {});

/// Runs `steps` steps from `start`; the config supplies dt, grid, forcing and
/// storage strides (its t_end and initial-data entries are ignored).
Trajectory solve_from(const SolverConfig& config, const SolverState& start, std::size_t steps,
                      const SolveOptions& options = {});

/// solve() with the basis enlarged to n_ref on the same grid and dt.
Trajectory reference_solve(const SolverConfig& config, std::size_t n_ref, const SolveOptions& options = {});

}  // namespace sgns
