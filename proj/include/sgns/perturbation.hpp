#pragma once

// Perturbed flows and empirical stability envelopes.
//
// A perturbation (xi0, eta0) is added to a base solution at time t0; the
// perturbed solution is computed with the same solver, and xi, eta are the
// differences between the perturbed and base runs.

#include "sgns/solver.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace sgns {

struct PerturbationParameters {
  double t0 = 0.0;
  double delta = 0.0;  // bound on ||grad xi0||
  double A = 0.0;      // bound on ||P Laplace xi0||
  double B = 0.0;      // bound on ||eta0||_inf
  double p0 = kInfinity;
  /// xi0 draws from every mode with eigenvalue <= band_shell...
  double band_shell = 4.0;
  /// ...unless a single basis index is requested.
  std::optional<std::size_t> single_mode;
  /// eta0 uses Fourier modes with |k|_inf <= eta_wavenumber; 0 gives eta0 = 0.
  int eta_wavenumber = 2;
};

struct PerturbationSpec {
  double t0 = 0.0;
  SpectralVelocity xi0;
  GridField eta0;
  double delta = 0.0;
  double A = 0.0;
  double B = 0.0;
  double p0 = kInfinity;

  /// Checks ||grad xi0|| < delta, ||P Laplace xi0|| < A, ||eta0||_inf < B
  /// and 6 <= p0; throws InvalidArgument otherwise.
  void validate(const SpectralBasis& basis) const;
};

/// Seeded admissible perturbation for a basis of the given size on an n-grid.
/// Throws InvalidArgument when delta, A or B is not positive or when
/// ||P Laplace xi0|| < A cannot hold at ||grad xi0|| = 0.9 delta in the band.
PerturbationSpec make_perturbation(const PerturbationParameters& params, const SpectralBasis& basis, int n,
                                   std::uint64_t seed);

/// Spec with xi0 = 0 and eta0 = 0 (bounds set to one).
PerturbationSpec zero_perturbation(double t0, std::size_t basis_size, int n);

struct PerturbedRun {
  std::vector<double> s;  // time since t0 at each stored sample
  std::vector<SpectralVelocity> xi;
  std::vector<SpectralVelocity> xi_rate;
  std::vector<GridField> eta;  // one per stored sample
  Trajectory base;             // base solution on [t0, t0 + horizon]
  Trajectory perturbed;
};

/// Solves the base problem to t0, then base and perturbed problems on
/// [t0, t0 + horizon]. Density is stored at every velocity sample.
/// Throws InvalidArgument if rho(t0) + eta0 is not strictly positive or t0,
/// horizon are not multiples of the config's dt.
PerturbedRun run_perturbed(const SolverConfig& base, const PerturbationSpec& spec, double horizon,
                           const SolveOptions& options = {});

struct StabilityEstimate {
  std::vector<double> s;
  std::vector<double> F_hat;  // non-increasing, F_hat[0] = 1
  double M1_hat = 0.0;        // sup ||grad eta||_{L^p0}; zero when no eta data is given
  double M2_hat = 0.0;        // peak of ||grad xi(s)|| / ||grad xi0||
  bool decayed = false;       // F_hat at the horizon below kDecayThreshold
};

inline constexpr double kDecayThreshold = 0.1;

/// Envelope of ratio[i] = ||grad xi(s_i)|| / ||grad xi0|| from raw norms;
/// norms[0] is ||grad xi0||. Throws InvalidArgument when norms[0] == 0.
StabilityEstimate estimate_decay(const std::vector<double>& s, const std::vector<double>& gradient_norms);
/// Envelope of a perturbed run, with M1_hat from its eta series at exponent p0.
StabilityEstimate estimate_decay(const PerturbedRun& run, double p0);

/// ||grad eta(t)||_{L^p0} for every stored eta.
std::vector<double> eta_gradient_norm(const std::vector<GridField>& eta, double p0);

}  // namespace sgns
