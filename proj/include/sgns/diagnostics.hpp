#pragma once

// Monitored norms of a trajectory, the reference/truncation error
// decomposition, and a numerical check of the exponentially weighted
// integral bound
//
//   sup_t e^{-t} int_0^t e^s h(s) ds <= (a1 + a2) e^2 / (e - 1)
//
// for nonnegative h with int_{t0}^{t} h <= a1 (t - t0) + a2.

#include "sgns/perturbation.hpp"
#include "sgns/solver.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace sgns {

struct MonitorSeries {
  std::vector<double> times;
  /// grad_u, stokes_u, u_t, grad_u_t, weighted_u_t_sq, weighted_stokes_sq,
  /// energy_residual
  std::map<std::string, std::vector<double>> series;

  const std::vector<double>& operator[](const std::string& name) const { return series.at(name); }
  /// Long format: t,monitor,value
  void write_csv(std::ostream& out) const;
};

MonitorSeries attach_monitors(const Trajectory& traj);

/// J(t_k) = e^{-t_k} int_0^{t_k} e^s h(s) ds by the trapezoid rule on the
/// given samples, accumulated recursively.
std::vector<double> exp_weighted_integral(const std::vector<double>& t, const std::vector<double>& h);

struct ErrorDecomposition {
  std::size_t n = 0;
  double lambda_next = 0.0;  // lambda_{n+1}
  std::vector<double> times;
  std::vector<SpectralVelocity> e_n;    // Q_n u_ref, in the reference basis
  std::vector<SpectralVelocity> psi_n;  // u^n - P_n u_ref, n coefficients
  std::vector<double> velocity_error;   // ||grad(u_ref - u^n)||
  std::vector<double> gradient_tail_ratio;       // ||grad e^n||^2 lambda_{n+1} / sup ||P Laplace u_ref||^2
  std::vector<double> l2_tail_ratio;       // ||e^n||^2 lambda_{n+1} / sup ||grad e^n||^2
  std::vector<double> parseval_defect;  // | ||u_ref||^2 - ||P_n u_ref||^2 - ||e^n||^2 |
  /// rho_ref - rho^n at the times both runs stored a density, keyed by time index.
  std::map<std::size_t, GridField> pi;

  double max_gradient_tail() const;
  double max_l2_tail() const;
};

/// Throws InvalidArgument unless both runs share grid, dt, forcing, initial
/// data, seed and stored times, approx has n modes and ref at least n.
ErrorDecomposition decompose(const Trajectory& ref, const Trajectory& approx, std::size_t n);

struct PerturbationSeries {
  std::vector<SpectralVelocity> xi;
  std::vector<SpectralVelocity> xi_rate;
};

struct GnReport {
  std::vector<double> times;
  std::vector<double> norm;  // ||g^n||_{L^p}
  /// 1 + ||P Laplace xi||^2 + ||P Laplace xi||^4 + ||grad u_t||^2 + ||grad xi_t||^2
  std::vector<double> bound_terms;
  /// max of norm^2 / bound_terms over the first half of the samples
  double fitted_constant = 0.0;
  /// max over all samples of norm^2 / (fitted_constant * bound_terms)
  double max_ratio = 0.0;
};

/// g^n = u_t + u.grad u - f + xi_t + u.grad P_n xi + P_n xi.grad u + xi.grad xi
/// on the grid of ref; xi may be null (xi = 0). Requires 2 <= p <= 6.
GnReport g_n_norm(const Trajectory& ref, const PerturbationSeries* xi, std::size_t n, double p);

struct WeightedBoundResult {
  double sup_value = 0.0;
  double bound = 0.0;
  bool pass = false;
};

/// e^2 / (e - 1)
inline constexpr double kWeightedBoundConstant = 4.300258535328371;

/// Throws InvalidArgument, naming the offending sample pair, if the samples
/// violate int_{t_i}^{t_j} h <= a1 (t_j - t_i) + a2 or if h < 0. The check
/// is exact over all pairs and runs in linear time.
WeightedBoundResult weighted_bound_check(const std::vector<double>& t, const std::vector<double>& h, double a1, double a2);

}  // namespace sgns
