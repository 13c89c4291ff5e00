#pragma once

// Reference-versus-truncation convergence studies. One high-resolution
// reference run and a ladder of truncated runs share grid, dt and data; the
// velocity error is measured in the Dirichlet norm and the density error in
// L^r, both at fixed checkpoints.

#include "sgns/solver.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sgns {

/// Smallest admissible n_ref / max(n_list). Shell 128 over shell 36 gives 404 / 112.
inline constexpr std::size_t kMinReferenceRatio = 3;

struct StudyPlan {
  SolverConfig base;
  std::vector<std::size_t> n_list;
  std::size_t n_ref = 0;
  std::vector<double> r_list;
  double p0 = kInfinity;
  std::vector<double> times;
  std::size_t threads = 1;
  std::optional<double> budget_seconds;

  /// Largest admissible density exponent: 6 p0 / (6 + p0), or 6 for p0 = inf.
  double max_r() const;
  /// Throws InvalidArgument naming the violated constraint.
  void validate() const;
};

/// Plan with n_list and n_ref placed at the ends of the given eigenvalue shells.
StudyPlan plan_from_shells(const SolverConfig& base, const std::vector<double>& shells, double ref_shell,
                           std::vector<double> r_list, double p0, std::vector<double> times);

struct ConvergenceRow {
  std::size_t n = 0;
  double lambda_next = 0.0;
  double t = 0.0;
  double r = 0.0;
  double velocity_error = 0.0;
  double density_error = 0.0;
  double velocity_normalized = 0.0;  // E_v sqrt(lambda_{n+1})
  double density_normalized = 0.0;   // E_rho sqrt(lambda_{n+1}) / t, 0 at t = 0
};

struct RateFit {
  double slope = 0.0;     // least squares slope of log E against log lambda_{n+1}
  double constant = 0.0;  // max of E sqrt(lambda_{n+1})
};

struct ConvergenceReport {
  StudyPlan plan;
  std::vector<ConvergenceRow> rows;  // ordered by n, then t, then r
  std::vector<std::size_t> completed_n;
  bool partial = false;  // some runs were stopped by the budget

  /// Velocity error of (n, t); throws if absent.
  double velocity_error(std::size_t n, double t) const;
  double density_error(std::size_t n, double t, double r) const;
  double lambda_next(std::size_t n) const;

  /// Normalised velocity curve bounded by `factor` times its value at the
  /// smallest n, at every checkpoint with t > 0.
  bool velocity_bounded(double factor = 2.0) const;
  /// E_v strictly decreasing in n at every checkpoint with t > 0.
  bool velocity_decreasing() const;
  /// E_rho(n, 0, r) == 0 for all n and r.
  bool density_zero_at_start() const;

  void write_csv(std::ostream& out) const;
};

ConvergenceReport run_study(const StudyPlan& plan);

RateFit fit_rate(const std::vector<double>& lambda_next, const std::vector<double>& errors);

struct GrowthCheck {
  double r = 0.0;
  double t_fit = 0.0;
  double c_fit = 0.0;          // max_n E_rho(n, t_fit) sqrt(lambda) / t_fit
  double worst_ratio = 0.0;    // max over later checkpoints of E_rho / (c_fit t / sqrt(lambda))
  double factor = 3.0;
  bool pass = false;
};

/// E_rho(n, t, r) <= factor * C_fit * t / sqrt(lambda_{n+1}) at every checkpoint
/// after t_fit, with C_fit from t_fit (the earliest positive checkpoint when
/// t_fit is not given).
GrowthCheck check_density_growth(const ConvergenceReport& report, double r, std::optional<double> t_fit = {},
                                 double factor = 3.0);

}  // namespace sgns
