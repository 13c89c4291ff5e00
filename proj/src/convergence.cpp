#include "sgns/convergence.hpp"

#include "sgns/diagnostics.hpp"
#include "sgns/errors.hpp"
#include "sgns/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numeric>
#include <ostream>
#include <string>

namespace sgns {

namespace {

constexpr double kTimeTolerance = 1e-9;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::size_t checkpoint_step(double t, double dt) {
  const double ratio = t / dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
    throw InvalidArgument("study checkpoint " + fmt(t) + " is not a multiple of dt");
  }
  return static_cast<std::size_t>(std::llround(ratio));
}

std::size_t time_index(const std::vector<double>& times, double t) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (std::abs(times[i] - t) < kTimeTolerance) return i;
  }
  throw InternalError("study checkpoint " + fmt(t) + " was not stored");
}

}  // namespace

double StudyPlan::max_r() const { return std::isinf(p0) ? 6.0 : 6.0 * p0 / (6.0 + p0); }

void StudyPlan::validate() const {
  // The base basis size is replaced by every run; validate with the largest.
  SolverConfig largest = base;
  largest.basis_size = std::max<std::size_t>(n_ref, 1);
  largest.validate();
  if (n_list.empty()) throw InvalidArgument("study n_list must not be empty");
  if (!std::is_sorted(n_list.begin(), n_list.end()) ||
      std::adjacent_find(n_list.begin(), n_list.end()) != n_list.end()) {
    throw InvalidArgument("study n_list must be strictly increasing");
  }
  if (n_ref < kMinReferenceRatio * n_list.back()) {
    throw InvalidArgument("study n_ref must be >= " + std::to_string(kMinReferenceRatio) + " * max(n_list)");
  }
  if (n_ref > grid_capacity(base.grid_size)) throw InvalidArgument("study n_ref exceeds the grid capacity");
  const SpectralBasis probe = build_basis(n_ref + 1);
  for (std::size_t n : n_list) {
    if (n == 0) throw InvalidArgument("study n_list entries must be >= 1");
    if (!(probe.eigenvalue(n) > probe.eigenvalue(n - 1))) {
      throw InvalidArgument("study n = " + std::to_string(n) + " does not end an eigenvalue shell");
    }
  }
  if (!(p0 >= 6.0)) throw InvalidArgument("study p0 must be >= 6");
  if (r_list.empty()) throw InvalidArgument("study r_list must not be empty");
  for (double r : r_list) {
    if (!(r >= 2.0) || r > max_r() + 1e-12) {
      throw InvalidArgument("study r = " + fmt(r) + " outside [2, " + fmt(max_r()) + "] for p0 = " + fmt(p0));
    }
  }
  if (times.empty()) throw InvalidArgument("study times must not be empty");
  if (!std::is_sorted(times.begin(), times.end())) throw InvalidArgument("study times must be increasing");
  for (double t : times) {
    if (t < 0.0 || t > base.t_end + kTimeTolerance) throw InvalidArgument("study time " + fmt(t) + " outside [0, t_end]");
    checkpoint_step(t, base.dt);
  }
  if (threads == 0) throw InvalidArgument("study threads must be >= 1");
  if (budget_seconds && !(*budget_seconds > 0.0)) throw InvalidArgument("study budget_seconds must be positive");
}

StudyPlan plan_from_shells(const SolverConfig& base, const std::vector<double>& shells, double ref_shell,
                           std::vector<double> r_list, double p0, std::vector<double> times) {
  StudyPlan plan;
  plan.base = base;
  for (double s : shells) plan.n_list.push_back(modes_up_to_shell(s));
  plan.n_ref = modes_up_to_shell(ref_shell);
  plan.r_list = std::move(r_list);
  plan.p0 = p0;
  plan.times = std::move(times);
  return plan;
}

ConvergenceReport run_study(const StudyPlan& plan) {
  plan.validate();

  // Store exactly the checkpoints (and anything on their common grid).
  SolverConfig base = plan.base;
  const std::size_t total = base.step_count();
  std::size_t stride = total;
  for (double t : plan.times) stride = std::gcd(stride, checkpoint_step(t, base.dt));
  if (stride == 0) stride = 1;
  base.output.stride = stride;
  base.output.density_stride = stride;

  std::vector<std::size_t> sizes{plan.n_ref};
  sizes.insert(sizes.end(), plan.n_list.begin(), plan.n_list.end());
  std::vector<std::optional<Trajectory>> runs(sizes.size());

  SolveOptions options;
  if (plan.budget_seconds) {
    options.deadline = std::chrono::steady_clock::now() +
                       std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                           std::chrono::duration<double>(*plan.budget_seconds));
  }
  bool stopped = false;
  std::mutex stopped_mutex;
  parallel_for(sizes.size(), plan.threads, [&](std::size_t job) {
    try {
      SolverConfig c = base;
      c.basis_size = sizes[job];
      runs[job] = solve(c, options);
    } catch (const BudgetExceeded&) {
      std::lock_guard lock(stopped_mutex);
      stopped = true;
    }
  });

  ConvergenceReport report;
  report.plan = plan;
  report.partial = stopped;
  if (!runs[0]) return report;
  const Trajectory& ref = *runs[0];
  for (std::size_t k = 0; k < plan.n_list.size(); ++k) {
    const auto& approx = runs[k + 1];
    if (!approx) continue;
    const std::size_t n = plan.n_list[k];
    const ErrorDecomposition d = decompose(ref, *approx, n);
    const double root = std::sqrt(d.lambda_next);
    for (double t : plan.times) {
      const std::size_t i = time_index(ref.times, t);
      const auto pi = d.pi.find(i);
      if (pi == d.pi.end()) throw InternalError("study density not stored at checkpoint " + fmt(t));
      for (double r : plan.r_list) {
        ConvergenceRow row;
        row.n = n;
        row.lambda_next = d.lambda_next;
        row.t = t;
        row.r = r;
        row.velocity_error = d.velocity_error[i];
        row.density_error = lp_norm(pi->second, r);
        row.velocity_normalized = row.velocity_error * root;
        row.density_normalized = t > 0.0 ? row.density_error * root / t : 0.0;
        report.rows.push_back(row);
      }
    }
    report.completed_n.push_back(n);
  }
  return report;
}

double ConvergenceReport::velocity_error(std::size_t n, double t) const {
  for (const auto& row : rows) {
    if (row.n == n && std::abs(row.t - t) < kTimeTolerance) return row.velocity_error;
  }
  throw InvalidArgument("velocity_error: no row for n = " + std::to_string(n) + ", t = " + fmt(t));
}

double ConvergenceReport::density_error(std::size_t n, double t, double r) const {
  for (const auto& row : rows) {
    if (row.n == n && std::abs(row.t - t) < kTimeTolerance && row.r == r) return row.density_error;
  }
  throw InvalidArgument("density_error: no row for n = " + std::to_string(n) + ", t = " + fmt(t) + ", r = " + fmt(r));
}

double ConvergenceReport::lambda_next(std::size_t n) const {
  for (const auto& row : rows) {
    if (row.n == n) return row.lambda_next;
  }
  throw InvalidArgument("lambda_next: n = " + std::to_string(n) + " not in report");
}

bool ConvergenceReport::velocity_bounded(double factor) const {
  if (completed_n.empty()) return false;
  const std::size_t n0 = completed_n.front();
  for (double t : plan.times) {
    if (t <= 0.0) continue;
    const double base = velocity_error(n0, t) * std::sqrt(lambda_next(n0));
    for (std::size_t n : completed_n) {
      if (velocity_error(n, t) * std::sqrt(lambda_next(n)) > factor * base) return false;
    }
  }
  return true;
}

bool ConvergenceReport::velocity_decreasing() const {
  if (completed_n.empty()) return false;
  for (double t : plan.times) {
    if (t <= 0.0) continue;
    for (std::size_t k = 1; k < completed_n.size(); ++k) {
      if (!(velocity_error(completed_n[k], t) < velocity_error(completed_n[k - 1], t))) return false;
    }
  }
  return true;
}

bool ConvergenceReport::density_zero_at_start() const {
  for (const auto& row : rows) {
    if (row.t == 0.0 && row.density_error != 0.0) return false;
  }
  return true;
}

void ConvergenceReport::write_csv(std::ostream& out) const {
  out << "n,lambda_next,t,r,E_v,E_rho,E_v_normalized,E_rho_normalized\n";
  out << "count,1,time,1,velocity/length,density,velocity,density/time\n";
  for (const auto& row : rows) {
    out << row.n << ',' << fmt(row.lambda_next) << ',' << fmt(row.t) << ',' << fmt(row.r) << ','
        << fmt(row.velocity_error) << ',' << fmt(row.density_error) << ',' << fmt(row.velocity_normalized) << ','
        << fmt(row.density_normalized) << '\n';
  }
}

RateFit fit_rate(const std::vector<double>& lambda_next, const std::vector<double>& errors) {
  if (lambda_next.size() != errors.size()) throw InvalidArgument("fit_rate: size mismatch");
  RateFit fit;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    fit.constant = std::max(fit.constant, errors[i] * std::sqrt(lambda_next[i]));
    if (errors[i] > 0.0 && lambda_next[i] > 0.0) {
      x.push_back(std::log(lambda_next[i]));
      y.push_back(std::log(errors[i]));
    }
  }
  if (x.size() < 2) return fit;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx > 0.0) fit.slope = sxy / sxx;
  return fit;
}

GrowthCheck check_density_growth(const ConvergenceReport& report, double r, std::optional<double> t_fit,
                                 double factor) {
  GrowthCheck g;
  g.r = r;
  g.factor = factor;
  if (report.completed_n.empty()) return g;
  if (!t_fit) {
    for (double t : report.plan.times) {
      if (t > 0.0) {
        t_fit = t;
        break;
      }
    }
  }
  bool ok = true;
  for (std::size_t n : report.completed_n) {
    if (std::abs(report.plan.times.front()) < kTimeTolerance && report.density_error(n, report.plan.times.front(), r) != 0.0) {
      ok = false;
    }
  }
  if (!t_fit) {
    g.pass = ok;
    return g;
  }
  g.t_fit = *t_fit;
  for (std::size_t n : report.completed_n) {
    g.c_fit = std::max(g.c_fit, report.density_error(n, g.t_fit, r) * std::sqrt(report.lambda_next(n)) / g.t_fit);
  }
  for (double t : report.plan.times) {
    if (t <= g.t_fit + kTimeTolerance) continue;
    for (std::size_t n : report.completed_n) {
      const double e = report.density_error(n, t, r);
      const double envelope = g.c_fit * t / std::sqrt(report.lambda_next(n));
      const double ratio = envelope > 0.0 ? e / envelope : (e > 0.0 ? kInfinity : 0.0);
      g.worst_ratio = std::max(g.worst_ratio, ratio);
    }
  }
  g.pass = ok && g.worst_ratio <= factor;
  return g;
}

}  // namespace sgns
