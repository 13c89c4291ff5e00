#include "sgns/diagnostics.hpp"

#include "sgns/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace sgns {

void MonitorSeries::write_csv(std::ostream& out) const {
  out << "t,monitor,value\n";
  out << "time,name,monitor-dependent\n";
  char buf[64];
  for (const auto& [name, values] : series) {
    for (std::size_t i = 0; i < times.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", times[i]);
      out << buf << ',' << name << ',';
      std::snprintf(buf, sizeof buf, "%.17g", values[i]);
      out << buf << '\n';
    }
  }
}

std::vector<double> exp_weighted_integral(const std::vector<double>& t, const std::vector<double>& h) {
  if (t.size() != h.size()) throw InvalidArgument("exp_weighted_integral: size mismatch");
  std::vector<double> j(t.size(), 0.0);
  for (std::size_t k = 1; k < t.size(); ++k) {
    const double dt = t[k] - t[k - 1];
    if (!(dt > 0.0)) throw InvalidArgument("exp_weighted_integral: times must increase");
    const double decay = std::exp(-dt);
    j[k] = decay * j[k - 1] + 0.5 * dt * (decay * h[k - 1] + h[k]);
  }
  return j;
}

MonitorSeries attach_monitors(const Trajectory& traj) {
  MonitorSeries m;
  m.times = traj.times;
  auto& grad_u = m.series["grad_u"];
  auto& stokes_u = m.series["stokes_u"];
  auto& u_t = m.series["u_t"];
  auto& grad_u_t = m.series["grad_u_t"];
  auto& residual = m.series["energy_residual"];
  std::vector<double> u_t_sq, stokes_sq;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const Norms u = norms(traj.velocity[i], traj.basis);
    const Norms r = norms(traj.velocity_rate[i], traj.basis);
    grad_u.push_back(u.dirichlet);
    stokes_u.push_back(u.stokes);
    u_t.push_back(r.l2);
    grad_u_t.push_back(r.dirichlet);
    u_t_sq.push_back(r.l2 * r.l2);
    stokes_sq.push_back(u.stokes * u.stokes);
    residual.push_back(std::abs(traj.series.at("energy_residual")[i]));
  }
  m.series["weighted_u_t_sq"] = exp_weighted_integral(traj.times, u_t_sq);
  m.series["weighted_stokes_sq"] = exp_weighted_integral(traj.times, stokes_sq);
  return m;
}

// ---------------------------------------------------------------------------

double ErrorDecomposition::max_gradient_tail() const {
  return gradient_tail_ratio.empty() ? 0.0 : *std::max_element(gradient_tail_ratio.begin(), gradient_tail_ratio.end());
}

double ErrorDecomposition::max_l2_tail() const {
  return l2_tail_ratio.empty() ? 0.0 : *std::max_element(l2_tail_ratio.begin(), l2_tail_ratio.end());
}

ErrorDecomposition decompose(const Trajectory& ref, const Trajectory& approx, std::size_t n) {
  const SolverConfig& a = ref.config;
  const SolverConfig& b = approx.config;
  if (a.grid_size != b.grid_size || a.dt != b.dt || a.t_end != b.t_end || !(a.forcing == b.forcing) ||
      !(a.initial_velocity == b.initial_velocity) || !(a.initial_density == b.initial_density) ||
      a.seed != b.seed) {
    throw InvalidArgument("decompose: reference and truncated runs use different problem data");
  }
  if (ref.times != approx.times) throw InvalidArgument("decompose: runs stored different times");
  if (approx.basis.size() != n) throw InvalidArgument("decompose: truncated run does not have n modes");
  if (ref.basis.size() < n) throw InvalidArgument("decompose: reference basis is smaller than n");

  ErrorDecomposition d;
  d.n = n;
  d.lambda_next = build_basis(n + 1).eigenvalue(n);
  d.times = ref.times;
  const auto head = static_cast<Eigen::Index>(n);
  const Eigen::VectorXd& lambda = ref.basis.eigenvalues();

  double sup_stokes_sq = 0.0;
  std::vector<double> grad_e_sq, e_sq;
  for (std::size_t i = 0; i < ref.times.size(); ++i) {
    const Eigen::VectorXd& cr = ref.velocity[i].coefficients;
    const Eigen::VectorXd& cn = approx.velocity[i].coefficients;
    SpectralVelocity e = complement_k(ref.velocity[i], n);
    SpectralVelocity psi(Eigen::VectorXd(cn - cr.head(head)));
    const double ve = psi.coefficients.cwiseAbs2().dot(lambda.head(head)) + e.coefficients.cwiseAbs2().dot(lambda);
    d.velocity_error.push_back(std::sqrt(ve));
    const Norms ne = norms(e, ref.basis);
    grad_e_sq.push_back(ne.dirichlet * ne.dirichlet);
    e_sq.push_back(ne.l2 * ne.l2);
    const Norms nr = norms(ref.velocity[i], ref.basis);
    sup_stokes_sq = std::max(sup_stokes_sq, nr.stokes * nr.stokes);
    d.parseval_defect.push_back(std::abs(cr.squaredNorm() - cr.head(head).squaredNorm() - ne.l2 * ne.l2));
    d.e_n.push_back(std::move(e));
    d.psi_n.push_back(std::move(psi));
  }
  const double sup_grad_e_sq = grad_e_sq.empty() ? 0.0 : *std::max_element(grad_e_sq.begin(), grad_e_sq.end());
  for (std::size_t i = 0; i < ref.times.size(); ++i) {
    d.gradient_tail_ratio.push_back(sup_stokes_sq > 0.0 ? grad_e_sq[i] * d.lambda_next / sup_stokes_sq : 0.0);
    d.l2_tail_ratio.push_back(sup_grad_e_sq > 0.0 ? e_sq[i] * d.lambda_next / sup_grad_e_sq : 0.0);
  }
  for (std::size_t k = 0; k < ref.density_index.size(); ++k) {
    const std::size_t ti = ref.density_index[k];
    if (const DensityField* rn = approx.density_at(ti)) d.pi.emplace(ti, ref.density[k].values - rn->values);
  }
  return d;
}

// ---------------------------------------------------------------------------

namespace {

// a.grad b for grid fields with precomputed gradients of b.
void add_advection(VectorGridField& g, const VectorGridField& a, const FieldTransform::VelocityWithGradient& b,
                   double sign = 1.0) {
  for (std::size_t p = 0; p < g.x.values.size(); ++p) {
    g.x.values[p] += sign * (a.x.values[p] * b.dux_dx.values[p] + a.y.values[p] * b.dux_dy.values[p]);
    g.y.values[p] += sign * (a.x.values[p] * b.duy_dx.values[p] + a.y.values[p] * b.duy_dy.values[p]);
  }
}

void add(VectorGridField& g, const VectorGridField& a, double sign = 1.0) {
  for (std::size_t p = 0; p < g.x.values.size(); ++p) {
    g.x.values[p] += sign * a.x.values[p];
    g.y.values[p] += sign * a.y.values[p];
  }
}

}  // namespace

GnReport g_n_norm(const Trajectory& ref, const PerturbationSeries* xi, std::size_t n, double p) {
  if (!(p >= 2.0 && p <= 6.0)) throw InvalidArgument("g_n_norm: p must lie in [2, 6]");
  if (n > ref.basis.size()) throw InvalidArgument("g_n_norm: n exceeds the reference basis");
  if (xi && (xi->xi.size() != ref.times.size() || xi->xi_rate.size() != ref.times.size())) {
    throw InvalidArgument("g_n_norm: perturbation series does not match the reference samples");
  }
  const int grid = ref.config.grid_size;
  FieldTransform t(ref.basis, grid);
  const VectorGridField profile = ref.config.forcing.profile(grid);

  GnReport r;
  r.times = ref.times;
  for (std::size_t i = 0; i < ref.times.size(); ++i) {
    const auto u = t.synthesize_with_gradient(ref.velocity[i]);
    VectorGridField g = t.synthesize(ref.velocity_rate[i]);
    add_advection(g, u.u, u);
    const double s = ref.config.forcing.time_factor(ref.times[i]);
    for (std::size_t q = 0; q < g.x.values.size(); ++q) {
      g.x.values[q] -= s * profile.x.values[q];
      g.y.values[q] -= s * profile.y.values[q];
    }
    double stokes_xi = 0.0, grad_xi_t = 0.0;
    if (xi) {
      const SpectralVelocity& x = xi->xi[i];
      const auto full = t.synthesize_with_gradient(x);
      const auto low = t.synthesize_with_gradient(project_k(x, n));
      add(g, t.synthesize(xi->xi_rate[i]));
      add_advection(g, u.u, low);
      add_advection(g, low.u, u);
      add_advection(g, full.u, full);
      stokes_xi = norms(x, ref.basis).stokes;
      grad_xi_t = norms(xi->xi_rate[i], ref.basis).dirichlet;
    }
    const double grad_u_t = norms(ref.velocity_rate[i], ref.basis).dirichlet;
    r.norm.push_back(lp_norm(g, p));
    r.bound_terms.push_back(1.0 + stokes_xi * stokes_xi + std::pow(stokes_xi, 4) + grad_u_t * grad_u_t +
                            grad_xi_t * grad_xi_t);
  }
  const std::size_t fit = std::max<std::size_t>(1, (r.times.size() + 1) / 2);
  for (std::size_t i = 0; i < fit && i < r.times.size(); ++i) {
    r.fitted_constant = std::max(r.fitted_constant, r.norm[i] * r.norm[i] / r.bound_terms[i]);
  }
  if (r.fitted_constant > 0.0) {
    for (std::size_t i = 0; i < r.times.size(); ++i) {
      r.max_ratio = std::max(r.max_ratio, r.norm[i] * r.norm[i] / (r.fitted_constant * r.bound_terms[i]));
    }
  }
  return r;
}

// ---------------------------------------------------------------------------

WeightedBoundResult weighted_bound_check(const std::vector<double>& t, const std::vector<double>& h, double a1, double a2) {
  if (t.size() != h.size() || t.empty()) throw InvalidArgument("weighted_bound_check: sample size mismatch");
  if (!(a1 >= 0.0) || !(a2 >= 0.0)) throw InvalidArgument("weighted_bound_check: a1 and a2 must be nonnegative");
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (!(h[k] >= 0.0)) throw InvalidArgument("weighted_bound_check: h is negative at t = " + std::to_string(t[k]));
  }
  // With G(t) = int_{t_0}^{t} h - a1 (t - t_0), the premise for a pair i < j
  // reads G_j - G_i <= a2; comparing each G_j with the running minimum of
  // earlier G_i covers every pair.
  double integral = 0.0;
  double g_min = 0.0;
  std::size_t i_min = 0;
  for (std::size_t j = 1; j < t.size(); ++j) {
    const double dt = t[j] - t[j - 1];
    if (!(dt > 0.0)) throw InvalidArgument("weighted_bound_check: times must increase");
    integral += 0.5 * dt * (h[j - 1] + h[j]);
    const double g = integral - a1 * (t[j] - t[0]);
    const double tol = 1e-12 * (1.0 + std::abs(integral) + a2);
    if (g - g_min > a2 + tol) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "weighted_bound_check: premise violated on [%.17g, %.17g]: integral exceeds by %.3g",
                    t[i_min], t[j], g - g_min - a2);
      throw InvalidArgument(buf);
    }
    if (g < g_min) {
      g_min = g;
      i_min = j;
    }
  }
  WeightedBoundResult r;
  std::vector<double> shifted(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) shifted[k] = t[k] - t[0];
  for (double v : exp_weighted_integral(shifted, h)) r.sup_value = std::max(r.sup_value, v);
  r.bound = (a1 + a2) * kWeightedBoundConstant;
  r.pass = r.sup_value <= r.bound * (1.0 + 1e-6);
  return r;
}

}  // namespace sgns
