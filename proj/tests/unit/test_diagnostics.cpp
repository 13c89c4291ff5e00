#include "oracles.hpp"

#include <doctest.h>

#include "sgns/diagnostics.hpp"
#include "sgns/errors.hpp"
#include "sgns/lemma_suite.hpp"

#include <cmath>
#include <sstream>

using namespace sgns;

namespace {

SolverConfig shear_config(std::size_t n) {
  SolverConfig c;
  c.basis_size = n;
  c.grid_size = 32;
  c.dt = 1e-3;
  c.t_end = 1.0;
  c.initial_velocity = {"shear", 0.7, 2.0, {}};
  c.output.stride = 50;
  return c;
}

SolverConfig stirred_config(std::size_t n) {
  SolverConfig c;
  c.basis_size = n;
  c.grid_size = 32;
  c.dt = 5e-3;
  c.t_end = 0.5;
  c.seed = 11;
  c.initial_velocity.catalog = "smooth_random";
  c.initial_density = {"blob", 0.5, 1.5, 1.0, 0.6};
  c.forcing.kind = ForcingSpec::Kind::Steady;
  c.forcing.amplitude = 1.0;
  c.forcing.modes = {{1, 1, Phase::Cosine}, {2, -1, Phase::Sine}};
  c.output.stride = 10;
  return c;
}

// J(t_k) = e^{-t_k} sum of trapezoid pieces of e^s h(s), evaluated directly.
double direct_weighted(const std::vector<double>& t, const std::vector<double>& h, std::size_t k) {
  double s = 0.0;
  for (std::size_t i = 1; i <= k; ++i) {
    s += 0.5 * (t[i] - t[i - 1]) * (std::exp(t[i - 1] - t[k]) * h[i - 1] + std::exp(t[i] - t[k]) * h[i]);
  }
  return s;
}

}  // namespace

TEST_CASE("monitors of the decaying shear") {
  // u = C0 e^{-t} w with lambda = 1, C0 = a / c: every norm equals C0 e^{-t},
  // and e^{-t} int_0^t e^s ||u_t||^2 ds = C0^2 (e^{-t} - e^{-2t}).
  const SolverConfig c = shear_config(12);
  const Trajectory traj = solve(c);
  const MonitorSeries m = attach_monitors(traj);
  const double c0 = 0.7 * oracle::kPi * std::sqrt(2.0);
  for (std::size_t i = 0; i < m.times.size(); ++i) {
    const double t = m.times[i];
    const double expected = c0 * std::exp(-t);
    CHECK(m["grad_u"][i] == doctest::Approx(expected).epsilon(1e-6));
    CHECK(m["stokes_u"][i] == doctest::Approx(expected).epsilon(1e-6));
    CHECK(m["u_t"][i] == doctest::Approx(expected).epsilon(1e-6));
    CHECK(m["grad_u_t"][i] == doctest::Approx(expected).epsilon(1e-6));
    // Trapezoid at the storage stride (0.05) is second order.
    CHECK(m["weighted_u_t_sq"][i] == doctest::Approx(c0 * c0 * (std::exp(-t) - std::exp(-2 * t))).epsilon(2e-3));
  }
  std::ostringstream out;
  m.write_csv(out);
  CHECK(out.str().rfind("t,monitor,value\n", 0) == 0);
}

TEST_CASE("exp_weighted_integral") {
  SUBCASE("matches direct summation") {
    const auto [t, h] = spike_train(0.3, 1.2, 0.05, 0.01, 4.0);
    const std::vector<double> j = exp_weighted_integral(t, h);
    for (std::size_t k : {0u, 1u, 97u, 250u, 400u}) CHECK(j[k] == doctest::Approx(direct_weighted(t, h, k)).epsilon(1e-12));
  }
  SUBCASE("h = 1 gives 1 - e^{-t} to second order") {
    std::vector<double> t, h;
    for (int k = 0; k <= 200; ++k) {
      t.push_back(0.01 * k);
      h.push_back(1.0);
    }
    const std::vector<double> j = exp_weighted_integral(t, h);
    CHECK(j.back() == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-5));
  }
  CHECK_THROWS_AS(exp_weighted_integral({0.0, 0.0}, {1.0, 1.0}), InvalidArgument);
}

TEST_CASE("weighted_bound_check") {
  std::vector<double> t;
  for (int k = 0; k <= 20000; ++k) t.push_back(1e-3 * k);

  SUBCASE("h = 0") {
    const WeightedBoundResult r = weighted_bound_check(t, std::vector<double>(t.size(), 0.0), 1.0, 0.5);
    CHECK(r.sup_value == 0.0);
    CHECK(r.pass);
  }
  SUBCASE("h = a1") {
    const double a1 = 2.5;
    const WeightedBoundResult r = weighted_bound_check(t, std::vector<double>(t.size(), a1), a1, 0.0);
    CHECK(r.sup_value == doctest::Approx(a1 * (1.0 - std::exp(-20.0))).epsilon(1e-6));
    CHECK(r.bound == doctest::Approx(a1 * std::exp(2.0) / (std::exp(1.0) - 1.0)).epsilon(1e-15));
    CHECK(r.pass);
  }
  SUBCASE("narrow spikes approach a1 + a2 e / (e - 1)") {
    // Pulses of mass a2 once per unit time: just after a pulse the weighted
    // integral is a2 / (1 - 1/e) in the limit of zero width.
    const double a2 = 1.5, base = 0.25;
    const auto [ts, h] = spike_train(base, a2, 0.002, 1e-4, 30.0);
    const WeightedBoundResult r = weighted_bound_check(ts, h, base + 2.0 * a2, a2);
    const double limit = base + a2 * std::exp(1.0) / (std::exp(1.0) - 1.0);
    CHECK(r.sup_value == doctest::Approx(limit).epsilon(3e-3));
    CHECK(r.pass);
  }
  SUBCASE("premise violations are reported") {
    // int_0^t 2 = 2t exceeds t + 0.5 once t > 0.5.
    try {
      weighted_bound_check(t, std::vector<double>(t.size(), 2.0), 1.0, 0.5);
      FAIL("expected InvalidArgument");
    } catch (const InvalidArgument& e) {
      CHECK(std::string(e.what()).find("premise violated") != std::string::npos);
    }
    std::vector<double> neg(t.size(), 1.0);
    neg[5] = -1e-3;
    CHECK_THROWS_AS(weighted_bound_check(t, neg, 2.0, 1.0), InvalidArgument);
  }
}

TEST_CASE("weighted bound suite") {
  const WeightedBoundSuite s = weighted_bound_suite(20, 3);
  CHECK(s.pass);
  CHECK(s.constant_sup == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(s.worst_fraction <= 1.0);
  CHECK(s.worst_fraction > 0.0);
}

TEST_CASE("decompose") {
  SUBCASE("truncated shear run has no Galerkin error") {
    const Trajectory ref = solve(shear_config(28));
    const Trajectory approx = solve(shear_config(4));
    const ErrorDecomposition d = decompose(ref, approx, 4);
    CHECK(d.lambda_next == 2.0);
    for (std::size_t i = 0; i < d.times.size(); ++i) {
      CHECK(d.psi_n[i].coefficients.cwiseAbs().maxCoeff() <= 1e-14);
      CHECK(d.e_n[i].coefficients.cwiseAbs().maxCoeff() <= 1e-14);
      CHECK(d.velocity_error[i] <= 1e-13);
    }
  }
  SUBCASE("n = n_ref") {
    const Trajectory run = solve(stirred_config(28));
    const ErrorDecomposition d = decompose(run, run, 28);
    for (std::size_t i = 0; i < d.times.size(); ++i) {
      CHECK(d.e_n[i].coefficients.norm() == 0.0);
      CHECK(d.psi_n[i].coefficients.norm() == 0.0);
    }
    for (const auto& [index, pi] : d.pi) CHECK(lp_norm(pi, kInfinity) == 0.0);
  }
  SUBCASE("stirred run: tail inequalities and Parseval") {
    const Trajectory ref = solve(stirred_config(80));
    const Trajectory approx = solve(stirred_config(12));
    const ErrorDecomposition d = decompose(ref, approx, 12);
    CHECK(d.lambda_next == 5.0);
    CHECK(d.max_gradient_tail() <= 1.0);
    CHECK(d.max_l2_tail() <= 1.0);
    for (std::size_t i = 0; i < d.times.size(); ++i) {
      const double u2 = ref.velocity[i].coefficients.squaredNorm();
      CHECK(d.parseval_defect[i] <= 1e-12 * u2);
    }
    // Density is stored at t = 0 and t_end only.
    CHECK(d.pi.size() == 2);
    CHECK(lp_norm(d.pi.at(0), kInfinity) == 0.0);
    CHECK(lp_norm(d.pi.rbegin()->second, 2.0) > 0.0);
  }
  SUBCASE("mismatched runs") {
    SolverConfig other = stirred_config(12);
    other.seed = 12;
    const Trajectory a = solve(stirred_config(28));
    CHECK_THROWS_AS(decompose(a, solve(other), 12), InvalidArgument);
    CHECK_THROWS_AS(decompose(a, solve(stirred_config(12)), 8), InvalidArgument);
  }
}

TEST_CASE("g_n_norm") {
  SUBCASE("rest state") {
    SolverConfig c = shear_config(12);
    c.initial_velocity.catalog = "zero";
    const GnReport r = g_n_norm(solve(c), nullptr, 4, 4.0);
    for (double v : r.norm) CHECK(v == 0.0);
  }
  SUBCASE("constructed balance") {
    // u and xi are x-directed fields of y alone, so every advection term
    // vanishes; with u_t = f the remaining terms cancel.
    SolverConfig c = shear_config(12);
    c.forcing.kind = ForcingSpec::Kind::Steady;
    c.forcing.amplitude = 0.8;
    c.forcing.modes = {{0, 1, Phase::Sine}};
    Trajectory traj;
    traj.config = c;
    traj.basis = build_basis(12);
    const std::size_t shear = traj.basis.index_of(0, 1, Phase::Sine);
    const std::size_t shear2 = traj.basis.index_of(0, 2, Phase::Cosine);
    for (int i = 0; i < 3; ++i) {
      traj.times.push_back(0.5 * i);
      SpectralVelocity u(12), rate(12);
      u.coefficients[static_cast<Eigen::Index>(shear)] = 1.0 + i;
      rate.coefficients[static_cast<Eigen::Index>(shear)] = 0.8;
      traj.velocity.push_back(u);
      traj.velocity_rate.push_back(rate);
    }
    PerturbationSeries xi;
    for (int i = 0; i < 3; ++i) {
      SpectralVelocity x(12);
      x.coefficients[static_cast<Eigen::Index>(shear2)] = 0.3;
      x.coefficients[static_cast<Eigen::Index>(shear)] = -0.2;
      xi.xi.push_back(x);
      xi.xi_rate.push_back(SpectralVelocity(12));
    }
    for (double p : {2.0, 6.0}) {
      for (double v : g_n_norm(traj, &xi, 2, p).norm) CHECK(v <= 1e-8);
    }
  }
  SUBCASE("stirred run: ratio against fitted constant") {
    const GnReport r = g_n_norm(solve(stirred_config(28)), nullptr, 12, 3.0);
    CHECK(r.fitted_constant > 0.0);
    CHECK(r.max_ratio >= 1.0 - 1e-12);
    CHECK(r.norm.size() == r.times.size());
  }
  CHECK_THROWS_AS(g_n_norm(solve(shear_config(12)), nullptr, 4, 7.0), InvalidArgument);
}

TEST_CASE("check suites") {
  const RautmannSuite r = rautmann_suite(50, 24, 2);
  CHECK(r.pass);
  CHECK(r.max_ratio <= 1.0 + 1e-12);
  const MassSpectrumSuite m = mass_spectrum_suite(28, 32, 0.5, 1.5, 4);
  CHECK(m.pass);
  CHECK(m.min_eigenvalue >= 0.5 - 1e-8);
  CHECK(m.max_eigenvalue <= 1.5 + 1e-8);
  const DecompositionSuite d = decomposition_suite(1);
  CHECK(d.pass);
  const SuiteReport all = default_lemma_suite(1);
  CHECK(all.pass);
  CHECK(all.entries.back().first == "pass");
}
