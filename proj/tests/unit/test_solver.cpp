#include "oracles.hpp"

#include <doctest.h>

#include "sgns/catalog.hpp"
#include "sgns/errors.hpp"
#include "sgns/solver.hpp"

#include <Eigen/Eigenvalues>

#include <random>

using namespace sgns;

namespace {

DensityField random_density(int n, std::uint64_t seed, double lo = 0.5, double hi = 1.5) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  GridField g(n);
  for (double& x : g.values) x = u(gen);
  return DensityField(g, lo, hi);
}

DensityField smooth_density(int n) {
  return DensityField(GridField::sample(n, [](double x, double y) { return 1.0 + 0.4 * std::sin(x + 2 * y) * std::cos(y); }),
                      0.5, 1.5);
}

SpectralVelocity random_velocity(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  const auto v = oracle::random_vector(n, seed, scale);
  return SpectralVelocity(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(n)));
}

SolverConfig shear_config(std::size_t n, double a) {
  SolverConfig c;
  c.basis_size = n;
  c.grid_size = 32;
  c.dt = 1e-3;
  c.t_end = 1.0;
  c.initial_velocity.catalog = "shear";
  c.initial_velocity.amplitude = a;
  c.output.stride = 100;
  return c;
}

}  // namespace

TEST_CASE("mass matrix") {
  const int n = 32;
  const SpectralBasis b = build_basis(modes_up_to_shell(36));
  CHECK((assemble_mass_matrix(DensityField(GridField(n, 1.0), 1.0, 1.0), b, b.size()) -
         Eigen::MatrixXd::Identity(b.size(), b.size()))
            .lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK((assemble_mass_matrix(DensityField(GridField(n, 1.5), 0.5, 1.5), b, b.size()) -
         1.5 * Eigen::MatrixXd::Identity(b.size(), b.size()))
            .lpNorm<Eigen::Infinity>() < 1e-10);

  SUBCASE("entries match direct quadrature") {
    const DensityField rho = smooth_density(n);
    const Eigen::MatrixXd m = assemble_mass_matrix(rho, b, 20);
    const double h = kTwoPi / n;
    for (int j = 0; j < 20; ++j)
      for (int k = 0; k < 20; ++k) {
        const WaveMode& a = b.mode(j);
        const WaveMode& c = b.mode(k);
        double s = 0.0;
        for (int q = 0; q < n; ++q)
          for (int p = 0; p < n; ++p) {
            const auto u = oracle::mode_value(a.k1, a.k2, a.phase == Phase::Sine, p * h, q * h);
            const auto w = oracle::mode_value(c.k1, c.k2, c.phase == Phase::Sine, p * h, q * h);
            s += rho.values(p, q) * (u.first * w.first + u.second * w.second) * h * h;
          }
        CHECK(std::abs(m(j, k) - s) < 1e-12);
      }
  }
  SUBCASE("spectrum of random densities stays in the density range") {
    const SpectralBasis b64 = build_basis(64);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Eigen::MatrixXd m = assemble_mass_matrix(random_density(n, seed), b64, 64);
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
      CHECK(es.eigenvalues().minCoeff() >= 0.5 - 1e-8);
      CHECK(es.eigenvalues().maxCoeff() <= 1.5 + 1e-8);
    }
  }
}

TEST_CASE("nonlinear term") {
  const int n = 32;
  const SpectralBasis b = build_basis(modes_up_to_shell(16));
  const DensityField rho = smooth_density(n);
  CHECK(nonlinear_term(SpectralVelocity(b.size()), rho, b).norm() == 0.0);

  SpectralVelocity shear(b.size());
  shear.coefficients[static_cast<Eigen::Index>(b.index_of(0, 1, Phase::Sine))] = 2.0;
  CHECK(nonlinear_term(shear, rho, b).lpNorm<Eigen::Infinity>() < 1e-14);

  const SpectralVelocity v = random_velocity(b.size(), 17);
  const DensityField one(GridField(n, 1.0), 1.0, 1.0);
  CHECK(std::abs(nonlinear_term(v, one, b).dot(v.coefficients)) < 1e-10);

  SUBCASE("direct pointwise oracle") {
    // u . grad u from the closed-form mode sum, weighted by rho, tested against each mode.
    const SpectralBasis small = build_basis(modes_up_to_shell(4));
    const SpectralVelocity w = random_velocity(small.size(), 3);
    const Eigen::VectorXd got = nonlinear_term(w, rho, small);
    const double h = kTwoPi / n;
    const double c = 1.0 / (oracle::kPi * std::sqrt(2.0));
    for (std::size_t j = 0; j < small.size(); ++j) {
      double s = 0.0;
      for (int q = 0; q < n; ++q)
        for (int p = 0; p < n; ++p) {
          const double x = p * h, y = q * h;
          double ux = 0, uy = 0, uxx = 0, uxy = 0, uyx = 0, uyy = 0;
          for (std::size_t k = 0; k < small.size(); ++k) {
            const WaveMode& m = small.mode(k);
            const double len = std::sqrt(m.eigenvalue());
            const double px = c * m.k2 / len, py = -c * m.k1 / len;
            const double arg = m.k1 * x + m.k2 * y;
            const double f = m.phase == Phase::Sine ? std::sin(arg) : std::cos(arg);
            const double df = m.phase == Phase::Sine ? std::cos(arg) : -std::sin(arg);
            const double a = w.coefficients[static_cast<Eigen::Index>(k)];
            ux += a * px * f;
            uy += a * py * f;
            uxx += a * px * df * m.k1;
            uxy += a * px * df * m.k2;
            uyx += a * py * df * m.k1;
            uyy += a * py * df * m.k2;
          }
          const WaveMode& mj = small.mode(j);
          const auto phi = oracle::mode_value(mj.k1, mj.k2, mj.phase == Phase::Sine, x, y);
          s += rho.values(p, q) * ((ux * uxx + uy * uxy) * phi.first + (ux * uyx + uy * uyy) * phi.second) * h * h;
        }
      CHECK(std::abs(got[static_cast<Eigen::Index>(j)] - s) < 1e-10);
    }
  }
}

TEST_CASE("forcing term") {
  const int n = 32;
  const SpectralBasis b = build_basis(modes_up_to_shell(9));
  const DensityField one(GridField(n, 1.0), 1.0, 1.0);
  CHECK(forcing_term(one, ForcingSpec{}, 0.0, b, b.size()).norm() == 0.0);

  ForcingSpec single{ForcingSpec::Kind::Steady, 1.0, 1.0, {WaveMode{1, 2, Phase::Cosine}}};
  const Eigen::VectorXd f = forcing_term(one, single, 0.3, b, b.size());
  for (std::size_t j = 0; j < b.size(); ++j) {
    CHECK(std::abs(f[static_cast<Eigen::Index>(j)] - (j == b.index_of(1, 2, Phase::Cosine) ? 1.0 : 0.0)) < 1e-12);
  }

  ForcingSpec periodic{ForcingSpec::Kind::Periodic, 0.7, 2.0, {WaveMode{1, 0, Phase::Sine}, WaveMode{1, -1, Phase::Cosine}}};
  const DensityField rho = smooth_density(n);
  const double t = 0.4;
  const Eigen::VectorXd g = forcing_term(rho, periodic, t, b, b.size());
  const double h = kTwoPi / n;
  for (std::size_t j = 0; j < b.size(); ++j) {
    const WaveMode& m = b.mode(j);
    double s = 0.0;
    for (int q = 0; q < n; ++q)
      for (int p = 0; p < n; ++p) {
        const auto a = oracle::mode_value(1, 0, true, p * h, q * h);
        const auto c = oracle::mode_value(1, -1, false, p * h, q * h);
        const auto phi = oracle::mode_value(m.k1, m.k2, m.phase == Phase::Sine, p * h, q * h);
        const double scale = 0.7 * std::cos(2.0 * t) * rho.values(p, q);
        s += scale * ((a.first + c.first) * phi.first + (a.second + c.second) * phi.second) * h * h;
      }
    CHECK(std::abs(g[static_cast<Eigen::Index>(j)] - s) < 1e-10);
  }
}

TEST_CASE("config validation") {
  SolverConfig c = shear_config(4, 1.0);
  CHECK_NOTHROW(c.validate());
  CHECK(c.step_count() == 1000);
  auto expect_invalid = [](SolverConfig bad) { CHECK_THROWS_AS(bad.validate(), InvalidArgument); };
  SolverConfig bad = c;
  bad.dt = 0.0;
  expect_invalid(bad);
  bad = c;
  bad.t_end = 1.00005;
  expect_invalid(bad);
  bad = c;
  bad.grid_size = 24;
  expect_invalid(bad);
  bad = c;
  bad.basis_size = grid_capacity(32) + 1;
  expect_invalid(bad);
  bad = c;
  bad.output.stride = 3;
  expect_invalid(bad);
  bad = c;
  bad.initial_density.alpha = 0.0;
  expect_invalid(bad);
}

TEST_CASE("Stokes decay of a shear mode") {
  const double a = 0.8;
  const Trajectory tr = solve(shear_config(12, a));
  REQUIRE(tr.times.size() == 11);
  CHECK(tr.times.back() == doctest::Approx(1.0).epsilon(1e-15));
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    // ||a sin y||_{L2} = a * pi * sqrt(2) on the (2pi)^2 torus.
    const double expect = a * oracle::kPi * std::sqrt(2.0) * std::exp(-tr.times[i]);
    const double got = norms(tr.velocity[i], tr.basis).l2;
    CHECK(std::abs(got - expect) / expect <= 1e-6);
    // The shear is an exact steady balance for u_t = -u.
    CHECK((tr.velocity_rate[i].coefficients + tr.velocity[i].coefficients).norm() < 1e-10);
  }
}

TEST_CASE("trivial runs") {
  SolverConfig c = shear_config(8, 1.0);
  c.t_end = 0.0;
  const Trajectory t0 = solve(c);
  CHECK(t0.times.size() == 1);
  CHECK(t0.density.size() == 1);
  CHECK(t0.final_state().velocity.coefficients == t0.velocity[0].coefficients);

  c.t_end = 0.05;
  c.output.stride = 1;
  c.initial_velocity.catalog = "zero";
  const Trajectory z = solve(c);
  for (const auto& v : z.velocity) CHECK(v.coefficients.norm() == 0.0);
}

TEST_CASE("truncation consistency for the shear") {
  SolverConfig c = shear_config(4, 1.0);
  c.t_end = 0.5;
  const Trajectory small = solve(c);
  c.basis_size = 40;
  const Trajectory large = solve(c);
  REQUIRE(small.times.size() == large.times.size());
  for (std::size_t i = 0; i < small.times.size(); ++i) {
    CHECK((large.velocity[i].coefficients.head(4) - small.velocity[i].coefficients).lpNorm<Eigen::Infinity>() <
          1e-12);
    CHECK(large.velocity[i].coefficients.tail(36).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}

TEST_CASE("stirred run: energy balance, bounds and decay without forcing") {
  SolverConfig c;
  c.basis_size = modes_up_to_shell(9);
  c.grid_size = 32;
  c.t_end = 0.4;
  c.initial_velocity = {"smooth_random", 1.0, 2.0, {}};
  c.initial_density = {"blob", 0.5, 1.5, 1.0, 0.8};
  c.seed = 5;
  double prev = 0.0;
  for (double dt : {0.02, 0.01, 0.005}) {
    c.dt = dt;
    const Trajectory tr = solve(c);
    const auto& r = tr.series.at("energy_residual");
    double worst = 0.0;
    for (double x : r) worst = std::max(worst, std::abs(x));
    if (prev > 0.0) CHECK(prev / worst > 3.5);
    prev = worst;
    const auto& e = tr.series.at("energy");
    for (std::size_t i = 1; i < e.size(); ++i) CHECK(e[i] <= e[i - 1] + 1e-6);
    for (double x : tr.series.at("rho_min")) CHECK(x >= 0.5 - 1e-12);
    for (double x : tr.series.at("rho_max")) CHECK(x <= 1.5 + 1e-12);
    for (double x : tr.series.at("galerkin_residual")) CHECK(x < 1e-10);
  }
}

TEST_CASE("catalog draws do not depend on the basis size") {
  InitialVelocitySpec spec{"smooth_random", 1.0, 2.0, {}};
  FieldTransform small(build_basis(12), 32);
  FieldTransform large(build_basis(60), 32);
  const SpectralVelocity a = make_initial_velocity(spec, small, 42);
  const SpectralVelocity b = make_initial_velocity(spec, large, 42);
  CHECK(b.coefficients.head(12) == a.coefficients);
  CHECK(make_initial_velocity(spec, small, 43).coefficients != a.coefficients);
  const DensityField blob = make_initial_density({"blob", 0.5, 1.5, 1.0, 0.6}, 32);
  CHECK(blob.min() >= 0.5);
  CHECK(blob.max() == doctest::Approx(1.5));
  CHECK_THROWS_AS(make_initial_density({"marble", 0.5, 1.5, 1.0, 0.6}, 32), InvalidArgument);
}
