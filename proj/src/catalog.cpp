#include "sgns/catalog.hpp"

#include "sgns/errors.hpp"

#include <algorithm>
#include <cmath>

namespace sgns {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t SeededRandom::next() {
  state_ += 0x9e3779b97f4a7c15ULL;
  return mix64(state_);
}

double SeededRandom::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double SeededRandom::normal() {
  // Box-Muller; 1 - u keeps the log argument away from zero.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

namespace {

// One independent normal per (seed, k1, k2, phase): the same wavevector gets
// the same draw whatever basis it is projected onto.
double mode_draw(std::uint64_t seed, const WaveMode& m) {
  std::uint64_t key = mix64(seed);
  key = mix64(key ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(m.k1)));
  key = mix64(key ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(m.k2)) << 1));
  key = mix64(key ^ static_cast<std::uint64_t>(m.phase == Phase::Sine ? 0x5bd1e995ULL : 0x1b873593ULL));
  return SeededRandom(key).normal();
}

}  // namespace

SpectralVelocity make_initial_velocity(const InitialVelocitySpec& spec, FieldTransform& transform,
                                       std::uint64_t seed) {
  const SpectralBasis& basis = transform.basis();
  const std::size_t n = basis.size();
  SpectralVelocity out(n);
  const double a = spec.amplitude;
  if (spec.catalog == "zero") return out;
  if (spec.catalog == "shear") {
    // a (sin y, 0) is the sine mode of k = (0, 1) with polarisation (1, 0).
    const std::size_t j = basis.index_of(0, 1, Phase::Sine);
    if (j >= n) throw InvalidArgument("shear initial velocity needs basis_size >= 2");
    out.coefficients[static_cast<Eigen::Index>(j)] = a / kModeNormalization;
    return out;
  }
  if (spec.catalog == "taylor_green") {
    const VectorGridField f = VectorGridField::sample(transform.grid_size(), [a](double x, double y) {
      return std::pair{a * std::sin(x) * std::cos(y), -a * std::cos(x) * std::sin(y)};
    });
    return transform.analyze(f);
  }
  if (spec.catalog == "smooth_random") {
    if (!(spec.width > 0.0)) throw InvalidArgument("smooth_random initial velocity needs width > 0");
    for (std::size_t j = 0; j < n; ++j) {
      const WaveMode& m = basis.mode(j);
      const double envelope = std::exp(-m.eigenvalue() / (2.0 * spec.width * spec.width));
      out.coefficients[static_cast<Eigen::Index>(j)] = a * envelope * mode_draw(seed, m);
    }
    return out;
  }
  if (spec.catalog == "coefficients") {
    for (std::size_t j = 0; j < n && j < spec.coefficients.size(); ++j) {
      out.coefficients[static_cast<Eigen::Index>(j)] = spec.coefficients[j];
    }
    return out;
  }
  throw InvalidArgument("unknown initial velocity catalog '" + spec.catalog + "'");
}

DensityField make_initial_density(const InitialDensitySpec& spec, int n) {
  if (spec.catalog == "uniform") {
    return DensityField(GridField(n, spec.value), spec.alpha, spec.beta);
  }
  if (spec.catalog == "blob") {
    if (!(spec.width > 0.0)) throw InvalidArgument("blob density needs width > 0");
    const double lo = spec.alpha;
    const double span = spec.beta - spec.alpha;
    const double inv_w2 = 1.0 / (spec.width * spec.width);
    GridField g = GridField::sample(n, [&](double x, double y) {
      return lo + span * std::exp((std::cos(x - M_PI) + std::cos(y - M_PI) - 2.0) * inv_w2);
    });
    return DensityField(std::move(g), spec.alpha, spec.beta);
  }
  if (spec.catalog == "stratified") {
    const double mid = 0.5 * (spec.alpha + spec.beta);
    const double amp = 0.5 * (spec.beta - spec.alpha);
    GridField g = GridField::sample(n, [&](double, double y) { return mid + amp * std::sin(y); });
    // sin(y) can round a hair past +-1 times amp; keep the declared bounds exact.
    for (double& v : g.values) v = std::clamp(v, spec.alpha, spec.beta);
    return DensityField(std::move(g), spec.alpha, spec.beta);
  }
  throw InvalidArgument("unknown initial density catalog '" + spec.catalog + "'");
}

}  // namespace sgns
