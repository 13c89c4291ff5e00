#pragma once

// Named initial data. Every entry is deterministic given its parameters and
// the run seed, and independent of the basis size it is projected onto.

#include "sgns/density_transport.hpp"
#include "sgns/field_transform.hpp"
#include "sgns/solver.hpp"

#include <cstdint>

namespace sgns {

/// Projection onto transform.basis() of the catalog velocity.
SpectralVelocity make_initial_velocity(const InitialVelocitySpec& spec, FieldTransform& transform,
                                       std::uint64_t seed);

DensityField make_initial_density(const InitialDensitySpec& spec, int n);

/// splitmix64 finaliser; the building block of all seeded draws.
std::uint64_t mix64(std::uint64_t x);

/// Portable seeded generator: uniform doubles in [0, 1) and standard normals.
class SeededRandom {
 public:
  explicit SeededRandom(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform();
  double normal();

 private:
  std::uint64_t state_;
};

}  // namespace sgns
