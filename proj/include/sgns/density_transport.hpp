#pragma once

// Semi-Lagrangian transport of the density: rho_t + u . grad rho = 0.
//
// Departure points come from a backward RK4 trace with the velocity linear in
// time across the step. Values at departure points use bicubic Hermite
// interpolation (spectral nodal derivatives) passed through a limiter: the
// range of the surrounding 4x4 nodes, widened by a quarter of its width on
// each side, and then intersected with the declared bounds [alpha, beta].
// The widening lets resolved smooth extrema between nodes survive, so the
// grid range can move by interpolation-sized amounts; [alpha, beta] itself
// is never left.

#include "sgns/field_transform.hpp"

#include <cmath>

namespace sgns {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct DensityField {
  GridField values;
  double alpha = 1.0;  // lower bound, > 0
  double beta = 1.0;   // upper bound, >= alpha

  DensityField() = default;
  DensityField(GridField v, double lower, double upper);

  int n() const { return values.n; }
  double min() const;
  double max() const;
  /// grid-quadrature integral of rho
  double mass() const;
};

/// Nodal data for bicubic Hermite interpolation of a periodic scalar.
struct HermiteGrid {
  GridField f, fx, fy, fxy;

  HermiteGrid() = default;
  /// Derivatives by spectral differentiation.
  explicit HermiteGrid(const GridField& values);
  HermiteGrid(GridField value, GridField dx, GridField dy, GridField dxy)
      : f(std::move(value)), fx(std::move(dx)), fy(std::move(dy)), fxy(std::move(dxy)) {}

  int n() const { return f.n; }
  double sample(Point p) const;
  /// Sample limited to the widened 4x4 stencil range, then to [lo, hi].
  double sample_limited(Point p, double lo, double hi) const;
};

/// Continuous velocity field reconstructed from grid samples.
class VelocitySampler {
 public:
  VelocitySampler() = default;
  explicit VelocitySampler(const VectorGridField& u);
  VelocitySampler(FieldTransform& transform, const SpectralVelocity& v);

  Point operator()(Point p) const { return {ux_.sample(p), uy_.sample(p)}; }
  int n() const { return ux_.n(); }

 private:
  HermiteGrid ux_, uy_;
};

/// Velocity at the start and end of one step; sampled linearly in between.
struct VelocityPair {
  const VelocitySampler* start = nullptr;
  const VelocitySampler* end = nullptr;

  /// theta = 0 at the start of the step, 1 at the end.
  Point operator()(Point p, double theta) const;
};

inline Point wrap_periodic(Point p) {
  auto wrap = [](double v) {
    v = std::fmod(v, kTwoPi);
    if (v < 0.0) v += kTwoPi;
    return v >= kTwoPi ? 0.0 : v;
  };
  return {wrap(p.x), wrap(p.y)};
}

/// Departure point of the characteristic that reaches x at the end of a step
/// of length dt. `velocity(p, theta)` gives u at fraction theta of the step.
template <class Velocity>
Point trace_back_with(Point x, const Velocity& velocity, double dt) {
  const Point k1 = velocity(x, 1.0);
  const Point k2 = velocity({x.x - 0.5 * dt * k1.x, x.y - 0.5 * dt * k1.y}, 0.5);
  const Point k3 = velocity({x.x - 0.5 * dt * k2.x, x.y - 0.5 * dt * k2.y}, 0.5);
  const Point k4 = velocity({x.x - dt * k3.x, x.y - dt * k3.y}, 0.0);
  return wrap_periodic({x.x - dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
                        x.y - dt / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y)});
}

/// Throws InvalidArgument for dt <= 0.
Point trace_back(Point x, const VelocityPair& velocity, double dt);

/// One semi-Lagrangian step. The result keeps, and respects, the input's (alpha, beta).
DensityField advect(const DensityField& rho, const VelocityPair& velocity, double dt);

}  // namespace sgns
