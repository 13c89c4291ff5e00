#include "sgns/density_transport.hpp"

#include "sgns/errors.hpp"

#include <algorithm>
#include <string>

namespace sgns {

DensityField::DensityField(GridField v, double lower, double upper)
    : values(std::move(v)), alpha(lower), beta(upper) {
  if (!(alpha > 0.0)) throw InvalidArgument("DensityField: alpha must be positive");
  if (!(beta >= alpha)) throw InvalidArgument("DensityField: beta must be >= alpha");
  const auto [lo, hi] = std::minmax_element(values.values.begin(), values.values.end());
  if (lo != values.values.end() && (*lo < alpha || *hi > beta)) {
    throw InvalidArgument("DensityField: values leave [alpha, beta] (range " + std::to_string(*lo) + ", " +
                          std::to_string(*hi) + ")");
  }
}

double DensityField::min() const { return *std::min_element(values.values.begin(), values.values.end()); }
double DensityField::max() const { return *std::max_element(values.values.begin(), values.values.end()); }

double DensityField::mass() const {
  double s = 0.0;
  for (double v : values.values) s += v;
  return s * values.cell_area();
}

// ---------------------------------------------------------------------------

HermiteGrid::HermiteGrid(const GridField& values) : f(values) {
  FieldTransform t(SpectralBasis{}, values.n);
  VectorGridField g = t.gradient(values);
  fxy = t.gradient(g.x).y;
  fx = std::move(g.x);
  fy = std::move(g.y);
}

namespace {

struct CellCoords {
  int i0, i1, j0, j1;
  double a, b;  // fractional offsets in [0, 1)
};

CellCoords locate(Point p, int n) {
  const double h = kTwoPi / n;
  const double s = p.x / h;
  const double t = p.y / h;
  const double fs = std::floor(s);
  const double ft = std::floor(t);
  CellCoords c;
  c.a = s - fs;
  c.b = t - ft;
  c.i0 = ((static_cast<int>(fs) % n) + n) % n;
  c.j0 = ((static_cast<int>(ft) % n) + n) % n;
  c.i1 = (c.i0 + 1) % n;
  c.j1 = (c.j0 + 1) % n;
  return c;
}

struct Hermite1d {
  double h0, h1, g0, g1;
  explicit Hermite1d(double a) {
    const double a2 = a * a;
    const double a3 = a2 * a;
    h0 = 2.0 * a3 - 3.0 * a2 + 1.0;
    h1 = -2.0 * a3 + 3.0 * a2;
    g0 = a3 - 2.0 * a2 + a;
    g1 = a3 - a2;
  }
};

}  // namespace

double HermiteGrid::sample(Point p) const {
  const int n = f.n;
  const CellCoords c = locate(p, n);
  const Hermite1d wx(c.a), wy(c.b);
  const double h = kTwoPi / n;
  auto corner = [&](int i, int j, double hx, double gx, double hy, double gy) {
    return hx * hy * f(i, j) + h * (gx * hy * fx(i, j) + hx * gy * fy(i, j)) + h * h * gx * gy * fxy(i, j);
  };
  return corner(c.i0, c.j0, wx.h0, wx.g0, wy.h0, wy.g0) + corner(c.i1, c.j0, wx.h1, wx.g1, wy.h0, wy.g0) +
         corner(c.i0, c.j1, wx.h0, wx.g0, wy.h1, wy.g1) + corner(c.i1, c.j1, wx.h1, wx.g1, wy.h1, wy.g1);
}

double HermiteGrid::sample_limited(Point p, double global_lo, double global_hi) const {
  const int n = f.n;
  const CellCoords c = locate(p, n);
  double lo = f(c.i0, c.j0);
  double hi = lo;
  for (int dj = -1; dj <= 2; ++dj) {
    const int j = ((c.j0 + dj) % n + n) % n;
    for (int di = -1; di <= 2; ++di) {
      const double v = f(((c.i0 + di) % n + n) % n, j);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  // A smooth extremum inside the cell overshoots the nodes by at most about a
  // ninth of the stencil range, so a quarter keeps it intact.
  const double slack = 0.25 * (hi - lo);
  return std::clamp(std::clamp(sample(p), lo - slack, hi + slack), global_lo, global_hi);
}

// ---------------------------------------------------------------------------

VelocitySampler::VelocitySampler(const VectorGridField& u) : ux_(u.x), uy_(u.y) {}

VelocitySampler::VelocitySampler(FieldTransform& transform, const SpectralVelocity& v)
    : ux_(transform.synthesize_derivative(v, 0, 0, 0), transform.synthesize_derivative(v, 0, 1, 0),
          transform.synthesize_derivative(v, 0, 0, 1), transform.synthesize_derivative(v, 0, 1, 1)),
      uy_(transform.synthesize_derivative(v, 1, 0, 0), transform.synthesize_derivative(v, 1, 1, 0),
          transform.synthesize_derivative(v, 1, 0, 1), transform.synthesize_derivative(v, 1, 1, 1)) {}

Point VelocityPair::operator()(Point p, double theta) const {
  const Point a = (*start)(p);
  if (start == end) return a;
  const Point b = (*end)(p);
  return {(1.0 - theta) * a.x + theta * b.x, (1.0 - theta) * a.y + theta * b.y};
}

Point trace_back(Point x, const VelocityPair& velocity, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("trace_back: dt must be positive");
  if (!velocity.start || !velocity.end) throw InvalidArgument("trace_back: missing velocity state");
  return trace_back_with(x, velocity, dt);
}

DensityField advect(const DensityField& rho, const VelocityPair& velocity, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("advect: dt must be positive");
  if (!velocity.start || !velocity.end) throw InvalidArgument("advect: missing velocity state");
  const int n = rho.n();
  if (velocity.start->n() != n || velocity.end->n() != n) {
    throw InvalidArgument("advect: velocity and density grids differ");
  }
  const HermiteGrid interp(rho.values);
  const double h = rho.values.spacing();
  DensityField out = rho;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Point departure = trace_back_with(Point{i * h, j * h}, velocity, dt);
      out.values(i, j) = interp.sample_limited(departure, rho.alpha, rho.beta);
    }
  }
  return out;
}

}  // namespace sgns
