#pragma once

// Independent reference computations for the unit tests. Nothing here calls
// into the FFT path; fields are evaluated pointwise from closed forms.

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

/// Normalised solenoidal mode evaluated directly.
inline std::pair<double, double> mode_value(int k1, int k2, bool sine, double x, double y) {
  const double norm = 1.0 / (kPi * std::sqrt(2.0));
  const double len = std::sqrt(double(k1 * k1 + k2 * k2));
  const double arg = k1 * x + k2 * y;
  const double s = sine ? std::sin(arg) : std::cos(arg);
  return {norm * k2 / len * s, -norm * k1 / len * s};
}

/// Trapezoid quadrature of f over the periodic (2pi)^2 square on an n x n grid.
template <class F>
double torus_integral(int n, F&& f) {
  const double h = 2.0 * kPi / n;
  double s = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) s += f(i * h, j * h);
  return s * h * h;
}

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> v(n);
  for (double& x : v) x = d(gen);
  return v;
}

}  // namespace oracle
