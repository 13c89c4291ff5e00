#pragma once

// Grid <-> spectral conversions on the n x n uniform grid over [0, 2pi)^2.
// Grid point (i, j) sits at x = 2pi i / n, y = 2pi j / n and is stored at
// values[j * n + i].

#include "sgns/fft.hpp"
#include "sgns/spectral_basis.hpp"

#include <complex>
#include <functional>
#include <iosfwd>
#include <limits>
#include <vector>

namespace sgns {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct GridField {
  int n = 0;
  std::vector<double> values;

  GridField() = default;
  explicit GridField(int size, double fill = 0.0)
      : n(size), values(static_cast<std::size_t>(size) * size, fill) {}

  double& operator()(int i, int j) { return values[static_cast<std::size_t>(j) * n + i]; }
  double operator()(int i, int j) const { return values[static_cast<std::size_t>(j) * n + i]; }
  double spacing() const { return kTwoPi / n; }
  double cell_area() const { return spacing() * spacing(); }

  static GridField sample(int size, const std::function<double(double, double)>& f);
};

struct VectorGridField {
  GridField x;
  GridField y;

  VectorGridField() = default;
  explicit VectorGridField(int size) : x(size), y(size) {}
  int n() const { return x.n; }

  static VectorGridField sample(int size, const std::function<std::pair<double, double>(double, double)>& f);
};

/// Throws InvalidArgument unless n is a power of two >= 2.
void require_power_of_two(int n);

/// Largest |k|_inf kept by the 2/3 rule on an n-point grid.
int dealiased_wavenumber(int n);

/// Largest basis size whose modes all satisfy the dealiasing headroom on n.
std::size_t grid_capacity(int n);

/// Non-throwing headroom test: every mode satisfies |k|_inf <= dealiased_wavenumber(n).
bool has_headroom(const SpectralBasis& basis, int n);

/// Direct (non-FFT) evaluation of one normalised mode; used as an oracle and
/// for closed-form forcing.
VectorGridField evaluate_mode(const WaveMode& mode, int n);

/// Scalar Fourier moments of a grid field under grid quadrature:
///   cos_moment(q) = sum_x f cos(q.x) dA,  sin_moment(q) = sum_x f sin(q.x) dA.
/// Wavevectors are taken modulo n, which is exactly what the quadrature sees.
class FourierMoments {
 public:
  FourierMoments(RealFft2d& fft, const GridField& f);
  double cos_moment(int q1, int q2) const;
  double sin_moment(int q1, int q2) const;

 private:
  std::complex<double> at(int q1, int q2) const;

  int n_ = 0;
  double cell_area_ = 0.0;
  std::vector<std::complex<double>> spectrum_;
};

/// Spectral machinery bound to one basis and one grid. Owns FFT scratch and
/// is therefore not shareable between threads.
class FieldTransform {
 public:
  /// Throws InvalidArgument when n is not a power of two or lacks headroom.
  FieldTransform(SpectralBasis basis, int n);

  int grid_size() const { return n_; }
  const SpectralBasis& basis() const { return basis_; }

  /// u(x) = sum_k C_k w^k(x) on the grid.
  VectorGridField synthesize(const SpectralVelocity& v);

  struct VelocityWithGradient {
    VectorGridField u;
    GridField dux_dx, dux_dy, duy_dx, duy_dy;
  };
  VelocityWithGradient synthesize_with_gradient(const SpectralVelocity& v);

  /// d^{d1}/dx^{d1} d^{d2}/dy^{d2} of one velocity component (0 = x, 1 = y).
  GridField synthesize_derivative(const SpectralVelocity& v, int component, int d1, int d2);

  /// Coefficients (f, w^k) by grid quadrature. For vector input this is the
  /// Leray projection onto the basis: gradients and the mean are annihilated.
  SpectralVelocity analyze(const VectorGridField& f);

  /// Same as analyze with an explicit grid-size check.
  SpectralVelocity leray_project(const VectorGridField& f);

  /// Spectral gradient of a scalar field.
  VectorGridField gradient(const GridField& f);

  RealFft2d& fft() { return fft_; }

 private:
  struct ModeSlot {
    std::size_t slot;         // index into half-complex spectrum
    std::size_t mirror_slot;  // (0, -k2) slot for k1 == 0 modes, else == slot
    bool on_axis;
    double ax, ay;  // c * polarization
    int k1, k2;
    Phase phase;
  };

  void fill_component_spectrum(const SpectralVelocity& v, bool x_component, int d1, int d2,
                               std::vector<std::complex<double>>& spec) const;
  void to_grid(const std::vector<std::complex<double>>& spec, GridField& out);

  SpectralBasis basis_;
  int n_ = 0;
  RealFft2d fft_;
  std::vector<ModeSlot> slots_;
  std::vector<std::complex<double>> spec_a_, spec_b_;
};

/// Spectral gradient without a bound basis.
VectorGridField gradient(const GridField& f);

/// Grid-quadrature L^p norm; p = +infinity gives the grid max of |f|.
double lp_norm(const GridField& f, double p);
/// L^p norm of the pointwise Euclidean magnitude.
double lp_norm(const VectorGridField& f, double p);

/// 2/3-rule product: both factors and the result truncated to
/// |k|_inf <= dealiased_wavenumber(n).
GridField dealiased_product(const GridField& f, const GridField& g);

/// Zero every Fourier mode with |k|_inf > kmax.
GridField truncate_band(const GridField& f, int kmax);

GridField operator-(const GridField& a, const GridField& b);

// Snapshot export. CSV columns: x,y,value (scalar) or x,y,u,v (vector).
// Binary: n*n little-endian IEEE-754 doubles, row-major, one block per
// component, no header.
void write_csv(std::ostream& out, const GridField& f);
void write_csv(std::ostream& out, const VectorGridField& f);
void write_binary(std::ostream& out, const GridField& f);
void write_binary(std::ostream& out, const VectorGridField& f);
GridField read_binary(std::istream& in, int n);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace sgns
