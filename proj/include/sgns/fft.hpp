#pragma once

#include <complex>
#include <span>

namespace sgns {

/// Real-to-complex 2D FFT on an n x n grid (row-major, y rows, x columns).
///
/// Spectrum layout is half-complex: entry [j2 * (n/2 + 1) + k1] holds the
/// coefficient of wavevector (k1, k2) with k1 in [0, n/2] and j2 = k2 mod n.
///   forward:  F(k) = sum_x f(x) exp(-i k.x)
///   inverse:  f(x) = sum_k F(k) exp(+i k.x)      (no 1/n^2 factor)
///
/// An instance owns scratch buffers and is not safe to share between threads.
class RealFft2d {
 public:
  explicit RealFft2d(int n);
  ~RealFft2d();
  RealFft2d(const RealFft2d&) = delete;
  RealFft2d& operator=(const RealFft2d&) = delete;
  RealFft2d(RealFft2d&& other) noexcept;
  RealFft2d& operator=(RealFft2d&& other) noexcept;

  int n() const { return n_; }
  int spectral_width() const { return n_ / 2 + 1; }
  std::size_t spectral_size() const { return static_cast<std::size_t>(n_) * spectral_width(); }

  void forward(std::span<const double> grid, std::span<std::complex<double>> spectrum);
  void inverse(std::span<const std::complex<double>> spectrum, std::span<double> grid);

 private:
  void release();

  int n_ = 0;
  double* real_ = nullptr;
  void* complex_ = nullptr;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

}  // namespace sgns
