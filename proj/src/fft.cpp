#include "sgns/fft.hpp"

#include "sgns/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>
#include <utility>

namespace sgns {

namespace {
// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFft2d::RealFft2d(int n) : n_(n) {
  if (n < 2 || (n & (n - 1)) != 0) throw InvalidArgument("RealFft2d: grid size must be a power of two >= 2");
  const std::size_t grid = static_cast<std::size_t>(n) * n;
  std::lock_guard lock(planner_mutex());
  real_ = fftw_alloc_real(grid);
  auto* spec = fftw_alloc_complex(spectral_size());
  complex_ = spec;
  forward_plan_ = fftw_plan_dft_r2c_2d(n, n, real_, spec, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r_2d(n, n, spec, real_, FFTW_ESTIMATE);
  if (!forward_plan_ || !inverse_plan_) throw InternalError("RealFft2d: FFTW planning failed");
}

RealFft2d::~RealFft2d() { release(); }

RealFft2d::RealFft2d(RealFft2d&& other) noexcept
    : n_(std::exchange(other.n_, 0)),
      real_(std::exchange(other.real_, nullptr)),
      complex_(std::exchange(other.complex_, nullptr)),
      forward_plan_(std::exchange(other.forward_plan_, nullptr)),
      inverse_plan_(std::exchange(other.inverse_plan_, nullptr)) {}

RealFft2d& RealFft2d::operator=(RealFft2d&& other) noexcept {
  if (this != &other) {
    release();
    n_ = std::exchange(other.n_, 0);
    real_ = std::exchange(other.real_, nullptr);
    complex_ = std::exchange(other.complex_, nullptr);
    forward_plan_ = std::exchange(other.forward_plan_, nullptr);
    inverse_plan_ = std::exchange(other.inverse_plan_, nullptr);
  }
  return *this;
}

void RealFft2d::release() {
  if (!real_ && !complex_) return;
  std::lock_guard lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  fftw_free(real_);
  fftw_free(complex_);
  real_ = nullptr;
  complex_ = nullptr;
  forward_plan_ = inverse_plan_ = nullptr;
}

void RealFft2d::forward(std::span<const double> grid, std::span<std::complex<double>> spectrum) {
  const std::size_t size = static_cast<std::size_t>(n_) * n_;
  if (grid.size() != size || spectrum.size() != spectral_size()) {
    throw InvalidArgument("RealFft2d::forward: buffer size mismatch");
  }
  std::copy(grid.begin(), grid.end(), real_);
  fftw_execute(static_cast<fftw_plan>(forward_plan_));
  std::memcpy(spectrum.data(), complex_, spectral_size() * sizeof(fftw_complex));
}

void RealFft2d::inverse(std::span<const std::complex<double>> spectrum, std::span<double> grid) {
  const std::size_t size = static_cast<std::size_t>(n_) * n_;
  if (grid.size() != size || spectrum.size() != spectral_size()) {
    throw InvalidArgument("RealFft2d::inverse: buffer size mismatch");
  }
  // c2r overwrites its input, so it always runs on the private copy.
  std::memcpy(complex_, spectrum.data(), spectral_size() * sizeof(fftw_complex));
  fftw_execute(static_cast<fftw_plan>(inverse_plan_));
  std::copy(real_, real_ + size, grid.begin());
}

}  // namespace sgns
