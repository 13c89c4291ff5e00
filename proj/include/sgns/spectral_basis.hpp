#pragma once

// Solenoidal Fourier eigenbasis of the Stokes operator on the 2pi-periodic
// torus, with the truncation projections and norms built on it.
//
// Every mode is  w(x) = c * p * cos(k.x)  or  c * p * sin(k.x)  with
// p = (k2, -k1)/|k| and c = 1/(pi*sqrt(2)), so that (w, w) = 1.

#include <Eigen/Core>

#include <cstddef>
#include <iosfwd>
#include <map>
#include <tuple>
#include <vector>

namespace sgns {

enum class Phase { Cosine = 0, Sine = 1 };

const char* to_string(Phase phase);

/// L2 normalisation shared by every mode on the (2pi)^2 torus.
inline constexpr double kModeNormalization = 0.22507907903927651;  // 1/(pi*sqrt(2))

struct WaveMode {
  int k1 = 0;
  int k2 = 0;
  Phase phase = Phase::Cosine;

  double eigenvalue() const { return static_cast<double>(k1 * k1 + k2 * k2); }
  double polarization_x() const;
  double polarization_y() const;

  bool operator==(const WaveMode&) const = default;
};

/// Coefficients C_k of a velocity field in a SpectralBasis.
struct SpectralVelocity {
  Eigen::VectorXd coefficients;

  SpectralVelocity() = default;
  explicit SpectralVelocity(std::size_t basis_size)
      : coefficients(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis_size))) {}
  explicit SpectralVelocity(Eigen::VectorXd c) : coefficients(std::move(c)) {}

  std::size_t basis_size() const { return static_cast<std::size_t>(coefficients.size()); }
  bool finite() const { return coefficients.allFinite(); }
};

class SpectralBasis {
 public:
  SpectralBasis() = default;
  explicit SpectralBasis(std::vector<WaveMode> modes);

  std::size_t size() const { return modes_.size(); }
  const std::vector<WaveMode>& modes() const { return modes_; }
  const WaveMode& mode(std::size_t i) const { return modes_.at(i); }

  /// lambda_{i+1} in one-based notation.
  double eigenvalue(std::size_t i) const { return eigenvalues_[static_cast<Eigen::Index>(i)]; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }

  /// Position of (k1, k2, phase); the wavevector may be given with either sign.
  /// Returns size() when the mode is not part of the basis.
  std::size_t index_of(int k1, int k2, Phase phase) const;

  /// max(|k1|, |k2|) over all modes; drives the grid headroom requirement.
  int max_wavenumber() const { return max_wavenumber_; }

  /// Leading sub-basis with the first n modes.
  SpectralBasis truncated(std::size_t n) const;

  void write_manifest_csv(std::ostream& out) const;

 private:
  std::vector<WaveMode> modes_;
  Eigen::VectorXd eigenvalues_;
  std::map<std::tuple<int, int, int>, std::size_t> index_;
  int max_wavenumber_ = 0;
};

/// First `max_modes` eigenpairs ordered by eigenvalue, then wavevector
/// (lexicographic), then cosine before sine.
SpectralBasis build_basis(std::size_t max_modes);

/// Number of modes with eigenvalue <= shell (the basis size that truncates
/// exactly at the end of that shell).
std::size_t modes_up_to_shell(double shell);

/// Canonical representative of +-k: k1 > 0, or k1 == 0 and k2 > 0.
bool is_canonical_wavevector(int k1, int k2);

/// P_k: zero every coefficient with index >= k.
SpectralVelocity project_k(const SpectralVelocity& v, std::size_t k);
/// Q_k = I - P_k.
SpectralVelocity complement_k(const SpectralVelocity& v, std::size_t k);

struct Norms {
  double l2 = 0.0;         // ||v||
  double dirichlet = 0.0;  // ||grad v||
  double stokes = 0.0;     // ||P Laplace v||
};

Norms norms(const SpectralVelocity& v, const SpectralBasis& basis);

struct RautmannRatios {
  double tail_vs_gradient = 0.0;        // ||v - P_k v||^2 lambda_{k+1} / ||grad v||^2
  double tail_vs_stokes = 0.0;          // ||v - P_k v||^2 lambda_{k+1}^2 / ||P Lap v||^2
  double tail_gradient_vs_stokes = 0.0;  // ||grad(v - P_k v)||^2 lambda_{k+1} / ||P Lap v||^2

  double max() const;
};

/// Projection-error ratios; each is <= 1 for every v. k must be < basis size.
RautmannRatios rautmann_check(const SpectralVelocity& v, const SpectralBasis& basis, std::size_t k);

}  // namespace sgns
