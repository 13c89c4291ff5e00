#include "sgns/spectral_basis.hpp"

#include "sgns/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>

namespace sgns {

const char* to_string(Phase phase) { return phase == Phase::Cosine ? "cos" : "sin"; }

double WaveMode::polarization_x() const { return k2 / std::sqrt(eigenvalue()); }
double WaveMode::polarization_y() const { return -k1 / std::sqrt(eigenvalue()); }

bool is_canonical_wavevector(int k1, int k2) { return k1 > 0 || (k1 == 0 && k2 > 0); }

SpectralBasis::SpectralBasis(std::vector<WaveMode> modes) : modes_(std::move(modes)) {
  eigenvalues_.resize(static_cast<Eigen::Index>(modes_.size()));
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    const auto& m = modes_[i];
    if (!is_canonical_wavevector(m.k1, m.k2)) {
      throw InvalidArgument("SpectralBasis: non-canonical wavevector");
    }
    eigenvalues_[static_cast<Eigen::Index>(i)] = m.eigenvalue();
    index_[{m.k1, m.k2, static_cast<int>(m.phase)}] = i;
    max_wavenumber_ = std::max({max_wavenumber_, std::abs(m.k1), std::abs(m.k2)});
  }
}

std::size_t SpectralBasis::index_of(int k1, int k2, Phase phase) const {
  if (!is_canonical_wavevector(k1, k2)) {
    k1 = -k1;
    k2 = -k2;
  }
  auto it = index_.find({k1, k2, static_cast<int>(phase)});
  return it == index_.end() ? modes_.size() : it->second;
}

SpectralBasis SpectralBasis::truncated(std::size_t n) const {
  if (n > modes_.size()) {
    throw InvalidArgument("SpectralBasis::truncated: n exceeds basis size");
  }
  return SpectralBasis(std::vector<WaveMode>(modes_.begin(), modes_.begin() + static_cast<std::ptrdiff_t>(n)));
}

void SpectralBasis::write_manifest_csv(std::ostream& out) const {
  out << "index,k1,k2,phase,lambda\n";
  out << "count,1/length,1/length,name,1/length^2\n";
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    const auto& m = modes_[i];
    out << i << ',' << m.k1 << ',' << m.k2 << ',' << to_string(m.phase) << ',' << m.k1 * m.k1 + m.k2 * m.k2
        << '\n';
  }
}

namespace {

// All canonical modes with |k|^2 <= radius_sq, sorted in basis order.
std::vector<WaveMode> enumerate_modes(int radius_sq) {
  std::vector<WaveMode> out;
  const int r = static_cast<int>(std::floor(std::sqrt(static_cast<double>(radius_sq)))) + 1;
  for (int k1 = 0; k1 <= r; ++k1) {
    for (int k2 = -r; k2 <= r; ++k2) {
      if (!is_canonical_wavevector(k1, k2) || k1 * k1 + k2 * k2 > radius_sq) continue;
      out.push_back({k1, k2, Phase::Cosine});
      out.push_back({k1, k2, Phase::Sine});
    }
  }
  std::sort(out.begin(), out.end(), [](const WaveMode& a, const WaveMode& b) {
    const int la = a.k1 * a.k1 + a.k2 * a.k2;
    const int lb = b.k1 * b.k1 + b.k2 * b.k2;
    return std::tie(la, a.k1, a.k2, a.phase) < std::tie(lb, b.k1, b.k2, b.phase);
  });
  return out;
}

}  // namespace

SpectralBasis build_basis(std::size_t max_modes) {
  if (max_modes == 0) throw InvalidArgument("build_basis: max_modes must be >= 1");
  // Every mode with lambda <= radius_sq is present, so the first max_modes
  // entries of the sorted list are final once the list is long enough.
  int radius_sq = 1;
  std::vector<WaveMode> modes = enumerate_modes(radius_sq);
  while (modes.size() < max_modes) {
    radius_sq *= 2;
    modes = enumerate_modes(radius_sq);
  }
  modes.resize(max_modes);
  return SpectralBasis(std::move(modes));
}

std::size_t modes_up_to_shell(double shell) {
  if (shell < 1.0) return 0;
  return enumerate_modes(static_cast<int>(std::floor(shell))).size();
}

SpectralVelocity project_k(const SpectralVelocity& v, std::size_t k) {
  if (k > v.basis_size()) throw InvalidArgument("project_k: k exceeds basis size");
  SpectralVelocity out = v;
  out.coefficients.tail(static_cast<Eigen::Index>(v.basis_size() - k)).setZero();
  return out;
}

SpectralVelocity complement_k(const SpectralVelocity& v, std::size_t k) {
  if (k > v.basis_size()) throw InvalidArgument("complement_k: k exceeds basis size");
  SpectralVelocity out = v;
  out.coefficients.head(static_cast<Eigen::Index>(k)).setZero();
  return out;
}

Norms norms(const SpectralVelocity& v, const SpectralBasis& basis) {
  if (v.basis_size() > basis.size()) throw InvalidArgument("norms: coefficient vector longer than basis");
  const auto n = static_cast<Eigen::Index>(v.basis_size());
  const auto lambda = basis.eigenvalues().head(n).array();
  const auto c2 = v.coefficients.array().square();
  return {std::sqrt(c2.sum()), std::sqrt((lambda * c2).sum()), std::sqrt((lambda.square() * c2).sum())};
}

double RautmannRatios::max() const {
  return std::max({tail_vs_gradient, tail_vs_stokes, tail_gradient_vs_stokes});
}

RautmannRatios rautmann_check(const SpectralVelocity& v, const SpectralBasis& basis, std::size_t k) {
  if (k >= v.basis_size()) throw InvalidArgument("rautmann_check: k must be below the basis size");
  const Norms full = norms(v, basis);
  const Norms tail = norms(complement_k(v, k), basis);
  const double lambda_next = basis.eigenvalue(k);
  RautmannRatios out;
  if (full.dirichlet > 0.0) {
    out.tail_vs_gradient = tail.l2 * tail.l2 * lambda_next / (full.dirichlet * full.dirichlet);
  }
  if (full.stokes > 0.0) {
    const double s2 = full.stokes * full.stokes;
    out.tail_vs_stokes = tail.l2 * tail.l2 * lambda_next * lambda_next / s2;
    out.tail_gradient_vs_stokes = tail.dirichlet * tail.dirichlet * lambda_next / s2;
  }
  return out;
}

}  // namespace sgns
