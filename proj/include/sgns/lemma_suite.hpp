#pragma once

// Seeded check suites for the exact inequalities the solver relies on:
// projection-error ratios, the exponentially weighted integral bound, the
// mass-matrix spectrum and the reference/truncation error split. Used by the
// check-lemmas command and by the acceptance tests.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace sgns {

struct RautmannSuite {
  std::size_t trials = 0;
  std::size_t basis_size = 0;
  double max_ratio = 0.0;           // over all spectra, all k and all three ratios
  double single_mode_defect = 0.0;  // max |ratio - 1| for v = single mode at index k
  bool pass = false;                // max_ratio <= 1 + 1e-12 and defect <= 1e-12
};

/// Random spectra with independent normal coefficients under a random
/// power-law envelope, checked at every k < basis_size.
RautmannSuite rautmann_suite(std::size_t trials, std::size_t basis_size, std::uint64_t seed);

/// Samples of h = base + sum_j H 1[j - w <= t <= j] on [0, t_end] at spacing
/// dt, with H = a2 / (w + dt) so that each sampled pulse has trapezoid mass
/// a2. w must be a multiple of dt.
std::pair<std::vector<double>, std::vector<double>> spike_train(double base, double a2, double w, double dt,
                                                                double t_end);

struct WeightedBoundSuite {
  double constant_sup = 0.0;  // sup for h = 1, a1 = 1, a2 = 0
  std::size_t families = 0;
  double worst_fraction = 0.0;  // max over spike families of sup / bound
  bool pass = false;            // constant_sup = 1 +- 1e-6 and every family passes
};

WeightedBoundSuite weighted_bound_suite(std::size_t families, std::uint64_t seed);

struct MassSpectrumSuite {
  std::size_t basis_size = 0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double identity_defect = 0.0;  // ||M(1) - I||_max
  bool pass = false;
};

/// rho uniformly random in [alpha, beta] at every grid point.
MassSpectrumSuite mass_spectrum_suite(std::size_t basis_size, int grid_size, double alpha, double beta,
                                      std::uint64_t seed);

struct DecompositionSuite {
  double max_gradient_tail = 0.0;
  double max_l2_tail = 0.0;
  double max_parseval_defect = 0.0;  // relative to ||u_ref||^2
  bool pass = false;
};

/// Short stirred run with a reference basis and one truncation.
DecompositionSuite decomposition_suite(std::uint64_t seed);

/// Runs all suites at their default sizes and returns "key = value" lines.
struct SuiteReport {
  std::vector<std::pair<std::string, std::string>> entries;
  bool pass = false;
};

SuiteReport default_lemma_suite(std::uint64_t seed);

}  // namespace sgns
