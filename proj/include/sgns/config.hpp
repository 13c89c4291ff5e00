#pragma once

// Declarative run description. One JSON file holds the solver settings and,
// optionally, a convergence study block and a perturbation study block.
//
// Minimal file:
//   { "basis_size": 12, "grid_size": 32, "dt": 0.001, "t_end": 1.0 }

#include "sgns/perturbation.hpp"
#include "sgns/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sgns {

struct StudySection {
  std::vector<double> n_shells{4, 9, 16, 25, 36};
  double n_ref_shell = 128;
  std::vector<double> r_list{2, 3, 6};
  double p0 = kInfinity;
  std::vector<double> times;  // empty: 0 and t_end
  std::size_t threads = 1;
  std::optional<double> budget_seconds;

  bool operator==(const StudySection&) const = default;
};

struct PerturbationSection {
  double delta = 0.1;
  double A = 1.0;
  double B = 0.1;
  double p0 = kInfinity;
  std::vector<std::uint64_t> seeds{1};
  std::vector<double> t0_list{0.0};
  double horizon = 1.0;
  double band_shell = 4.0;
  int eta_wavenumber = 2;
  /// Use one basis mode as xi0 instead of a random band draw.
  std::optional<std::size_t> single_mode;

  PerturbationParameters parameters(double t0) const;

  bool operator==(const PerturbationSection&) const = default;
};

struct RunConfig {
  SolverConfig solver;
  std::optional<StudySection> study;
  std::optional<PerturbationSection> perturbation;

  bool operator==(const RunConfig&) const = default;
};

/// Parses and validates; throws ConfigError whose key_path() names the
/// offending entry (empty for malformed JSON).
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::filesystem::path& path);

/// Complete JSON form with every default written out; parsing it yields the
/// same RunConfig.
std::string config_to_json(const RunConfig& config);

}  // namespace sgns
