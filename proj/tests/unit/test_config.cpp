#include <doctest.h>

#include "sgns/config.hpp"
#include "sgns/errors.hpp"

#include <filesystem>
#include <string>

using namespace sgns;

namespace {

std::string key_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.key_path();
  }
  return "<no error>";
}

const std::string kMinimal = R"({"basis_size": 12, "grid_size": 32, "dt": 0.001, "t_end": 0.1})";

// Minimal file with `extra` spliced in before the closing brace.
std::string with(const std::string& extra) { return kMinimal.substr(0, kMinimal.size() - 1) + ", " + extra + "}"; }

}  // namespace

TEST_CASE("minimal config gets defaults") {
  const RunConfig c = parse_config_text(kMinimal);
  CHECK(c.solver.basis_size == 12);
  CHECK(c.solver.grid_size == 32);
  CHECK(c.solver.step_count() == 100);
  CHECK(c.solver.forcing.kind == ForcingSpec::Kind::Zero);
  CHECK(c.solver.initial_velocity.catalog == "zero");
  CHECK(c.solver.initial_density.catalog == "uniform");
  CHECK(c.solver.initial_density.alpha == 1.0);
  CHECK(c.solver.output.stride == 1);
  CHECK(c.solver.output.directory == "out");
  CHECK(c.solver.seed == 0);
  CHECK_FALSE(c.study.has_value());
  CHECK_FALSE(c.perturbation.has_value());
}

TEST_CASE("config errors name the offending key") {
  CHECK(key_of(with(R"("initial_density": {"alpha": 0})")) == "initial_density.alpha");
  CHECK(key_of(with(R"("initial_density": {"catalog": "blob", "alpha": 1.5, "beta": 0.5})")) == "initial_density.beta");
  CHECK(key_of(R"({"basis_size": 12, "grid_size": 32, "t_end": 0.1})") == "dt");
  CHECK(key_of(R"({"basis_size": 500, "grid_size": 32, "dt": 0.001, "t_end": 0.1})") == "basis_size");
  CHECK(key_of(R"({"basis_size": 12, "grid_size": 48, "dt": 0.001, "t_end": 0.1})") == "grid_size");
  CHECK(key_of(R"({"basis_size": 12, "grid_size": 32, "dt": 0.003, "t_end": 0.1})") == "t_end");
  CHECK(key_of(with(R"("colour": 1)")) == "colour");
  CHECK(key_of(with(R"("forcing": {"kind": "steady", "amplitude": 1})")) == "forcing.mode");
  CHECK(key_of(with(R"("forcing": {"kind": "gusty"})")) == "forcing.kind");
  CHECK(key_of(with(R"("forcing": {"kind": "steady", "modes": [[1, 0, "cos"], [-1, 2, "sin"]]})")) == "forcing.modes[1]");
  CHECK(key_of(with(R"("initial_velocity": {"catalog": "vortex"})")) == "initial_velocity.catalog");
  CHECK(key_of(with(R"("initial_velocity": [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13])")) == "initial_velocity");
  CHECK(key_of(with(R"("output": {"stride": 0})")) == "output.stride");
  CHECK(key_of(with(R"("output": {"stride": 7})")) == "output.stride");
  CHECK(key_of(with(R"("seed": -3)")) == "seed");
  CHECK(key_of(with(R"("perturbation": {"delta": -1})")) == "perturbation.delta");
  CHECK(key_of(with(R"("perturbation": {"p0": 2})")) == "perturbation.p0");
  CHECK(key_of(with(R"("study": {"p0": 6, "r_list": [2, 6]})")) == "study");
  CHECK(key_of("{ not json") == "");
}

TEST_CASE("config accepts every form of the documented keys") {
  const RunConfig c = parse_config_text(with(R"(
    "seed": 4,
    "forcing": {"kind": "periodic", "amplitude": 0.5, "omega": 2.0, "mode": [2, -1, "sin"]},
    "initial_velocity": [0.0, 1.5],
    "initial_density": {"catalog": "stratified", "alpha": 0.8, "beta": 1.2},
    "output": {"stride": 10, "density_stride": 50, "directory": "runs/a"},
    "perturbation": {"delta": 0.1, "A": 1, "B": 0.2, "p0": "inf", "seeds": [3, 4], "t0": [0, 0.05],
                     "horizon": 0.5, "single_mode": 2, "eta_wavenumber": 0}
  )"));
  const SolverConfig& s = c.solver;
  CHECK(s.forcing.kind == ForcingSpec::Kind::Periodic);
  CHECK(s.forcing.modes == std::vector<WaveMode>{{2, -1, Phase::Sine}});
  CHECK(s.initial_velocity.catalog == "coefficients");
  CHECK(s.initial_velocity.coefficients == std::vector<double>{0.0, 1.5});
  CHECK(s.output.directory == "runs/a");
  REQUIRE(c.perturbation.has_value());
  CHECK(std::isinf(c.perturbation->p0));
  CHECK(c.perturbation->seeds == std::vector<std::uint64_t>{3, 4});
  CHECK(c.perturbation->single_mode == std::optional<std::size_t>(2));
  const PerturbationParameters p = c.perturbation->parameters(0.05);
  CHECK(p.t0 == 0.05);
  CHECK(p.eta_wavenumber == 0);
}

TEST_CASE("config round trip") {
  const std::filesystem::path dir = SGNS_SOURCE_DIR "/configs";
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    ++seen;
    CAPTURE(entry.path().string());
    const RunConfig a = parse_config(entry.path());
    const std::string text = config_to_json(a);
    const RunConfig b = parse_config_text(text);
    CHECK(a == b);
    CHECK(config_to_json(b) == text);
  }
  CHECK(seen >= 4);
  CHECK_THROWS_AS(parse_config(dir / "missing.json"), ConfigError);
}
