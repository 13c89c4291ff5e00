#include "sgns/config.hpp"

#include "sgns/convergence.hpp"
#include "sgns/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace sgns {

using nlohmann::json;

PerturbationParameters PerturbationSection::parameters(double t0) const {
  PerturbationParameters p;
  p.t0 = t0;
  p.delta = delta;
  p.A = A;
  p.B = B;
  p.p0 = p0;
  p.band_shell = band_shell;
  p.single_mode = single_mode;
  p.eta_wavenumber = eta_wavenumber;
  return p;
}

namespace {

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

// Typed access to one JSON object; every error carries the full key path.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_, "expected an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }
  std::string path(const std::string& key) const { return join(path_, key); }
  const json& at(const std::string& key) const { return node_.at(key); }

  void require(const std::string& key) const {
    if (!has(key)) throw ConfigError(path(key), "missing required key");
  }

  void reject_unknown(std::initializer_list<const char*> known) const {
    std::set<std::string> names(known.begin(), known.end());
    for (const auto& item : node_.items()) {
      if (!names.count(item.key())) throw ConfigError(path(item.key()), "unknown key");
    }
  }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return as_number(at(key), path(key));
  }

  // Accepts a number or the string "inf".
  double extended(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (v.is_string() && v.get<std::string>() == "inf") return kInfinity;
    return as_number(v, path(key));
  }

  std::uint64_t count(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    return as_count(at(key), path(key));
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    if (!at(key).is_string()) throw ConfigError(path(key), "expected a string");
    return at(key).get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_array()) throw ConfigError(path(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], path(key) + "[" + std::to_string(i) + "]"));
    return out;
  }

  static double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(where, "expected a finite number");
    return x;
  }

  static std::uint64_t as_count(const json& v, const std::string& where) {
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      throw ConfigError(where, "expected a nonnegative integer");
    }
    return v.get<std::uint64_t>();
  }

 private:
  const json& node_;
  std::string path_;
};

WaveMode parse_mode(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3 || !v[0].is_number_integer() || !v[1].is_number_integer() || !v[2].is_string()) {
    throw ConfigError(where, "expected [k1, k2, \"cos\" | \"sin\"]");
  }
  WaveMode m;
  m.k1 = v[0].get<int>();
  m.k2 = v[1].get<int>();
  const std::string phase = v[2].get<std::string>();
  if (phase == "cos") {
    m.phase = Phase::Cosine;
  } else if (phase == "sin") {
    m.phase = Phase::Sine;
  } else {
    throw ConfigError(where, "phase must be \"cos\" or \"sin\"");
  }
  if (!is_canonical_wavevector(m.k1, m.k2)) {
    throw ConfigError(where, "wavevector must have k1 > 0, or k1 = 0 and k2 > 0");
  }
  return m;
}

ForcingSpec parse_forcing(const Section& s) {
  s.reject_unknown({"kind", "amplitude", "omega", "mode", "modes"});
  ForcingSpec f;
  const std::string kind = s.text("kind", "zero");
  if (kind == "zero") {
    f.kind = ForcingSpec::Kind::Zero;
  } else if (kind == "steady") {
    f.kind = ForcingSpec::Kind::Steady;
  } else if (kind == "periodic") {
    f.kind = ForcingSpec::Kind::Periodic;
  } else {
    throw ConfigError(s.path("kind"), "unknown forcing kind '" + kind + "' (zero, steady, periodic)");
  }
  f.amplitude = s.number("amplitude", f.amplitude);
  f.omega = s.number("omega", f.omega);
  if (s.has("mode") && s.has("modes")) throw ConfigError(s.path("mode"), "give either mode or modes, not both");
  if (s.has("mode")) f.modes.push_back(parse_mode(s.at("mode"), s.path("mode")));
  if (s.has("modes")) {
    const json& list = s.at("modes");
    if (!list.is_array()) throw ConfigError(s.path("modes"), "expected an array of modes");
    for (std::size_t i = 0; i < list.size(); ++i) {
      f.modes.push_back(parse_mode(list[i], s.path("modes") + "[" + std::to_string(i) + "]"));
    }
  }
  if (f.kind != ForcingSpec::Kind::Zero && f.modes.empty()) {
    throw ConfigError(s.path("mode"), "forcing kind '" + kind + "' needs at least one mode");
  }
  return f;
}

InitialVelocitySpec parse_velocity(const json& node, const std::string& where, std::size_t basis_size) {
  InitialVelocitySpec v;
  if (node.is_string()) {
    v.catalog = node.get<std::string>();
  } else if (node.is_array()) {
    v.catalog = "coefficients";
    for (std::size_t i = 0; i < node.size(); ++i) {
      v.coefficients.push_back(Section::as_number(node[i], where + "[" + std::to_string(i) + "]"));
    }
  } else {
    const Section s(node, where);
    s.reject_unknown({"catalog", "amplitude", "width", "coefficients"});
    v.catalog = s.text("catalog", s.has("coefficients") ? "coefficients" : v.catalog);
    v.amplitude = s.number("amplitude", v.amplitude);
    v.width = s.number("width", v.width);
    v.coefficients = s.numbers("coefficients", {});
  }
  static const std::set<std::string> known{"zero", "shear", "taylor_green", "smooth_random", "coefficients"};
  const std::string catalog_path = node.is_object() ? join(where, "catalog") : where;
  if (!known.count(v.catalog)) {
    throw ConfigError(catalog_path,
                      "unknown velocity catalog '" + v.catalog +
                          "' (zero, shear, taylor_green, smooth_random, coefficients)");
  }
  if (v.catalog == "smooth_random" && !(v.width > 0.0)) throw ConfigError(join(where, "width"), "must be positive");
  if (v.coefficients.size() > basis_size) {
    throw ConfigError(node.is_array() ? where : join(where, "coefficients"),
                      "has " + std::to_string(v.coefficients.size()) + " entries but basis_size is " +
                          std::to_string(basis_size));
  }
  return v;
}

InitialDensitySpec parse_density(const Section& s) {
  s.reject_unknown({"catalog", "alpha", "beta", "value", "width"});
  InitialDensitySpec d;
  d.catalog = s.text("catalog", d.catalog);
  if (d.catalog != "uniform" && d.catalog != "blob" && d.catalog != "stratified") {
    throw ConfigError(s.path("catalog"), "unknown density catalog '" + d.catalog + "' (uniform, blob, stratified)");
  }
  d.value = s.number("value", d.value);
  // A uniform density defaults its bounds to its value.
  const double bound_default = d.catalog == "uniform" ? d.value : 1.0;
  d.alpha = s.number("alpha", bound_default);
  d.beta = s.number("beta", bound_default);
  d.width = s.number("width", d.width);
  if (!(d.alpha > 0.0)) throw ConfigError(s.path("alpha"), "must be positive");
  if (!(d.beta >= d.alpha)) throw ConfigError(s.path("beta"), "must be >= alpha");
  if (d.catalog == "uniform" && (d.value < d.alpha || d.value > d.beta)) {
    throw ConfigError(s.path("value"), "must lie in [alpha, beta]");
  }
  if (d.catalog == "blob" && !(d.width > 0.0)) throw ConfigError(s.path("width"), "must be positive");
  return d;
}

OutputSpec parse_output(const Section& s) {
  s.reject_unknown({"stride", "density_stride", "directory"});
  OutputSpec o;
  o.stride = s.count("stride", o.stride);
  o.density_stride = s.count("density_stride", o.density_stride);
  o.directory = s.text("directory", o.directory);
  if (o.stride == 0) throw ConfigError(s.path("stride"), "must be >= 1");
  return o;
}

bool is_step_multiple(double t, double dt) {
  const double ratio = t / dt;
  return std::abs(ratio - std::round(ratio)) <= 1e-9 * std::max(1.0, ratio);
}

StudySection parse_study(const Section& s, const SolverConfig& solver) {
  s.reject_unknown({"n_shells", "n_ref_shell", "r_list", "p0", "times", "threads", "budget_seconds"});
  StudySection st;
  st.n_shells = s.numbers("n_shells", st.n_shells);
  st.n_ref_shell = s.number("n_ref_shell", st.n_ref_shell);
  st.r_list = s.numbers("r_list", st.r_list);
  st.p0 = s.extended("p0", st.p0);
  st.times = s.numbers("times", st.times);
  st.threads = s.count("threads", st.threads);
  if (s.has("budget_seconds")) st.budget_seconds = s.number("budget_seconds", 0.0);
  if (!(st.p0 >= 6.0)) throw ConfigError(s.path("p0"), "must be >= 6 or \"inf\"");
  if (st.threads == 0) throw ConfigError(s.path("threads"), "must be >= 1");
  try {
    StudyPlan plan = plan_from_shells(solver, st.n_shells, st.n_ref_shell, st.r_list, st.p0,
                                      st.times.empty() ? std::vector<double>{0.0, solver.t_end} : st.times);
    plan.threads = st.threads;
    plan.budget_seconds = st.budget_seconds;
    plan.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("study", e.what());
  }
  return st;
}

PerturbationSection parse_perturbation(const Section& s, const SolverConfig& solver) {
  s.reject_unknown({"delta", "A", "B", "p0", "seeds", "t0", "horizon", "band_shell", "eta_wavenumber", "single_mode"});
  PerturbationSection p;
  p.delta = s.number("delta", p.delta);
  p.A = s.number("A", p.A);
  p.B = s.number("B", p.B);
  p.p0 = s.extended("p0", p.p0);
  if (s.has("seeds")) {
    const json& list = s.at("seeds");
    if (!list.is_array() || list.empty()) throw ConfigError(s.path("seeds"), "expected a nonempty array of integers");
    p.seeds.clear();
    for (std::size_t i = 0; i < list.size(); ++i) {
      p.seeds.push_back(Section::as_count(list[i], s.path("seeds") + "[" + std::to_string(i) + "]"));
    }
  }
  p.t0_list = s.numbers("t0", p.t0_list);
  p.horizon = s.number("horizon", p.horizon);
  p.band_shell = s.number("band_shell", p.band_shell);
  p.eta_wavenumber = static_cast<int>(s.count("eta_wavenumber", static_cast<std::uint64_t>(p.eta_wavenumber)));
  if (s.has("single_mode")) p.single_mode = s.count("single_mode", 0);

  if (!(p.delta > 0.0)) throw ConfigError(s.path("delta"), "must be positive");
  if (!(p.A > 0.0)) throw ConfigError(s.path("A"), "must be positive");
  if (!(p.B > 0.0)) throw ConfigError(s.path("B"), "must be positive");
  if (!(p.p0 >= 6.0)) throw ConfigError(s.path("p0"), "must be >= 6 or \"inf\"");
  if (p.t0_list.empty()) throw ConfigError(s.path("t0"), "must not be empty");
  for (double t0 : p.t0_list) {
    if (t0 < 0.0 || !is_step_multiple(t0, solver.dt)) {
      throw ConfigError(s.path("t0"), "entries must be nonnegative multiples of dt");
    }
  }
  if (!(p.horizon > 0.0) || !is_step_multiple(p.horizon, solver.dt)) {
    throw ConfigError(s.path("horizon"), "must be a positive multiple of dt");
  }
  if (!(p.band_shell >= 1.0)) throw ConfigError(s.path("band_shell"), "must be >= 1");
  if (p.single_mode && *p.single_mode >= solver.basis_size) {
    throw ConfigError(s.path("single_mode"), "must be below basis_size");
  }
  return p;
}

// Maps the solver's own validation message to the key it names.
std::string key_of_message(const std::string& message) {
  static const char* const keys[] = {"output.density_stride", "output.stride", "initial_density.alpha",
                                     "initial_density.beta",  "forcing",       "basis_size",
                                     "dt",                    "t_end"};
  for (const char* k : keys) {
    if (message.rfind(k, 0) == 0) return k;
  }
  if (message.rfind("grid size", 0) == 0) return "grid_size";
  return "";
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  const Section top(root, "");
  top.reject_unknown({"basis_size", "grid_size", "dt", "t_end", "forcing", "initial_velocity", "initial_density",
                      "output", "seed", "study", "perturbation"});
  for (const char* key : {"basis_size", "grid_size", "dt", "t_end"}) top.require(key);

  RunConfig config;
  SolverConfig& c = config.solver;
  c.basis_size = top.count("basis_size", 0);
  c.grid_size = static_cast<int>(top.count("grid_size", 0));
  c.dt = top.number("dt", 0.0);
  c.t_end = top.number("t_end", 0.0);
  c.seed = top.count("seed", 0);
  if (c.basis_size == 0) throw ConfigError("basis_size", "must be >= 1");
  if (c.grid_size < 2 || (c.grid_size & (c.grid_size - 1)) != 0) {
    throw ConfigError("grid_size", "must be a power of two >= 2");
  }
  if (!(c.dt > 0.0)) throw ConfigError("dt", "must be positive");
  if (!(c.t_end >= 0.0)) throw ConfigError("t_end", "must be >= 0");
  if (!is_step_multiple(c.t_end, c.dt)) throw ConfigError("t_end", "must be an integer multiple of dt");
  if (c.basis_size > grid_capacity(c.grid_size)) {
    throw ConfigError("basis_size", std::to_string(c.basis_size) + " modes need more dealiasing headroom than grid_size " +
                                        std::to_string(c.grid_size) + " provides (at most " +
                                        std::to_string(grid_capacity(c.grid_size)) + ")");
  }

  if (top.has("forcing")) c.forcing = parse_forcing(Section(top.at("forcing"), "forcing"));
  if (top.has("initial_velocity")) c.initial_velocity = parse_velocity(top.at("initial_velocity"), "initial_velocity", c.basis_size);
  if (top.has("initial_density")) c.initial_density = parse_density(Section(top.at("initial_density"), "initial_density"));
  if (top.has("output")) c.output = parse_output(Section(top.at("output"), "output"));

  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(key_of_message(e.what()), e.what());
  }
  if (top.has("study")) config.study = parse_study(Section(top.at("study"), "study"), c);
  if (top.has("perturbation")) config.perturbation = parse_perturbation(Section(top.at("perturbation"), "perturbation"), c);
  return config;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

namespace {

json mode_json(const WaveMode& m) { return json::array({m.k1, m.k2, to_string(m.phase)}); }

json extended_json(double x) { return std::isinf(x) ? json("inf") : json(x); }

}  // namespace

std::string config_to_json(const RunConfig& config) {
  const SolverConfig& c = config.solver;
  json root;
  root["basis_size"] = c.basis_size;
  root["grid_size"] = c.grid_size;
  root["dt"] = c.dt;
  root["t_end"] = c.t_end;
  root["seed"] = c.seed;

  json forcing;
  forcing["kind"] = to_string(c.forcing.kind);
  forcing["amplitude"] = c.forcing.amplitude;
  forcing["omega"] = c.forcing.omega;
  forcing["modes"] = json::array();
  for (const WaveMode& m : c.forcing.modes) forcing["modes"].push_back(mode_json(m));
  root["forcing"] = forcing;

  const InitialVelocitySpec& v = c.initial_velocity;
  root["initial_velocity"] = {{"catalog", v.catalog}, {"amplitude", v.amplitude}, {"width", v.width},
                              {"coefficients", v.coefficients}};
  const InitialDensitySpec& d = c.initial_density;
  root["initial_density"] = {
      {"catalog", d.catalog}, {"alpha", d.alpha}, {"beta", d.beta}, {"value", d.value}, {"width", d.width}};
  root["output"] = {{"stride", c.output.stride},
                    {"density_stride", c.output.density_stride},
                    {"directory", c.output.directory}};

  if (config.study) {
    const StudySection& s = *config.study;
    json st = {{"n_shells", s.n_shells}, {"n_ref_shell", s.n_ref_shell}, {"r_list", s.r_list},
               {"p0", extended_json(s.p0)}, {"times", s.times},      {"threads", s.threads}};
    if (s.budget_seconds) st["budget_seconds"] = *s.budget_seconds;
    root["study"] = st;
  }
  if (config.perturbation) {
    const PerturbationSection& p = *config.perturbation;
    json pt = {{"delta", p.delta},        {"A", p.A},
               {"B", p.B},                {"p0", extended_json(p.p0)},
               {"seeds", p.seeds},        {"t0", p.t0_list},
               {"horizon", p.horizon},    {"band_shell", p.band_shell},
               {"eta_wavenumber", p.eta_wavenumber}};
    if (p.single_mode) pt["single_mode"] = *p.single_mode;
    root["perturbation"] = pt;
  }
  return root.dump(2) + "\n";
}

}  // namespace sgns
