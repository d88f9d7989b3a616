#include "corrchan/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "corrchan/errors.hpp"

namespace corrchan {

namespace {

using json = nlohmann::json;

/// Walks `path` ("a.b[2].c") through the raw text to guess the line of the last key.
int locate_line(std::string_view raw, const std::string& path) {
  std::size_t pos = 0;
  bool found = false;
  std::string component;
  auto seek = [&](const std::string& key) {
    if (key.empty()) return;
    const auto hit = raw.find("\"" + key + "\"", pos);
    if (hit != std::string_view::npos) {
      pos = hit;
      found = true;
    }
  };
  for (char ch : path) {
    if (ch == '.' || ch == '[') {
      seek(component);
      component.clear();
      if (ch == '[') component = "[";
    } else if (ch == ']') {
      component.clear();
    } else if (component != "[") {
      component += ch;
    }
  }
  if (component != "[") seek(component);
  if (!found) return 0;
  return 1 + static_cast<int>(std::count(raw.begin(), raw.begin() + static_cast<long>(pos), '\n'));
}

class Parser {
 public:
  explicit Parser(std::string_view raw) : raw_(raw) {}

  [[noreturn]] void fail(const std::string& path, const std::string& message) const {
    throw ConfigError(path, message, locate_line(raw_, path));
  }

  void allow_only(const json& obj, const std::string& path,
                  std::initializer_list<std::string_view> keys) const {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [key, _] : obj.items()) {
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        fail(join(path, key), "unknown field");
      }
    }
  }

  const json& require(const json& obj, const std::string& path, const std::string& key) const {
    if (!obj.contains(key)) fail(join(path, key), "missing required field");
    return obj.at(key);
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "must be finite");
    return x;
  }

  int integer(const json& v, const std::string& path) const {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
  }

  cplx complex(const json& v, const std::string& path) const {
    if (v.is_number()) return {number(v, path), 0.0};
    if (v.is_array() && v.size() == 2) {
      return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
    }
    fail(path, "expected a number or a [re, im] pair");
  }

  std::string string(const json& v, const std::string& path) const {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

 private:
  std::string_view raw_;
};

ChannelParams parse_channel(const Parser& ps, const json& j, std::optional<double>& ratio) {
  ps.allow_only(j, "channel", {"gamma", "n0", "temperature_ratio"});
  const double gamma = ps.number(ps.require(j, "channel", "gamma"), "channel.gamma");
  if (!(gamma > 0.0)) ps.fail("channel.gamma", "must be > 0");
  const bool has_n0 = j.contains("n0");
  const bool has_ratio = j.contains("temperature_ratio");
  if (has_n0 == has_ratio) {
    ps.fail("channel", "give exactly one of n0 or temperature_ratio");
  }
  if (has_n0) {
    const double n0 = ps.number(j["n0"], "channel.n0");
    if (!(n0 >= 0.0)) ps.fail("channel.n0", "must be >= 0");
    return {gamma, n0};
  }
  const double x = ps.number(j["temperature_ratio"], "channel.temperature_ratio");
  if (!(x > 0.0)) ps.fail("channel.temperature_ratio", "must be > 0");
  ratio = x;
  return ChannelParams::from_temperature_ratio(gamma, x);
}

InputState parse_input(const Parser& ps, const json& j) {
  const std::string base = "input_state";
  if (!j.is_object()) ps.fail(base, "expected an object");
  const std::string type = ps.string(ps.require(j, base, "type"), base + ".type");
  InputState in;
  if (type == "coherent") {
    ps.allow_only(j, base, {"type", "alpha1", "alpha2"});
    in.kind = InputState::Kind::coherent;
    in.terms.terms.push_back({1.0, ps.complex(ps.require(j, base, "alpha1"), base + ".alpha1"),
                              ps.complex(ps.require(j, base, "alpha2"), base + ".alpha2")});
  } else if (type == "superposition") {
    ps.allow_only(j, base, {"type", "terms"});
    in.kind = InputState::Kind::superposition;
    const json& terms = ps.require(j, base, "terms");
    if (!terms.is_array() || terms.empty()) ps.fail(base + ".terms", "expected a non-empty array");
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::string p = base + ".terms[" + std::to_string(i) + "]";
      ps.allow_only(terms[i], p, {"c", "alpha1", "alpha2"});
      in.terms.terms.push_back({ps.complex(ps.require(terms[i], p, "c"), p + ".c"),
                                ps.complex(ps.require(terms[i], p, "alpha1"), p + ".alpha1"),
                                ps.complex(ps.require(terms[i], p, "alpha2"), p + ".alpha2")});
    }
    if (!(in.terms.norm_squared() > 1e-12)) ps.fail(base + ".terms", "superposition has zero norm");
  } else if (type == "entangled_coherent") {
    ps.allow_only(j, base, {"type", "alpha", "phi", "sign"});
    in.kind = InputState::Kind::entangled_coherent;
    in.alpha = ps.complex(ps.require(j, base, "alpha"), base + ".alpha");
    in.phi = j.contains("phi") ? ps.number(j["phi"], base + ".phi") : 0.0;
    in.sign = j.contains("sign") ? ps.integer(j["sign"], base + ".sign") : 1;
    if (in.sign != 1 && in.sign != -1) ps.fail(base + ".sign", "must be +1 or -1");
    try {
      in.terms = entangled_coherent(in.alpha, in.phi, in.sign);
    } catch (const DegenerateState& e) {
      ps.fail(base, e.what());
    }
  } else {
    ps.fail(base + ".type", "must be coherent, superposition or entangled_coherent");
  }
  return in;
}

std::optional<ModeCutoff> parse_cutoff(const Parser& ps, const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "auto") return std::nullopt;
    ps.fail("cutoff", "expected \"auto\", an integer or [d1, d2]");
  }
  if (j.is_number_integer()) {
    const int d = j.get<int>();
    if (d < 1) ps.fail("cutoff", "must be >= 1");
    return ModeCutoff(d, d);
  }
  if (j.is_array() && j.size() == 2) {
    const int d1 = ps.integer(j[0], "cutoff[0]");
    const int d2 = ps.integer(j[1], "cutoff[1]");
    if (d1 < 1 || d2 < 1) ps.fail("cutoff", "levels must be >= 1");
    return ModeCutoff(d1, d2);
  }
  ps.fail("cutoff", "expected \"auto\", an integer or [d1, d2]");
}

OutputKind output_from_string(const Parser& ps, const std::string& s, const std::string& path) {
  for (OutputKind k : {OutputKind::purity, OutputKind::fidelity, OutputKind::chi_grid,
                       OutputKind::q_grid, OutputKind::dfs}) {
    if (to_string(k) == s) return k;
  }
  ps.fail(path, "unknown output '" + s + "'");
}

}  // namespace

CoherentSuperposition InputState::superposition() const { return terms; }

std::optional<CoherentTerm> InputState::as_coherent() const {
  if (kind == Kind::coherent) return terms.terms.front();
  return std::nullopt;
}

std::string_view to_string(OutputKind kind) {
  switch (kind) {
    case OutputKind::purity: return "purity";
    case OutputKind::fidelity: return "fidelity";
    case OutputKind::chi_grid: return "chi_grid";
    case OutputKind::q_grid: return "q_grid";
    case OutputKind::dfs: return "dfs";
  }
  return "unknown";
}

std::string_view to_string(GeneratorChoice choice) {
  switch (choice) {
    case GeneratorChoice::correlated: return "correlated";
    case GeneratorChoice::independent: return "independent";
    case GeneratorChoice::both: return "both";
  }
  return "unknown";
}

std::vector<GeneratorKind> generators_of(GeneratorChoice choice) {
  switch (choice) {
    case GeneratorChoice::correlated: return {GeneratorKind::correlated};
    case GeneratorChoice::independent: return {GeneratorKind::independent};
    case GeneratorChoice::both: return {GeneratorKind::correlated, GeneratorKind::independent};
  }
  return {};
}

std::vector<PhasePoint> ChiGridSpec::points() const {
  const cplx dir1 = std::polar(1.0, std::numbers::pi / 5.0);
  const cplx dir2 = std::polar(1.0, -std::numbers::pi / 3.0);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    v[static_cast<std::size_t>(i)] = n == 1 ? 0.0 : -lambda_max + 2.0 * lambda_max * i / (n - 1);
  }
  std::vector<PhasePoint> out;
  out.reserve(v.size() * v.size());
  for (double a : v) {
    for (double b : v) out.push_back({a * dir1, b * dir2});
  }
  return out;
}

std::vector<double> QGridSpec::axis() const {
  if (!(step > 0.0) || !(xmax >= xmin)) throw DomainError("q grid needs step > 0 and xmax >= xmin");
  std::vector<double> out;
  for (long k = 0;; ++k) {
    const double x = xmin + static_cast<double>(k) * step;
    if (x > xmax + step * 1e-9) break;
    out.push_back(x);
  }
  return out;
}

std::vector<QPoint> QGridSpec::points() const {
  const auto ax = axis();
  std::vector<QPoint> out;
  out.reserve(ax.size() * ax.size() * ax.size() * ax.size());
  for (double r1 : ax)
    for (double i1 : ax)
      for (double r2 : ax)
        for (double i2 : ax) out.push_back({{r1, i1}, {r2, i2}});
  return out;
}

ModeCutoff Scenario::resolved_cutoff() const {
  if (cutoff) return *cutoff;
  return auto_cutoff(input.superposition().max_amplitude(), channel);
}

std::vector<double> Scenario::grid() const { return linear_grid(time.t_max, time.n_points); }

SimConfig Scenario::sim_config() const {
  SimConfig cfg;
  cfg.dt = dt;
  cfg.t_final = time.t_max;
  cfg.step_halving = step_halving;
  return cfg;
}

const std::vector<std::string>& sweepable_fields() {
  static const std::vector<std::string> fields = {
      "channel.gamma", "channel.n0",  "channel.temperature_ratio",
      "input_state.scale", "input_state.phi", "time_grid.t_max"};
  return fields;
}

Scenario parse_scenario(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n'));
    throw ConfigError("", std::string("JSON syntax error: ") + e.what(), line);
  }

  const Parser ps(text);
  ps.allow_only(root, "", {"version", "name", "channel", "input_state", "time_grid", "cutoff",
                           "generator", "outputs", "sim", "chi_grid", "q_grid", "sweep"});

  Scenario sc;
  sc.version = ps.integer(ps.require(root, "", "version"), "version");
  if (sc.version != kScenarioVersion) {
    ps.fail("version", "unsupported version (expected " + std::to_string(kScenarioVersion) + ")");
  }
  if (root.contains("name")) sc.name = ps.string(root["name"], "name");
  if (sc.name.empty() || sc.name == "." || sc.name == ".." ||
      sc.name.find_first_of("/\\") != std::string::npos) {
    ps.fail("name", "must be a non-empty file-name-safe string");
  }

  sc.channel = parse_channel(ps, ps.require(root, "", "channel"), sc.temperature_ratio);
  sc.input = parse_input(ps, ps.require(root, "", "input_state"));

  const json& tg = ps.require(root, "", "time_grid");
  ps.allow_only(tg, "time_grid", {"t_max", "n_points"});
  sc.time.t_max = ps.number(ps.require(tg, "time_grid", "t_max"), "time_grid.t_max");
  sc.time.n_points = ps.integer(ps.require(tg, "time_grid", "n_points"), "time_grid.n_points");
  if (sc.time.n_points < 1) ps.fail("time_grid.n_points", "must be >= 1");
  if (sc.time.n_points >= 2 && !(sc.time.t_max > 0.0)) {
    ps.fail("time_grid.t_max", "must be > 0 when n_points >= 2");
  }
  if (sc.time.t_max < 0.0) ps.fail("time_grid.t_max", "must be >= 0");

  if (root.contains("cutoff")) sc.cutoff = parse_cutoff(ps, root["cutoff"]);

  if (root.contains("generator")) {
    const std::string g = ps.string(root["generator"], "generator");
    if (g == "correlated") sc.generator = GeneratorChoice::correlated;
    else if (g == "independent") sc.generator = GeneratorChoice::independent;
    else if (g == "both") sc.generator = GeneratorChoice::both;
    else ps.fail("generator", "must be correlated, independent or both");
  }

  const json& outs = ps.require(root, "", "outputs");
  if (!outs.is_array() || outs.empty()) ps.fail("outputs", "expected a non-empty array");
  std::set<OutputKind> seen;
  for (std::size_t i = 0; i < outs.size(); ++i) {
    const std::string p = "outputs[" + std::to_string(i) + "]";
    const OutputKind k = output_from_string(ps, ps.string(outs[i], p), p);
    if (!seen.insert(k).second) ps.fail(p, "duplicate output");
    sc.outputs.push_back(k);
  }

  if (root.contains("sim")) {
    const json& sim = root["sim"];
    ps.allow_only(sim, "sim", {"dt", "step_halving"});
    if (sim.contains("dt")) {
      sc.dt = ps.number(sim["dt"], "sim.dt");
      if (!(sc.dt > 0.0)) ps.fail("sim.dt", "must be > 0");
    }
    if (sim.contains("step_halving")) {
      if (!sim["step_halving"].is_boolean()) ps.fail("sim.step_halving", "expected a boolean");
      sc.step_halving = sim["step_halving"].get<bool>();
    }
  }

  if (root.contains("chi_grid")) {
    const json& cg = root["chi_grid"];
    ps.allow_only(cg, "chi_grid", {"lambda_max", "n"});
    if (cg.contains("lambda_max")) sc.chi_grid.lambda_max = ps.number(cg["lambda_max"], "chi_grid.lambda_max");
    if (cg.contains("n")) sc.chi_grid.n = ps.integer(cg["n"], "chi_grid.n");
    if (!(sc.chi_grid.lambda_max >= 0.0)) ps.fail("chi_grid.lambda_max", "must be >= 0");
    if (sc.chi_grid.n < 1) ps.fail("chi_grid.n", "must be >= 1");
  }

  if (root.contains("q_grid")) {
    const json& qg = root["q_grid"];
    ps.allow_only(qg, "q_grid", {"xmin", "xmax", "step"});
    if (qg.contains("xmin")) sc.q_grid.xmin = ps.number(qg["xmin"], "q_grid.xmin");
    if (qg.contains("xmax")) sc.q_grid.xmax = ps.number(qg["xmax"], "q_grid.xmax");
    if (qg.contains("step")) sc.q_grid.step = ps.number(qg["step"], "q_grid.step");
    if (!(sc.q_grid.step > 0.0)) ps.fail("q_grid.step", "must be > 0");
    if (!(sc.q_grid.xmax >= sc.q_grid.xmin)) ps.fail("q_grid.xmax", "must be >= xmin");
  }

  if (root.contains("sweep")) {
    const json& sw = root["sweep"];
    ps.allow_only(sw, "sweep", {"field", "values"});
    SweepSpec spec;
    spec.field = ps.string(ps.require(sw, "sweep", "field"), "sweep.field");
    const auto& fields = sweepable_fields();
    if (std::find(fields.begin(), fields.end(), spec.field) == fields.end()) {
      ps.fail("sweep.field", "field '" + spec.field + "' cannot be swept");
    }
    const json& vals = ps.require(sw, "sweep", "values");
    if (!vals.is_array()) ps.fail("sweep.values", "expected an array");
    if (vals.empty()) ps.fail("sweep.values", "sweep list must not be empty");
    for (std::size_t i = 0; i < vals.size(); ++i) {
      spec.values.push_back(ps.number(vals[i], "sweep.values[" + std::to_string(i) + "]"));
    }
    // Validate every point up front so a bad value fails before any work starts.
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
      try {
        (void)with_field(sc, spec.field, spec.values[i]);
      } catch (const ConfigError& e) {
        ps.fail("sweep.values[" + std::to_string(i) + "]", e.what());
      }
    }
    sc.sweep = std::move(spec);
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open scenario file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

Scenario with_field(const Scenario& base, std::string_view field, double value) {
  Scenario sc = base;
  sc.sweep.reset();
  const std::string f(field);
  try {
    if (f == "channel.gamma") {
      sc.channel = ChannelParams(value, sc.channel.n0);
    } else if (f == "channel.n0") {
      sc.channel = ChannelParams(sc.channel.gamma, value);
      sc.temperature_ratio.reset();
    } else if (f == "channel.temperature_ratio") {
      sc.channel = ChannelParams::from_temperature_ratio(sc.channel.gamma, value);
      sc.temperature_ratio = value;
    } else if (f == "input_state.scale") {
      for (auto& t : sc.input.terms.terms) {
        t.alpha1 *= value;
        t.alpha2 *= value;
      }
      sc.input.alpha *= value;
      if (sc.input.kind == InputState::Kind::entangled_coherent) {
        sc.input.terms = entangled_coherent(sc.input.alpha, sc.input.phi, sc.input.sign);
      }
      if (!(sc.input.terms.norm_squared() > 1e-12)) throw DegenerateState("state vanishes");
    } else if (f == "input_state.phi") {
      if (sc.input.kind != InputState::Kind::entangled_coherent) {
        throw ConfigError("sweep.field", "input_state.phi applies to entangled_coherent inputs");
      }
      sc.input.phi = value;
      sc.input.terms = entangled_coherent(sc.input.alpha, value, sc.input.sign);
    } else if (f == "time_grid.t_max") {
      if (!(value > 0.0)) throw DomainError("t_max must be > 0");
      sc.time.t_max = value;
    } else {
      throw ConfigError("sweep.field", "field '" + f + "' cannot be swept");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(f, e.what());
  }
  return sc;
}

}  // namespace corrchan
