#include "vsheet/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "vsheet/birkhoff_rott.hpp"
#include "vsheet/errors.hpp"
#include "vsheet/linear_kh.hpp"

namespace vsheet {

using nlohmann::json;

namespace {

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

std::string join(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

// Rejects keys outside `allowed` so that typos surface as errors instead of
// silently falling back to defaults.
void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ConfigError(join(path, key), "unknown field");
    }
  }
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

long long get_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<long long>();
}

std::size_t get_size(const json& j, const std::string& path) {
  const long long v = get_integer(j, path);
  if (v < 0) throw ConfigError(path, "must be >= 0");
  return static_cast<std::size_t>(v);
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

template <class T, class Fn>
void read_opt(const json& obj, const std::string& path, const char* key, T& out, Fn&& convert) {
  if (auto it = obj.find(key); it != obj.end()) out = convert(*it, join(path, key));
}

InitialSpec parse_initial(const json& j, const std::string& path) {
  only_keys(j, path, {"kind", "modes", "s", "seed", "amplitude", "shift"});
  InitialSpec spec;
  if (!j.contains("kind")) throw ConfigError(join(path, "kind"), "missing");
  const std::string kind = get_string(j["kind"], join(path, "kind"));
  if (kind == "flat") {
    spec.kind = InitialKind::flat;
  } else if (kind == "fourier_modes") {
    spec.kind = InitialKind::fourier_modes;
    const std::string mp = join(path, "modes");
    if (!j.contains("modes") || !j["modes"].is_array()) throw ConfigError(mp, "expected an array of [k, a_cos, a_sin]");
    for (std::size_t i = 0; i < j["modes"].size(); ++i) {
      const json& m = j["modes"][i];
      const std::string ip = join(mp, i);
      if (!m.is_array() || m.size() != 3) throw ConfigError(ip, "expected [k, a_cos, a_sin]");
      const long long k = get_integer(m[0], join(ip, 0));
      if (k < 0) throw ConfigError(join(ip, 0), "mode number must be >= 0");
      spec.modes.push_back({static_cast<double>(k), get_number(m[1], join(ip, 1)), get_number(m[2], join(ip, 2))});
    }
  } else if (kind == "sobolev_tail") {
    spec.kind = InitialKind::sobolev_tail;
    read_opt(j, path, "s", spec.s, get_number);
    read_opt(j, path, "amplitude", spec.amplitude, get_number);
    read_opt(j, path, "shift", spec.shift, get_number);
    if (j.contains("seed")) {
      const long long seed = get_integer(j["seed"], join(path, "seed"));
      if (seed < 0) throw ConfigError(join(path, "seed"), "must be >= 0");
      spec.seed = static_cast<std::uint64_t>(seed);
    }
    if (!(spec.s > 0.0)) throw ConfigError(join(path, "s"), "must be > 0");
  } else {
    throw ConfigError(join(path, "kind"), "unknown kind '" + kind + "'");
  }
  if (spec.kind != InitialKind::fourier_modes && j.contains("modes")) {
    throw ConfigError(join(path, "modes"), "only valid for kind fourier_modes");
  }
  return spec;
}

json initial_to_json(const InitialSpec& spec) {
  switch (spec.kind) {
    case InitialKind::flat:
      return {{"kind", "flat"}};
    case InitialKind::fourier_modes: {
      json modes = json::array();
      for (const auto& m : spec.modes) modes.push_back({static_cast<long long>(m[0]), m[1], m[2]});
      return {{"kind", "fourier_modes"}, {"modes", modes}};
    }
    case InitialKind::sobolev_tail:
      return {{"kind", "sobolev_tail"}, {"s", spec.s}, {"seed", spec.seed},
              {"amplitude", spec.amplitude}, {"shift", spec.shift}};
  }
  return {};
}

IntegratorConfig parse_integrator(const json& j, const std::string& path) {
  only_keys(j, path,
            {"dt_init", "cfl_safety", "adaptive", "filter_threshold", "arc_chord_floor", "strip_floor", "t_end",
             "method", "picard_tol", "picard_max_iter", "picard_steps", "output_dt", "sobolev_orders", "threads"});
  IntegratorConfig c;
  read_opt(j, path, "dt_init", c.dt_init, get_number);
  read_opt(j, path, "cfl_safety", c.cfl_safety, get_number);
  if (j.contains("adaptive")) {
    if (!j["adaptive"].is_boolean()) throw ConfigError(join(path, "adaptive"), "expected true or false");
    c.adaptive = j["adaptive"].get<bool>();
  }
  read_opt(j, path, "filter_threshold", c.filter_threshold, get_number);
  read_opt(j, path, "arc_chord_floor", c.arc_chord_floor, get_number);
  if (j.contains("strip_floor") && !j["strip_floor"].is_null()) {
    c.strip_floor = get_number(j["strip_floor"], join(path, "strip_floor"));
  }
  read_opt(j, path, "t_end", c.t_end, get_number);
  if (j.contains("method")) {
    try {
      c.method = parse_method(get_string(j["method"], join(path, "method")));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(join(path, "method"), e.what());
    }
  }
  read_opt(j, path, "picard_tol", c.picard_tol, get_number);
  read_opt(j, path, "picard_max_iter", c.picard_max_iter,
           [](const json& v, const std::string& p) { return static_cast<int>(get_integer(v, p)); });
  read_opt(j, path, "picard_steps", c.picard_steps,
           [](const json& v, const std::string& p) { return static_cast<int>(get_integer(v, p)); });
  read_opt(j, path, "output_dt", c.output_dt, get_number);
  if (j.contains("sobolev_orders")) {
    const std::string sp = join(path, "sobolev_orders");
    if (!j["sobolev_orders"].is_array()) throw ConfigError(sp, "expected an array");
    c.sobolev_orders.clear();
    for (std::size_t i = 0; i < j["sobolev_orders"].size(); ++i) {
      c.sobolev_orders.push_back(get_number(j["sobolev_orders"][i], join(sp, i)));
    }
  }
  read_opt(j, path, "threads", c.threads,
           [](const json& v, const std::string& p) { return static_cast<unsigned>(std::max<long long>(0, get_integer(v, p))); });
  c.validate();
  return c;
}

json integrator_to_json(const IntegratorConfig& c) {
  return {{"dt_init", c.dt_init},
          {"cfl_safety", c.cfl_safety},
          {"adaptive", c.adaptive},
          {"filter_threshold", c.filter_threshold},
          {"arc_chord_floor", c.arc_chord_floor},
          {"strip_floor", c.strip_floor ? json(*c.strip_floor) : json(nullptr)},
          {"t_end", c.t_end},
          {"method", std::string(to_string(c.method))},
          {"picard_tol", c.picard_tol},
          {"picard_max_iter", c.picard_max_iter},
          {"picard_steps", c.picard_steps},
          {"output_dt", c.output_dt},
          {"sobolev_orders", c.sobolev_orders},
          {"threads", c.threads}};
}

Analyses parse_analyses(const json& j, const std::string& path, const std::vector<std::string>& components) {
  only_keys(j, path, {"growth_rate", "characteristics", "illposedness", "blowup"});
  Analyses a;
  if (j.contains("growth_rate")) {
    const std::string p = join(path, "growth_rate");
    const json& g = j["growth_rate"];
    only_keys(g, p, {"field", "modes", "noise_floor"});
    GrowthRateAnalysis gr;
    if (!g.contains("field")) throw ConfigError(join(p, "field"), "missing");
    gr.field = get_string(g["field"], join(p, "field"));
    if (std::find(components.begin(), components.end(), gr.field) == components.end()) {
      throw ConfigError(join(p, "field"), "'" + gr.field + "' is not a component of this mode");
    }
    if (!g.contains("modes") || !g["modes"].is_array() || g["modes"].empty()) {
      throw ConfigError(join(p, "modes"), "expected a non-empty array of mode numbers");
    }
    for (std::size_t i = 0; i < g["modes"].size(); ++i) {
      gr.modes.push_back(static_cast<int>(get_integer(g["modes"][i], join(join(p, "modes"), i))));
    }
    read_opt(g, p, "noise_floor", gr.noise_floor, get_number);
    a.growth_rate = gr;
  }
  if (j.contains("characteristics")) {
    const std::string p = join(path, "characteristics");
    const json& c = j["characteristics"];
    only_keys(c, p, {"radius", "seeds"});
    CharacteristicsAnalysis ca;
    read_opt(c, p, "radius", ca.radius, get_number);
    read_opt(c, p, "seeds", ca.seeds, get_size);
    if (!(ca.radius > 0.0 && ca.radius < 1.0)) throw ConfigError(join(p, "radius"), "must lie in (0, 1)");
    if (ca.seeds == 0) throw ConfigError(join(p, "seeds"), "must be >= 1");
    a.characteristics = ca;
  }
  if (j.contains("illposedness")) {
    const std::string p = join(path, "illposedness");
    const json& c = j["illposedness"];
    only_keys(c, p, {"resolutions", "s", "t_probe"});
    IllposednessAnalysis ia;
    if (!c.contains("resolutions") || !c["resolutions"].is_array() || c["resolutions"].empty()) {
      throw ConfigError(join(p, "resolutions"), "expected a non-empty array");
    }
    for (std::size_t i = 0; i < c["resolutions"].size(); ++i) {
      const std::string rp = join(join(p, "resolutions"), i);
      const std::size_t n = get_size(c["resolutions"][i], rp);
      if (n % 2 != 0 || n < PeriodicGrid::kMinNodes) throw ConfigError(rp, "resolution must be even and >= 16");
      ia.resolutions.push_back(n);
    }
    read_opt(c, p, "s", ia.s, get_number);
    read_opt(c, p, "t_probe", ia.t_probe, get_number);
    if (!(ia.t_probe > 0.0)) throw ConfigError(join(p, "t_probe"), "must be > 0");
    a.illposedness = ia;
  }
  if (j.contains("blowup")) {
    if (!j["blowup"].is_boolean()) throw ConfigError(join(path, "blowup"), "expected true or false");
    a.blowup = j["blowup"].get<bool>();
  }
  return a;
}

json analyses_to_json(const Analyses& a) {
  json j = json::object();
  if (a.growth_rate) {
    j["growth_rate"] = {{"field", a.growth_rate->field},
                        {"modes", a.growth_rate->modes},
                        {"noise_floor", a.growth_rate->noise_floor}};
  }
  if (a.characteristics) {
    j["characteristics"] = {{"radius", a.characteristics->radius}, {"seeds", a.characteristics->seeds}};
  }
  if (a.illposedness) {
    j["illposedness"] = {{"resolutions", a.illposedness->resolutions},
                         {"s", a.illposedness->s},
                         {"t_probe", a.illposedness->t_probe}};
  }
  j["blowup"] = a.blowup;
  return j;
}

double tail_phase(std::uint64_t seed, int k) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(k)};
  std::mt19937_64 gen(seq);
  return std::uniform_real_distribution<double>(0.0, kTwoPi)(gen);
}

void check_mode_invariants(const Scenario& sc, const FieldSet& u) {
  const PeriodicGrid& grid = u.at(0).grid();
  switch (sc.mode) {
    case Mode::full_sheet: {
      const SheetState s = unpack_sheet(u, sc.background);
      const double ac = arc_chord(s.curve);
      if (!(ac > sc.integrator.arc_chord_floor)) {
        throw InvariantViolation("initial curve: arc-chord " + std::to_string(ac) + " not above floor " +
                                     std::to_string(sc.integrator.arc_chord_floor),
                                 ac);
      }
      break;
    }
    case Mode::graph: {
      VortexAmplitude w(u[1], sc.background);
      const double ac = arc_chord(SheetCurve(RealField::zeros(grid), u[0]));
      if (!(ac > sc.integrator.arc_chord_floor)) {
        throw InvariantViolation("initial graph: arc-chord " + std::to_string(ac) + " not above floor", ac);
      }
      break;
    }
    case Mode::amplitude_only:
      VortexAmplitude(u[0], sc.background);
      break;
    case Mode::linear_kh:
      LinearState(u[0], u[1]);
      break;
  }
}

}  // namespace

std::vector<std::string> mode_components(Mode mode) {
  switch (mode) {
    case Mode::full_sheet: return {"p1", "p2", "w"};
    case Mode::graph: return {"y", "w"};
    case Mode::amplitude_only: return {"w"};
    case Mode::linear_kh: return {"eps1", "eps2"};
  }
  return {};
}

Scenario parse_scenario(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("parse error: ") + e.what());
  }
  only_keys(j, "", {"name", "mode", "resolution", "background", "initial", "curve", "integrator", "analyses"});

  Scenario sc;
  if (!j.contains("name")) throw ConfigError("name", "missing");
  sc.name = get_string(j["name"], "name");
  if (sc.name.empty() || sc.name.find_first_of("/\\") != std::string::npos) {
    throw ConfigError("name", "must be a non-empty file-name-safe string");
  }
  if (!j.contains("mode")) throw ConfigError("mode", "missing");
  try {
    sc.mode = parse_mode(get_string(j["mode"], "mode"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("mode", e.what());
  }
  if (j.contains("resolution")) {
    sc.resolution = get_size(j["resolution"], "resolution");
  }
  if (sc.resolution % 2 != 0 || sc.resolution < PeriodicGrid::kMinNodes) {
    throw ConfigError("resolution", "must be even and >= 16, got " + std::to_string(sc.resolution));
  }
  read_opt(j, "", "background", sc.background, get_number);
  if (sc.mode == Mode::linear_kh && sc.background != 0.0) {
    throw ConfigError("background", "linear_kh takes no background");
  }

  const std::vector<std::string> comps = mode_components(sc.mode);
  if (j.contains("initial")) {
    const json& init = j["initial"];
    if (!init.is_object()) throw ConfigError("initial", "expected an object");
    for (const auto& [key, value] : init.items()) {
      if (std::find(comps.begin(), comps.end(), key) == comps.end()) {
        throw ConfigError(join("initial", key), "not a component of mode " + std::string(to_string(sc.mode)));
      }
      sc.initial[key] = parse_initial(value, join("initial", key));
    }
  }
  if (j.contains("curve") && !j["curve"].is_null()) {
    if (sc.mode != Mode::full_sheet) throw ConfigError("curve", "only valid for mode full_sheet");
    if (sc.initial.contains("p1") || sc.initial.contains("p2")) {
      throw ConfigError("curve", "conflicts with initial.p1 / initial.p2");
    }
    only_keys(j["curve"], "curve", {"kind", "a", "k"});
    const std::string kind = j["curve"].contains("kind") ? get_string(j["curve"]["kind"], "curve.kind") : "";
    if (kind != "circle_perturbation") throw ConfigError("curve.kind", "expected 'circle_perturbation'");
    CirclePerturbation cp;
    read_opt(j["curve"], "curve", "a", cp.a, get_number);
    read_opt(j["curve"], "curve", "k", cp.k,
             [](const json& v, const std::string& p) { return static_cast<int>(get_integer(v, p)); });
    if (cp.k < 1) throw ConfigError("curve.k", "must be >= 1");
    sc.curve = cp;
  }
  if (j.contains("integrator")) sc.integrator = parse_integrator(j["integrator"], "integrator");
  if (j.contains("analyses")) sc.analyses = parse_analyses(j["analyses"], "analyses", comps);

  if (sc.analyses.characteristics || sc.analyses.blowup || sc.analyses.illposedness) {
    if (sc.mode != Mode::amplitude_only) {
      throw ConfigError("analyses", "characteristics, blowup and illposedness need mode amplitude_only");
    }
  }
  if (sc.analyses.characteristics && sc.background != 0.0) {
    throw ConfigError("analyses.characteristics", "needs background 0");
  }

  check_mode_invariants(sc, initial_state(sc));
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open scenario file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string write_scenario(const Scenario& sc) {
  json j;
  j["name"] = sc.name;
  j["mode"] = std::string(to_string(sc.mode));
  j["resolution"] = sc.resolution;
  j["background"] = sc.background;
  json init = json::object();
  for (const auto& [key, spec] : sc.initial) init[key] = initial_to_json(spec);
  j["initial"] = init;
  if (sc.curve) {
    j["curve"] = {{"kind", "circle_perturbation"}, {"a", sc.curve->a}, {"k", sc.curve->k}};
  } else {
    j["curve"] = nullptr;
  }
  j["integrator"] = integrator_to_json(sc.integrator);
  j["analyses"] = analyses_to_json(sc.analyses);
  return j.dump(2) + "\n";
}

RealField build_field(const InitialSpec& spec, const PeriodicGrid& grid) {
  switch (spec.kind) {
    case InitialKind::flat:
      return RealField::zeros(grid);
    case InitialKind::fourier_modes:
      return RealField::sample(grid, [&](double a) {
        double v = 0.0;
        for (const auto& m : spec.modes) v += m[1] * std::cos(m[0] * a) + m[2] * std::sin(m[0] * a);
        return v;
      });
    case InitialKind::sobolev_tail: {
      std::vector<Complex> c(grid.size(), 0.0);
      c[1] = 0.5 * spec.shift;
      for (int k = 2; k <= grid.max_mode(); ++k) {
        const double mag = spec.amplitude * std::pow(static_cast<double>(k), -(spec.s + 1.0));
        c[grid.index_of(k)] = 0.5 * mag * std::polar(1.0, tail_phase(spec.seed, k));
      }
      return RealField::from_spectrum(grid, c);
    }
  }
  throw std::invalid_argument("build_field: unknown kind");
}

FieldSet initial_state(const Scenario& sc) { return initial_state(sc, PeriodicGrid(sc.resolution)); }

FieldSet initial_state(const Scenario& sc, const PeriodicGrid& grid) {
  FieldSet u;
  for (const std::string& c : mode_components(sc.mode)) {
    RealField f = RealField::zeros(grid);
    if (auto it = sc.initial.find(c); it != sc.initial.end()) f = build_field(it->second, grid);
    if (sc.curve && (c == "p1" || c == "p2")) {
      const double a = sc.curve->a, k = sc.curve->k;
      f = RealField::sample(grid, [&](double x) { return c == "p1" ? a * std::sin(k * x) : a * std::cos(k * x); });
    }
    if (c == "w" && sc.background != 0.0) f = f + RealField::constant(grid, sc.background);
    u.push_back(std::move(f));
  }
  return u;
}

std::vector<std::filesystem::path> list_scenarios(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  if (!std::filesystem::is_directory(dir)) return out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace vsheet
