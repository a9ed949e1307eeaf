#include "vsheet/timestepping.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "vsheet/amplitude.hpp"
#include "vsheet/errors.hpp"
#include "vsheet/linear_kh.hpp"

namespace vsheet {

// ---------------------------------------------------------------- names

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::full_sheet: return "full_sheet";
    case Mode::graph: return "graph";
    case Mode::amplitude_only: return "amplitude_only";
    case Mode::linear_kh: return "linear_kh";
  }
  return "?";
}

std::string_view to_string(Method m) { return m == Method::rk4 ? "rk4" : "picard"; }

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::t_end: return "t_end";
    case StopReason::arc_chord_floor: return "arc_chord_floor";
    case StopReason::strip_floor: return "strip_floor";
    case StopReason::nonfinite: return "nonfinite";
    case StopReason::picard_diverged: return "picard_diverged";
  }
  return "?";
}

Mode parse_mode(std::string_view s) {
  for (Mode m : {Mode::full_sheet, Mode::graph, Mode::amplitude_only, Mode::linear_kh}) {
    if (to_string(m) == s) return m;
  }
  throw std::invalid_argument("unknown mode '" + std::string(s) + "'");
}

Method parse_method(std::string_view s) {
  if (s == "rk4") return Method::rk4;
  if (s == "picard") return Method::picard;
  throw std::invalid_argument("unknown method '" + std::string(s) + "'");
}

StopReason parse_stop_reason(std::string_view s) {
  for (StopReason r : {StopReason::t_end, StopReason::arc_chord_floor, StopReason::strip_floor,
                       StopReason::nonfinite, StopReason::picard_diverged}) {
    if (to_string(r) == s) return r;
  }
  throw std::invalid_argument("unknown stop reason '" + std::string(s) + "'");
}

// ---------------------------------------------------------------- systems

double EvolutionSystem::arc_chord(const FieldSet&) const {
  return std::numeric_limits<double>::quiet_NaN();
}

FieldSet pack(const SheetState& s) {
  return {s.curve.p1(), s.curve.p2(), s.amplitude.field()};
}

SheetState unpack_sheet(const FieldSet& u, double background, double time) {
  return {SheetCurve(u.at(0), u.at(1)), VortexAmplitude(u.at(2), background), time};
}

namespace {

double max_hypot(const RealField& a, const RealField& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::hypot(a[j], b[j]));
  return m;
}

class SheetSystem final : public EvolutionSystem {
 public:
  SheetSystem(double background, BrOptions opts) : background_(background), opts_(opts) {}
  Mode mode() const override { return Mode::full_sheet; }
  std::vector<std::string> components() const override { return {"p1", "p2", "w"}; }
  FieldSet rhs(const FieldSet& u) const override {
    const SheetRhs r = sheet_rhs(unpack_sheet(u, background_), opts_);
    return {r.dz.x, r.dz.y, r.dw};
  }
  double characteristic_speed(const FieldSet& u) const override {
    const SheetRhs r = sheet_rhs(unpack_sheet(u, background_), opts_);
    return max_hypot(r.dz.x, r.dz.y);
  }
  double arc_chord(const FieldSet& u) const override { return vsheet::arc_chord(SheetCurve(u[0], u[1])); }
  int amplitude_index() const override { return 2; }
  double background() const override { return background_; }

 private:
  double background_;
  BrOptions opts_;
};

class GraphSystem final : public EvolutionSystem {
 public:
  GraphSystem(double background, BrOptions opts) : background_(background), opts_(opts) {}
  Mode mode() const override { return Mode::graph; }
  std::vector<std::string> components() const override { return {"y", "w"}; }
  FieldSet rhs(const FieldSet& u) const override {
    const GraphRhs r = duchon_robert_rhs(u[0], VortexAmplitude(u[1], background_), opts_);
    return {r.dy, derivative(r.c * u[1], 1)};
  }
  double characteristic_speed(const FieldSet& u) const override {
    const GraphRhs r = duchon_robert_rhs(u[0], VortexAmplitude(u[1], background_), opts_);
    return std::max(r.dy.max_abs(), r.c.max_abs());
  }
  double arc_chord(const FieldSet& u) const override {
    return vsheet::arc_chord(SheetCurve(RealField::zeros(u[0].grid()), u[0]));
  }
  int amplitude_index() const override { return 1; }
  double background() const override { return background_; }

 private:
  double background_;
  BrOptions opts_;
};

class AmplitudeSystem final : public EvolutionSystem {
 public:
  explicit AmplitudeSystem(double background) : background_(background) {}
  Mode mode() const override { return Mode::amplitude_only; }
  std::vector<std::string> components() const override { return {"w"}; }
  FieldSet rhs(const FieldSet& u) const override {
    return {amplitude_rhs(VortexAmplitude(u[0], background_))};
  }
  double characteristic_speed(const FieldSet& u) const override {
    return 0.5 * max_hypot(hilbert_transform(u[0]), u[0]);
  }
  int amplitude_index() const override { return 0; }
  double background() const override { return background_; }

 private:
  double background_;
};

class LinearSystem final : public EvolutionSystem {
 public:
  Mode mode() const override { return Mode::linear_kh; }
  std::vector<std::string> components() const override { return {"eps1", "eps2"}; }
  FieldSet rhs(const FieldSet& u) const override {
    const LinearState d = linear_rhs(LinearState(u[0], u[1]));
    return {d.eps1(), d.eps2()};
  }
  // Lambda/2 propagates mode k at rate |k|/2, i.e. unit speed 1/2.
  double characteristic_speed(const FieldSet&) const override { return 0.5; }
};

}  // namespace

std::unique_ptr<EvolutionSystem> make_system(Mode mode, double background, const BrOptions& opts) {
  switch (mode) {
    case Mode::full_sheet: return std::make_unique<SheetSystem>(background, opts);
    case Mode::graph: return std::make_unique<GraphSystem>(background, opts);
    case Mode::amplitude_only: return std::make_unique<AmplitudeSystem>(background);
    case Mode::linear_kh:
      if (background != 0.0) throw std::invalid_argument("linear_kh system takes no background");
      return std::make_unique<LinearSystem>();
  }
  throw std::invalid_argument("make_system: unknown mode");
}

// ---------------------------------------------------------------- config

void IntegratorConfig::validate() const {
  auto require = [](bool ok, const char* field, const char* what) {
    if (!ok) throw ConfigError(std::string("integrator.") + field, what);
  };
  require(dt_init > 0.0, "dt_init", "must be > 0");
  require(cfl_safety > 0.0 && cfl_safety <= 1.0, "cfl_safety", "must lie in (0, 1]");
  require(filter_threshold >= 0.0, "filter_threshold", "must be >= 0");
  require(arc_chord_floor > 0.0, "arc_chord_floor", "must be > 0");
  require(!strip_floor || *strip_floor >= 0.0, "strip_floor", "must be >= 0");
  require(t_end > 0.0, "t_end", "must be > 0");
  require(picard_tol > 0.0, "picard_tol", "must be > 0");
  require(picard_max_iter >= 1, "picard_max_iter", "must be >= 1");
  require(picard_steps >= 1, "picard_steps", "must be >= 1");
  require(output_dt >= 0.0, "output_dt", "must be >= 0");
  require(threads >= 1, "threads", "must be >= 1");
  for (double s : sobolev_orders) require(s >= 0.0, "sobolev_orders", "orders must be >= 0");
}

double IntegratorConfig::resolved_strip_floor(const PeriodicGrid& grid) const {
  return strip_floor ? *strip_floor : 3.0 * grid.spacing();
}

// ---------------------------------------------------------------- stepping

namespace {

FieldSet axpy(const FieldSet& u, double a, const FieldSet& k) {
  FieldSet out;
  out.reserve(u.size());
  for (std::size_t c = 0; c < u.size(); ++c) out.push_back(u[c] + a * k[c]);
  return out;
}

bool all_finite(const FieldSet& u) {
  for (const RealField& f : u) {
    for (double v : f.values()) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

FieldSet checked_stage(const RhsFunction& rhs, const FieldSet& u, int stage) {
  FieldSet k = rhs(u);
  if (!all_finite(k)) throw NumericalHalt("rk4 stage " + std::to_string(stage) + ": non-finite rhs");
  return k;
}

double max_diff(const FieldSet& a, const FieldSet& b) {
  double m = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    for (std::size_t j = 0; j < a[c].size(); ++j) m = std::max(m, std::abs(a[c][j] - b[c][j]));
  }
  return m;
}

}  // namespace

FieldSet apply_filter(const FieldSet& u, double relative_threshold) {
  if (!(relative_threshold > 0.0)) return u;
  double cmax = 0.0;
  for (const RealField& f : u) cmax = std::max(cmax, f.max_coefficient());
  if (cmax == 0.0) return u;
  FieldSet out;
  out.reserve(u.size());
  for (const RealField& f : u) out.push_back(krasny_filter(f, relative_threshold * cmax));
  return out;
}

FieldSet rk4_step(const FieldSet& u, const RhsFunction& rhs, double dt, double relative_threshold) {
  if (!(dt > 0.0)) throw std::invalid_argument("rk4_step: dt must be > 0");
  const FieldSet k1 = checked_stage(rhs, u, 1);
  const FieldSet k2 = checked_stage(rhs, axpy(u, 0.5 * dt, k1), 2);
  const FieldSet k3 = checked_stage(rhs, axpy(u, 0.5 * dt, k2), 3);
  const FieldSet k4 = checked_stage(rhs, axpy(u, dt, k3), 4);
  FieldSet next;
  next.reserve(u.size());
  for (std::size_t c = 0; c < u.size(); ++c) {
    next.push_back(u[c] + (dt / 6.0) * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]));
  }
  if (!all_finite(next)) throw NumericalHalt("rk4 update: non-finite state");
  return apply_filter(next, relative_threshold);
}

double adapt_dt(const EvolutionSystem& system, const FieldSet& u, const IntegratorConfig& config) {
  constexpr double kSpeedFloor = 1e-12;
  constexpr double kMinDt = 1e-8;
  const double h = u.at(0).grid().spacing();
  const double speed = std::max(system.characteristic_speed(u), kSpeedFloor);
  return std::clamp(config.cfl_safety * h / speed, kMinDt, config.dt_init);
}

PicardResult picard_iterate(const FieldSet& initial, const RhsFunction& rhs, double horizon, int steps,
                            double tol, int max_iter, double relative_threshold) {
  if (!(horizon > 0.0) || steps < 1) throw std::invalid_argument("picard_iterate: bad time grid");
  PicardResult res;
  const double dt = horizon / steps;
  for (int m = 0; m <= steps; ++m) res.times.push_back(m * dt);
  res.trajectory.assign(static_cast<std::size_t>(steps) + 1, initial);

  for (int it = 1; it <= max_iter; ++it) {
    std::vector<FieldSet> f;
    f.reserve(res.trajectory.size());
    for (const FieldSet& u : res.trajectory) {
      FieldSet k = rhs(u);
      if (!all_finite(k)) {
        res.iterations = it;
        return res;
      }
      f.push_back(std::move(k));
    }
    std::vector<FieldSet> next;
    next.reserve(res.trajectory.size());
    next.push_back(initial);
    FieldSet acc = initial;
    for (int m = 1; m <= steps; ++m) {
      acc = axpy(axpy(acc, 0.5 * dt, f[m - 1]), 0.5 * dt, f[m]);
      next.push_back(apply_filter(acc, relative_threshold));
    }
    double change = 0.0;
    for (std::size_t m = 0; m < next.size(); ++m) change = std::max(change, max_diff(next[m], res.trajectory[m]));
    res.trajectory = std::move(next);
    res.iterations = it;
    res.last_change = change;
    if (change < tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

// ---------------------------------------------------------------- runs

std::vector<double> RunRecord::times() const {
  std::vector<double> t;
  for (const Snapshot& s : snapshots) t.push_back(s.time);
  return t;
}

std::vector<RealField> RunRecord::series(std::size_t component) const {
  std::vector<RealField> out;
  for (const Snapshot& s : snapshots) out.push_back(s.fields.at(component));
  return out;
}

std::size_t RunRecord::component_index(std::string_view name) const {
  for (std::size_t c = 0; c < components.size(); ++c) {
    if (components[c] == name) return c;
  }
  throw std::out_of_range("RunRecord: no component '" + std::string(name) + "'");
}

Snapshot make_snapshot(const EvolutionSystem& system, const FieldSet& u, double time,
                       const IntegratorConfig& config) {
  Snapshot s;
  s.time = time;
  s.fields = u;
  s.arc_chord = system.arc_chord(u);
  const int ai = system.amplitude_index();
  if (ai >= 0) s.mean_deviation = u[static_cast<std::size_t>(ai)].mean() - system.background();
  for (const RealField& f : u) {
    ComponentDiagnostics cd;
    const SpectrumDiagnostics sd = strip_width(f);
    cd.strip_width = sd.strip_width;
    cd.fit_residual = sd.fit_residual;
    cd.max_abs = f.max_abs();
    for (double o : config.sobolev_orders) cd.sobolev.push_back(sobolev_norm(f, o));
    s.strip_width = std::min(s.strip_width, cd.strip_width);
    s.components.push_back(std::move(cd));
  }
  return s;
}

namespace {

// Returns the stop reason triggered by a snapshot, if any.
std::optional<StopReason> floor_violation(const Snapshot& s, double arc_floor, double strip_floor,
                                          std::string& detail) {
  if (!std::isnan(s.arc_chord) && s.arc_chord < arc_floor) {
    detail = "arc-chord " + std::to_string(s.arc_chord) + " below floor " + std::to_string(arc_floor);
    return StopReason::arc_chord_floor;
  }
  if (strip_floor > 0.0 && s.strip_width < strip_floor) {
    detail = "strip width " + std::to_string(s.strip_width) + " below floor " + std::to_string(strip_floor);
    return StopReason::strip_floor;
  }
  return std::nullopt;
}

void attach_bernoulli(RunRecord& rec) {
  if (rec.mode != Mode::full_sheet || rec.snapshots.size() < 3) return;
  for (std::size_t i = 1; i + 1 < rec.snapshots.size(); ++i) {
    const double a = rec.snapshots[i].time - rec.snapshots[i - 1].time;
    const double b = rec.snapshots[i + 1].time - rec.snapshots[i].time;
    if (!(a > 0.0) || std::abs(a - b) > 1e-9 * a) continue;
    std::vector<SheetState> trio;
    for (std::size_t j = i - 1; j <= i + 1; ++j) {
      trio.push_back(unpack_sheet(rec.snapshots[j].fields, rec.background, rec.snapshots[j].time));
    }
    rec.snapshots[i].bernoulli_residual = bernoulli_residual(trio).front().max_abs();
  }
}

}  // namespace

RunRecord run_simulation(const IntegratorConfig& config, const EvolutionSystem& system,
                         const FieldSet& initial) {
  config.validate();
  if (initial.size() != system.components().size()) {
    throw std::invalid_argument("run_simulation: initial state has wrong number of components");
  }
  RunRecord rec;
  rec.config = config;
  rec.mode = system.mode();
  rec.components = system.components();
  rec.background = system.background();

  const PeriodicGrid grid = initial.at(0).grid();
  const double strip_floor = config.resolved_strip_floor(grid);
  const RhsFunction rhs = [&system](const FieldSet& u) { return system.rhs(u); };

  rec.snapshots.push_back(make_snapshot(system, initial, 0.0, config));
  if (auto r = floor_violation(rec.snapshots.back(), config.arc_chord_floor, strip_floor, rec.stop_detail)) {
    rec.stop_reason = *r;
    return rec;
  }

  if (config.method == Method::picard) {
    const PicardResult pr = picard_iterate(initial, rhs, config.t_end, config.picard_steps, config.picard_tol,
                                           config.picard_max_iter, config.filter_threshold);
    rec.steps = static_cast<std::size_t>(pr.iterations);
    for (std::size_t m = 1; m < pr.times.size(); ++m) {
      if (!all_finite(pr.trajectory[m])) break;
      rec.snapshots.push_back(make_snapshot(system, pr.trajectory[m], pr.times[m], config));
      if (auto r = floor_violation(rec.snapshots.back(), config.arc_chord_floor, strip_floor, rec.stop_detail)) {
        rec.stop_reason = *r;
        attach_bernoulli(rec);
        return rec;
      }
    }
    if (!pr.converged) {
      rec.stop_reason = StopReason::picard_diverged;
      rec.stop_detail = "no convergence after " + std::to_string(pr.iterations) +
                        " iterations (last change " + std::to_string(pr.last_change) + ")";
    }
    attach_bernoulli(rec);
    return rec;
  }

  FieldSet u = initial;
  double t = 0.0;
  std::size_t outputs = 1;
  const double t_eps = 1e-12 * std::max(1.0, config.t_end);
  while (t < config.t_end - t_eps) {
    double dt = config.adaptive ? adapt_dt(system, u, config) : config.dt_init;
    const double next_output = config.output_dt > 0.0 ? static_cast<double>(outputs) * config.output_dt
                                                      : std::numeric_limits<double>::infinity();
    dt = std::min({dt, config.t_end - t, next_output - t});
    try {
      u = rk4_step(u, rhs, dt, config.filter_threshold);
    } catch (const NumericalHalt& e) {
      rec.stop_reason = StopReason::nonfinite;
      rec.stop_detail = e.what();
      break;
    } catch (const InvariantViolation& e) {
      rec.stop_reason = StopReason::nonfinite;
      rec.stop_detail = e.what();
      break;
    }
    ++rec.steps;
    t += dt;
    bool at_output = config.output_dt == 0.0;
    if (std::abs(t - next_output) <= 1e-9 * dt) {
      t = next_output;
      ++outputs;
      at_output = true;
    }
    if (std::abs(t - config.t_end) <= t_eps) {
      t = config.t_end;
      at_output = true;
    }
    Snapshot snap = make_snapshot(system, u, t, config);
    std::string detail;
    const auto violation = floor_violation(snap, config.arc_chord_floor, strip_floor, detail);
    if (at_output || violation) rec.snapshots.push_back(std::move(snap));
    if (violation) {
      rec.stop_reason = *violation;
      rec.stop_detail = detail;
      break;
    }
  }
  attach_bernoulli(rec);
  return rec;
}

}  // namespace vsheet
