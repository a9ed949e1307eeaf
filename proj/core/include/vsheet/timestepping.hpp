#ifndef VSHEET_TIMESTEPPING_HPP_
#define VSHEET_TIMESTEPPING_HPP_

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vsheet/birkhoff_rott.hpp"
#include "vsheet/spectral.hpp"

namespace vsheet {

// The evolving state of any of the supported systems, one RealField per
// component (see EvolutionSystem::components()).
using FieldSet = std::vector<RealField>;
using RhsFunction = std::function<FieldSet(const FieldSet&)>;

enum class Mode { full_sheet, graph, amplitude_only, linear_kh };
enum class Method { rk4, picard };
enum class StopReason { t_end, arc_chord_floor, strip_floor, nonfinite, picard_diverged };

std::string_view to_string(Mode m);
std::string_view to_string(Method m);
std::string_view to_string(StopReason r);
// Throw std::invalid_argument on unknown names.
Mode parse_mode(std::string_view s);
Method parse_method(std::string_view s);
StopReason parse_stop_reason(std::string_view s);

class EvolutionSystem {
 public:
  virtual ~EvolutionSystem() = default;

  virtual Mode mode() const = 0;
  virtual std::vector<std::string> components() const = 0;
  virtual FieldSet rhs(const FieldSet& u) const = 0;
  // Fastest node speed; sets the CFL step.
  virtual double characteristic_speed(const FieldSet& u) const = 0;
  // Arc-chord of the carried curve; NaN when the system has none.
  virtual double arc_chord(const FieldSet& u) const;
  // Component holding the vortex amplitude, or -1.
  virtual int amplitude_index() const { return -1; }
  virtual double background() const { return 0.0; }
};

// full_sheet: (p1, p2, w)   graph: (y, w)   amplitude_only: (w)
// linear_kh: (eps1, eps2)
std::unique_ptr<EvolutionSystem> make_system(Mode mode, double background = 0.0,
                                             const BrOptions& opts = {});

FieldSet pack(const SheetState& s);
SheetState unpack_sheet(const FieldSet& u, double background = 0.0, double time = 0.0);

struct IntegratorConfig {
  double dt_init = 1e-2;
  double cfl_safety = 0.5;
  // false: every step uses dt_init.
  bool adaptive = true;
  // Krasny threshold relative to the largest coefficient over all components.
  // Zero disables filtering.
  double filter_threshold = 1e-13;
  double arc_chord_floor = 1e-4;
  // Unset means three grid spacings. Zero disables the check.
  std::optional<double> strip_floor;
  double t_end = 1.0;
  Method method = Method::rk4;
  double picard_tol = 1e-12;
  int picard_max_iter = 50;
  // Time nodes of the Picard quadrature grid on [0, t_end].
  int picard_steps = 50;
  // Snapshot cadence in time; zero records every step.
  double output_dt = 0.0;
  std::vector<double> sobolev_orders{0.0, 1.0, 2.0, 3.0};
  unsigned threads = 1;

  // Throws ConfigError naming the offending field.
  void validate() const;
  double resolved_strip_floor(const PeriodicGrid& grid) const;

  friend bool operator==(const IntegratorConfig&, const IntegratorConfig&) = default;
};

// Zero every coefficient below relative_threshold times the largest
// coefficient magnitude over all components.
FieldSet apply_filter(const FieldSet& u, double relative_threshold);

// Classical 4-stage RK step followed by one filter pass. Throws
// NumericalHalt naming the stage when a stage produces non-finite values.
FieldSet rk4_step(const FieldSet& u, const RhsFunction& rhs, double dt, double relative_threshold = 0.0);

// cfl_safety * h / max(speed, 1e-12), clamped to [1e-8, dt_init].
double adapt_dt(const EvolutionSystem& system, const FieldSet& u, const IntegratorConfig& config);

struct PicardResult {
  std::vector<double> times;
  std::vector<FieldSet> trajectory;  // last iterate (partial when diverged)
  int iterations = 0;
  double last_change = std::numeric_limits<double>::infinity();
  bool converged = false;
};

// Successive approximations u^{n+1}(t) = u^0 + int_0^t F(u^n(s)) ds on a
// uniform grid of `steps` intervals, composite trapezoid in time, starting
// from the constant trajectory. Stops when successive iterates differ by
// less than tol in max norm or after max_iter iterations. Every iterate is
// passed through apply_filter(., relative_threshold).
PicardResult picard_iterate(const FieldSet& initial, const RhsFunction& rhs, double horizon, int steps,
                            double tol, int max_iter, double relative_threshold = 0.0);

struct ComponentDiagnostics {
  double strip_width = std::numeric_limits<double>::infinity();
  double fit_residual = 0.0;
  double max_abs = 0.0;
  std::vector<double> sobolev;  // aligned with IntegratorConfig::sobolev_orders
};

struct Snapshot {
  double time = 0.0;
  FieldSet fields;
  double arc_chord = std::numeric_limits<double>::quiet_NaN();
  double strip_width = std::numeric_limits<double>::infinity();  // min over components
  double mean_deviation = 0.0;  // mean(w) - background, 0 without amplitude
  double bernoulli_residual = std::numeric_limits<double>::quiet_NaN();
  std::vector<ComponentDiagnostics> components;
};

struct RunRecord {
  IntegratorConfig config;
  Mode mode = Mode::full_sheet;
  std::vector<std::string> components;
  double background = 0.0;
  std::vector<Snapshot> snapshots;
  StopReason stop_reason = StopReason::t_end;
  std::string stop_detail;
  std::size_t steps = 0;

  std::vector<double> times() const;
  std::vector<RealField> series(std::size_t component) const;
  std::size_t component_index(std::string_view name) const;
};

Snapshot make_snapshot(const EvolutionSystem& system, const FieldSet& u, double time,
                       const IntegratorConfig& config);

RunRecord run_simulation(const IntegratorConfig& config, const EvolutionSystem& system,
                         const FieldSet& initial);

}  // namespace vsheet

#endif  // VSHEET_TIMESTEPPING_HPP_
