#ifndef VSHEET_SCENARIO_HPP_
#define VSHEET_SCENARIO_HPP_

// Scenario files: one JSON document per experiment, naming the system, the
// resolution, closed-form initial data per component, integrator overrides
// and the analyses to attach. docs/FORMATS.md has the schema.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vsheet/spectral.hpp"
#include "vsheet/timestepping.hpp"

namespace vsheet {

enum class InitialKind { flat, fourier_modes, sobolev_tail };

// Closed-form initial data for one component.
//   flat:           0
//   fourier_modes:  sum a_cos cos(k a) + a_sin sin(k a) over (k, a_cos, a_sin)
//   sobolev_tail:   shift cos(a) + amplitude sum_{k>=2} k^-(s+1) cos(k a + phi_k)
//                   with phi_k drawn from a generator seeded by (seed, k), so
//                   coarser grids see a prefix of the same series.
struct InitialSpec {
  InitialKind kind = InitialKind::flat;
  std::vector<std::array<double, 3>> modes;
  double s = 2.0;
  std::uint64_t seed = 0;
  double amplitude = 1.0;
  double shift = 0.0;

  friend bool operator==(const InitialSpec&, const InitialSpec&) = default;
};

// Curve shortcut for the sheet: p1 = a sin(k a), p2 = a cos(k a).
struct CirclePerturbation {
  double a = 0.0;
  int k = 1;
  friend bool operator==(const CirclePerturbation&, const CirclePerturbation&) = default;
};

struct GrowthRateAnalysis {
  std::string field;
  std::vector<int> modes;
  double noise_floor = 1e-14;
  friend bool operator==(const GrowthRateAnalysis&, const GrowthRateAnalysis&) = default;
};

struct CharacteristicsAnalysis {
  double radius = 0.9;
  std::size_t seeds = 16;
  friend bool operator==(const CharacteristicsAnalysis&, const CharacteristicsAnalysis&) = default;
};

struct IllposednessAnalysis {
  std::vector<std::size_t> resolutions;
  double s = 2.0;
  double t_probe = 0.05;
  friend bool operator==(const IllposednessAnalysis&, const IllposednessAnalysis&) = default;
};

struct Analyses {
  std::optional<GrowthRateAnalysis> growth_rate;
  std::optional<CharacteristicsAnalysis> characteristics;
  std::optional<IllposednessAnalysis> illposedness;
  bool blowup = false;
  friend bool operator==(const Analyses&, const Analyses&) = default;
};

struct Scenario {
  std::string name;
  Mode mode = Mode::full_sheet;
  std::size_t resolution = 128;
  // Uniform base amplitude added to the w component.
  double background = 0.0;
  std::map<std::string, InitialSpec> initial;
  std::optional<CirclePerturbation> curve;
  IntegratorConfig integrator;
  Analyses analyses;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Component names carried by each mode, in state order.
std::vector<std::string> mode_components(Mode mode);

// Parses and validates; every problem is reported as ConfigError with a
// dotted field path. Initial data that breaks a state invariant raises
// InvariantViolation carrying the offending value.
Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::filesystem::path& path);
// JSON text with every default spelled out; parse_scenario inverts it.
std::string write_scenario(const Scenario& scenario);

RealField build_field(const InitialSpec& spec, const PeriodicGrid& grid);
// Initial state in the component order of mode_components(). Checks the
// state invariants of the mode.
FieldSet initial_state(const Scenario& scenario);
FieldSet initial_state(const Scenario& scenario, const PeriodicGrid& grid);

// Sorted *.json files of a directory.
std::vector<std::filesystem::path> list_scenarios(const std::filesystem::path& dir);

}  // namespace vsheet

#endif  // VSHEET_SCENARIO_HPP_
