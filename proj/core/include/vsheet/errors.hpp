#ifndef VSHEET_ERRORS_HPP_
#define VSHEET_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace vsheet {

// Malformed configuration or scenario file (bad syntax, missing or
// out-of-range fields). `path()` names the offending field, e.g.
// "integrator.dt_init".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path.empty() ? what : path + ": " + what),
        path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// A state or input fails one of its domain invariants (mean-zero amplitude,
// nonzero tangent, graph condition, ...). `value()` carries the measured
// quantity that violated the bound.
class InvariantViolation : public std::runtime_error {
 public:
  InvariantViolation(const std::string& what, double value)
      : std::runtime_error(what), value_(value) {}
  double value() const { return value_; }

 private:
  double value_;
};

class ArcChordViolation : public InvariantViolation {
 public:
  ArcChordViolation(double arc_chord, double floor)
      : InvariantViolation("arc-chord " + std::to_string(arc_chord) +
                               " below floor " + std::to_string(floor),
                           arc_chord),
        floor_(floor) {}
  double floor() const { return floor_; }

 private:
  double floor_;
};

class GraphConditionError : public InvariantViolation {
 public:
  using InvariantViolation::InvariantViolation;
};

// Integration produced non-finite values or failed to converge.
class NumericalHalt : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vsheet

#endif  // VSHEET_ERRORS_HPP_
