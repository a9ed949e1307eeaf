#ifndef VSHEET_AMPLITUDE_HPP_
#define VSHEET_AMPLITUDE_HPP_

// The closed amplitude equation w_t = (1/2)(w H w)_s, its complex Burgers
// form for z = Hw - i w, and the disk-analytic extension used to follow
// characteristics inside the unit disk.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "vsheet/birkhoff_rott.hpp"
#include "vsheet/spectral.hpp"
#include "vsheet/timestepping.hpp"

namespace vsheet {

// Point of the closed unit disk (round-off slack 1e-12).
class DiskPoint {
 public:
  static constexpr double kSlack = 1e-12;
  explicit DiskPoint(Complex u);
  static DiskPoint polar(double r, double angle) { return DiskPoint(std::polar(r, angle)); }

  Complex value() const { return u_; }
  double radius() const { return std::abs(u_); }
  double angle() const { return std::arg(u_); }

 private:
  Complex u_;
};

// (1/2) d/ds (w H w).
RealField amplitude_rhs(const VortexAmplitude& w);

// Hw - i w; carries only k >= 0 modes (k = 0 only through a nonzero mean).
ComplexField complex_trace(const VortexAmplitude& w);

// Harmonic extension sum_k fhat(k) r^|k| e^{ik theta} at u = r e^{i theta}.
double poisson_extend(const RealField& f, const DiskPoint& u);
Complex poisson_extend(const ComplexField& f, const DiskPoint& u);

struct CharacteristicTrack {
  DiskPoint seed{Complex(0.0)};
  Complex conserved = 0.0;  // Z0(seed)
  std::vector<double> times;
  std::vector<Complex> positions;
  // Set when |X| exceeds 1 at some stored time.
  bool exited = false;
};

// X(u, t) = u exp(-i Z0(u) t / 2), Z0 = P(H w0 - i w0).
CharacteristicTrack characteristic_flow(const VortexAmplitude& w0, const DiskPoint& u0,
                                        std::span<const double> times);

// max over seeds and stored times of |P(z(., t))(X(u, t)) - Z0(u)|, where
// z(., t) is the complex trace of trajectory[m] and Z0 comes from
// trajectory[0]. Seeds whose track leaves the disk are skipped; throws
// std::domain_error if every seed leaves.
double characteristic_conservation_error(std::span<const double> times,
                                         std::span<const RealField> trajectory,
                                         std::span<const DiskPoint> seeds);

// Evenly spaced seeds on the circle of the given radius.
std::vector<DiskPoint> circle_seeds(double radius, std::size_t count);

struct BlowupEstimate {
  double time = std::numeric_limits<double>::infinity();
  double location = 0.0;
  bool finite() const { return time < std::numeric_limits<double>::infinity(); }
};

// Smallest t > 0 with 1 - z0_s(s0) t / 2 = 0 over the circle, i.e.
// t* = min 2 / z0_s(s0) over points where z0_s is real and positive. Nodes
// with |Im z0_s| < 1e-8 ||z0_s||_inf count as real; sign changes of Im z0_s
// between nodes are refined on the trigonometric interpolant.
BlowupEstimate blowup_estimate(const VortexAmplitude& w0);

struct RefinementRow {
  std::size_t resolution = 0;
  double probe_time = 0.0;
  bool completed = false;  // false when a stop criterion fired first
  StopReason stop_reason = StopReason::t_end;
  std::vector<double> sobolev;  // at probe_time, aligned with RefinementReport::orders
  std::vector<double> strip_times;
  std::vector<double> strip_widths;
};

struct RefinementReport {
  std::vector<double> orders;
  std::vector<RefinementRow> rows;
  bool partial = false;
  // growth[i][o] = sobolev(rows[i+1], o) / sobolev(rows[i], o)
  std::vector<std::vector<double>> growth;
};

std::vector<std::vector<double>> growth_factors(const std::vector<RefinementRow>& rows);

// Integrates the amplitude equation at each resolution to probe_time and
// tabulates Sobolev norms of orders above `s` together with strip widths
// over time. `config.t_end` is replaced by probe_time.
RefinementReport illposedness_experiment(const std::function<VortexAmplitude(const PeriodicGrid&)>& family,
                                         std::span<const std::size_t> resolutions, double s,
                                         double probe_time, IntegratorConfig config);

}  // namespace vsheet

#endif  // VSHEET_AMPLITUDE_HPP_
