#include "vsheet/linear_kh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "vsheet/errors.hpp"

namespace vsheet {

namespace {

void require_mean_zero(const RealField& f, const char* name) {
  if (std::abs(f.mean()) > 1e-12 * std::max(1.0, f.max_coefficient())) {
    throw InvariantViolation(std::string("LinearState: ") + name + " must have zero mean", f.mean());
  }
}

}  // namespace

LinearState::LinearState(RealField eps1, RealField eps2) : eps1_(std::move(eps1)), eps2_(std::move(eps2)) {
  if (!(eps1_.grid() == eps2_.grid())) throw std::invalid_argument("LinearState: grids differ");
  require_mean_zero(eps1_, "eps1");
  require_mean_zero(eps2_, "eps2");
}

LinearState linear_rhs(const LinearState& s) {
  return LinearState(-0.5 * lambda_op(s.eps2()), -0.5 * lambda_op(s.eps1()));
}

LinearState linear_exact(const LinearState& s0, double t) {
  const PeriodicGrid& g = s0.grid();
  const int nyq = g.nyquist_mode();
  std::vector<Complex> c1(g.size()), c2(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const int k = g.mode_at(i);
    const Complex a = s0.eps1().spectrum()[i];
    const Complex b = s0.eps2().spectrum()[i];
    if (k == nyq) {
      c1[i] = a;
      c2[i] = b;
      continue;
    }
    const double rate = 0.5 * std::abs(k);
    const Complex sum = 0.5 * (a + b) * std::exp(-rate * t);
    const Complex diff = 0.5 * (a - b) * std::exp(rate * t);
    c1[i] = sum + diff;
    c2[i] = sum - diff;
  }
  return LinearState(RealField::from_spectrum(g, c1), RealField::from_spectrum(g, c2));
}

double growth_rate_fit(std::span<const double> times, std::span<const RealField> trajectory, int k,
                       double noise_floor) {
  if (times.size() != trajectory.size()) {
    throw std::invalid_argument("growth_rate_fit: times and trajectory differ in length");
  }
  if (times.size() < 8) throw std::invalid_argument("growth_rate_fit: need at least 8 snapshots");

  const double m = static_cast<double>(times.size());
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double amp = std::abs(trajectory[i].coefficient(k));
    if (!(amp >= noise_floor)) {
      throw std::invalid_argument("growth_rate_fit: mode " + std::to_string(k) +
                                  " below noise floor at t = " + std::to_string(times[i]));
    }
    const double y = std::log(amp);
    st += times[i];
    sy += y;
    stt += times[i] * times[i];
    sty += times[i] * y;
  }
  return (m * sty - st * sy) / (m * stt - st * st);
}

}  // namespace vsheet
