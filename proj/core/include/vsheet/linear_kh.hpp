#ifndef VSHEET_LINEAR_KH_HPP_
#define VSHEET_LINEAR_KH_HPP_

#include <span>

#include "vsheet/spectral.hpp"

namespace vsheet {

// Perturbation (eps1, eps2) of the flat sheet z = (a + eps1, eps2). Both
// components must have zero mean.
class LinearState {
 public:
  LinearState(RealField eps1, RealField eps2);

  const RealField& eps1() const { return eps1_; }
  const RealField& eps2() const { return eps2_; }
  const PeriodicGrid& grid() const { return eps1_.grid(); }

 private:
  RealField eps1_, eps2_;
};

// (-Lambda(eps2)/2, -Lambda(eps1)/2).
LinearState linear_rhs(const LinearState& s);

// Exact per-mode solution. With integer modes the rates are -+|k|/2:
// the sum mode (e1 + e2)/2 decays like e^{-|k|t/2}, the difference mode
// (e1 - e2)/2 grows like e^{+|k|t/2}. The Nyquist mode is left static,
// matching lambda_op.
LinearState linear_exact(const LinearState& s0, double t);

// Least-squares slope of log|fhat(k, t)| against t. Requires at least 8
// snapshots and |fhat(k)| >= noise_floor at every one of them
// (std::invalid_argument otherwise).
double growth_rate_fit(std::span<const double> times, std::span<const RealField> trajectory, int k,
                       double noise_floor = 1e-14);

}  // namespace vsheet

#endif  // VSHEET_LINEAR_KH_HPP_
