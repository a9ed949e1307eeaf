#ifndef VSHEET_BIRKHOFF_ROTT_HPP_
#define VSHEET_BIRKHOFF_ROTT_HPP_

#include <span>
#include <vector>

#include "vsheet/spectral.hpp"

namespace vsheet {

// A 2pi-periodic open sheet z(a) = (a + p1(a), p2(a)), so that
// z(a + 2pi) = z(a) + (2pi, 0). Construction enforces a nonzero tangent at
// every node.
class SheetCurve {
 public:
  SheetCurve(RealField p1, RealField p2);
  static SheetCurve flat(PeriodicGrid grid);

  const PeriodicGrid& grid() const { return p1_.grid(); }
  const RealField& p1() const { return p1_; }
  const RealField& p2() const { return p2_; }

  double x(std::size_t j) const { return grid().node(j) + p1_[j]; }
  double y(std::size_t j) const { return p2_[j]; }
  // d/da of the two components: (1 + p1', p2').
  const RealField& dx() const { return dx_; }
  const RealField& dy() const { return dy_; }

 private:
  RealField p1_, p2_;
  RealField dx_, dy_;
};

// Vorticity amplitude on the sheet. `background` is a uniform base strength
// (zero for finite-energy sheets); the fluctuation w - background must have
// zero mean, |int (w - background)| <= 1e-12 ||w||_L2.
class VortexAmplitude {
 public:
  static constexpr double kMeanTolerance = 1e-12;

  explicit VortexAmplitude(RealField w, double background = 0.0);

  const RealField& field() const { return w_; }
  const PeriodicGrid& grid() const { return w_.grid(); }
  double background() const { return background_; }
  double mean_deviation() const { return w_.mean() - background_; }

 private:
  RealField w_;
  double background_;
};

struct SheetState {
  SheetCurve curve;
  VortexAmplitude amplitude;
  double time = 0.0;
};

struct VectorField {
  RealField x;
  RealField y;
};

struct BrOptions {
  // When positive, br_integral rejects curves whose arc-chord falls below it.
  double arc_chord_floor = 0.0;
  // Worker threads for the target loop; every target is summed in the same
  // fixed order, so results do not depend on this.
  unsigned threads = 1;
};

// Periodic Birkhoff-Rott velocity at every node, via the cotangent kernel
//   conj(BR_i) = 1/(4 pi i) sum_{j - i odd} w_j cot((Z_i - Z_j)/2) 2h,
// Z = z1 + i z2 (alternate-point trapezoid rule).
VectorField br_integral(const SheetCurve& z, const VortexAmplitude& w, const BrOptions& opts = {});

// min over node pairs of |z(a) - z(a - b)|^2 / b^2 with b in (-pi, pi].
double arc_chord(const SheetCurve& z);

struct SheetRhs {
  VectorField dz;
  RealField dw;
};

// z_t = BR(z, w) + H(w) dz/da,   w_t = d/da (w H(w)).
SheetRhs sheet_rhs(const SheetState& s, const BrOptions& opts = {});

struct OneSidedVelocities {
  VectorField upper;  // BR + w/2 dz / |dz|^2
  VectorField lower;  // BR - w/2 dz / |dz|^2
};

OneSidedVelocities one_sided_velocities(const SheetState& s, const BrOptions& opts = {});

// Potential jump across the sheet: zero-mean antiderivative of the
// fluctuation w - background (the background contributes a linear,
// time-independent term).
RealField potential_jump(const VortexAmplitude& w);

// Right side of the potential-jump evolution for c = H(w): w H(w).
RealField bernoulli_right_side(const VortexAmplitude& w);

// Central-difference Pi_t minus w H(w) at every interior snapshot. Requires
// at least 3 snapshots with uniform spacing in time (std::invalid_argument
// otherwise). Result i corresponds to snapshot i + 1.
std::vector<RealField> bernoulli_residual(std::span<const SheetState> snapshots);

struct GraphRhs {
  RealField dy;  // y_t
  RealField c;   // tangential term freezing z1
};

// Graph parametrization z = (a, y(a)): the tangential term c = -BR_1 keeps
// z1_t = 0, giving y_t = BR_2 + c y'. The amplitude then evolves by
// w_t = d/da (c w).
GraphRhs duchon_robert_rhs(const RealField& y, const VortexAmplitude& w, const BrOptions& opts = {});
// Same, for a curve that must already be a graph in this parametrization
// (p1 == 0 and dz1/da > 0); throws GraphConditionError otherwise.
GraphRhs duchon_robert_rhs(const SheetCurve& z, const VortexAmplitude& w, const BrOptions& opts = {});

}  // namespace vsheet

#endif  // VSHEET_BIRKHOFF_ROTT_HPP_
