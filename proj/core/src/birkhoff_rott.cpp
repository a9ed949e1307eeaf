#include "vsheet/birkhoff_rott.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "vsheet/errors.hpp"

namespace vsheet {

namespace {

constexpr double kMinTangent = 1e-12;

void require_same_grid(const PeriodicGrid& a, const PeriodicGrid& b, const char* where) {
  if (!(a == b)) throw std::invalid_argument(std::string(where) + ": fields on different grids");
}

}  // namespace

SheetCurve::SheetCurve(RealField p1, RealField p2)
    : p1_(std::move(p1)),
      p2_(std::move(p2)),
      dx_(RealField::constant(p1_.grid(), 1.0) + derivative(p1_, 1)),
      dy_(derivative(p2_, 1)) {
  require_same_grid(p1_.grid(), p2_.grid(), "SheetCurve");
  double min_tangent = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < p1_.size(); ++j) {
    min_tangent = std::min(min_tangent, std::hypot(dx_[j], dy_[j]));
  }
  if (!(min_tangent > kMinTangent)) {
    throw InvariantViolation("SheetCurve: tangent vanishes", min_tangent);
  }
}

SheetCurve SheetCurve::flat(PeriodicGrid grid) {
  return SheetCurve(RealField::zeros(grid), RealField::zeros(grid));
}

VortexAmplitude::VortexAmplitude(RealField w, double background)
    : w_(std::move(w)), background_(background) {
  const double integral = kTwoPi * mean_deviation();
  if (!std::isfinite(integral) || std::abs(integral) > kMeanTolerance * w_.l2_norm()) {
    throw InvariantViolation("VortexAmplitude: amplitude must have zero mean (integral = " +
                                 std::to_string(integral) + ")",
                             integral);
  }
}

// ---------------------------------------------------------------- BR

VectorField br_integral(const SheetCurve& z, const VortexAmplitude& w, const BrOptions& opts) {
  require_same_grid(z.grid(), w.grid(), "br_integral");
  if (opts.arc_chord_floor > 0.0) {
    const double g = arc_chord(z);
    if (g < opts.arc_chord_floor) throw ArcChordViolation(g, opts.arc_chord_floor);
  }

  const std::size_t n = z.grid().size();
  const double h = z.grid().spacing();
  std::vector<double> xs(n), ys(n);
  for (std::size_t j = 0; j < n; ++j) {
    xs[j] = z.x(j);
    ys[j] = z.y(j);
  }
  const auto wv = w.field().values();
  std::vector<double> u1(n), u2(n);

  // cot((dx + i dy)/2) = (sin dx - i sinh dy) / (cosh dy - cos dx).
  auto target = [&](std::size_t i) {
    double re = 0.0, im = 0.0;
    for (std::size_t j = (i + 1) % 2; j < n; j += 2) {
      const double dx = xs[i] - xs[j];
      const double dy = ys[i] - ys[j];
      const double denom = std::cosh(dy) - std::cos(dx);
      re += wv[j] * std::sin(dx) / denom;
      im -= wv[j] * std::sinh(dy) / denom;
    }
    // BR = i conj(S) h / (2 pi)
    const double scale = h / kTwoPi;
    u1[i] = im * scale;
    u2[i] = re * scale;
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) target(i);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
      pool.emplace_back([&, lo, hi] {
        for (std::size_t i = lo; i < hi; ++i) target(i);
      });
    }
  }
  return {RealField(z.grid(), std::move(u1)), RealField(z.grid(), std::move(u2))};
}

double arc_chord(const SheetCurve& z) {
  const std::size_t n = z.grid().size();
  const long half = static_cast<long>(n / 2);
  const double h = z.grid().spacing();
  const auto p1 = z.p1().values();
  const auto p2 = z.p2().values();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    for (long d = -half + 1; d <= half; ++d) {
      if (d == 0) continue;
      const std::size_t m = static_cast<std::size_t>(((static_cast<long>(i) - d) % static_cast<long>(n) +
                                                      static_cast<long>(n)) %
                                                     static_cast<long>(n));
      const double beta = static_cast<double>(d) * h;
      const double dx = beta + p1[i] - p1[m];
      const double dy = p2[i] - p2[m];
      best = std::min(best, (dx * dx + dy * dy) / (beta * beta));
    }
  }
  return best;
}

// ---------------------------------------------------------------- evolution

SheetRhs sheet_rhs(const SheetState& s, const BrOptions& opts) {
  const VectorField br = br_integral(s.curve, s.amplitude, opts);
  const RealField& w = s.amplitude.field();
  const RealField c = hilbert_transform(w);
  return {{br.x + c * s.curve.dx(), br.y + c * s.curve.dy()}, derivative(w * c, 1)};
}

OneSidedVelocities one_sided_velocities(const SheetState& s, const BrOptions& opts) {
  const VectorField br = br_integral(s.curve, s.amplitude, opts);
  const SheetCurve& z = s.curve;
  const std::size_t n = z.grid().size();
  std::vector<double> jx(n), jy(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double t2 = z.dx()[j] * z.dx()[j] + z.dy()[j] * z.dy()[j];
    const double half_w = 0.5 * s.amplitude.field()[j] / t2;
    jx[j] = half_w * z.dx()[j];
    jy[j] = half_w * z.dy()[j];
  }
  const RealField jump_x(z.grid(), std::move(jx));
  const RealField jump_y(z.grid(), std::move(jy));
  return {{br.x + jump_x, br.y + jump_y}, {br.x - jump_x, br.y - jump_y}};
}

RealField potential_jump(const VortexAmplitude& w) {
  return antiderivative(w.field() - RealField::constant(w.grid(), w.background()));
}

RealField bernoulli_right_side(const VortexAmplitude& w) {
  return w.field() * hilbert_transform(w.field());
}

std::vector<RealField> bernoulli_residual(std::span<const SheetState> snapshots) {
  if (snapshots.size() < 3) {
    throw std::invalid_argument("bernoulli_residual: need at least 3 snapshots");
  }
  const double dt = snapshots[1].time - snapshots[0].time;
  if (!(dt > 0.0)) throw std::invalid_argument("bernoulli_residual: times must increase");
  for (std::size_t i = 1; i < snapshots.size(); ++i) {
    const double step = snapshots[i].time - snapshots[i - 1].time;
    if (std::abs(step - dt) > 1e-9 * dt) {
      throw std::invalid_argument("bernoulli_residual: snapshot spacing is not uniform");
    }
  }
  std::vector<RealField> out;
  out.reserve(snapshots.size() - 2);
  for (std::size_t i = 1; i + 1 < snapshots.size(); ++i) {
    const RealField pi_t = (0.5 / dt) * (potential_jump(snapshots[i + 1].amplitude) -
                                         potential_jump(snapshots[i - 1].amplitude));
    out.push_back(pi_t - bernoulli_right_side(snapshots[i].amplitude));
  }
  return out;
}

GraphRhs duchon_robert_rhs(const RealField& y, const VortexAmplitude& w, const BrOptions& opts) {
  return duchon_robert_rhs(SheetCurve(RealField::zeros(y.grid()), y), w, opts);
}

GraphRhs duchon_robert_rhs(const SheetCurve& z, const VortexAmplitude& w, const BrOptions& opts) {
  double min_dx = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < z.grid().size(); ++j) min_dx = std::min(min_dx, z.dx()[j]);
  if (!(min_dx > 0.0)) {
    throw GraphConditionError("duchon_robert_rhs: curve folds (dz1/da <= 0)", min_dx);
  }
  const double p1_max = z.p1().max_abs();
  if (p1_max > 0.0) {
    throw GraphConditionError("duchon_robert_rhs: curve is not in graph parametrization (p1 != 0)",
                              p1_max);
  }
  const VectorField br = br_integral(z, w, opts);
  const RealField c = -br.x;
  return {br.y + c * z.dy(), c};
}

}  // namespace vsheet
