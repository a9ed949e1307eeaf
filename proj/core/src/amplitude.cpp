#include "vsheet/amplitude.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "vsheet/errors.hpp"

namespace vsheet {

DiskPoint::DiskPoint(Complex u) : u_(u) {
  if (!(std::abs(u) <= 1.0 + kSlack)) {
    throw std::invalid_argument("DiskPoint: |u| = " + std::to_string(std::abs(u)) + " outside the unit disk");
  }
}

RealField amplitude_rhs(const VortexAmplitude& w) {
  const RealField& f = w.field();
  return 0.5 * derivative(f * hilbert_transform(f), 1);
}

ComplexField complex_trace(const VortexAmplitude& w) {
  return ComplexField::from_parts(hilbert_transform(w.field()), -w.field());
}

namespace {

template <class Field>
Complex extend(const Field& f, const DiskPoint& u) {
  const PeriodicGrid& g = f.grid();
  const double r = u.radius();
  const double theta = u.angle();
  const int nyq = g.nyquist_mode();
  Complex sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const int k = g.mode_at(i);
    const Complex c = f.spectrum()[i];
    if (c == Complex(0.0)) continue;
    const double damp = std::pow(r, std::abs(k));
    if (k == nyq) {
      sum += c * damp * std::cos(static_cast<double>(k) * theta);
    } else {
      sum += c * damp * std::polar(1.0, static_cast<double>(k) * theta);
    }
  }
  return sum;
}

}  // namespace

double poisson_extend(const RealField& f, const DiskPoint& u) { return extend(f, u).real(); }
Complex poisson_extend(const ComplexField& f, const DiskPoint& u) { return extend(f, u); }

CharacteristicTrack characteristic_flow(const VortexAmplitude& w0, const DiskPoint& u0,
                                        std::span<const double> times) {
  CharacteristicTrack track;
  track.seed = u0;
  track.conserved = poisson_extend(complex_trace(w0), u0);
  const Complex rate = Complex(0.0, -0.5) * track.conserved;
  for (double t : times) {
    const Complex x = u0.value() * std::exp(rate * t);
    track.times.push_back(t);
    track.positions.push_back(x);
    if (std::abs(x) > 1.0 + DiskPoint::kSlack) track.exited = true;
  }
  return track;
}

double characteristic_conservation_error(std::span<const double> times,
                                         std::span<const RealField> trajectory,
                                         std::span<const DiskPoint> seeds) {
  if (times.size() != trajectory.size() || times.empty()) {
    throw std::invalid_argument("characteristic_conservation_error: empty or mismatched trajectory");
  }
  const VortexAmplitude w0(trajectory[0]);
  std::vector<CharacteristicTrack> tracks;
  for (const DiskPoint& u : seeds) {
    CharacteristicTrack tr = characteristic_flow(w0, u, times);
    if (!tr.exited) tracks.push_back(std::move(tr));
  }
  if (tracks.empty()) {
    throw std::domain_error("characteristic_conservation_error: every seed leaves the disk");
  }
  double err = 0.0;
  for (std::size_t m = 0; m < times.size(); ++m) {
    const ComplexField z = complex_trace(VortexAmplitude(trajectory[m]));
    for (const CharacteristicTrack& tr : tracks) {
      const Complex zx = poisson_extend(z, DiskPoint(tr.positions[m]));
      err = std::max(err, std::abs(zx - tr.conserved));
    }
  }
  return err;
}

std::vector<DiskPoint> circle_seeds(double radius, std::size_t count) {
  std::vector<DiskPoint> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(DiskPoint::polar(radius, kTwoPi * static_cast<double>(i) / static_cast<double>(count)));
  }
  return out;
}

// ---------------------------------------------------------------- blow-up

BlowupEstimate blowup_estimate(const VortexAmplitude& w0) {
  const ComplexField zs = derivative(complex_trace(w0), 1);
  const PeriodicGrid& g = zs.grid();
  const std::size_t n = g.size();
  const double scale = zs.max_abs();
  BlowupEstimate best;
  if (scale == 0.0) return best;
  const double band = 1e-8 * scale;

  auto consider = [&](Complex q, double sigma) {
    if (q.real() > 0.0) {
      const double t = 2.0 / q.real();
      if (t < best.time) {
        best.time = t;
        best.location = sigma;
      }
    }
  };

  for (std::size_t j = 0; j < n; ++j) {
    const Complex q = zs[j];
    if (std::abs(q.imag()) < band) consider(q, g.node(j));
  }
  // Real crossings strictly between nodes.
  for (std::size_t j = 0; j < n; ++j) {
    const Complex a = zs[j];
    const Complex b = zs[(j + 1) % n];
    if (std::abs(a.imag()) < band || std::abs(b.imag()) < band) continue;
    if (a.imag() * b.imag() >= 0.0) continue;
    if (a.real() <= 0.0 && b.real() <= 0.0) continue;
    double lo = g.node(j), hi = lo + g.spacing();
    double flo = a.imag();
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = interpolate(zs, mid).imag();
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    const double root = 0.5 * (lo + hi);
    consider(interpolate(zs, root), std::fmod(root, kTwoPi));
  }
  return best;
}

// ---------------------------------------------------------------- refinement

std::vector<std::vector<double>> growth_factors(const std::vector<RefinementRow>& rows) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    std::vector<double> g;
    for (std::size_t o = 0; o < rows[i].sobolev.size(); ++o) {
      const double a = rows[i].sobolev[o], b = rows[i + 1].sobolev[o];
      g.push_back(a == 0.0 ? (b == 0.0 ? 1.0 : std::numeric_limits<double>::infinity()) : b / a);
    }
    out.push_back(std::move(g));
  }
  return out;
}

RefinementReport illposedness_experiment(const std::function<VortexAmplitude(const PeriodicGrid&)>& family,
                                         std::span<const std::size_t> resolutions, double s,
                                         double probe_time, IntegratorConfig config) {
  if (!(probe_time > 0.0)) throw std::invalid_argument("illposedness_experiment: probe_time must be > 0");
  RefinementReport report;
  report.orders = {s + 0.5, s + 1.0, s + 2.0};
  config.t_end = probe_time;
  config.sobolev_orders = report.orders;
  const auto system = make_system(Mode::amplitude_only);

  for (std::size_t n : resolutions) {
    const PeriodicGrid grid(n);
    const VortexAmplitude w0 = family(grid);
    const RunRecord rec = run_simulation(config, *system, FieldSet{w0.field()});

    RefinementRow row;
    row.resolution = n;
    row.stop_reason = rec.stop_reason;
    row.completed = rec.stop_reason == StopReason::t_end;
    const Snapshot& last = rec.snapshots.back();
    row.probe_time = last.time;
    for (double o : report.orders) row.sobolev.push_back(sobolev_norm(last.fields[0], o));
    for (const Snapshot& snap : rec.snapshots) {
      row.strip_times.push_back(snap.time);
      row.strip_widths.push_back(snap.strip_width);
    }
    report.partial = report.partial || !row.completed;
    report.rows.push_back(std::move(row));
  }
  report.growth = growth_factors(report.rows);
  return report;
}

}  // namespace vsheet
