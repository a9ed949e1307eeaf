#include "vsheet/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fft.hpp"
#include "vsheet/errors.hpp"

namespace vsheet {

// ---------------------------------------------------------------- grid

PeriodicGrid::PeriodicGrid(std::size_t n) : n_(n) {
  if (n < kMinNodes || n % 2 != 0) {
    throw std::invalid_argument("PeriodicGrid: node count must be even and >= 16, got " +
                                std::to_string(n));
  }
}

std::vector<double> PeriodicGrid::nodes() const {
  std::vector<double> a(n_);
  for (std::size_t j = 0; j < n_; ++j) a[j] = node(j);
  return a;
}

std::size_t PeriodicGrid::index_of(int k) const {
  const int n = static_cast<int>(n_);
  if (k < -n / 2 || k > n / 2) {
    throw std::out_of_range("PeriodicGrid: mode " + std::to_string(k) + " not resolved");
  }
  return static_cast<std::size_t>(k >= 0 ? (k == n / 2 ? n / 2 : k) : n + k);
}

int PeriodicGrid::mode_at(std::size_t i) const {
  const int n = static_cast<int>(n_);
  const int k = static_cast<int>(i);
  return k < n / 2 ? k : k - n;
}

// ---------------------------------------------------------------- fields

RealField::RealField(PeriodicGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)), spectrum_(grid.size()) {
  if (values_.size() != grid_.size()) {
    throw std::invalid_argument("RealField: value count does not match grid");
  }
  detail::forward_real(values_, spectrum_);
}

RealField RealField::zeros(PeriodicGrid grid) {
  return RealField(grid, std::vector<double>(grid.size(), 0.0));
}

RealField RealField::constant(PeriodicGrid grid, double c) {
  return RealField(grid, std::vector<double>(grid.size(), c));
}

RealField RealField::sample(PeriodicGrid grid, const std::function<double(double)>& f) {
  std::vector<double> v(grid.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(grid.node(j));
  return RealField(grid, std::move(v));
}

RealField RealField::from_spectrum(PeriodicGrid grid, std::span<const Complex> coefficients) {
  if (coefficients.size() != grid.size()) {
    throw std::invalid_argument("RealField::from_spectrum: coefficient count does not match grid");
  }
  std::vector<double> v(grid.size());
  detail::inverse_real(coefficients, v);
  return RealField(grid, std::move(v));
}

double RealField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double RealField::max_coefficient() const {
  double m = 0.0;
  for (const Complex& c : spectrum_) m = std::max(m, std::abs(c));
  return m;
}

double RealField::l2_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(grid_.spacing() * s);
}

namespace {

void require_same_grid(const PeriodicGrid& a, const PeriodicGrid& b) {
  if (!(a == b)) throw std::invalid_argument("field arithmetic on different grids");
}

template <class Op>
RealField combine(const RealField& a, const RealField& b, Op op) {
  require_same_grid(a.grid(), b.grid());
  std::vector<double> v(a.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = op(a[j], b[j]);
  return RealField(a.grid(), std::move(v));
}

}  // namespace

RealField RealField::operator-() const { return -1.0 * *this; }

RealField operator+(const RealField& a, const RealField& b) {
  return combine(a, b, [](double x, double y) { return x + y; });
}
RealField operator-(const RealField& a, const RealField& b) {
  return combine(a, b, [](double x, double y) { return x - y; });
}
RealField operator*(const RealField& a, const RealField& b) {
  return combine(a, b, [](double x, double y) { return x * y; });
}
RealField operator*(double s, const RealField& a) {
  std::vector<double> v(a.values().begin(), a.values().end());
  for (double& x : v) x *= s;
  return RealField(a.grid(), std::move(v));
}

ComplexField::ComplexField(PeriodicGrid grid, std::vector<Complex> values)
    : grid_(grid), values_(std::move(values)), spectrum_(grid.size()) {
  if (values_.size() != grid_.size()) {
    throw std::invalid_argument("ComplexField: value count does not match grid");
  }
  detail::forward_complex(values_, spectrum_);
}

ComplexField ComplexField::from_parts(const RealField& re, const RealField& im) {
  require_same_grid(re.grid(), im.grid());
  std::vector<Complex> v(re.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = Complex(re[j], im[j]);
  return ComplexField(re.grid(), std::move(v));
}

ComplexField ComplexField::from_spectrum(PeriodicGrid grid, std::vector<Complex> coefficients) {
  if (coefficients.size() != grid.size()) {
    throw std::invalid_argument("ComplexField::from_spectrum: coefficient count does not match grid");
  }
  std::vector<Complex> v(grid.size());
  detail::inverse_complex(coefficients, v);
  return ComplexField(grid, std::move(v));
}

RealField ComplexField::real() const {
  std::vector<double> v(values_.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = values_[j].real();
  return RealField(grid_, std::move(v));
}

RealField ComplexField::imag() const {
  std::vector<double> v(values_.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = values_[j].imag();
  return RealField(grid_, std::move(v));
}

double ComplexField::negative_frequency_norm() const {
  double s = 0.0;
  for (std::size_t i = grid_.size() / 2; i < grid_.size(); ++i) s += std::norm(spectrum_[i]);
  return std::sqrt(s);
}

double ComplexField::max_abs() const {
  double m = 0.0;
  for (const Complex& c : values_) m = std::max(m, std::abs(c));
  return m;
}

// ---------------------------------------------------------------- operators

namespace {

template <class Multiplier>
RealField apply_multiplier(const RealField& f, Multiplier m) {
  const PeriodicGrid& g = f.grid();
  std::vector<Complex> c(f.spectrum().begin(), f.spectrum().end());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= m(g.mode_at(i));
  return RealField::from_spectrum(g, c);
}

Complex ik_power(int k, int order) {
  const Complex ik(0.0, static_cast<double>(k));
  Complex r = 1.0;
  for (int i = 0; i < order; ++i) r *= ik;
  return r;
}

void check_order(int order) {
  if (order < 1 || order > 3) {
    throw std::invalid_argument("derivative: order must be 1, 2 or 3, got " + std::to_string(order));
  }
}

}  // namespace

RealField hilbert_transform(const RealField& f) {
  const int nyq = f.grid().nyquist_mode();
  return apply_multiplier(f, [nyq](int k) -> Complex {
    if (k == 0 || k == nyq) return 0.0;
    return k > 0 ? Complex(0.0, -1.0) : Complex(0.0, 1.0);
  });
}

RealField lambda_op(const RealField& f) {
  const int nyq = f.grid().nyquist_mode();
  return apply_multiplier(f, [nyq](int k) -> Complex {
    return k == nyq ? 0.0 : static_cast<double>(std::abs(k));
  });
}

RealField derivative(const RealField& f, int order) {
  check_order(order);
  const int nyq = f.grid().nyquist_mode();
  return apply_multiplier(f, [nyq, order](int k) -> Complex {
    if (k == nyq && order % 2 == 1) return 0.0;
    return ik_power(k, order);
  });
}

ComplexField derivative(const ComplexField& f, int order) {
  check_order(order);
  const PeriodicGrid& g = f.grid();
  const int nyq = g.nyquist_mode();
  std::vector<Complex> c(f.spectrum().begin(), f.spectrum().end());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const int k = g.mode_at(i);
    c[i] *= (k == nyq && order % 2 == 1) ? Complex(0.0) : ik_power(k, order);
  }
  return ComplexField::from_spectrum(g, std::move(c));
}

RealField antiderivative(const RealField& f) {
  const double tol = 1e-12 * std::max(1.0, f.max_coefficient());
  if (std::abs(f.mean()) > tol) {
    throw InvariantViolation("antiderivative: field has nonzero mean", f.mean());
  }
  const int nyq = f.grid().nyquist_mode();
  return apply_multiplier(f, [nyq](int k) -> Complex {
    if (k == 0 || k == nyq) return 0.0;
    return 1.0 / Complex(0.0, static_cast<double>(k));
  });
}

RealField krasny_filter(const RealField& f, double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("krasny_filter: threshold must be > 0");
  std::vector<Complex> c(f.spectrum().begin(), f.spectrum().end());
  bool changed = false;
  for (Complex& x : c) {
    if (x != Complex(0.0) && std::abs(x) < threshold) {
      x = 0.0;
      changed = true;
    }
  }
  if (!changed) return f;
  return RealField::from_spectrum(f.grid(), c);
}

double sobolev_norm(const RealField& f, double s) {
  const PeriodicGrid& g = f.grid();
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double k = g.mode_at(i);
    sum += std::pow(1.0 + k * k, s) * std::norm(f.spectrum()[i]);
  }
  return std::sqrt(sum);
}

namespace {

template <class Field>
Complex evaluate_series(const Field& f, double angle) {
  const PeriodicGrid& g = f.grid();
  const int nyq = g.nyquist_mode();
  Complex sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const int k = g.mode_at(i);
    const Complex c = f.spectrum()[i];
    if (k == nyq) {
      sum += c * std::cos(static_cast<double>(k) * angle);
    } else {
      sum += c * std::polar(1.0, static_cast<double>(k) * angle);
    }
  }
  return sum;
}

}  // namespace

double interpolate(const RealField& f, double angle) { return evaluate_series(f, angle).real(); }
Complex interpolate(const ComplexField& f, double angle) { return evaluate_series(f, angle); }

// ---------------------------------------------------------------- diagnostics

SpectrumDiagnostics strip_width(const RealField& f, DecayModel model) {
  SpectrumDiagnostics d;
  const int half = static_cast<int>(f.size() / 2);

  double cmax = 0.0;
  for (int k = 1; k < half; ++k) cmax = std::max(cmax, std::abs(f.coefficient(k)));
  // The fit stays a few decades above round-off and the default filter
  // threshold; the filtered tail lags the true spectrum.
  const double floor = 1e6 * std::numeric_limits<double>::epsilon() * cmax;

  int last = 0;
  for (int k = half - 1; k >= 1; --k) {
    if (std::abs(f.coefficient(k)) > floor) {
      last = k;
      break;
    }
  }
  constexpr int kBandLimit = 4;
  if (cmax == 0.0 || last <= kBandLimit) return d;

  const int first = (last + 1) / 2;
  std::vector<int> ks;
  std::vector<double> logs;
  for (int k = first; k <= last; ++k) {
    const double a = std::abs(f.coefficient(k));
    if (a > floor) {
      ks.push_back(k);
      logs.push_back(std::log(a));
    }
  }
  const std::size_t params = model == DecayModel::plain_exponential ? 2 : 3;
  if (ks.size() < params + 1) return d;

  Eigen::MatrixXd A(ks.size(), params);
  Eigen::VectorXd b(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = -static_cast<double>(ks[i]);
    if (params == 3) A(i, 2) = -std::log(static_cast<double>(ks[i]));
    b(i) = logs[i];
  }
  const Eigen::VectorXd x = A.colPivHouseholderQr().solve(b);
  const Eigen::VectorXd r = A * x - b;

  d.band_limited = false;
  d.strip_width = std::max(0.0, x(1));
  d.algebraic_exponent = params == 3 ? x(2) : 0.0;
  d.fit_residual = std::sqrt(r.squaredNorm() / static_cast<double>(ks.size()));
  d.fit_first_mode = first;
  d.fit_last_mode = last;
  return d;
}

double xr_estimate(const RealField& f, double radius) {
  const PeriodicGrid& g = f.grid();
  double best = 0.0;
  for (int m = 0; m <= 2; ++m) {
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double k = std::abs(g.mode_at(i));
      sum += std::pow(k, m) * std::abs(f.spectrum()[i]) * std::exp(radius * k);
    }
    best = std::max(best, sum);
  }
  return best;
}

SpectrumDiagnostics diagnose(const RealField& f, DecayModel model,
                             std::span<const double> sobolev_orders,
                             std::span<const double> strip_radii) {
  SpectrumDiagnostics d = strip_width(f, model);
  for (double s : sobolev_orders) d.sobolev[s] = sobolev_norm(f, s);
  for (double r : strip_radii) d.xr_estimate[r] = xr_estimate(f, r);
  return d;
}

}  // namespace vsheet
