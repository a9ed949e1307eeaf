#ifndef VSHEET_SPECTRAL_HPP_
#define VSHEET_SPECTRAL_HPP_

// Periodic grids, real/complex fields with their Fourier coefficients, and
// the spectral operators used throughout the library.
//
// Coefficient convention (fixed for the whole library):
//
//     f(a) = sum_k fhat(k) exp(i k a),   fhat(k) = (1/2pi) int f(a) exp(-i k a) da
//
// realised on the grid as fhat(k) = (1/n) sum_j f_j exp(-i k a_j), for the
// modes k = -n/2 ... n/2-1. Spectra are stored in FFT order: index k for
// 0 <= k < n/2, index n/2 for the Nyquist mode k = -n/2, index n+k for k < 0.

#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <vector>

namespace vsheet {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

class PeriodicGrid {
 public:
  static constexpr std::size_t kMinNodes = 16;

  // Throws std::invalid_argument unless n is even and n >= 16.
  explicit PeriodicGrid(std::size_t n);

  std::size_t size() const { return n_; }
  double spacing() const { return kTwoPi / static_cast<double>(n_); }
  double node(std::size_t j) const { return kTwoPi * static_cast<double>(j) / static_cast<double>(n_); }
  std::vector<double> nodes() const;

  int min_mode() const { return -static_cast<int>(n_ / 2); }
  int max_mode() const { return static_cast<int>(n_ / 2) - 1; }
  int nyquist_mode() const { return min_mode(); }
  // Storage index of mode k; k = n/2 aliases onto the Nyquist slot.
  std::size_t index_of(int k) const;
  // Signed mode number stored at index i.
  int mode_at(std::size_t i) const;

  friend bool operator==(const PeriodicGrid&, const PeriodicGrid&) = default;

 private:
  std::size_t n_;
};

// Real samples of a periodic function on a PeriodicGrid together with their
// Fourier coefficients. The spectrum is always the analysis of the stored
// values, so the two views are consistent by construction. Immutable.
class RealField {
 public:
  RealField(PeriodicGrid grid, std::vector<double> values);

  static RealField zeros(PeriodicGrid grid);
  static RealField constant(PeriodicGrid grid, double c);
  static RealField sample(PeriodicGrid grid, const std::function<double(double)>& f);
  // Synthesis from coefficients in FFT order. Only k >= 0 and the Nyquist
  // slot are read; reality fixes the rest.
  static RealField from_spectrum(PeriodicGrid grid, std::span<const Complex> coefficients);

  const PeriodicGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t j) const { return values_[j]; }
  std::span<const Complex> spectrum() const { return spectrum_; }
  Complex coefficient(int k) const { return spectrum_[grid_.index_of(k)]; }

  double mean() const { return spectrum_[0].real(); }
  double max_abs() const;
  // Largest |fhat(k)| over all stored modes.
  double max_coefficient() const;
  // sqrt(h sum_j f_j^2), the trapezoid L2 norm on [0, 2pi).
  double l2_norm() const;

  RealField operator-() const;
  friend RealField operator+(const RealField& a, const RealField& b);
  friend RealField operator-(const RealField& a, const RealField& b);
  // Pointwise product (no dealiasing).
  friend RealField operator*(const RealField& a, const RealField& b);
  friend RealField operator*(double s, const RealField& a);

 private:
  PeriodicGrid grid_;
  std::vector<double> values_;
  std::vector<Complex> spectrum_;
};

// Complex samples with the same coefficient convention (full c2c spectrum).
class ComplexField {
 public:
  ComplexField(PeriodicGrid grid, std::vector<Complex> values);
  static ComplexField from_parts(const RealField& re, const RealField& im);
  static ComplexField from_spectrum(PeriodicGrid grid, std::vector<Complex> coefficients);

  const PeriodicGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const Complex> values() const { return values_; }
  Complex operator[](std::size_t j) const { return values_[j]; }
  std::span<const Complex> spectrum() const { return spectrum_; }
  Complex coefficient(int k) const { return spectrum_[grid_.index_of(k)]; }

  RealField real() const;
  RealField imag() const;
  // sqrt(sum over k < 0 of |fhat(k)|^2), Nyquist included.
  double negative_frequency_norm() const;
  double max_abs() const;

 private:
  PeriodicGrid grid_;
  std::vector<Complex> values_;
  std::vector<Complex> spectrum_;
};

// Multiplier -i sign(k). Mean and Nyquist modes map to zero.
RealField hilbert_transform(const RealField& f);
// Multiplier |k|, i.e. H composed with d/da. Nyquist mode maps to zero.
RealField lambda_op(const RealField& f);
// Multiplier (ik)^order for order in {1,2,3}; odd orders zero the Nyquist
// mode. Throws std::invalid_argument for any other order.
RealField derivative(const RealField& f, int order = 1);
ComplexField derivative(const ComplexField& f, int order = 1);
// Zero-mean antiderivative. Throws InvariantViolation when f has a nonzero
// mean (beyond round-off).
RealField antiderivative(const RealField& f);

// Krasny filter: zero every coefficient with |fhat(k)| < threshold.
// Throws std::invalid_argument unless threshold > 0.
RealField krasny_filter(const RealField& f, double threshold);

// (sum_k (1 + k^2)^s |fhat(k)|^2)^(1/2). With the convention above, cos(a)
// has norm 1/sqrt(2) for s = 0.
double sobolev_norm(const RealField& f, double s);

// Evaluates the trigonometric interpolant at an arbitrary angle (the Nyquist
// mode is split symmetrically between +-n/2).
double interpolate(const RealField& f, double angle);
Complex interpolate(const ComplexField& f, double angle);

enum class DecayModel { plain_exponential, algebraic_exponential };

struct SpectrumDiagnostics {
  // Analyticity-strip half-width from the exponential decay rate of |fhat|.
  // +infinity for band-limited input.
  double strip_width = std::numeric_limits<double>::infinity();
  double fit_residual = 0.0;
  // Fitted algebraic exponent (algebraic_exponential model only).
  double algebraic_exponent = 0.0;
  bool band_limited = true;
  int fit_first_mode = 0;
  int fit_last_mode = 0;
  std::map<double, double> sobolev;
  // Upper bound of max_{m<=2} sup over the strip |Im a| < r of |d^m f|,
  // i.e. max_m sum_k |k|^m |fhat(k)| e^{r|k|}.
  std::map<double, double> xr_estimate;
};

// Least-squares fit of log|fhat(k)| ~ c - rho k (- s log k) over the upper
// half of the resolved spectrum. See SpectrumDiagnostics.
SpectrumDiagnostics strip_width(const RealField& f, DecayModel model = DecayModel::plain_exponential);

SpectrumDiagnostics diagnose(const RealField& f, DecayModel model,
                             std::span<const double> sobolev_orders,
                             std::span<const double> strip_radii);

double xr_estimate(const RealField& f, double radius);

}  // namespace vsheet

#endif  // VSHEET_SPECTRAL_HPP_
