#ifndef VSHEET_SRC_FFT_HPP_
#define VSHEET_SRC_FFT_HPP_

#include <complex>
#include <span>

namespace vsheet::detail {

// All transforms use the library convention: forward is normalised by 1/n,
// inverse is the plain sum. Spectra are full length n in FFT order.
void forward_real(std::span<const double> in, std::span<std::complex<double>> out);
void inverse_real(std::span<const std::complex<double>> in, std::span<double> out);
void forward_complex(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);
void inverse_complex(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

}  // namespace vsheet::detail

#endif  // VSHEET_SRC_FFT_HPP_
