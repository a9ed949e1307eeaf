#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace vsheet::detail {
namespace {

// The FFTW planner is not thread-safe; plan execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

enum class Kind { r2c, c2r, c2c_forward, c2c_backward };

// A plan together with the buffers it was created for. Data is copied in and
// out so that execution never depends on caller alignment.
class Plan {
 public:
  Plan(Kind kind, int n) : kind_(kind), n_(n) {
    real_ = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    in_ = fftw_alloc_complex(n);
    out_ = fftw_alloc_complex(n);
    std::lock_guard<std::mutex> lock(planner_mutex());
    switch (kind) {
      case Kind::r2c:
        plan_ = fftw_plan_dft_r2c_1d(n, real_, out_, FFTW_ESTIMATE);
        break;
      case Kind::c2r:
        plan_ = fftw_plan_dft_c2r_1d(n, in_, real_, FFTW_ESTIMATE);
        break;
      case Kind::c2c_forward:
        plan_ = fftw_plan_dft_1d(n, in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
        break;
      case Kind::c2c_backward:
        plan_ = fftw_plan_dft_1d(n, in_, out_, FFTW_BACKWARD, FFTW_ESTIMATE);
        break;
    }
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan() {
    {
      std::lock_guard<std::mutex> lock(planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(real_);
    fftw_free(in_);
    fftw_free(out_);
  }

  double* real() { return real_; }
  std::complex<double>* in() { return reinterpret_cast<std::complex<double>*>(in_); }
  std::complex<double>* out() { return reinterpret_cast<std::complex<double>*>(out_); }
  void execute() { fftw_execute(plan_); }

 private:
  Kind kind_;
  int n_;
  double* real_ = nullptr;
  fftw_complex* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

Plan& plan_for(Kind kind, std::size_t n) {
  thread_local std::map<std::pair<Kind, std::size_t>, std::unique_ptr<Plan>> cache;
  auto& slot = cache[{kind, n}];
  if (!slot) slot = std::make_unique<Plan>(kind, static_cast<int>(n));
  return *slot;
}

}  // namespace

void forward_real(std::span<const double> in, std::span<std::complex<double>> out) {
  const std::size_t n = in.size();
  Plan& p = plan_for(Kind::r2c, n);
  std::copy(in.begin(), in.end(), p.real());
  p.execute();
  const double scale = 1.0 / static_cast<double>(n);
  const std::complex<double>* half = p.out();
  for (std::size_t k = 0; k <= n / 2; ++k) out[k] = half[k] * scale;
  for (std::size_t k = 1; k < n / 2; ++k) out[n - k] = std::conj(out[k]);
}

void inverse_real(std::span<const std::complex<double>> in, std::span<double> out) {
  const std::size_t n = out.size();
  Plan& p = plan_for(Kind::c2r, n);
  std::complex<double>* half = p.in();
  for (std::size_t k = 0; k <= n / 2; ++k) half[k] = in[k];
  half[0].imag(0.0);
  half[n / 2].imag(0.0);
  p.execute();
  std::copy(p.real(), p.real() + n, out.begin());
}

void forward_complex(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  const std::size_t n = in.size();
  Plan& p = plan_for(Kind::c2c_forward, n);
  std::copy(in.begin(), in.end(), p.in());
  p.execute();
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = p.out()[k] * scale;
}

void inverse_complex(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  const std::size_t n = in.size();
  Plan& p = plan_for(Kind::c2c_backward, n);
  std::copy(in.begin(), in.end(), p.in());
  p.execute();
  std::copy(p.out(), p.out() + n, out.begin());
}

}  // namespace vsheet::detail
