#include "spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>

namespace cgns::detail {

namespace {

// FFTW's planner is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwDeleter {
  void operator()(double* p) const noexcept { fftw_free(p); }
  void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};

class RealFft {
 public:
  explicit RealFft(std::size_t n)
      : n_(n),
        in_(fftw_alloc_real(n)),
        out_(fftw_alloc_complex(n / 2 + 1)) {
    std::lock_guard lock(planner_mutex());
    fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_.get(), out_.get(), FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), out_.get(), in_.get(), FFTW_ESTIMATE);
  }
  ~RealFft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* in() noexcept { return in_.get(); }
  fftw_complex* out() noexcept { return out_.get(); }
  void forward() noexcept { fftw_execute(fwd_); }
  void backward() noexcept { fftw_execute(bwd_); }
  std::size_t size() const noexcept { return n_; }

 private:
  std::size_t n_;
  std::unique_ptr<double, FftwDeleter> in_;
  std::unique_ptr<fftw_complex, FftwDeleter> out_;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

std::size_t next_fast_size(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

std::vector<double> lagged_products(const std::vector<double>& x, long max_lag) {
  const std::size_t n = x.size();
  RealFft fft(next_fast_size(2 * n));
  const std::size_t m = fft.size();
  std::fill(fft.in(), fft.in() + m, 0.0);
  std::copy(x.begin(), x.end(), fft.in());
  fft.forward();
  for (std::size_t k = 0; k < m / 2 + 1; ++k) {
    const double re = fft.out()[k][0], im = fft.out()[k][1];
    fft.out()[k][0] = re * re + im * im;
    fft.out()[k][1] = 0.0;
  }
  fft.backward();
  std::vector<double> out(static_cast<std::size_t>(max_lag) + 1);
  for (std::size_t s = 0; s < out.size(); ++s) out[s] = fft.in()[s] / static_cast<double>(m);
  return out;
}

std::vector<double> periodogram_raw(const std::vector<double>& x) {
  RealFft fft(x.size());
  std::copy(x.begin(), x.end(), fft.in());
  fft.forward();
  std::vector<double> out(x.size() / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double re = fft.out()[k][0], im = fft.out()[k][1];
    out[k] = re * re + im * im;
  }
  return out;
}

}  // namespace cgns::detail
