#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include "gevrey_flow/spectral_field.hpp"

namespace gevrey_flow {

/// In-place complex FFT on an N (d = 1) or N x N (d = 2) periodic grid.
///
/// Plans are created once per (d, N, direction) and shared; FFTW planning is
/// serialized by a mutex, execution on caller-owned arrays is reentrant.
class PeriodicFft {
 public:
  PeriodicFft(int dim, int n) : dim_(dim), n_(n) {
    forward_ = plan(dim, n, FFTW_FORWARD);
    backward_ = plan(dim, n, FFTW_BACKWARD);
  }

  int dim() const { return dim_; }
  int points() const { return n_; }
  std::size_t size() const {
    return dim_ == 1 ? static_cast<std::size_t>(n_) : static_cast<std::size_t>(n_) * n_;
  }

  /// data <- sum_n data[n] e^{-2 pi i k n / N}
  void forward(std::span<cplx> data) const { execute(forward_, data); }
  /// data <- sum_k data[k] e^{+2 pi i k n / N}
  void backward(std::span<cplx> data) const { execute(backward_, data); }

 private:
  static void execute(fftw_plan p, std::span<cplx> data) {
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(p, ptr, ptr);
  }

  static fftw_plan plan(int dim, int n, int sign) {
    static std::mutex mutex;
    static std::map<std::tuple<int, int, int>, std::unique_ptr<fftw_plan_s, void (*)(fftw_plan)>>
        cache;
    std::lock_guard lock(mutex);
    const auto key = std::make_tuple(dim, n, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second.get();
    const std::size_t count =
        dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
    std::vector<cplx> scratch(count);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p = dim == 1 ? fftw_plan_dft_1d(n, buf, buf, sign, flags)
                           : fftw_plan_dft_2d(n, n, buf, buf, sign, flags);
    cache.emplace(key, std::unique_ptr<fftw_plan_s, void (*)(fftw_plan)>(p, fftw_destroy_plan));
    return p;
  }

  int dim_;
  int n_;
  fftw_plan forward_;
  fftw_plan backward_;
};

}  // namespace gevrey_flow
