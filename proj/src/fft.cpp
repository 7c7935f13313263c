#include "flag/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>

#include "flag/error.hpp"

namespace flag {
namespace {

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct Dft::Impl {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }

  void run(fftw_plan plan, std::span<std::complex<double>> data, std::size_t n) const {
    // New-array execution needs the planning alignment, so stage through an
    // fftw_malloc buffer.
    auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (!buf) throw std::bad_alloc();
    std::memcpy(static_cast<void*>(buf), static_cast<const void*>(data.data()), sizeof(fftw_complex) * n);
    fftw_execute_dft(plan, buf, buf);
    std::memcpy(static_cast<void*>(data.data()), static_cast<const void*>(buf), sizeof(fftw_complex) * n);
    fftw_free(buf);
  }
};

Dft::Dft(std::size_t n) : n_(n), impl_(std::make_unique<Impl>()) {
  if (n == 0) throw InvalidArgument("Dft: length must be positive");
  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (!buf) throw std::bad_alloc();
  {
    std::lock_guard lock(planner_mutex());
    const int len = static_cast<int>(n);
    impl_->fwd = fftw_plan_dft_1d(len, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    impl_->bwd = fftw_plan_dft_1d(len, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_free(buf);
  if (!impl_->fwd || !impl_->bwd) throw InternalError("Dft: FFTW planning failed");
}

Dft::~Dft() = default;
Dft::Dft(Dft&&) noexcept = default;
Dft& Dft::operator=(Dft&&) noexcept = default;

void Dft::forward(std::span<std::complex<double>> data) const {
  if (data.size() != n_) throw InvalidArgument("Dft::forward: length mismatch");
  impl_->run(impl_->fwd, data, n_);
}

void Dft::backward(std::span<std::complex<double>> data) const {
  if (data.size() != n_) throw InvalidArgument("Dft::backward: length mismatch");
  impl_->run(impl_->bwd, data, n_);
}

}  // namespace flag
