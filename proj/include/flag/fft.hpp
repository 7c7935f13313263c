#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace flag {

/// In-place complex DFT of a fixed length, backed by FFTW.
///
/// Forward computes X_m = sum_k x_k e^{-2 pi i m k / n}; backward uses the
/// opposite sign. Neither direction normalises. A plan is immutable after
/// construction and `execute` is safe to call from several threads at once.
class Dft {
 public:
  explicit Dft(std::size_t n);
  ~Dft();
  Dft(Dft&&) noexcept;
  Dft& operator=(Dft&&) noexcept;
  Dft(const Dft&) = delete;
  Dft& operator=(const Dft&) = delete;

  std::size_t size() const noexcept { return n_; }
  void forward(std::span<std::complex<double>> data) const;
  void backward(std::span<std::complex<double>> data) const;

 private:
  struct Impl;
  std::size_t n_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace flag
