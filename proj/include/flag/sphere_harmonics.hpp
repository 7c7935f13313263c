#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "flag/fft.hpp"

namespace flag {

using cplx = std::complex<double>;

inline constexpr std::size_t kMaxSphereBandLimit = 4096;

/// Flat index of (l, m) in a harmonic coefficient array, -l <= m <= l.
constexpr std::size_t lm_index(std::size_t l, long m) {
  return static_cast<std::size_t>(static_cast<long>(l * l + l) + m);
}

/// Number of longitudes used at band limit L.
constexpr std::size_t sphere_nphi(std::size_t L) { return 2 * L - 1; }
constexpr std::size_t sphere_sample_count(std::size_t L) { return L * sphere_nphi(L); }

/// Samples on the Gauss-Legendre x equiangular-longitude grid, row-major
/// over (theta_i, phi_k); rows run in descending theta.
struct SphereGrid {
  std::size_t L = 0;
  std::vector<cplx> values;

  SphereGrid() = default;
  explicit SphereGrid(std::size_t band_limit)
      : L(band_limit), values(sphere_sample_count(band_limit)) {}

  cplx& at(std::size_t ring, std::size_t k) { return values[ring * sphere_nphi(L) + k]; }
  const cplx& at(std::size_t ring, std::size_t k) const {
    return values[ring * sphere_nphi(L) + k];
  }
  void validate() const;
};

/// Harmonic coefficients f_lm, indexed by lm_index.
struct SphereCoeffs {
  std::size_t L = 0;
  std::vector<cplx> coeffs;

  SphereCoeffs() = default;
  explicit SphereCoeffs(std::size_t band_limit)
      : L(band_limit), coeffs(band_limit * band_limit) {}

  cplx& operator()(std::size_t l, long m) { return coeffs[lm_index(l, m)]; }
  const cplx& operator()(std::size_t l, long m) const { return coeffs[lm_index(l, m)]; }
  void validate() const;
};

struct SphereSampling {
  std::vector<double> thetas;
  std::vector<double> phis;
};

SphereSampling sphere_sampling(std::size_t L);

/// Orthonormalised associated Legendre values P~_l^m(x) for 0 <= m <= l < L,
/// addressed by lm_index(l, m); entries with m < 0 are zero. The
/// Condon-Shortley phase is included, and Y_lm = P~_l^m(cos theta) e^{i m phi} / sqrt(2 pi).
std::vector<double> assoc_legendre_table(std::size_t L, double x);

/// Same values in compact m-major layout: for each m, the run l = m .. L-1.
/// `out` must hold L (L + 1) / 2 entries.
void legendre_ring(std::size_t L, double x, std::span<double> out);

constexpr std::size_t legendre_ring_size(std::size_t L) { return L * (L + 1) / 2; }
constexpr std::size_t legendre_ring_offset(std::size_t L, std::size_t m) {
  return m * L - m * (m - 1) / 2;
}

/// Reusable transform at a fixed band limit. Holds the quadrature rule, the
/// FFT plan and, for moderate L, the Legendre tables of every ring.
/// Immutable after construction; safe to share between threads.
class SphereTransform {
 public:
  /// Rings up to this band limit keep their Legendre tables resident.
  static constexpr std::size_t kTableLimit = 256;

  explicit SphereTransform(std::size_t L);

  std::size_t band_limit() const noexcept { return L_; }
  std::span<const double> cos_thetas() const noexcept { return x_; }
  std::span<const double> weights() const noexcept { return w_; }

  SphereCoeffs forward(const SphereGrid& grid) const;
  SphereGrid inverse(const SphereCoeffs& coeffs) const;

  /// Quadrature estimate of the integral of |f|^2 over the sphere.
  double grid_energy(const SphereGrid& grid) const;

 private:
  std::span<const double> ring_table(std::size_t ring, std::vector<double>& scratch) const;

  std::size_t L_;
  std::vector<double> x_;
  std::vector<double> w_;
  std::vector<double> tables_;
  Dft dft_;
};

SphereCoeffs sht_forward(const SphereGrid& grid);
SphereGrid sht_inverse(const SphereCoeffs& coeffs);

}  // namespace flag
