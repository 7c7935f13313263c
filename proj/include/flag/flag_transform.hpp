#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "flag/radial_laguerre.hpp"
#include "flag/sphere_harmonics.hpp"

namespace flag {

/// Angular band limit L, radial band limit P and radial scale tau.
struct BandLimits {
  std::size_t L = 1;
  std::size_t P = 1;
  double tau = 1.0;

  void validate() const;
  RadialParams radial() const { return {P, tau}; }
  bool operator==(const BandLimits&) const = default;
};

constexpr std::size_t ball_sample_count(std::size_t L, std::size_t P) {
  return P * sphere_sample_count(L);
}

/// Samples on the product grid; shell i (ascending radius) is an L x (2L-1)
/// sphere grid.
struct BallGrid {
  BandLimits limits;
  std::vector<cplx> values;

  BallGrid() = default;
  explicit BallGrid(const BandLimits& lim)
      : limits(lim), values(ball_sample_count(lim.L, lim.P)) {}

  std::size_t shell_size() const { return sphere_sample_count(limits.L); }
  cplx& at(std::size_t shell, std::size_t ring, std::size_t k) {
    return values[shell * shell_size() + ring * sphere_nphi(limits.L) + k];
  }
  const cplx& at(std::size_t shell, std::size_t ring, std::size_t k) const {
    return values[shell * shell_size() + ring * sphere_nphi(limits.L) + k];
  }
  void validate() const;
};

/// Fourier-Laguerre coefficients f_lmp at p * L^2 + lm_index(l, m).
struct FlagCoeffs {
  BandLimits limits;
  std::vector<cplx> coeffs;

  FlagCoeffs() = default;
  explicit FlagCoeffs(const BandLimits& lim) : limits(lim), coeffs(lim.P * lim.L * lim.L) {}

  static std::size_t index(std::size_t L, std::size_t l, long m, std::size_t p) {
    return p * L * L + lm_index(l, m);
  }
  cplx& operator()(std::size_t l, long m, std::size_t p) {
    return coeffs[index(limits.L, l, m, p)];
  }
  const cplx& operator()(std::size_t l, long m, std::size_t p) const {
    return coeffs[index(limits.L, l, m, p)];
  }
  void validate() const;
};

/// Precomputed angular and radial machinery for one set of band limits.
/// Immutable; transforms on a shared plan may run concurrently.
class FlagPlan {
 public:
  explicit FlagPlan(const BandLimits& limits);

  const BandLimits& limits() const noexcept { return limits_; }
  const SphereTransform& sphere() const noexcept { return sphere_; }
  const RadialTransform& radial() const noexcept { return radial_; }

  FlagCoeffs forward(const BallGrid& grid) const;
  BallGrid inverse(const FlagCoeffs& coeffs) const;

  /// Quadrature estimate of the integral of |f|^2 r^2 dr dOmega.
  double grid_energy(const BallGrid& grid) const;

 private:
  BandLimits limits_;
  SphereTransform sphere_;
  RadialTransform radial_;
};

FlagCoeffs flag_forward(const BallGrid& grid);
BallGrid flag_inverse(const FlagCoeffs& coeffs);

/// Sum of |c|^2 over a coefficient array.
double coefficient_energy(const std::vector<cplx>& coeffs);

}  // namespace flag
