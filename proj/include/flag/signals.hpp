#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "flag/flag_transform.hpp"
#include "flag/sphere_harmonics.hpp"

namespace flag {

/// Test-signal generator. Draws come from std::mt19937_64, whose output
/// sequence is fixed by the C++ standard; each 64-bit draw u maps to
/// (u >> 11) * 2^-53 in [0, 1) and then to [-1, 1). Platform independent.
class SignalRng {
 public:
  explicit SignalRng(std::uint64_t seed) : engine_(seed) {}

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double symmetric() { return 2.0 * unit() - 1.0; }
  cplx complex_symmetric() {
    const double re = symmetric();
    return {re, symmetric()};
  }

 private:
  std::mt19937_64 engine_;
};

/// Enforces f_{l,-m} = (-1)^m conj(f_{lm}) (the harmonic image of a real
/// signal) on a block of L^2 coefficients.
void conjugate_symmetrize(cplx* coeffs, std::size_t L);

SphereCoeffs random_sphere_coeffs(std::size_t L, std::uint64_t seed, bool real_signal = false);
FlagCoeffs random_flag_coeffs(const BandLimits& limits, std::uint64_t seed,
                              bool real_signal = false);

struct BlobFieldOptions {
  std::size_t count = 8;
  double width = 0.5;    // Gaussian sigma, in units of r
  double r_min = 0.0;    // blob centres drawn uniformly in [r_min, r_max]
  double r_max = 0.0;    // 0 means 0.6 * outermost radial node
  std::uint64_t seed = 1;
};

/// Superposition of unit-amplitude 3D Gaussian blobs sampled on the ball grid.
BallGrid blob_field(const BandLimits& limits, const BlobFieldOptions& options);

}  // namespace flag
