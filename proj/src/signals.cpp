#include "flag/signals.hpp"

#include <cmath>
#include <numbers>

#include "flag/error.hpp"

namespace flag {

void conjugate_symmetrize(cplx* coeffs, std::size_t L) {
  for (std::size_t l = 0; l < L; ++l) {
    coeffs[lm_index(l, 0)] = coeffs[lm_index(l, 0)].real();
    for (long m = 1; m <= static_cast<long>(l); ++m) {
      const cplx c = std::conj(coeffs[lm_index(l, m)]);
      coeffs[lm_index(l, -m)] = (m % 2 == 0) ? c : -c;
    }
  }
}

SphereCoeffs random_sphere_coeffs(std::size_t L, std::uint64_t seed, bool real_signal) {
  SphereCoeffs c(L);
  SignalRng rng(seed);
  for (auto& v : c.coeffs) v = rng.complex_symmetric();
  if (real_signal) conjugate_symmetrize(c.coeffs.data(), L);
  return c;
}

FlagCoeffs random_flag_coeffs(const BandLimits& limits, std::uint64_t seed, bool real_signal) {
  limits.validate();
  FlagCoeffs c(limits);
  SignalRng rng(seed);
  for (auto& v : c.coeffs) v = rng.complex_symmetric();
  if (real_signal) {
    for (std::size_t p = 0; p < limits.P; ++p) {
      conjugate_symmetrize(c.coeffs.data() + p * limits.L * limits.L, limits.L);
    }
  }
  return c;
}

BallGrid blob_field(const BandLimits& limits, const BlobFieldOptions& options) {
  limits.validate();
  if (!(options.width > 0.0)) throw InvalidArgument("blob_field: width must be positive");
  const auto nodes = radial_nodes(limits.radial());
  const auto sampling = sphere_sampling(limits.L);
  const double r_max = options.r_max > 0.0 ? options.r_max : 0.6 * nodes.radii.back();
  if (!(r_max >= options.r_min && options.r_min >= 0.0)) {
    throw InvalidArgument("blob_field: need 0 <= r_min <= r_max");
  }

  struct Blob {
    double x, y, z;
  };
  SignalRng rng(options.seed);
  std::vector<Blob> blobs;
  for (std::size_t b = 0; b < options.count; ++b) {
    const double r = options.r_min + (r_max - options.r_min) * rng.unit();
    const double cos_t = rng.symmetric();
    const double phi = 2.0 * std::numbers::pi * rng.unit();
    const double sin_t = std::sqrt(1.0 - cos_t * cos_t);
    blobs.push_back({r * sin_t * std::cos(phi), r * sin_t * std::sin(phi), r * cos_t});
  }

  BallGrid g(limits);
  const double inv2s2 = 1.0 / (2.0 * options.width * options.width);
  const std::size_t nphi = sphere_nphi(limits.L);
  for (std::size_t i = 0; i < limits.P; ++i) {
    const double r = nodes.radii[i];
    for (std::size_t t = 0; t < limits.L; ++t) {
      const double st = std::sin(sampling.thetas[t]);
      const double ct = std::cos(sampling.thetas[t]);
      for (std::size_t k = 0; k < nphi; ++k) {
        const double x = r * st * std::cos(sampling.phis[k]);
        const double y = r * st * std::sin(sampling.phis[k]);
        const double z = r * ct;
        double v = 0.0;
        for (const auto& b : blobs) {
          const double d2 = (x - b.x) * (x - b.x) + (y - b.y) * (y - b.y) + (z - b.z) * (z - b.z);
          v += std::exp(-d2 * inv2s2);
        }
        g.at(i, t, k) = v;
      }
    }
  }
  return g;
}

}  // namespace flag
