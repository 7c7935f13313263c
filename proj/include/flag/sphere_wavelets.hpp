#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <vector>

#include "flag/kernel_tiling.hpp"
#include "flag/sphere_harmonics.hpp"

namespace flag {

/// Scaling and wavelet maps of a sphere signal. With `multires` each map is
/// sampled at the smallest band limit holding its window.
struct SphereDecomposition {
  std::size_t L = 0;
  double lambda = 2.0;
  std::size_t j0 = 0;
  std::size_t J = 0;
  bool multires = false;
  SphereGrid scaling;
  std::vector<SphereGrid> wavelets;  // wavelets[j - j0]

  std::size_t sample_count() const;
  void validate() const;
};

/// Restricts or zero-pads harmonic coefficients to band limit L.
SphereCoeffs resize_band_limit(const SphereCoeffs& c, std::size_t L);

/// Analysis and synthesis with one kernel set, reusing transform plans
/// across calls. Not safe for concurrent use; plans are created lazily.
class SphereWaveletTransform {
 public:
  explicit SphereWaveletTransform(SphereKernels kernels);

  const SphereKernels& kernels() const noexcept { return kernels_; }
  SphereDecomposition analyze(const SphereCoeffs& f, bool multires);
  SphereCoeffs synthesize(const SphereDecomposition& d);

 private:
  const SphereTransform& plan(std::size_t L);

  SphereKernels kernels_;
  std::map<std::size_t, std::unique_ptr<SphereTransform>> plans_;
};

SphereDecomposition sphere_analyze(const SphereCoeffs& f, const SphereKernels& kernels,
                                   bool multires);
SphereCoeffs sphere_synthesize(const SphereDecomposition& d, const SphereKernels& kernels);

}  // namespace flag
