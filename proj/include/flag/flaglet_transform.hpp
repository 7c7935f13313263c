#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "flag/flag_transform.hpp"
#include "flag/kernel_tiling.hpp"

namespace flag {

/// Scaling part and flaglet coefficient maps W^{jj'} of a ball signal, each
/// stored as a spatial grid. With `multires` each wavelet map lives at its
/// effective band limits (L_j, P_j').
struct FlagletDecomposition {
  BandLimits limits;
  TilingParams params;
  std::size_t J_ang = 0;
  std::size_t J_rad = 0;
  bool multires = false;
  BallGrid scaling;
  std::vector<BallGrid> wavelets;  // slot (j - j0_ang) * radial_scale_count() + (j' - j0_rad)

  std::size_t angular_scale_count() const { return J_ang - params.j0_ang + 1; }
  std::size_t radial_scale_count() const { return J_rad - params.j0_rad + 1; }
  std::size_t scale_slot(std::size_t j, std::size_t jp) const {
    return (j - params.j0_ang) * radial_scale_count() + (jp - params.j0_rad);
  }
  BallGrid& wavelet(std::size_t j, std::size_t jp) { return wavelets.at(scale_slot(j, jp)); }
  const BallGrid& wavelet(std::size_t j, std::size_t jp) const {
    return wavelets.at(scale_slot(j, jp));
  }

  std::size_t sample_count() const;
  void validate() const;
};

/// Restricts or zero-pads Fourier-Laguerre coefficients to new limits
/// (tau is taken from `limits`).
FlagCoeffs resize_band_limits(const FlagCoeffs& c, const BandLimits& limits);

/// Flaglet analysis and synthesis for one kernel set, caching a transform
/// plan per band-limit pair. Not safe for concurrent use.
class FlagletTransform {
 public:
  explicit FlagletTransform(FlagletKernels kernels);

  const FlagletKernels& kernels() const noexcept { return kernels_; }

  /// Band limits of the scaling part: the bounding box of Phi's support
  /// when multires, else (L, P).
  std::pair<std::size_t, std::size_t> scaling_band_limits(bool multires) const;

  FlagletDecomposition analyze(const FlagCoeffs& f, bool multires);
  FlagCoeffs synthesize(const FlagletDecomposition& d);

  /// Windowed coefficients without the spatial rendering: scaling part first,
  /// then wavelets in slot order, each at the band limits analyze() would use.
  std::vector<FlagCoeffs> analyze_harmonic(const FlagCoeffs& f, bool multires) const;
  FlagCoeffs synthesize_harmonic(const std::vector<FlagCoeffs>& parts) const;

  /// Harmonic energy of each part (scaling first), computed by re-projecting
  /// the stored grids.
  std::vector<double> part_energies(const FlagletDecomposition& d);

 private:
  const FlagPlan& plan(const BandLimits& limits);
  std::vector<BandLimits> part_limits(const BandLimits& full, bool multires) const;
  void check_compatible(const FlagletDecomposition& d) const;

  FlagletKernels kernels_;
  std::map<std::pair<std::size_t, std::size_t>, std::unique_ptr<FlagPlan>> plans_;
  double plan_tau_ = 0.0;
};

FlagletDecomposition flaglet_analyze(const FlagCoeffs& f, const FlagletKernels& kernels,
                                     bool multires);
FlagCoeffs flaglet_synthesize(const FlagletDecomposition& d, const FlagletKernels& kernels);

enum class ThresholdMode { Hard, Soft };

/// Zeroes (hard) or shrinks toward zero (soft) every wavelet sample whose
/// magnitude is below `threshold`. The scaling part is left untouched.
FlagletDecomposition threshold_denoise(const FlagletDecomposition& d, double threshold,
                                       ThresholdMode mode);

}  // namespace flag
