#include "flag/sphere_wavelets.hpp"

#include <algorithm>

#include "flag/error.hpp"

namespace flag {

std::size_t SphereDecomposition::sample_count() const {
  std::size_t n = scaling.values.size();
  for (const auto& w : wavelets) n += w.values.size();
  return n;
}

void SphereDecomposition::validate() const {
  if (J < j0 || wavelets.size() != J - j0 + 1) {
    throw InvalidArgument("SphereDecomposition: wavelet count inconsistent with scale range");
  }
  scaling.validate();
  if (scaling.L > L) throw InvalidArgument("SphereDecomposition: scaling band limit exceeds L");
  for (const auto& w : wavelets) {
    w.validate();
    if (w.L > L) throw InvalidArgument("SphereDecomposition: wavelet band limit exceeds L");
    if (!multires && w.L != L) {
      throw InvalidArgument("SphereDecomposition: full-resolution maps must be at band limit L");
    }
  }
}

SphereCoeffs resize_band_limit(const SphereCoeffs& c, std::size_t L) {
  SphereCoeffs out(L);
  const std::size_t n = std::min(L, c.L);
  std::copy_n(c.coeffs.begin(), n * n, out.coeffs.begin());
  return out;
}

SphereWaveletTransform::SphereWaveletTransform(SphereKernels kernels)
    : kernels_(std::move(kernels)) {
  kernels_.validate();
}

const SphereTransform& SphereWaveletTransform::plan(std::size_t L) {
  auto& slot = plans_[L];
  if (!slot) slot = std::make_unique<SphereTransform>(L);
  return *slot;
}

SphereDecomposition SphereWaveletTransform::analyze(const SphereCoeffs& f, bool multires) {
  f.validate();
  const SphereKernels& k = kernels_;
  if (f.L != k.L) throw InvalidArgument("sphere_analyze: signal and kernels differ in band limit");

  SphereDecomposition d;
  d.L = k.L;
  d.lambda = k.lambda;
  d.j0 = k.j0;
  d.J = k.J;
  d.multires = multires;

  auto window = [&](const std::vector<double>& w, std::size_t Lb) {
    SphereCoeffs part(Lb);
    for (std::size_t l = 0; l < Lb; ++l) {
      for (long m = -static_cast<long>(l); m <= static_cast<long>(l); ++m) {
        part(l, m) = w[l] * f(l, m);
      }
    }
    return plan(Lb).inverse(part);
  };

  d.scaling = window(k.eta, multires ? k.scaling_band_limit() : k.L);
  for (std::size_t j = k.j0; j <= k.J; ++j) {
    d.wavelets.push_back(window(k.kappa(j), multires ? k.wavelet_band_limit(j) : k.L));
  }
  return d;
}

SphereCoeffs SphereWaveletTransform::synthesize(const SphereDecomposition& d) {
  d.validate();
  const SphereKernels& k = kernels_;
  if (d.L != k.L || d.lambda != k.lambda || d.j0 != k.j0 || d.J != k.J) {
    throw InvalidArgument("sphere_synthesize: decomposition was built with different kernels");
  }
  if (d.scaling.L < k.scaling_band_limit()) {
    throw InvalidArgument("sphere_synthesize: scaling map is below its window's band limit");
  }
  for (std::size_t j = k.j0; j <= k.J; ++j) {
    if (d.wavelets[j - k.j0].L < k.wavelet_band_limit(j)) {
      throw InvalidArgument("sphere_synthesize: wavelet map is below its window's band limit");
    }
  }
  SphereCoeffs out(k.L);
  auto accumulate = [&](const SphereGrid& g, const std::vector<double>& w) {
    const SphereCoeffs part = plan(g.L).forward(g);
    for (std::size_t l = 0; l < g.L; ++l) {
      for (long m = -static_cast<long>(l); m <= static_cast<long>(l); ++m) {
        out(l, m) += w[l] * part(l, m);
      }
    }
  };
  accumulate(d.scaling, k.eta);
  for (std::size_t j = k.j0; j <= k.J; ++j) accumulate(d.wavelets[j - k.j0], k.kappa(j));
  return out;
}

SphereDecomposition sphere_analyze(const SphereCoeffs& f, const SphereKernels& kernels,
                                   bool multires) {
  return SphereWaveletTransform(kernels).analyze(f, multires);
}

SphereCoeffs sphere_synthesize(const SphereDecomposition& d, const SphereKernels& kernels) {
  return SphereWaveletTransform(kernels).synthesize(d);
}

}  // namespace flag
