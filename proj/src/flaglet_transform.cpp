#include "flag/flaglet_transform.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flag/error.hpp"

namespace flag {

std::size_t FlagletDecomposition::sample_count() const {
  std::size_t n = scaling.values.size();
  for (const auto& w : wavelets) n += w.values.size();
  return n;
}

void FlagletDecomposition::validate() const {
  limits.validate();
  if (J_ang < params.j0_ang || J_rad < params.j0_rad) {
    throw InvalidArgument("FlagletDecomposition: minimum scale exceeds maximum scale");
  }
  if (wavelets.size() != angular_scale_count() * radial_scale_count()) {
    throw InvalidArgument("FlagletDecomposition: wavelet count inconsistent with scale ranges");
  }
  auto check = [&](const BallGrid& g) {
    g.validate();
    if (g.limits.L > limits.L || g.limits.P > limits.P || g.limits.tau != limits.tau) {
      throw InvalidArgument("FlagletDecomposition: part band limits exceed the signal's");
    }
    if (!multires && (g.limits.L != limits.L || g.limits.P != limits.P)) {
      throw InvalidArgument("FlagletDecomposition: full-resolution parts must be at (L, P)");
    }
  };
  check(scaling);
  for (const auto& w : wavelets) check(w);
}

FlagCoeffs resize_band_limits(const FlagCoeffs& c, const BandLimits& limits) {
  FlagCoeffs out(limits);
  const std::size_t L = std::min(limits.L, c.limits.L);
  const std::size_t P = std::min(limits.P, c.limits.P);
  for (std::size_t p = 0; p < P; ++p) {
    std::copy_n(c.coeffs.begin() + static_cast<long>(p * c.limits.L * c.limits.L), L * L,
                out.coeffs.begin() + static_cast<long>(p * limits.L * limits.L));
  }
  return out;
}

FlagletTransform::FlagletTransform(FlagletKernels kernels) : kernels_(std::move(kernels)) {
  kernels_.validate();
}

const FlagPlan& FlagletTransform::plan(const BandLimits& limits) {
  if (limits.tau != plan_tau_) {
    plans_.clear();
    plan_tau_ = limits.tau;
  }
  auto& slot = plans_[{limits.L, limits.P}];
  if (!slot) slot = std::make_unique<FlagPlan>(limits);
  return *slot;
}

std::pair<std::size_t, std::size_t> FlagletTransform::scaling_band_limits(bool multires) const {
  const std::size_t L = kernels_.L;
  const std::size_t P = kernels_.P;
  if (!multires) return {L, P};
  std::size_t lmax = 0;
  std::size_t pmax = 0;
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t p = 0; p < P; ++p) {
      if (kernels_.phi[l * P + p] != 0.0) {
        lmax = std::max(lmax, l);
        pmax = std::max(pmax, p);
      }
    }
  }
  return {lmax + 1, pmax + 1};
}

std::vector<BandLimits> FlagletTransform::part_limits(const BandLimits& full,
                                                      bool multires) const {
  std::vector<BandLimits> out;
  const auto [ls, ps] = scaling_band_limits(multires);
  out.push_back({ls, ps, full.tau});
  const auto& k = kernels_;
  for (std::size_t j = k.params.j0_ang; j <= k.J_ang; ++j) {
    for (std::size_t jp = k.params.j0_rad; jp <= k.J_rad; ++jp) {
      if (multires) {
        out.push_back({k.angular_band_limit(j), k.radial_band_limit(jp), full.tau});
      } else {
        out.push_back(full);
      }
    }
  }
  return out;
}

std::vector<FlagCoeffs> FlagletTransform::analyze_harmonic(const FlagCoeffs& f,
                                                           bool multires) const {
  f.validate();
  const auto& k = kernels_;
  if (f.limits.L != k.L || f.limits.P != k.P) {
    throw InvalidArgument("flaglet_analyze: signal and kernels differ in band limits");
  }
  const auto limits = part_limits(f.limits, multires);
  std::vector<FlagCoeffs> parts;
  parts.reserve(limits.size());
  for (std::size_t s = 0; s < limits.size(); ++s) {
    const std::vector<double>& window = s == 0 ? k.phi : k.psis[s - 1];
    FlagCoeffs part(limits[s]);
    for (std::size_t p = 0; p < limits[s].P; ++p) {
      for (std::size_t l = 0; l < limits[s].L; ++l) {
        const double w = window[l * k.P + p];
        for (long m = -static_cast<long>(l); m <= static_cast<long>(l); ++m) {
          part(l, m, p) = w * f(l, m, p);
        }
      }
    }
    parts.push_back(std::move(part));
  }
  return parts;
}

FlagCoeffs FlagletTransform::synthesize_harmonic(const std::vector<FlagCoeffs>& parts) const {
  const auto& k = kernels_;
  if (parts.size() != k.psis.size() + 1) {
    throw InvalidArgument("flaglet_synthesize: part count does not match the kernels");
  }
  FlagCoeffs out({k.L, k.P, parts.front().limits.tau});
  // Fixed assembly order: scaling, then wavelets by slot.
  for (std::size_t s = 0; s < parts.size(); ++s) {
    const FlagCoeffs& part = parts[s];
    if (part.limits.L > k.L || part.limits.P > k.P) {
      throw InvalidArgument("flaglet_synthesize: part band limits exceed the kernels'");
    }
    const std::vector<double>& window = s == 0 ? k.phi : k.psis[s - 1];
    for (std::size_t p = 0; p < part.limits.P; ++p) {
      for (std::size_t l = 0; l < part.limits.L; ++l) {
        const double w = window[l * k.P + p];
        for (long m = -static_cast<long>(l); m <= static_cast<long>(l); ++m) {
          out(l, m, p) += w * part(l, m, p);
        }
      }
    }
  }
  return out;
}

FlagletDecomposition FlagletTransform::analyze(const FlagCoeffs& f, bool multires) {
  const auto parts = analyze_harmonic(f, multires);
  const auto& k = kernels_;
  FlagletDecomposition d;
  d.limits = f.limits;
  d.params = k.params;
  d.J_ang = k.J_ang;
  d.J_rad = k.J_rad;
  d.multires = multires;
  d.scaling = plan(parts[0].limits).inverse(parts[0]);
  d.wavelets.reserve(parts.size() - 1);
  for (std::size_t s = 1; s < parts.size(); ++s) {
    d.wavelets.push_back(plan(parts[s].limits).inverse(parts[s]));
  }
  return d;
}

void FlagletTransform::check_compatible(const FlagletDecomposition& d) const {
  d.validate();
  const auto& k = kernels_;
  if (d.limits.L != k.L || d.limits.P != k.P || !(d.params == k.params) || d.J_ang != k.J_ang ||
      d.J_rad != k.J_rad) {
    throw InvalidArgument("flaglet_synthesize: decomposition was built with different kernels");
  }
  const auto minimal = part_limits(d.limits, true);
  auto covers = [](const BandLimits& have, const BandLimits& need) {
    return have.L >= need.L && have.P >= need.P && have.tau == need.tau;
  };
  bool ok = covers(d.scaling.limits, minimal[0]);
  for (std::size_t s = 0; s < d.wavelets.size(); ++s) ok = ok && covers(d.wavelets[s].limits, minimal[s + 1]);
  if (!ok) throw InvalidArgument("flaglet_synthesize: a stored map is below its window's band limits");
}

FlagCoeffs FlagletTransform::synthesize(const FlagletDecomposition& d) {
  check_compatible(d);
  std::vector<FlagCoeffs> parts;
  parts.reserve(d.wavelets.size() + 1);
  parts.push_back(plan(d.scaling.limits).forward(d.scaling));
  for (const auto& w : d.wavelets) parts.push_back(plan(w.limits).forward(w));
  FlagCoeffs out = synthesize_harmonic(parts);
  out.limits = d.limits;
  return out;
}

std::vector<double> FlagletTransform::part_energies(const FlagletDecomposition& d) {
  check_compatible(d);
  std::vector<double> e;
  e.reserve(d.wavelets.size() + 1);
  e.push_back(coefficient_energy(plan(d.scaling.limits).forward(d.scaling).coeffs));
  for (const auto& w : d.wavelets) e.push_back(coefficient_energy(plan(w.limits).forward(w).coeffs));
  return e;
}

FlagletDecomposition flaglet_analyze(const FlagCoeffs& f, const FlagletKernels& kernels,
                                     bool multires) {
  return FlagletTransform(kernels).analyze(f, multires);
}

FlagCoeffs flaglet_synthesize(const FlagletDecomposition& d, const FlagletKernels& kernels) {
  return FlagletTransform(kernels).synthesize(d);
}

FlagletDecomposition threshold_denoise(const FlagletDecomposition& d, double threshold,
                                       ThresholdMode mode) {
  if (!(threshold >= 0.0)) throw InvalidArgument("threshold_denoise: threshold must be >= 0");
  FlagletDecomposition out = d;
  for (auto& w : out.wavelets) {
    for (auto& v : w.values) {
      const double mag = std::abs(v);
      if (mag < threshold || mag == 0.0) {
        v = 0.0;
      } else if (mode == ThresholdMode::Soft) {
        v *= (mag - threshold) / mag;
      }
    }
  }
  return out;
}

}  // namespace flag
