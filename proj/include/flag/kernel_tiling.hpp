#pragma once

#include <cstddef>
#include <vector>

#include "flag/flag_transform.hpp"

namespace flag {

/// Dilation factors and minimum scales of the angular and radial tilings.
struct TilingParams {
  double lambda = 2.0;
  double nu = 2.0;
  std::size_t j0_ang = 0;
  std::size_t j0_rad = 0;

  bool operator==(const TilingParams&) const = default;
};

/// Smallest J with dilation^J >= band_limit - 1. Requires band_limit >= 2.
std::size_t max_scale(double dilation, std::size_t band_limit);

/// Effective band limit min(ceil(dilation^{j+1}), band_limit) of scale j.
std::size_t scale_band_limit(double dilation, std::size_t j, std::size_t band_limit);

/// exp(-1 / (1 - t^2)) on (-1, 1), zero elsewhere.
double smooth_bump(double t);

/// The smooth cutoff k_lambda: 1 below 1/lambda, 0 above 1, monotone between.
class SmoothCutoff {
 public:
  explicit SmoothCutoff(double lambda);

  double lambda() const noexcept { return lambda_; }
  double operator()(double t) const;

  /// Wavelet and scaling generators sqrt(k(t/lambda) - k(t)) and sqrt(k(t)).
  double kappa(double t) const;
  double eta(double t) const;

 private:
  double integrand(double u) const;
  double panel_integral(double a, double b) const;

  double lambda_;
  std::vector<double> breaks_;  // panel edges from 1/lambda to 1
  std::vector<double> tails_;   // integral from breaks_[k] to 1
};

double k_lambda(double lambda, double t);

struct KappaEta {
  double kappa;
  double eta;
};
KappaEta kappa_eta(double lambda, double t);

/// Axisymmetric wavelet windows kappa_j(l), j = j0 .. J, and scaling window eta(l).
struct SphereKernels {
  std::size_t L = 0;
  double lambda = 2.0;
  std::size_t j0 = 0;
  std::size_t J = 0;
  std::vector<double> eta;
  std::vector<std::vector<double>> kappas;  // kappas[j - j0][l]

  std::size_t scale_count() const { return kappas.size(); }
  const std::vector<double>& kappa(std::size_t j) const { return kappas.at(j - j0); }
  std::size_t wavelet_band_limit(std::size_t j) const { return scale_band_limit(lambda, j, L); }
  std::size_t scaling_band_limit() const { return scale_band_limit(lambda, j0, L); }
  void validate() const;
};

SphereKernels build_sphere_kernels(std::size_t L, const TilingParams& params);

/// Largest |eta^2 + sum_j kappa_j^2 - 1| over l.
double admissibility_deviation(const SphereKernels& k);

/// Flaglet windows Psi^{jj'}_{lp} and scaling window Phi_{lp}, each stored
/// row-major as [l * P + p].
struct FlagletKernels {
  std::size_t L = 0;
  std::size_t P = 0;
  TilingParams params;
  std::size_t J_ang = 0;
  std::size_t J_rad = 0;
  std::vector<double> phi;
  std::vector<std::vector<double>> psis;  // psis[(j - j0_ang) * radial_scale_count() + (j' - j0_rad)]

  std::size_t angular_scale_count() const { return J_ang - params.j0_ang + 1; }
  std::size_t radial_scale_count() const { return J_rad - params.j0_rad + 1; }
  std::size_t scale_slot(std::size_t j, std::size_t jp) const {
    return (j - params.j0_ang) * radial_scale_count() + (jp - params.j0_rad);
  }
  const std::vector<double>& psi(std::size_t j, std::size_t jp) const {
    return psis.at(scale_slot(j, jp));
  }
  std::size_t angular_band_limit(std::size_t j) const {
    return scale_band_limit(params.lambda, j, L);
  }
  std::size_t radial_band_limit(std::size_t jp) const {
    return scale_band_limit(params.nu, jp, P);
  }
  void validate() const;
};

/// Builds the ball tiling for band limits (L, P). Throws InvalidArgument for
/// bad parameters and InternalError if the residual scaling window would be
/// negative beyond rounding.
FlagletKernels build_flaglet_kernels(std::size_t L, std::size_t P, const TilingParams& params);
FlagletKernels build_flaglet_kernels(const BandLimits& limits, const TilingParams& params);

double admissibility_deviation(const FlagletKernels& k);

}  // namespace flag
