#include "flag/kernel_tiling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flag/error.hpp"
#include "flag/quadrature.hpp"

namespace flag {
namespace {

constexpr std::size_t kPanelOrder = 64;
constexpr std::size_t kPanels = 16;
constexpr double kResidualTol = 1e-12;

const QuadRule& panel_rule() {
  static const QuadRule rule = gauss_legendre(kPanelOrder);
  return rule;
}

void check_dilation(double d, const char* name) {
  if (!(std::isfinite(d) && d > 1.0)) {
    throw InvalidArgument(std::string(name) + " must be finite and greater than 1");
  }
}

}  // namespace

std::size_t max_scale(double dilation, std::size_t band_limit) {
  check_dilation(dilation, "dilation");
  if (band_limit < 2) {
    throw InvalidArgument("max_scale: band limit must be at least 2 for a wavelet tiling");
  }
  const double target = static_cast<double>(band_limit - 1) * (1.0 - 1e-12);
  std::size_t J = 0;
  while (std::pow(dilation, static_cast<double>(J)) < target) ++J;
  return J;
}

std::size_t scale_band_limit(double dilation, std::size_t j, std::size_t band_limit) {
  const double reach = std::ceil(std::pow(dilation, static_cast<double>(j) + 1.0));
  if (reach >= static_cast<double>(band_limit)) return band_limit;
  return static_cast<std::size_t>(reach);
}

double smooth_bump(double t) {
  if (!(std::fabs(t) < 1.0)) return 0.0;
  return std::exp(-1.0 / (1.0 - t * t));
}

SmoothCutoff::SmoothCutoff(double lambda) : lambda_(lambda) {
  check_dilation(lambda, "lambda");
  const double lo = 1.0 / lambda_;
  breaks_.resize(kPanels + 1);
  for (std::size_t k = 0; k <= kPanels; ++k) {
    breaks_[k] = lo + (1.0 - lo) * static_cast<double>(k) / static_cast<double>(kPanels);
  }
  breaks_.back() = 1.0;
  tails_.assign(kPanels + 1, 0.0);
  for (std::size_t k = kPanels; k-- > 0;) {
    tails_[k] = tails_[k + 1] + panel_integral(breaks_[k], breaks_[k + 1]);
  }
}

double SmoothCutoff::integrand(double u) const {
  const double s = smooth_bump(2.0 * lambda_ / (lambda_ - 1.0) * (u - 1.0 / lambda_) - 1.0);
  return s * s / u;
}

double SmoothCutoff::panel_integral(double a, double b) const {
  const QuadRule& rule = panel_rule();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    sum += rule.weights[i] * integrand(mid + half * rule.nodes[i]);
  }
  return sum * half;
}

double SmoothCutoff::operator()(double t) const {
  if (t <= breaks_.front()) return 1.0;
  if (t >= 1.0) return 0.0;
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - breaks_.begin());  // t in [breaks_[k-1], breaks_[k])
  const double value = (panel_integral(t, breaks_[k]) + tails_[k]) / tails_.front();
  return std::clamp(value, 0.0, 1.0);
}

double SmoothCutoff::kappa(double t) const {
  return std::sqrt(std::max(0.0, (*this)(t / lambda_) - (*this)(t)));
}

double SmoothCutoff::eta(double t) const { return std::sqrt((*this)(t)); }

double k_lambda(double lambda, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("k_lambda: t must be non-negative");
  return SmoothCutoff(lambda)(t);
}

KappaEta kappa_eta(double lambda, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("kappa_eta: t must be non-negative");
  const SmoothCutoff k(lambda);
  return {k.kappa(t), k.eta(t)};
}

void SphereKernels::validate() const {
  if (eta.size() != L) throw InvalidArgument("SphereKernels: eta length must equal L");
  if (J < j0 || kappas.size() != J - j0 + 1) {
    throw InvalidArgument("SphereKernels: scale range inconsistent with kernel count");
  }
  for (const auto& k : kappas) {
    if (k.size() != L) throw InvalidArgument("SphereKernels: kappa length must equal L");
  }
}

SphereKernels build_sphere_kernels(std::size_t L, const TilingParams& params) {
  check_dilation(params.lambda, "lambda");
  const std::size_t J = max_scale(params.lambda, L);
  if (params.j0_ang > J) {
    throw InvalidArgument("build_sphere_kernels: j0 = " + std::to_string(params.j0_ang) +
                          " exceeds the maximum scale J = " + std::to_string(J));
  }
  const SmoothCutoff cutoff(params.lambda);
  SphereKernels out;
  out.L = L;
  out.lambda = params.lambda;
  out.j0 = params.j0_ang;
  out.J = J;
  out.eta.resize(L);
  const double base = std::pow(params.lambda, static_cast<double>(params.j0_ang));
  for (std::size_t l = 0; l < L; ++l) out.eta[l] = cutoff.eta(static_cast<double>(l) / base);
  for (std::size_t j = params.j0_ang; j <= J; ++j) {
    const double dil = std::pow(params.lambda, static_cast<double>(j));
    std::vector<double> kappa(L);
    for (std::size_t l = 0; l < L; ++l) kappa[l] = cutoff.kappa(static_cast<double>(l) / dil);
    out.kappas.push_back(std::move(kappa));
  }
  return out;
}

double admissibility_deviation(const SphereKernels& k) {
  k.validate();
  double worst = 0.0;
  for (std::size_t l = 0; l < k.L; ++l) {
    double sum = k.eta[l] * k.eta[l];
    for (const auto& kappa : k.kappas) sum += kappa[l] * kappa[l];
    worst = std::max(worst, std::fabs(sum - 1.0));
  }
  return worst;
}

void FlagletKernels::validate() const {
  if (J_ang < params.j0_ang || J_rad < params.j0_rad) {
    throw InvalidArgument("FlagletKernels: minimum scale exceeds maximum scale");
  }
  if (phi.size() != L * P) throw InvalidArgument("FlagletKernels: phi must hold L * P values");
  if (psis.size() != angular_scale_count() * radial_scale_count()) {
    throw InvalidArgument("FlagletKernels: wavelet window count inconsistent with scales");
  }
  for (const auto& psi : psis) {
    if (psi.size() != L * P) throw InvalidArgument("FlagletKernels: psi must hold L * P values");
  }
}

FlagletKernels build_flaglet_kernels(std::size_t L, std::size_t P, const TilingParams& params) {
  check_dilation(params.lambda, "lambda");
  check_dilation(params.nu, "nu");
  FlagletKernels out;
  out.L = L;
  out.P = P;
  out.params = params;
  out.J_ang = max_scale(params.lambda, L);
  out.J_rad = max_scale(params.nu, P);
  if (params.j0_ang > out.J_ang || params.j0_rad > out.J_rad) {
    throw InvalidArgument("build_flaglet_kernels: minimum scale exceeds the maximum scale (J_ang = " +
                          std::to_string(out.J_ang) + ", J_rad = " + std::to_string(out.J_rad) + ")");
  }

  const SmoothCutoff ang(params.lambda);
  const SmoothCutoff rad(params.nu);
  std::vector<std::vector<double>> ang_k;
  for (std::size_t j = params.j0_ang; j <= out.J_ang; ++j) {
    const double dil = std::pow(params.lambda, static_cast<double>(j));
    std::vector<double> k(L);
    for (std::size_t l = 0; l < L; ++l) k[l] = ang.kappa(static_cast<double>(l) / dil);
    ang_k.push_back(std::move(k));
  }
  std::vector<std::vector<double>> rad_k;
  for (std::size_t j = params.j0_rad; j <= out.J_rad; ++j) {
    const double dil = std::pow(params.nu, static_cast<double>(j));
    std::vector<double> k(P);
    for (std::size_t p = 0; p < P; ++p) k[p] = rad.kappa(static_cast<double>(p) / dil);
    rad_k.push_back(std::move(k));
  }

  std::vector<double> covered(L * P, 0.0);
  for (const auto& ka : ang_k) {
    for (const auto& kr : rad_k) {
      std::vector<double> psi(L * P);
      for (std::size_t l = 0; l < L; ++l) {
        for (std::size_t p = 0; p < P; ++p) {
          const double v = ka[l] * kr[p];
          psi[l * P + p] = v;
          covered[l * P + p] += v * v;
        }
      }
      out.psis.push_back(std::move(psi));
    }
  }
  out.phi.resize(L * P);
  for (std::size_t i = 0; i < L * P; ++i) {
    const double residual = 1.0 - covered[i];
    if (residual < -kResidualTol) {
      throw InternalError("build_flaglet_kernels: wavelet windows exceed unity at (l, p) = (" +
                          std::to_string(i / P) + ", " + std::to_string(i % P) + ")");
    }
    out.phi[i] = std::sqrt(std::max(0.0, residual));
  }
  return out;
}

FlagletKernels build_flaglet_kernels(const BandLimits& limits, const TilingParams& params) {
  limits.validate();
  return build_flaglet_kernels(limits.L, limits.P, params);
}

double admissibility_deviation(const FlagletKernels& k) {
  k.validate();
  double worst = 0.0;
  for (std::size_t i = 0; i < k.L * k.P; ++i) {
    double sum = k.phi[i] * k.phi[i];
    for (const auto& psi : k.psis) sum += psi[i] * psi[i];
    worst = std::max(worst, std::fabs(sum - 1.0));
  }
  return worst;
}

}  // namespace flag
