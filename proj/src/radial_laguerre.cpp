#include "flag/radial_laguerre.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "flag/error.hpp"
#include "flag/quadrature.hpp"

namespace flag {
namespace {

// Smallest exponent still safely inside the normal double range.
constexpr double kLogFloor = -650.0;
constexpr double kRescale = 1e150;
const double kLogRescale = std::log(kRescale);

}  // namespace

void RadialParams::validate() const {
  if (P < 1) throw InvalidArgument("RadialParams: P must be at least 1");
  if (!(std::isfinite(tau) && tau > 0.0)) {
    throw InvalidArgument("RadialParams: tau must be finite and positive");
  }
}

void laguerre_basis_into(const RadialParams& params, double r, std::span<double> out) {
  params.validate();
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw InvalidArgument("laguerre_basis: radius must be finite and non-negative");
  }
  if (out.size() != params.P) throw InvalidArgument("laguerre_basis: output size must be P");

  const double x = r / params.tau;
  const double norm = std::pow(params.tau, -1.5);

  // value = mantissa * e^{log_scale}; the damping e^{-x/2} starts in the
  // scale and is absorbed into the mantissa once that stays representable.
  double prev = 0.0;
  double cur = 1.0 / std::numbers::sqrt2;
  double log_scale = -0.5 * x;
  auto settle = [&] {
    if (std::fabs(cur) > kRescale) {
      cur /= kRescale;
      prev /= kRescale;
      log_scale += kLogRescale;
    }
    if (log_scale < 0.0 && cur != 0.0 && std::log(std::fabs(cur)) + log_scale > kLogFloor) {
      // Absorb in steps whose factor is itself representable.
      while (log_scale < 0.0) {
        const double step = std::max(log_scale, -kLogRescale);
        const double f = std::exp(step);
        cur *= f;
        prev *= f;
        log_scale -= step;
      }
    }
  };
  auto value = [&] { return log_scale == 0.0 ? cur * norm : cur * std::exp(log_scale) * norm; };

  settle();
  out[0] = value();
  for (std::size_t p = 1; p < params.P; ++p) {
    const double pp = static_cast<double>(p);
    const double bp = std::sqrt(pp * (pp + 2.0));
    const double bpm1 = std::sqrt((pp - 1.0) * (pp + 1.0));
    const double next = ((2.0 * pp + 1.0 - x) * cur - bpm1 * prev) / bp;
    prev = cur;
    cur = next;
    settle();
    out[p] = value();
  }
}

std::vector<double> laguerre_basis(const RadialParams& params, double r) {
  params.validate();
  std::vector<double> out(params.P);
  laguerre_basis_into(params, r, out);
  return out;
}

RadialNodes radial_nodes(const RadialParams& params) {
  params.validate();
  const QuadRule rule = gauss_laguerre_gen(params.P, 2);
  const double tau3 = params.tau * params.tau * params.tau;
  RadialNodes nodes;
  nodes.radii.resize(params.P);
  nodes.weights.resize(params.P);
  for (std::size_t i = 0; i < params.P; ++i) {
    nodes.radii[i] = params.tau * rule.nodes[i];
    nodes.weights[i] = tau3 * rule.weights[i];
  }
  return nodes;
}

double tau_for_boundary(std::size_t P, double boundary) {
  if (!(std::isfinite(boundary) && boundary > 0.0)) {
    throw InvalidArgument("tau_for_boundary: boundary radius must be finite and positive");
  }
  const QuadRule rule = gauss_laguerre_gen(P, 2);
  return boundary / rule.nodes.back();
}

RadialTransform::RadialTransform(const RadialParams& params)
    : params_(params), nodes_(radial_nodes(params)), basis_(params.P * params.P) {
  for (std::size_t i = 0; i < params_.P; ++i) {
    laguerre_basis_into(params_, nodes_.radii[i],
                        std::span<double>(basis_).subspan(i * params_.P, params_.P));
  }
}

void RadialTransform::forward(const cplx* samples, std::size_t sample_stride, cplx* coeffs,
                              std::size_t coeff_stride) const {
  const std::size_t P = params_.P;
  for (std::size_t p = 0; p < P; ++p) coeffs[p * coeff_stride] = 0.0;
  for (std::size_t i = 0; i < P; ++i) {
    const cplx s = samples[i * sample_stride] * nodes_.weights[i];
    const double* k = basis_.data() + i * P;
    for (std::size_t p = 0; p < P; ++p) coeffs[p * coeff_stride] += s * k[p];
  }
}

void RadialTransform::inverse(const cplx* coeffs, std::size_t coeff_stride, cplx* samples,
                              std::size_t sample_stride) const {
  const std::size_t P = params_.P;
  for (std::size_t i = 0; i < P; ++i) {
    const double* k = basis_.data() + i * P;
    cplx acc{};
    for (std::size_t p = 0; p < P; ++p) acc += coeffs[p * coeff_stride] * k[p];
    samples[i * sample_stride] = acc;
  }
}

void RadialTransform::forward_batch(const cplx* samples, cplx* coeffs, std::size_t batch) const {
  const std::size_t P = params_.P;
  std::fill(coeffs, coeffs + P * batch, cplx{});
  for (std::size_t i = 0; i < P; ++i) {
    const cplx* row = samples + i * batch;
    for (std::size_t p = 0; p < P; ++p) {
      const double w = nodes_.weights[i] * basis_[i * P + p];
      cplx* out = coeffs + p * batch;
      for (std::size_t b = 0; b < batch; ++b) out[b] += w * row[b];
    }
  }
}

void RadialTransform::inverse_batch(const cplx* coeffs, cplx* samples, std::size_t batch) const {
  const std::size_t P = params_.P;
  std::fill(samples, samples + P * batch, cplx{});
  for (std::size_t i = 0; i < P; ++i) {
    cplx* out = samples + i * batch;
    for (std::size_t p = 0; p < P; ++p) {
      const double k = basis_[i * P + p];
      const cplx* row = coeffs + p * batch;
      for (std::size_t b = 0; b < batch; ++b) out[b] += k * row[b];
    }
  }
}

RadialCoeffs slag_forward(std::span<const cplx> samples, const RadialParams& params) {
  params.validate();
  if (samples.size() != params.P) {
    throw InvalidArgument("slag_forward: expected " + std::to_string(params.P) +
                          " samples, got " + std::to_string(samples.size()));
  }
  const RadialTransform t(params);
  RadialCoeffs out{params, std::vector<cplx>(params.P)};
  t.forward(samples.data(), 1, out.coeffs.data(), 1);
  return out;
}

std::vector<cplx> slag_inverse(const RadialCoeffs& coeffs, std::span<const double> radii) {
  coeffs.params.validate();
  if (coeffs.coeffs.size() != coeffs.params.P) {
    throw InvalidArgument("slag_inverse: coefficient count does not match P");
  }
  std::vector<cplx> out(radii.size());
  std::vector<double> k(coeffs.params.P);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    laguerre_basis_into(coeffs.params, radii[i], k);
    cplx acc{};
    for (std::size_t p = 0; p < k.size(); ++p) acc += coeffs.coeffs[p] * k[p];
    out[i] = acc;
  }
  return out;
}

}  // namespace flag
