#pragma once

#include <cstddef>
#include <vector>

namespace flag {

enum class QuadKind { Legendre, GeneralizedLaguerre };

/// A Gaussian quadrature rule with ascending nodes.
///
/// For `GeneralizedLaguerre` rules the `weights` are scaled weights
/// w_i * exp(x_i), so they apply directly to integrands that carry their own
/// exponential damping. Use `raw_weight()` for the plain Gaussian weight.
struct QuadRule {
  QuadKind kind = QuadKind::Legendre;
  int alpha = 0;  // only meaningful for GeneralizedLaguerre
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }
  double raw_weight(std::size_t i) const;
};

inline constexpr std::size_t kMaxLegendreNodes = 100000;

/// Gauss-Legendre rule on [-1, 1] with n nodes.
QuadRule gauss_legendre(std::size_t n);

/// Generalized Gauss-Laguerre rule for the weight x^alpha e^{-x} on [0, inf).
/// alpha must be 0, 1 or 2.
QuadRule gauss_laguerre_gen(std::size_t n, int alpha);

}  // namespace flag
