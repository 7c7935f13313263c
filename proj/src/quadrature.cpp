#include "flag/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "flag/error.hpp"

namespace flag {
namespace {

constexpr double kNodeTol = 1e-15;
constexpr int kMaxIter = 100;
// Accepted when Newton stalls at round-off before reaching kNodeTol.
constexpr double kStallTol = 1e-12;

struct LegendreEval {
  double p;   // P_n(x)
  double dp;  // P_n'(x)
};

LegendreEval legendre_eval(std::size_t n, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (std::size_t k = 2; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
    p0 = p1;
    p1 = p2;
  }
  if (n == 0) return {1.0, 0.0};
  const double nn = static_cast<double>(n);
  return {p1, nn * (x * p1 - p0) / (x * x - 1.0)};
}

// Generalized Laguerre L_n^a and L_{n-1}^a at x, sharing a common positive
// scale factor. Only their ratio is used, so the scale is free and is
// renormalised whenever the values grow large.
struct LaguerrePair {
  double ln;
  double lnm1;
  double log_scale;
};

LaguerrePair laguerre_pair(std::size_t n, double a, double x) {
  double prev = 0.0;
  double cur = 1.0;
  double log_scale = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    const double next = ((2.0 * kk - 1.0 + a - x) * cur - (kk - 1.0 + a) * prev) / kk;
    prev = cur;
    cur = next;
    const double mag = std::fabs(cur) + std::fabs(prev);
    if (mag > 1e150) {
      cur *= 1e-150;
      prev *= 1e-150;
      log_scale += 150.0 * std::numbers::ln10;
    }
  }
  return {cur, prev, log_scale};
}

// Orthonormal Laguerre polynomial of degree n-1, returned as (mantissa, log
// scale) so that e^{-x/2} * value is representable for large x.
struct ScaledValue {
  double mantissa;
  double log_scale;
};

ScaledValue orthonormal_laguerre(std::size_t degree, double a, double x) {
  // l_0 = 1/sqrt(Gamma(a+1))
  double prev = 0.0;
  double cur = 1.0 / std::sqrt(std::tgamma(a + 1.0));
  double log_scale = 0.0;
  for (std::size_t k = 1; k <= degree; ++k) {
    const double kk = static_cast<double>(k);
    // x l_{k-1} = -b_k l_k + (2k-1+a) l_{k-1} - b_{k-1} l_{k-2},
    // b_k = sqrt(k (k + a)).
    const double bk = std::sqrt(kk * (kk + a));
    const double bkm1 = std::sqrt((kk - 1.0) * (kk - 1.0 + a));
    const double next = ((2.0 * kk - 1.0 + a - x) * cur - bkm1 * prev) / bk;
    prev = cur;
    cur = next;
    const double mag = std::fabs(cur) + std::fabs(prev);
    if (mag > 1e150) {
      cur *= 1e-150;
      prev *= 1e-150;
      log_scale += 150.0 * std::numbers::ln10;
    }
  }
  return {cur, log_scale};
}

bool converged(double dx, double x, double tol) {
  return std::fabs(dx) <= tol * std::fmax(1.0, std::fabs(x));
}

}  // namespace

double QuadRule::raw_weight(std::size_t i) const {
  if (kind == QuadKind::Legendre) return weights.at(i);
  return weights.at(i) * std::exp(-nodes.at(i));
}

QuadRule gauss_legendre(std::size_t n) {
  if (n == 0 || n > kMaxLegendreNodes) {
    throw InvalidArgument("gauss_legendre: n must be in [1, " +
                          std::to_string(kMaxLegendreNodes) + "], got " + std::to_string(n));
  }
  QuadRule rule;
  rule.kind = QuadKind::Legendre;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);

  const double nn = static_cast<double>(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    // Root i counted from x = +1 downwards.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nn + 0.5));
    LegendreEval e{};
    bool ok = false;
    double last_dx = 0.0;
    for (int it = 0; it < kMaxIter; ++it) {
      e = legendre_eval(n, x);
      const double dx = e.p / e.dp;
      x -= dx;
      last_dx = dx;
      if (converged(dx, x, kNodeTol)) {
        ok = true;
        break;
      }
    }
    if (!ok && !converged(last_dx, x, kStallTol)) {
      throw NumericalError("gauss_legendre: Newton iteration did not converge", i);
    }
    if (n % 2 == 1 && i == half - 1) x = 0.0;
    e = legendre_eval(n, x);
    const double w = 2.0 / ((1.0 - x * x) * e.dp * e.dp);
    rule.nodes[n - 1 - i] = x;
    rule.weights[n - 1 - i] = w;
    rule.nodes[i] = -x;
    rule.weights[i] = w;
  }
  return rule;
}

QuadRule gauss_laguerre_gen(std::size_t n, int alpha) {
  if (alpha < 0 || alpha > 2) {
    throw InvalidArgument("gauss_laguerre_gen: alpha must be 0, 1 or 2, got " +
                          std::to_string(alpha));
  }
  if (n == 0) throw InvalidArgument("gauss_laguerre_gen: n must be positive");

  QuadRule rule;
  rule.kind = QuadKind::GeneralizedLaguerre;
  rule.alpha = alpha;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);

  const double a = alpha;
  const double nn = static_cast<double>(n);
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // Classical initial guesses, each root seeded from its predecessors.
    if (i == 0) {
      z = (1.0 + a) * (3.0 + 0.92 * a) / (1.0 + 2.4 * nn + 1.8 * a);
    } else if (i == 1) {
      z += (15.0 + 6.25 * a) / (1.0 + 0.9 * a + 2.5 * nn);
    } else {
      const double ai = static_cast<double>(i - 1);
      z += ((1.0 + 2.55 * ai) / (1.9 * ai) + 1.26 * ai * a / (1.0 + 3.5 * ai)) *
           (z - rule.nodes[i - 2]) / (1.0 + 0.3 * a);
    }
    bool ok = false;
    double last_dx = 0.0;
    for (int it = 0; it < kMaxIter; ++it) {
      const LaguerrePair lp = laguerre_pair(n, a, z);
      // x L_n' = n L_n - (n + a) L_{n-1}
      const double dx = z * lp.ln / (nn * lp.ln - (nn + a) * lp.lnm1);
      z -= dx;
      last_dx = dx;
      if (converged(dx, z, kNodeTol)) {
        ok = true;
        break;
      }
    }
    if (!ok && !converged(last_dx, z, kStallTol)) {
      throw NumericalError("gauss_laguerre_gen: Newton iteration did not converge", i);
    }
    if (!(z > 0.0) || !std::isfinite(z) || (i > 0 && z <= rule.nodes[i - 1])) {
      throw NumericalError("gauss_laguerre_gen: root finding produced an out-of-order node", i);
    }
    rule.nodes[i] = z;

    // w_i = Gamma(n+a+1) / (n! x_i L_n'(x_i)^2) with L_n^{(a)}' = -L_{n-1}^{(a+1)};
    // in orthonormal form w_i = 1 / (n x_i l_{n-1}^{(a+1)}(x_i)^2). The a + 1
    // family stays well conditioned at the small roots, where L_{n-1}^{(a)}
    // nearly cancels. The scaled weight folds e^{x_i} into the log scale.
    const ScaledValue l = orthonormal_laguerre(n - 1, a + 1.0, z);
    int e2 = 0;
    const double frac = std::frexp(l.mantissa, &e2);
    const double log_l = l.log_scale + e2 * std::numbers::ln2;
    rule.weights[i] = std::exp(z - 2.0 * log_l) / (nn * z * frac * frac);
  }
  return rule;
}

}  // namespace flag
