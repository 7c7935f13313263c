#include "flag/flag_transform.hpp"

#include <cmath>
#include <string>

#include "flag/error.hpp"

namespace flag {

void BandLimits::validate() const {
  if (L < 1 || L > kMaxSphereBandLimit) {
    throw InvalidArgument("BandLimits: L must be in [1, " + std::to_string(kMaxSphereBandLimit) +
                          "], got " + std::to_string(L));
  }
  if (P < 1) throw InvalidArgument("BandLimits: P must be at least 1");
  if (!(std::isfinite(tau) && tau > 0.0)) {
    throw InvalidArgument("BandLimits: tau must be finite and positive");
  }
}

void BallGrid::validate() const {
  limits.validate();
  if (values.size() != ball_sample_count(limits.L, limits.P)) {
    throw InvalidArgument("BallGrid: expected " +
                          std::to_string(ball_sample_count(limits.L, limits.P)) +
                          " samples, got " + std::to_string(values.size()));
  }
  for (const auto& v : values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw InvalidArgument("BallGrid: non-finite sample");
    }
  }
}

void FlagCoeffs::validate() const {
  limits.validate();
  const std::size_t n = limits.P * limits.L * limits.L;
  if (coeffs.size() != n) {
    throw InvalidArgument("FlagCoeffs: expected " + std::to_string(n) + " coefficients, got " +
                          std::to_string(coeffs.size()));
  }
  for (const auto& v : coeffs) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw InvalidArgument("FlagCoeffs: non-finite coefficient");
    }
  }
}

FlagPlan::FlagPlan(const BandLimits& limits)
    : limits_((limits.validate(), limits)), sphere_(limits.L), radial_(limits.radial()) {}

FlagCoeffs FlagPlan::forward(const BallGrid& grid) const {
  grid.validate();
  if (!(grid.limits == limits_)) throw InvalidArgument("FlagPlan::forward: band limits mismatch");
  const std::size_t L = limits_.L;
  const std::size_t P = limits_.P;
  const std::size_t shell = grid.shell_size();
  const std::size_t nlm = L * L;

  // Angular pass per shell, then radial pass per (l, m).
  std::vector<cplx> angular(P * nlm);
  SphereGrid sg(L);
  for (std::size_t i = 0; i < P; ++i) {
    std::copy_n(grid.values.begin() + static_cast<long>(i * shell), shell, sg.values.begin());
    const SphereCoeffs c = sphere_.forward(sg);
    std::copy(c.coeffs.begin(), c.coeffs.end(), angular.begin() + static_cast<long>(i * nlm));
  }
  FlagCoeffs out(limits_);
  radial_.forward_batch(angular.data(), out.coeffs.data(), nlm);
  return out;
}

BallGrid FlagPlan::inverse(const FlagCoeffs& coeffs) const {
  coeffs.validate();
  if (!(coeffs.limits == limits_)) {
    throw InvalidArgument("FlagPlan::inverse: band limits mismatch");
  }
  const std::size_t L = limits_.L;
  const std::size_t P = limits_.P;
  const std::size_t nlm = L * L;

  std::vector<cplx> shells(P * nlm);
  radial_.inverse_batch(coeffs.coeffs.data(), shells.data(), nlm);
  BallGrid out(limits_);
  const std::size_t shell = out.shell_size();
  SphereCoeffs sc(L);
  for (std::size_t i = 0; i < P; ++i) {
    std::copy_n(shells.begin() + static_cast<long>(i * nlm), nlm, sc.coeffs.begin());
    const SphereGrid g = sphere_.inverse(sc);
    std::copy(g.values.begin(), g.values.end(), out.values.begin() + static_cast<long>(i * shell));
  }
  return out;
}

double FlagPlan::grid_energy(const BallGrid& grid) const {
  grid.validate();
  if (!(grid.limits == limits_)) {
    throw InvalidArgument("FlagPlan::grid_energy: band limits mismatch");
  }
  const std::size_t shell = grid.shell_size();
  SphereGrid sg(limits_.L);
  double total = 0.0;
  for (std::size_t i = 0; i < limits_.P; ++i) {
    std::copy_n(grid.values.begin() + static_cast<long>(i * shell), shell, sg.values.begin());
    total += radial_.weights()[i] * sphere_.grid_energy(sg);
  }
  return total;
}

FlagCoeffs flag_forward(const BallGrid& grid) {
  grid.validate();
  return FlagPlan(grid.limits).forward(grid);
}

BallGrid flag_inverse(const FlagCoeffs& coeffs) {
  coeffs.validate();
  return FlagPlan(coeffs.limits).inverse(coeffs);
}

double coefficient_energy(const std::vector<cplx>& coeffs) {
  double total = 0.0;
  for (const auto& c : coeffs) total += std::norm(c);
  return total;
}

}  // namespace flag
