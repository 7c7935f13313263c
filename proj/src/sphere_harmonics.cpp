#include "flag/sphere_harmonics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "flag/error.hpp"
#include "flag/quadrature.hpp"

namespace flag {
namespace {

// Values below 2^-400 are carried as mantissa * 2^(400 * e), e < 0.
constexpr int kExpUnit = 400;
const double kTiny = std::ldexp(1.0, -kExpUnit);
const double kRecover = std::ldexp(1.0, 200);

void check_band_limit(std::size_t L, const char* who) {
  if (L < 1 || L > kMaxSphereBandLimit) {
    throw InvalidArgument(std::string(who) + ": band limit must be in [1, " +
                          std::to_string(kMaxSphereBandLimit) + "], got " + std::to_string(L));
  }
}

double emit(double v, int e) { return e == 0 ? v : std::ldexp(v, kExpUnit * e); }

bool all_finite(const std::vector<cplx>& v) {
  for (const auto& z : v) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

std::size_t fft_slot(long m, std::size_t n) {
  return m >= 0 ? static_cast<std::size_t>(m) : n - static_cast<std::size_t>(-m);
}

}  // namespace

void SphereGrid::validate() const {
  check_band_limit(L, "SphereGrid");
  if (values.size() != sphere_sample_count(L)) {
    throw InvalidArgument("SphereGrid: expected " + std::to_string(sphere_sample_count(L)) +
                          " samples, got " + std::to_string(values.size()));
  }
  if (!all_finite(values)) throw InvalidArgument("SphereGrid: non-finite sample");
}

void SphereCoeffs::validate() const {
  check_band_limit(L, "SphereCoeffs");
  if (coeffs.size() != L * L) {
    throw InvalidArgument("SphereCoeffs: expected " + std::to_string(L * L) +
                          " coefficients, got " + std::to_string(coeffs.size()));
  }
  if (!all_finite(coeffs)) throw InvalidArgument("SphereCoeffs: non-finite coefficient");
}

SphereSampling sphere_sampling(std::size_t L) {
  check_band_limit(L, "sphere_sampling");
  const QuadRule rule = gauss_legendre(L);
  SphereSampling s;
  s.thetas.resize(L);
  for (std::size_t i = 0; i < L; ++i) s.thetas[i] = std::acos(rule.nodes[i]);
  const std::size_t nphi = sphere_nphi(L);
  s.phis.resize(nphi);
  for (std::size_t k = 0; k < nphi; ++k) {
    s.phis[k] = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(nphi);
  }
  return s;
}

void legendre_ring(std::size_t L, double x, std::span<double> out) {
  if (!(std::fabs(x) <= 1.0)) throw InvalidArgument("legendre_ring: |x| must be <= 1");
  if (out.size() != legendre_ring_size(L)) throw InvalidArgument("legendre_ring: bad output size");

  const double sin_theta = std::sqrt((1.0 - x) * (1.0 + x));
  double seed = 1.0 / std::numbers::sqrt2;
  int seed_exp = 0;
  for (std::size_t m = 0; m < L; ++m) {
    const double mm = static_cast<double>(m);
    if (m > 0) {
      seed *= -std::sqrt((2.0 * mm + 1.0) / (2.0 * mm)) * sin_theta;
      if (seed != 0.0 && std::fabs(seed) < kTiny) {
        seed = std::ldexp(seed, kExpUnit);
        --seed_exp;
      }
    }
    double* col = out.data() + legendre_ring_offset(L, m);
    col[0] = emit(seed, seed_exp);
    if (m + 1 >= L) continue;

    double p0 = seed;
    double p1 = std::sqrt(2.0 * mm + 3.0) * x * seed;
    int e = seed_exp;
    col[1] = emit(p1, e);
    for (std::size_t l = m + 2; l < L; ++l) {
      const double ll = static_cast<double>(l);
      const double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
      const double b = std::sqrt(((ll - 1.0) * (ll - 1.0) - mm * mm) /
                                 (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
      const double p2 = a * (x * p1 - b * p0);
      p0 = p1;
      p1 = p2;
      if (e < 0 && std::fabs(p1) > kRecover) {
        p0 = std::ldexp(p0, -kExpUnit);
        p1 = std::ldexp(p1, -kExpUnit);
        ++e;
      }
      col[l - m] = emit(p1, e);
    }
  }
}

std::vector<double> assoc_legendre_table(std::size_t L, double x) {
  if (!(std::fabs(x) <= 1.0)) throw InvalidArgument("assoc_legendre_table: |x| must be <= 1");
  check_band_limit(L, "assoc_legendre_table");
  std::vector<double> ring(legendre_ring_size(L));
  legendre_ring(L, x, ring);
  std::vector<double> table(L * L, 0.0);
  for (std::size_t m = 0; m < L; ++m) {
    const double* col = ring.data() + legendre_ring_offset(L, m);
    for (std::size_t l = m; l < L; ++l) table[lm_index(l, static_cast<long>(m))] = col[l - m];
  }
  return table;
}

SphereTransform::SphereTransform(std::size_t L) : L_(L), dft_(sphere_nphi(L > 0 ? L : 1)) {
  check_band_limit(L, "SphereTransform");
  const QuadRule rule = gauss_legendre(L);
  x_ = rule.nodes;
  w_ = rule.weights;
  if (L <= kTableLimit) {
    const std::size_t stride = legendre_ring_size(L);
    tables_.resize(L * stride);
    for (std::size_t i = 0; i < L; ++i) {
      legendre_ring(L, x_[i], std::span<double>(tables_).subspan(i * stride, stride));
    }
  }
}

std::span<const double> SphereTransform::ring_table(std::size_t ring,
                                                    std::vector<double>& scratch) const {
  const std::size_t stride = legendre_ring_size(L_);
  if (!tables_.empty()) return std::span<const double>(tables_).subspan(ring * stride, stride);
  scratch.resize(stride);
  legendre_ring(L_, x_[ring], scratch);
  return scratch;
}

SphereCoeffs SphereTransform::forward(const SphereGrid& grid) const {
  grid.validate();
  if (grid.L != L_) throw InvalidArgument("SphereTransform::forward: band limit mismatch");
  const std::size_t nphi = sphere_nphi(L_);
  const double phi_weight = std::sqrt(2.0 * std::numbers::pi) / static_cast<double>(nphi);

  SphereCoeffs out(L_);
  std::vector<cplx> row(nphi);
  std::vector<double> scratch;
  for (std::size_t i = 0; i < L_; ++i) {
    std::copy_n(grid.values.begin() + static_cast<long>(i * nphi), nphi, row.begin());
    dft_.forward(row);
    const double scale = w_[i] * phi_weight;
    const auto table = ring_table(i, scratch);
    for (std::size_t m = 0; m < L_; ++m) {
      const double* col = table.data() + legendre_ring_offset(L_, m);
      const long mp = static_cast<long>(m);
      const cplx pos = row[fft_slot(mp, nphi)] * scale;
      for (std::size_t l = m; l < L_; ++l) out.coeffs[lm_index(l, mp)] += pos * col[l - m];
      if (m == 0) continue;
      const cplx neg = row[fft_slot(-mp, nphi)] * (m % 2 == 0 ? scale : -scale);
      for (std::size_t l = m; l < L_; ++l) out.coeffs[lm_index(l, -mp)] += neg * col[l - m];
    }
  }
  return out;
}

SphereGrid SphereTransform::inverse(const SphereCoeffs& coeffs) const {
  coeffs.validate();
  if (coeffs.L != L_) throw InvalidArgument("SphereTransform::inverse: band limit mismatch");
  const std::size_t nphi = sphere_nphi(L_);
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);

  SphereGrid out(L_);
  std::vector<cplx> row(nphi);
  std::vector<double> scratch;
  for (std::size_t i = 0; i < L_; ++i) {
    std::fill(row.begin(), row.end(), cplx{});
    const auto table = ring_table(i, scratch);
    for (std::size_t m = 0; m < L_; ++m) {
      const double* col = table.data() + legendre_ring_offset(L_, m);
      const long mp = static_cast<long>(m);
      cplx pos{};
      for (std::size_t l = m; l < L_; ++l) pos += coeffs.coeffs[lm_index(l, mp)] * col[l - m];
      row[fft_slot(mp, nphi)] = pos * norm;
      if (m == 0) continue;
      cplx neg{};
      for (std::size_t l = m; l < L_; ++l) neg += coeffs.coeffs[lm_index(l, -mp)] * col[l - m];
      row[fft_slot(-mp, nphi)] = neg * (m % 2 == 0 ? norm : -norm);
    }
    dft_.backward(row);
    std::copy(row.begin(), row.end(), out.values.begin() + static_cast<long>(i * nphi));
  }
  return out;
}

double SphereTransform::grid_energy(const SphereGrid& grid) const {
  grid.validate();
  if (grid.L != L_) throw InvalidArgument("SphereTransform::grid_energy: band limit mismatch");
  const std::size_t nphi = sphere_nphi(L_);
  const double phi_weight = 2.0 * std::numbers::pi / static_cast<double>(nphi);
  double total = 0.0;
  for (std::size_t i = 0; i < L_; ++i) {
    double ring = 0.0;
    for (std::size_t k = 0; k < nphi; ++k) ring += std::norm(grid.at(i, k));
    total += w_[i] * phi_weight * ring;
  }
  return total;
}

SphereCoeffs sht_forward(const SphereGrid& grid) {
  grid.validate();
  return SphereTransform(grid.L).forward(grid);
}

SphereGrid sht_inverse(const SphereCoeffs& coeffs) {
  coeffs.validate();
  return SphereTransform(coeffs.L).inverse(coeffs);
}

}  // namespace flag
