#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace flag {

using cplx = std::complex<double>;

/// Radial band limit and length scale of the spherical Laguerre basis.
struct RadialParams {
  std::size_t P = 1;
  double tau = 1.0;

  void validate() const;
};

struct RadialCoeffs {
  RadialParams params;
  std::vector<cplx> coeffs;
};

/// K_p(r) for p = 0 .. P-1: the damped Laguerre functions
///   K_p(r) = sqrt(p!/(p+2)!) tau^{-3/2} e^{-r/(2 tau)} L_p^{(2)}(r/tau),
/// orthonormal under r^2 dr.
std::vector<double> laguerre_basis(const RadialParams& params, double r);

/// Writes the same values into `out` (size P) without allocating.
void laguerre_basis_into(const RadialParams& params, double r, std::span<double> out);

struct RadialNodes {
  std::vector<double> radii;
  std::vector<double> weights;
};

/// Radii tau * x_i from the alpha = 2 Gauss-Laguerre rule, with effective
/// weights tau^3 w_i e^{x_i}.
RadialNodes radial_nodes(const RadialParams& params);

/// Scale such that the outermost radial node lands on `boundary`.
double tau_for_boundary(std::size_t P, double boundary);

/// Nodes plus the basis tabulated at every node. Immutable after construction.
class RadialTransform {
 public:
  explicit RadialTransform(const RadialParams& params);

  const RadialParams& params() const noexcept { return params_; }
  std::size_t size() const noexcept { return params_.P; }
  std::span<const double> radii() const noexcept { return nodes_.radii; }
  std::span<const double> weights() const noexcept { return nodes_.weights; }
  /// K_p(r_i) at basis[i * P + p].
  double basis(std::size_t node, std::size_t p) const { return basis_[node * params_.P + p]; }

  /// Coefficients from samples at the radial nodes. Both arrays are accessed
  /// with the given strides so callers can run over interleaved layouts.
  void forward(const cplx* samples, std::size_t sample_stride, cplx* coeffs,
               std::size_t coeff_stride) const;
  void inverse(const cplx* coeffs, std::size_t coeff_stride, cplx* samples,
               std::size_t sample_stride) const;

  /// Same transforms applied to `batch` independent columns stored row-major
  /// as [node or p][column]; the column index runs fastest.
  void forward_batch(const cplx* samples, cplx* coeffs, std::size_t batch) const;
  void inverse_batch(const cplx* coeffs, cplx* samples, std::size_t batch) const;

 private:
  RadialParams params_;
  RadialNodes nodes_;
  std::vector<double> basis_;
};

RadialCoeffs slag_forward(std::span<const cplx> samples, const RadialParams& params);
std::vector<cplx> slag_inverse(const RadialCoeffs& coeffs, std::span<const double> radii);

}  // namespace flag
