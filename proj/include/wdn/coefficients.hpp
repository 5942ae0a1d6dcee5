#pragma once

#include "wdn/field.hpp"

namespace wdn {

/// Convection-form coefficients of L_{V,p} = dtt - Lap + V.grad + p.
/// V and p are real-valued.
struct CoefficientPair {
  VectorField V;
  ScalarField p;

  bool empty() const { return V.empty(); }
  const Grid &grid() const { return V.grid(); }
};

/// Magnetic-form coefficients of H_{A,q} = dtt - Lap_A + q with
/// Lap_A = Lap + 2iA.grad + i div_x A - A.A. In reduced form A is purely
/// imaginary and q real.
struct MagneticPair {
  VectorField A;
  ScalarField q;

  bool empty() const { return A.empty(); }
  const Grid &grid() const { return A.grid(); }
};

/// Second-order partial derivative along a spatial axis (axis < dim) or
/// time (axis == dim): centered in the interior, one-sided at the faces.
ScalarField derivative(const ScalarField &f, int axis);

/// div_x of a vector field, second-order stencils.
ScalarField divergence(const VectorField &A);

/// Independent curl components beta_{j,k} = d_j a_k - d_k a_j for j < k.
struct CurlComponents {
  std::vector<std::pair<int, int>> pairs;  ///< (j,k), j < k
  std::vector<ScalarField> beta;
};
CurlComponents curl_components(const VectorField &A);

/// A = (i/2) V, q = p + V.V/4 - div_x(V)/2. When div_V is non-null it is
/// used instead of the finite-difference divergence.
MagneticPair gauge_reduce(const CoefficientPair &cp,
                          const ScalarField *div_V = nullptr);

/// Inverse substitution; rejects A that is not purely imaginary.
CoefficientPair gauge_lift(const MagneticPair &mp,
                           double imag_tol = 1e-12,
                           const ScalarField *div_V = nullptr);

enum class NormKind { Linf, L2, Hminus1 };

double norm_surrogate(const ScalarField &f, NormKind kind);
/// W^{k,inf} surrogate: max over pure finite-difference directional
/// derivatives (space and time) of orders 0..k, k <= 3.
double wkinf_surrogate(const ScalarField &f, int k);

/// Continuous-Fourier-normalized DFT of the field at frequency (xi, tau),
/// by direct summation with trapezoid weights. Oracle-grade, slow.
Complex slow_dft(const ScalarField &f, const Eigen::VectorXd &xi, double tau);

} // namespace wdn
