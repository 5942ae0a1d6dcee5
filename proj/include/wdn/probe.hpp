#pragma once

#include "wdn/wave.hpp"

namespace wdn {

enum class AmplitudeVariant { B1, B2, BA };
enum class ProbeSide { Forward, Adjoint };

/// One oscillatory probe: direction, frequency, bump placement.
struct ProbeSpec {
  Eigen::VectorXd omega;  ///< unit direction
  Eigen::VectorXd y;      ///< bump center
  double sigma = 10.0;
  double h = 0.2;         ///< bump width; support is B(y,h)
  ProbeSide side = ProbeSide::Forward;

  void validate() const;  ///< throws unless |omega| = 1 within 1e-12
};

/// Normalization constant c of psi(z) = c exp(-1/(1-|z|^2)) on |z|<1 with
/// unit L2 norm; cached per dimension.
double bump_norm_constant(int dim);

/// The rescaled mollifier phi_h(x) = h^{-n/2} psi((x-y)/h), evaluated
/// analytically.
struct Mollifier {
  Eigen::VectorXd y;
  double h = 0.2;
  double c = 0.0;

  double value(const Eigen::VectorXd &x) const;
  double peak() const;  ///< sup phi_h = c e^{-1} h^{-n/2}
};
Mollifier make_mollifier(const Eigen::VectorXd &y, double h);

/// phi_h sampled on a spatial grid. Refuses bumps spanning fewer than
/// 8 grid cells.
ScalarField build_bump(const Grid &g, const Eigen::VectorXd &y, double h);

/// Transport amplitude at one point:
///   B2: exp( i int_0^t w.A(x+(t-s)w, s) ds )
///   B1: same with conj(A)
///   BA: exp( -i int_0^t w.A(x-sw, s) ds )
/// Composite Simpson along the ray, step <= min(dx,dt)/2 of A's grid.
Complex amplitude_at(const VectorField &A, AmplitudeVariant variant,
                     const Eigen::VectorXd &omega, const Eigen::VectorXd &x,
                     double t, double step_hint = 0.0);

struct AmplitudeField {
  ScalarField b;
  AmplitudeVariant variant = AmplitudeVariant::B2;
};
AmplitudeField amplitude(const VectorField &A, const Eigen::VectorXd &omega,
                         AmplitudeVariant variant, const Grid &g);

/// The oscillatory ansatz phi_h(x+tw) b(x,t) e^{i sigma (x.w + t)} with no
/// remainder term. The bump is evaluated analytically, the amplitude by ray
/// quadrature (forward side uses B2, adjoint side B1).
struct GoAnsatz {
  ProbeSpec spec;
  Mollifier phi;
  const VectorField *A = nullptr;  ///< null means free amplitude b = 1

  Complex operator()(const Eigen::VectorXd &x, double t) const;
  double bump_value(const Eigen::VectorXd &x, double t) const;  ///< phi_h(x+tw)
};

/// Largest sigma the grid resolves at 10 points per wavelength.
double max_resolved_sigma(const Grid &g);

/// Builds the ansatz after checking bump and oscillation resolution.
GoAnsatz go_ansatz(const Grid &g, const ProbeSpec &spec, const VectorField *A);

struct RemainderReport {
  double r_l2 = 0.0;        ///< ||r||_{L2(Q)}
  double grad_r_l2 = 0.0;   ///< ||grad_x r||_{L2(Q)}
  double sigma_r_l2 = 0.0;  ///< sigma * ||r||_{L2(Q)}
};

/// Solves the exact problem with the ansatz trace as Dirichlet data and
/// zero initial (forward) or final (adjoint) data, and measures
/// r = u_numeric - ansatz over Q.
RemainderReport remainder_report(const GeometryConfig &cfg, const MagneticPair *mp,
                                 const ProbeSpec &spec);

struct SupportReport {
  bool ok = true;
  std::vector<std::string> violations;
};

/// Regime support rules for the bump ball B(y,h): Lambda requires the ball
/// inside the shell, disjoint from Omega, with both T-shifts along omega
/// also disjoint from Omega; R only requires disjointness from Omega;
/// Gamma accepts everything.
SupportReport check_probe_support(const GeometryConfig &cfg, const ProbeSpec &spec,
                                  Regime regime);

} // namespace wdn
