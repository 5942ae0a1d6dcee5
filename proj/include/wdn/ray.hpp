#pragma once

#include "wdn/coefficients.hpp"

namespace wdn {

using SpaceTimeFn = std::function<Complex(const Eigen::VectorXd &, double)>;

/// A closure field with a declared spatial support box and time extent
/// [0,T]; used where interpolation error of grid storage would swamp the
/// quantity being measured.
struct SampledField {
  SpaceTimeFn fn;
  Eigen::VectorXd lo, hi;
  double T = 0.0;
};

struct RayDatum {
  Eigen::VectorXd y, omega;
  Complex value{0.0, 0.0};
  bool valid = true;
  double err_tag = 0.0;  ///< estimated error budget (probe mode)
};

struct SliceQuery {
  Eigen::VectorXd xi;
  double tau = 0.0;
  int j = 0, k = 1;  ///< component pair, zero-based
};

/// (xi,tau) in E iff |tau| <= |xi|/2.
bool in_E(const Eigen::VectorXd &xi, double tau);

/// int_0^T f(y - t omega, t) dt by composite Simpson over the sub-interval
/// where the ray meets the support box; step <= min(dx,dt)/2.
Complex ray_transform(const ScalarField &f, const Eigen::VectorXd &y,
                      const Eigen::VectorXd &omega);
Complex ray_transform(const SampledField &f, const Eigen::VectorXd &y,
                      const Eigen::VectorXd &omega, double step);

/// Spatial y-grid covering the support of every ray transform of fields
/// in the box [lo,hi]: the box dilated by T on each side.
Grid ray_support_grid(const Eigen::VectorXd &lo, const Eigen::VectorXd &hi,
                      double T, double dy);

/// Trapezoid DFT of spatial-only samples: sum w_s vals[s] e^{-i y_s . xi}.
Complex spatial_dft(const Grid &g, const Eigen::VectorXcd &vals,
                    const Eigen::VectorXd &xi);

/// Fourier slice: the spatial Fourier transform at xi of
/// y -> ray_transform(f, y, omega); equals f_hat(xi, omega.xi).
/// Requires |omega.xi - tau| <= 1e-10.
Complex fourier_slice(const SampledField &f, const SliceQuery &q,
                      const Eigen::VectorXd &omega, double dy, double step);

/// omega = (tau/|xi|^2) xi + sqrt(1 - tau^2/|xi|^2) zeta with
/// zeta = (xi_j e_k - xi_k e_j)/sqrt(xi_j^2 + xi_k^2); satisfies |omega| = 1
/// and omega.xi = tau.
Eigen::VectorXd slice_direction(const Eigen::VectorXd &xi, double tau, int j, int k);

double zeta_norm(const Eigen::VectorXd &xi, int j, int k);

/// beta_hat_{j,k} = (omega.a_hat) |xi_j e_k - xi_k e_j| / sqrt(1-tau^2/|xi|^2)
/// for the slice direction of (xi,tau,j,k); exact for div-free fields.
Complex beta_hat_from_slice(Complex omega_dot_ahat, const Eigen::VectorXd &xi,
                            double tau, int j, int k);

/// One retained frequency node xi = 2 pi m / L, tau = 2 pi kt / Lt.
struct FreqNode {
  Eigen::VectorXd xi;
  double tau = 0.0;
};

/// All lattice nodes inside E and the ball |(xi,tau)| <= alpha, xi != 0.
struct FrequencyGrid {
  Eigen::VectorXd box_len;  ///< periodization lengths per spatial axis
  double t_len = 0.0;
  double alpha = 0.0;
  std::vector<FreqNode> nodes;

  static FrequencyGrid build(const Eigen::VectorXd &box_len, double t_len,
                             double alpha);
};

/// beta_hat values per independent component pair over the node set.
struct CurlSpectrum {
  FrequencyGrid freq;
  std::vector<std::pair<int, int>> pairs;  ///< (j,k), j < k, zero-based
  std::vector<Eigen::VectorXcd> beta;      ///< beta[pair][node]
};

/// a_hat_k = sum_j xi_j beta_hat_{j,k} / |xi|^2; exact when xi.a_hat = 0.
std::vector<Eigen::VectorXcd> invert_divfree(const CurlSpectrum &spec);

/// Band-limited synthesis from node coefficients:
/// f(x,t) = prod(dxi) dtau / (2 pi)^{n+1} * sum_nodes c e^{i(x.xi + t tau)}.
ScalarField synthesize_nodes(const FrequencyGrid &freq,
                             const Eigen::VectorXcd &coef, const Grid &g);

/// Continuous-normalized Fourier coefficients of a grid field at the nodes
/// (slow DFT; oracle-grade).
Eigen::VectorXcd analyze_nodes(const ScalarField &f, const FrequencyGrid &freq);

} // namespace wdn
