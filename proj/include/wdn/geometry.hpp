#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace wdn {

/// Space-time configuration: the ball radius r, time horizon T, the spatial
/// box Omega and the grid resolutions. All cone regions derive from (r, T).
struct GeometryConfig {
  double r = 1.0;
  double T = 3.0;
  int dim = 2;
  Eigen::VectorXd omega_min;  ///< lower corner of Omega
  Eigen::VectorXd omega_max;  ///< upper corner of Omega
  int nx = 64;                ///< grid points per spatial axis (incl. faces)
  int nt = 0;                 ///< time steps; 0 = derive from the CFL bound

  static GeometryConfig square(double r, double T, double half_width, int nx,
                               int nt = 0);

  double diam_omega() const;
  double max_corner_norm() const;
  /// Smallest grid spacing of the solver grid over Omega.
  double dx_min() const;
  /// Time steps required by the leapfrog CFL bound dt <= 0.9 dx/sqrt(n).
  int cfl_nt() const;
  /// nt if set, otherwise the CFL-derived count.
  int effective_nt() const;
};

/// Pointwise membership in the cone regions of the problem geometry.
struct RegionFlags {
  bool in_shell = false;   ///< C_r  : r/2 < |x| < T - r/2 (time-independent)
  bool in_fwd = false;     ///< F_r  : |x| < t - r/2, t > r/2, (x,t) in Q_r
  bool in_bwd = false;     ///< B_r  : |x| < T - r/2 - t, t < T - r/2
  bool in_I_star = false;  ///< I_r* = Q ∩ F_r ∩ B_r
  bool in_I_sharp = false; ///< I_r# = Q ∩ F_r
  bool in_Q = false;       ///< Omega × (0,T)
};

struct GeometryReport {
  bool ok = true;
  std::vector<std::string> violations;
};

/// Which space-time set a reconstruction regime recovers coefficients on.
enum class Region { IStar, ISharp, Q };

GeometryReport validate_geometry(const GeometryConfig &cfg);

RegionFlags classify_point(const GeometryConfig &cfg,
                           const Eigen::VectorXd &x, double t);

bool in_region(const GeometryConfig &cfg, Region region,
               const Eigen::VectorXd &x, double t);

} // namespace wdn
