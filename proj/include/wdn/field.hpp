#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "wdn/geometry.hpp"

namespace wdn {

using Complex = std::complex<double>;

/// Uniform tensor grid over a spatial box [lo,hi]^n times [0,T].
/// nt == 0 encodes a purely spatial field (one time slice).
struct Grid {
  Eigen::VectorXd lo, hi;
  Eigen::VectorXi nx;  ///< points per spatial axis, each >= 2
  double T = 0.0;
  int nt = 0;

  static Grid box(const Eigen::VectorXd &lo, const Eigen::VectorXd &hi,
                  int nx_per_axis, double T, int nt);
  /// Spatial grid over the bounding box of Q_r = B(0,r/2) x (0,T).
  static Grid qr_box(const GeometryConfig &cfg, int nx_per_axis, int nt);
  /// Solver grid over Omega x (0,T).
  static Grid solver(const GeometryConfig &cfg);

  int dim() const { return static_cast<int>(nx.size()); }
  double dx(int axis) const { return (hi[axis] - lo[axis]) / (nx[axis] - 1); }
  double dx_min() const;
  double dt() const { return nt > 0 ? T / nt : 0.0; }
  long space_points() const;
  int time_points() const { return nt + 1; }
  long total_points() const { return space_points() * time_points(); }

  /// Row-major spatial flattening: the last axis is fastest.
  long space_index(const Eigen::VectorXi &idx) const;
  Eigen::VectorXi space_multi_index(long s) const;
  Eigen::VectorXd point(const Eigen::VectorXi &idx) const;
  Eigen::VectorXd point(long s) const;
  double time(int m) const { return nt > 0 ? m * dt() : 0.0; }

  bool same_as(const Grid &other, double tol = 1e-12) const;
  /// Trapezoidal quadrature weight of spatial point s (product over axes).
  double space_weight(long s) const;
  double cell_volume() const;
};

/// Complex samples on a Grid, extended by zero outside the box.
struct ScalarField {
  Grid grid;
  Eigen::VectorXcd values;  ///< size total_points(), time slowest

  ScalarField() = default;
  explicit ScalarField(const Grid &g)
      : grid(g), values(Eigen::VectorXcd::Zero(g.total_points())) {}

  Complex &at(long s, int m) { return values[static_cast<long>(m) * grid.space_points() + s]; }
  Complex at(long s, int m) const { return values[static_cast<long>(m) * grid.space_points() + s]; }

  /// Multilinear interpolation in space, linear in time; zero outside.
  Complex interp(const Eigen::VectorXd &x, double t) const;

  /// Fill from a closure f(x,t).
  static ScalarField sample(const Grid &g,
                            const std::function<Complex(const Eigen::VectorXd &, double)> &f);

  double max_abs() const;
  /// Grid-weighted L2 over the space-time box (trapezoid in space and time).
  double l2() const;
};

struct VectorField {
  std::vector<ScalarField> comp;

  VectorField() = default;
  VectorField(const Grid &g, int n) : comp(n, ScalarField(g)) {}

  int n() const { return static_cast<int>(comp.size()); }
  const Grid &grid() const { return comp.at(0).grid; }
  bool empty() const { return comp.empty(); }

  Eigen::VectorXcd interp(const Eigen::VectorXd &x, double t) const;
  static VectorField sample(const Grid &g, int n,
                            const std::function<Eigen::VectorXcd(const Eigen::VectorXd &, double)> &f);
  double max_abs() const;
};

/// WDN1 binary container: magic "WDN1", u32 version=1, u8 ndim, u8 complex
/// flag, u64 dims[ndim+1] (space axes then time), f64 LE samples.
void write_wdn1(const std::string &path, const ScalarField &f);
ScalarField read_wdn1(const std::string &path, const Grid &grid_hint);

} // namespace wdn
