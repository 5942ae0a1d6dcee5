#include "wdn/geometry.hpp"

#include <cmath>
#include <sstream>

namespace wdn {

GeometryConfig GeometryConfig::square(double r, double T, double half_width,
                                      int nx, int nt) {
  GeometryConfig cfg;
  cfg.r = r;
  cfg.T = T;
  cfg.dim = 2;
  cfg.omega_min = Eigen::VectorXd::Constant(2, -half_width);
  cfg.omega_max = Eigen::VectorXd::Constant(2, half_width);
  cfg.nx = nx;
  cfg.nt = nt;
  return cfg;
}

double GeometryConfig::diam_omega() const {
  return (omega_max - omega_min).norm();
}

double GeometryConfig::max_corner_norm() const {
  // Corner of max norm has, per axis, the larger of |min|, |max|.
  double s = 0.0;
  for (int i = 0; i < dim; ++i) {
    double m = std::max(std::abs(omega_min[i]), std::abs(omega_max[i]));
    s += m * m;
  }
  return std::sqrt(s);
}

double GeometryConfig::dx_min() const {
  double dx = std::numeric_limits<double>::infinity();
  for (int i = 0; i < dim; ++i)
    dx = std::min(dx, (omega_max[i] - omega_min[i]) / (nx - 1));
  return dx;
}

int GeometryConfig::cfl_nt() const {
  double dt_max = 0.9 * dx_min() / std::sqrt(static_cast<double>(dim));
  return static_cast<int>(std::ceil(T / dt_max));
}

int GeometryConfig::effective_nt() const { return nt > 0 ? nt : cfl_nt(); }

GeometryReport validate_geometry(const GeometryConfig &cfg) {
  GeometryReport rep;
  auto fail = [&rep](const std::string &msg) {
    rep.ok = false;
    rep.violations.push_back(msg);
  };
  std::ostringstream os;

  if (!(cfg.r > 0)) fail("r > 0 violated");
  if (cfg.dim < 2) fail("dim >= 2 violated");
  if (cfg.omega_min.size() != cfg.dim || cfg.omega_max.size() != cfg.dim) {
    fail("omega_box dimension mismatch");
    return rep;
  }
  for (int i = 0; i < cfg.dim; ++i)
    if (!(cfg.omega_min[i] < cfg.omega_max[i]))
      fail("omega_box degenerate on axis " + std::to_string(i));

  double corner = cfg.max_corner_norm();
  if (!(corner < cfg.r / 2)) {
    os.str("");
    os << "Omega subset B(0,r/2) violated: corner norm " << corner
       << " >= " << cfg.r / 2;
    fail(os.str());
  }
  double diam = cfg.diam_omega();
  if (!(cfg.T > 2 * diam)) {
    os.str("");
    os << "T > 2*Diam(Omega) violated: " << cfg.T << " <= " << 2 * diam;
    fail(os.str());
  }
  if (!(cfg.T > 2 * cfg.r)) {
    os.str("");
    os << "T > 2r violated: " << cfg.T << " <= " << 2 * cfg.r;
    fail(os.str());
  }
  if (cfg.nx < 16) fail("nx >= 16 violated");
  if (cfg.nt > 0 && cfg.nt < cfg.cfl_nt()) {
    os.str("");
    os << "CFL violated: nt " << cfg.nt << " < required " << cfg.cfl_nt();
    fail(os.str());
  }
  return rep;
}

RegionFlags classify_point(const GeometryConfig &cfg,
                           const Eigen::VectorXd &x, double t) {
  RegionFlags f;
  double ax = x.norm();
  double half_r = cfg.r / 2;

  f.in_shell = (half_r < ax) && (ax < cfg.T - half_r);

  bool in_Qr = (ax < half_r) && (t > 0) && (t < cfg.T);
  f.in_fwd = in_Qr && (ax < t - half_r) && (t > half_r);
  f.in_bwd = in_Qr && (ax < cfg.T - half_r - t) && (t < cfg.T - half_r);

  bool in_box = true;
  for (int i = 0; i < cfg.dim; ++i)
    if (!(x[i] > cfg.omega_min[i] && x[i] < cfg.omega_max[i])) in_box = false;
  f.in_Q = in_box && (t > 0) && (t < cfg.T);

  f.in_I_star = f.in_Q && f.in_fwd && f.in_bwd;
  f.in_I_sharp = f.in_Q && f.in_fwd;
  return f;
}

bool in_region(const GeometryConfig &cfg, Region region,
               const Eigen::VectorXd &x, double t) {
  RegionFlags f = classify_point(cfg, x, t);
  switch (region) {
  case Region::IStar: return f.in_I_star;
  case Region::ISharp: return f.in_I_sharp;
  case Region::Q: return f.in_Q;
  }
  return false;
}

} // namespace wdn
