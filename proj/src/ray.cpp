#include "wdn/ray.hpp"

#include <cmath>
#include <stdexcept>

namespace wdn {

bool in_E(const Eigen::VectorXd &xi, double tau) {
  return std::abs(tau) <= 0.5 * xi.norm();
}

namespace {

// Intersection of { t : lo <= y - t omega <= hi } with [0,T]; empty ->
// t0 > t1.
void clip_ray(const Eigen::VectorXd &y, const Eigen::VectorXd &omega,
              const Eigen::VectorXd &lo, const Eigen::VectorXd &hi, double T,
              double &t0, double &t1) {
  t0 = 0.0;
  t1 = T;
  for (int i = 0; i < y.size() && t0 <= t1; ++i) {
    if (std::abs(omega[i]) < 1e-14) {
      if (y[i] < lo[i] || y[i] > hi[i]) { t0 = 1.0; t1 = 0.0; }
      continue;
    }
    double a = (y[i] - hi[i]) / omega[i];
    double b = (y[i] - lo[i]) / omega[i];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
  }
}

template <typename Eval>
Complex simpson_ray(double t0, double t1, double step, const Eval &eval) {
  if (t0 >= t1) return {0.0, 0.0};
  long m = std::max<long>(2, static_cast<long>(std::ceil((t1 - t0) / step)));
  if (m % 2 != 0) ++m;
  const double hs = (t1 - t0) / m;
  Complex acc = eval(t0) + eval(t1);
  for (long i = 1; i < m; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * eval(t0 + i * hs);
  return acc * (hs / 3.0);
}

} // namespace

Complex ray_transform(const ScalarField &f, const Eigen::VectorXd &y,
                      const Eigen::VectorXd &omega) {
  const Grid &g = f.grid;
  double t0, t1;
  clip_ray(y, omega, g.lo, g.hi, g.T, t0, t1);
  double step = 0.5 * std::min(g.dx_min(), g.nt > 0 ? g.dt() : g.dx_min());
  return simpson_ray(t0, t1, step, [&](double t) {
    return f.interp(y - t * omega, t);
  });
}

Complex ray_transform(const SampledField &f, const Eigen::VectorXd &y,
                      const Eigen::VectorXd &omega, double step) {
  double t0, t1;
  clip_ray(y, omega, f.lo, f.hi, f.T, t0, t1);
  return simpson_ray(t0, t1, step, [&](double t) {
    return f.fn(y - t * omega, t);
  });
}

Grid ray_support_grid(const Eigen::VectorXd &lo, const Eigen::VectorXd &hi,
                      double T, double dy) {
  Grid g;
  g.lo = lo.array() - T;
  g.hi = hi.array() + T;
  g.nx = Eigen::VectorXi(lo.size());
  for (int i = 0; i < lo.size(); ++i)
    g.nx[i] = 1 + static_cast<int>(std::ceil((g.hi[i] - g.lo[i]) / dy));
  g.T = 0.0;
  g.nt = 0;
  return g;
}

Complex spatial_dft(const Grid &g, const Eigen::VectorXcd &vals,
                    const Eigen::VectorXd &xi) {
  Complex acc{0.0, 0.0};
  for (long s = 0; s < g.space_points(); ++s) {
    double phase = -g.point(s).dot(xi);
    acc += g.space_weight(s) * vals[s] * Complex(std::cos(phase), std::sin(phase));
  }
  return acc;
}

Complex fourier_slice(const SampledField &f, const SliceQuery &q,
                      const Eigen::VectorXd &omega, double dy, double step) {
  if (std::abs(omega.dot(q.xi) - q.tau) > 1e-10)
    throw std::runtime_error("fourier_slice: omega.xi != tau");
  Grid yg = ray_support_grid(f.lo, f.hi, f.T, dy);
  Complex acc{0.0, 0.0};
  for (long s = 0; s < yg.space_points(); ++s) {
    Eigen::VectorXd y = yg.point(s);
    Complex r = ray_transform(f, y, omega, step);
    if (r == Complex{0.0, 0.0}) continue;
    double phase = -y.dot(q.xi);
    acc += yg.space_weight(s) * r * Complex(std::cos(phase), std::sin(phase));
  }
  return acc;
}

double zeta_norm(const Eigen::VectorXd &xi, int j, int k) {
  return std::sqrt(xi[j] * xi[j] + xi[k] * xi[k]);
}

Eigen::VectorXd slice_direction(const Eigen::VectorXd &xi, double tau, int j, int k) {
  double zn = zeta_norm(xi, j, k);
  if (zn == 0.0) throw std::runtime_error("slice_direction: xi_j = xi_k = 0");
  double n2 = xi.squaredNorm();
  if (!in_E(xi, tau)) throw std::runtime_error("slice_direction: (xi,tau) not in E");
  Eigen::VectorXd zeta = Eigen::VectorXd::Zero(xi.size());
  zeta[k] = xi[j] / zn;
  zeta[j] = -xi[k] / zn;
  return (tau / n2) * xi + std::sqrt(1.0 - tau * tau / n2) * zeta;
}

Complex beta_hat_from_slice(Complex omega_dot_ahat, const Eigen::VectorXd &xi,
                            double tau, int j, int k) {
  double zn = zeta_norm(xi, j, k);
  double fac = std::sqrt(1.0 - tau * tau / xi.squaredNorm());
  if (fac <= 0.0) throw std::runtime_error("beta_hat: degenerate slice factor");
  return omega_dot_ahat * zn / fac;
}

FrequencyGrid FrequencyGrid::build(const Eigen::VectorXd &box_len, double t_len,
                                   double alpha) {
  FrequencyGrid fg;
  fg.box_len = box_len;
  fg.t_len = t_len;
  fg.alpha = alpha;
  const int n = static_cast<int>(box_len.size());
  Eigen::VectorXd dxi(n);
  for (int i = 0; i < n; ++i) dxi[i] = 2 * M_PI / box_len[i];
  double dtau = 2 * M_PI / t_len;

  Eigen::VectorXi mmax(n);
  for (int i = 0; i < n; ++i)
    mmax[i] = static_cast<int>(std::floor(alpha / dxi[i]));
  int kmax = static_cast<int>(std::floor(alpha / dtau));

  Eigen::VectorXi m = -mmax;
  for (;;) {
    Eigen::VectorXd xi(n);
    for (int i = 0; i < n; ++i) xi[i] = m[i] * dxi[i];
    if (xi.norm() > 0.0) {
      for (int k = -kmax; k <= kmax; ++k) {
        double tau = k * dtau;
        if (xi.squaredNorm() + tau * tau > alpha * alpha) continue;
        if (!in_E(xi, tau)) continue;
        fg.nodes.push_back({xi, tau});
      }
    }
    int i = n - 1;
    while (i >= 0 && ++m[i] > mmax[i]) m[i--] = -mmax[i];
    if (i < 0) break;
  }
  return fg;
}

std::vector<Eigen::VectorXcd> invert_divfree(const CurlSpectrum &spec) {
  const int npairs = static_cast<int>(spec.pairs.size());
  int n = 0;
  for (const auto &[j, k] : spec.pairs) n = std::max({n, j + 1, k + 1});
  const long nn = static_cast<long>(spec.freq.nodes.size());

  auto beta_jk = [&](int j, int k, long node) -> Complex {
    if (j == k) return {0.0, 0.0};
    for (int p = 0; p < npairs; ++p) {
      if (spec.pairs[p] == std::make_pair(j, k)) return spec.beta[p][node];
      if (spec.pairs[p] == std::make_pair(k, j)) return -spec.beta[p][node];
    }
    throw std::runtime_error("invert_divfree: missing component pair");
  };

  std::vector<Eigen::VectorXcd> a(n, Eigen::VectorXcd::Zero(nn));
  for (long node = 0; node < nn; ++node) {
    const Eigen::VectorXd &xi = spec.freq.nodes[node].xi;
    double n2 = xi.squaredNorm();
    for (int k = 0; k < n; ++k) {
      Complex acc{0.0, 0.0};
      for (int j = 0; j < n; ++j)
        if (j != k) acc += xi[j] * beta_jk(j, k, node);
      a[k][node] = acc / n2;
    }
  }
  return a;
}

ScalarField synthesize_nodes(const FrequencyGrid &freq,
                             const Eigen::VectorXcd &coef, const Grid &g) {
  const int n = g.dim();
  double measure = 2 * M_PI / freq.t_len;
  for (int i = 0; i < n; ++i) measure *= 2 * M_PI / freq.box_len[i];
  measure /= std::pow(2 * M_PI, n + 1);

  ScalarField out(g);
  const long N = g.space_points();
  std::vector<Eigen::VectorXd> coords(N);
  for (long s = 0; s < N; ++s) coords[s] = g.point(s);
  for (std::size_t node = 0; node < freq.nodes.size(); ++node) {
    const auto &nd = freq.nodes[node];
    Complex c = coef[node] * measure;
    for (int m = 0; m <= g.nt; ++m) {
      double t = g.time(m);
      for (long s = 0; s < N; ++s) {
        double phase = coords[s].dot(nd.xi) + t * nd.tau;
        out.at(s, m) += c * Complex(std::cos(phase), std::sin(phase));
      }
    }
  }
  return out;
}

Eigen::VectorXcd analyze_nodes(const ScalarField &f, const FrequencyGrid &freq) {
  Eigen::VectorXcd out(freq.nodes.size());
  for (std::size_t i = 0; i < freq.nodes.size(); ++i)
    out[i] = slow_dft(f, freq.nodes[i].xi, freq.nodes[i].tau);
  return out;
}

} // namespace wdn
