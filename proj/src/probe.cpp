#include "wdn/probe.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace wdn {

void ProbeSpec::validate() const {
  if (std::abs(omega.norm() - 1.0) > 1e-12)
    throw std::runtime_error("probe direction is not unit length");
  if (sigma <= 0 || h <= 0) throw std::runtime_error("probe needs sigma, h > 0");
  if (omega.size() != y.size()) throw std::runtime_error("probe dim mismatch");
}

double bump_norm_constant(int dim) {
  static std::map<int, double> cache;
  auto it = cache.find(dim);
  if (it != cache.end()) return it->second;
  // ||psi||_{L2}^2 = c^2 S_{n-1} int_0^1 rho^{n-1} exp(-2/(1-rho^2)) drho.
  const long M = 200000;
  double acc = 0.0;
  for (long i = 0; i <= M; ++i) {
    double rho = static_cast<double>(i) / M;
    double w = (i == 0 || i == M) ? 0.5 : 1.0;
    double f = 0.0;
    if (rho < 1.0) f = std::pow(rho, dim - 1) * std::exp(-2.0 / (1.0 - rho * rho));
    acc += w * f / M;
  }
  double surface = dim == 1 ? 2.0
                 : dim == 2 ? 2.0 * M_PI
                            : 2.0 * std::pow(M_PI, dim / 2.0) / std::tgamma(dim / 2.0);
  double c = 1.0 / std::sqrt(surface * acc);
  cache[dim] = c;
  return c;
}

double Mollifier::value(const Eigen::VectorXd &x) const {
  double z2 = (x - y).squaredNorm() / (h * h);
  if (z2 >= 1.0) return 0.0;
  int n = static_cast<int>(y.size());
  return std::pow(h, -0.5 * n) * c * std::exp(-1.0 / (1.0 - z2));
}

double Mollifier::peak() const {
  int n = static_cast<int>(y.size());
  return std::pow(h, -0.5 * n) * c * std::exp(-1.0);
}

Mollifier make_mollifier(const Eigen::VectorXd &y, double h) {
  Mollifier m;
  m.y = y;
  m.h = h;
  m.c = bump_norm_constant(static_cast<int>(y.size()));
  return m;
}

ScalarField build_bump(const Grid &g, const Eigen::VectorXd &y, double h) {
  if (2.0 * h < 8.0 * g.dx_min()) {
    std::ostringstream os;
    os << "bump under-resolved: width " << 2 * h << " spans fewer than 8 cells of "
       << g.dx_min();
    throw std::runtime_error(os.str());
  }
  Mollifier m = make_mollifier(y, h);
  Grid spatial = g;
  spatial.nt = 0;
  spatial.T = 0.0;
  ScalarField out(spatial);
  for (long s = 0; s < spatial.space_points(); ++s)
    out.at(s, 0) = m.value(spatial.point(s));
  return out;
}

Complex amplitude_at(const VectorField &A, AmplitudeVariant variant,
                     const Eigen::VectorXd &omega, const Eigen::VectorXd &x,
                     double t, double step_hint) {
  if (A.empty() || t <= 0.0) return {1.0, 0.0};
  const Grid &g = A.grid();
  double step = step_hint > 0 ? step_hint
                              : 0.5 * std::min(g.dx_min(), g.nt > 0 ? g.dt() : g.dx_min());
  long m = std::max<long>(2, static_cast<long>(std::ceil(t / step)));
  if (m % 2 != 0) ++m;
  const double hs = t / m;

  auto integrand = [&](double s) {
    Eigen::VectorXd pos =
        variant == AmplitudeVariant::BA ? (x - s * omega).eval() : (x + (t - s) * omega).eval();
    Eigen::VectorXcd a = A.interp(pos, s);
    Complex w{0, 0};
    for (int i = 0; i < a.size(); ++i) w += omega[i] * a[i];
    if (variant == AmplitudeVariant::B1) w = std::conj(w);
    return w;
  };

  Complex acc = integrand(0.0) + integrand(t);
  for (long i = 1; i < m; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * integrand(i * hs);
  Complex integral = acc * (hs / 3.0);

  Complex iu{0.0, 1.0};
  return std::exp(variant == AmplitudeVariant::BA ? -iu * integral : iu * integral);
}

AmplitudeField amplitude(const VectorField &A, const Eigen::VectorXd &omega,
                         AmplitudeVariant variant, const Grid &g) {
  AmplitudeField out;
  out.variant = variant;
  out.b = ScalarField(g);
  for (int m = 0; m <= g.nt; ++m) {
    double t = g.time(m);
    for (long s = 0; s < g.space_points(); ++s)
      out.b.at(s, m) = amplitude_at(A, variant, omega, g.point(s), t);
  }
  return out;
}

double GoAnsatz::bump_value(const Eigen::VectorXd &x, double t) const {
  return phi.value(x + t * spec.omega);
}

Complex GoAnsatz::operator()(const Eigen::VectorXd &x, double t) const {
  double b = bump_value(x, t);
  if (b == 0.0) return {0.0, 0.0};
  AmplitudeVariant variant =
      spec.side == ProbeSide::Forward ? AmplitudeVariant::B2 : AmplitudeVariant::B1;
  Complex amp = A ? amplitude_at(*A, variant, spec.omega, x, t) : Complex{1.0, 0.0};
  double phase = spec.sigma * (x.dot(spec.omega) + t);
  return b * amp * Complex(std::cos(phase), std::sin(phase));
}

double max_resolved_sigma(const Grid &g) {
  // 10 grid points per wavelength: sigma * dx <= 2 pi / 10.
  return 2.0 * M_PI / (10.0 * g.dx_min());
}

GoAnsatz go_ansatz(const Grid &g, const ProbeSpec &spec, const VectorField *A) {
  spec.validate();
  if (2.0 * spec.h < 8.0 * g.dx_min())
    throw std::runtime_error("bump under-resolved for this grid");
  double smax = max_resolved_sigma(g);
  if (spec.sigma > smax) {
    std::ostringstream os;
    os << "oscillation under-resolved: sigma " << spec.sigma
       << " exceeds the grid limit " << smax;
    throw std::runtime_error(os.str());
  }
  GoAnsatz ans;
  ans.spec = spec;
  ans.phi = make_mollifier(spec.y, spec.h);
  ans.A = A && !A->empty() ? A : nullptr;
  return ans;
}

RemainderReport remainder_report(const GeometryConfig &cfg, const MagneticPair *mp,
                                 const ProbeSpec &spec) {
  Grid g = Grid::solver(cfg);
  GoAnsatz ans = go_ansatz(g, spec, mp ? &mp->A : nullptr);

  WaveProblem prob;
  prob.form = WaveForm::Magnetic;
  prob.direction =
      spec.side == ProbeSide::Forward ? Direction::Forward : Direction::Adjoint;
  prob.magnetic = mp;
  prob.dirichlet = [&ans](const Eigen::VectorXd &x, double t) { return ans(x, t); };
  // Initial (resp. final) data are zero: the support rules keep the
  // transported bump off Omega at t = 0 and t = T.

  double acc_l2 = 0.0, acc_grad = 0.0;
  Eigen::VectorXcd r(g.space_points());
  SolveOptions opts;
  opts.observer = [&](int m, const Eigen::VectorXcd &u) {
    double t = g.time(m);
    for (long s = 0; s < g.space_points(); ++s) r[s] = u[s] - ans(g.point(s), t);
    double wt = g.dt();
    if (m == 0 || m == g.nt) wt *= 0.5;
    double l2sq = slice_dot(g, r, r).real();
    double h1sq = slice_h1_dot(g, r, r).real();
    acc_l2 += wt * l2sq;
    acc_grad += wt * std::max(0.0, h1sq - l2sq);
  };
  solve_wave(cfg, prob, opts);

  RemainderReport rep;
  rep.r_l2 = std::sqrt(acc_l2);
  rep.grad_r_l2 = std::sqrt(acc_grad);
  rep.sigma_r_l2 = spec.sigma * rep.r_l2;
  return rep;
}

namespace {

double ball_box_gap(const Eigen::VectorXd &c, double rad, const Eigen::VectorXd &lo,
                    const Eigen::VectorXd &hi) {
  double d2 = 0.0;
  for (int i = 0; i < c.size(); ++i) {
    double d = std::max({lo[i] - c[i], c[i] - hi[i], 0.0});
    d2 += d * d;
  }
  return std::sqrt(d2) - rad;
}

} // namespace

SupportReport check_probe_support(const GeometryConfig &cfg, const ProbeSpec &spec,
                                  Regime regime) {
  spec.validate();
  SupportReport rep;
  if (regime == Regime::Gamma) return rep;

  auto fail = [&rep](const std::string &msg) {
    rep.ok = false;
    rep.violations.push_back(msg);
  };

  if (ball_box_gap(spec.y, spec.h, cfg.omega_min, cfg.omega_max) <= 0.0)
    fail("supp phi intersects Omega");

  if (regime == Regime::Lambda) {
    double lo = spec.y.norm() - spec.h, hi = spec.y.norm() + spec.h;
    if (!(lo > cfg.r / 2 && hi < cfg.T - cfg.r / 2)) {
      std::ostringstream os;
      os << "supp phi not inside the shell: need " << cfg.r / 2 << " < " << lo
         << " and " << hi << " < " << cfg.T - cfg.r / 2;
      fail(os.str());
    }
    for (double sgn : {1.0, -1.0}) {
      Eigen::VectorXd c = spec.y + sgn * cfg.T * spec.omega;
      if (ball_box_gap(c, spec.h, cfg.omega_min, cfg.omega_max) <= 0.0) {
        std::ostringstream os;
        os << "supp phi " << (sgn > 0 ? "+" : "-") << " T omega intersects Omega";
        fail(os.str());
      }
    }
  }
  return rep;
}

} // namespace wdn
