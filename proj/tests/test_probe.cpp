#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wdn/probe.hpp"

using namespace wdn;

TEST_CASE("bump normalization gives a unit L2 profile") {
  double c = bump_norm_constant(2);
  // integrate c^2 exp(-2/(1-r^2)) over the unit disk
  const int n = 4000;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    double r = static_cast<double>(i) / n;
    double w = (i == 0 || i == n) ? 0.5 : 1.0;
    double v = r < 1.0 ? std::exp(-2.0 / (1.0 - r * r)) : 0.0;
    acc += w * v * r / n;
  }
  acc *= 2.0 * M_PI * c * c;
  CHECK(acc == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("mollifier peak and unit mass") {
  Eigen::Vector2d y(0.4, -0.2);
  double h = 0.25;
  Mollifier phi = make_mollifier(y, h);
  CHECK(phi.value(y) == doctest::Approx(phi.peak()));
  CHECK(phi.peak() == doctest::Approx(phi.c * std::exp(-1.0) / h));  // h^{-n/2}, n=2
  CHECK(phi.value(y + Eigen::Vector2d(h, 0.0)) == 0.0);

  // squared mass over B(y,h) is one, independent of h
  const int n = 400;
  double acc = 0.0;
  for (int i = -n; i <= n; ++i)
    for (int j = -n; j <= n; ++j) {
      Eigen::Vector2d x = y + Eigen::Vector2d(i * h / n, j * h / n);
      double v = phi.value(x);
      acc += v * v * (h / n) * (h / n);
    }
  CHECK(acc == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("build_bump refuses unresolved bumps") {
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(2, -0.5);
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(2, 0.5);
  Grid g = Grid::box(lo, hi, 21, 0.0, 0);  // dx = 0.05
  CHECK_THROWS(build_bump(g, Eigen::Vector2d(0, 0), 0.1));  // 4 cells
  CHECK_NOTHROW(build_bump(g, Eigen::Vector2d(0, 0), 0.25));
}

TEST_CASE("transport amplitudes for a constant potential") {
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(2, -1.5);
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(2, 1.5);
  Grid g = Grid::box(lo, hi, 31, 2.0, 40);
  VectorField A = VectorField::sample(g, 2, [](const Eigen::VectorXd &, double) {
    Eigen::VectorXcd v(2);
    v << Complex(0.0, 1.0), Complex(0.0, 0.0);
    return v;
  });
  Eigen::Vector2d omega(1.0, 0.0), x(-1.0, 0.0);
  // w.A = i along the whole path, so the three variants integrate to
  // exp(-t), exp(t) and exp(t) at t = 1.
  Complex b2 = amplitude_at(A, AmplitudeVariant::B2, omega, x, 1.0);
  Complex b1 = amplitude_at(A, AmplitudeVariant::B1, omega, x, 1.0);
  CHECK(b2.real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
  CHECK(std::abs(b2.imag()) < 1e-9);
  CHECK(b1.real() == doctest::Approx(std::exp(1.0)).epsilon(1e-6));
  Eigen::Vector2d x2(0.0, 0.0);  // BA path runs backwards from x
  Complex ba = amplitude_at(A, AmplitudeVariant::BA, omega, x2, 1.0);
  CHECK(ba.real() == doctest::Approx(std::exp(1.0)).epsilon(1e-6));
}

TEST_CASE("amplitude of the zero potential is one") {
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(2, -0.5);
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(2, 0.5);
  Grid g = Grid::box(lo, hi, 21, 1.0, 10);
  VectorField A(g, 2);
  Complex b = amplitude_at(A, AmplitudeVariant::B2, Eigen::Vector2d(0, 1),
                           Eigen::Vector2d(0.1, -0.2), 0.6);
  CHECK(b == Complex{1.0, 0.0});
}

TEST_CASE("resolution guard on sigma") {
  GeometryConfig cfg = GeometryConfig::square(1.0, 3.0, 0.3, 33);
  Grid g = Grid::solver(cfg);
  double dx = 0.6 / 32.0;
  CHECK(max_resolved_sigma(g) == doctest::Approx(2.0 * M_PI / (10.0 * dx)));

  ProbeSpec spec;
  spec.omega = Eigen::Vector2d(1.0, 0.0);
  spec.y = Eigen::Vector2d(1.5, 0.0);
  spec.h = 0.2;
  spec.sigma = 2.0 * max_resolved_sigma(g);
  CHECK_THROWS(go_ansatz(g, spec, nullptr));
  spec.sigma = 10.0;
  CHECK_NOTHROW(go_ansatz(g, spec, nullptr));
}

TEST_CASE("free ansatz is bump times phase") {
  GeometryConfig cfg = GeometryConfig::square(1.0, 3.0, 0.3, 33);
  Grid g = Grid::solver(cfg);
  ProbeSpec spec;
  spec.omega = Eigen::Vector2d(1.0, 0.0);
  spec.y = Eigen::Vector2d(1.5, 0.0);
  spec.h = 0.2;
  spec.sigma = 12.0;
  GoAnsatz u = go_ansatz(g, spec, nullptr);
  Eigen::Vector2d x(0.1, 0.05);
  double t = 1.45;
  Mollifier phi = make_mollifier(spec.y, spec.h);
  Complex expect = phi.value(x + t * spec.omega) *
                   std::exp(Complex(0.0, spec.sigma * (x.dot(spec.omega) + t)));
  CHECK(std::abs(u(x, t) - expect) < 1e-12);
}

TEST_CASE("probe support rules per regime") {
  GeometryConfig cfg = GeometryConfig::square(1.0, 3.0, 0.3, 33);
  ProbeSpec spec;
  spec.omega = Eigen::Vector2d(1.0, 0.0);
  spec.h = 0.2;
  spec.sigma = 10.0;

  spec.y = Eigen::Vector2d(1.5, 0.0);
  CHECK(check_probe_support(cfg, spec, Regime::Lambda).ok);
  CHECK(check_probe_support(cfg, spec, Regime::R).ok);
  CHECK(check_probe_support(cfg, spec, Regime::Gamma).ok);

  // too close to the origin: outside the shell and touching Omega
  spec.y = Eigen::Vector2d(0.4, 0.0);
  CHECK(!check_probe_support(cfg, spec, Regime::Lambda).ok);
  CHECK(!check_probe_support(cfg, spec, Regime::R).ok);
  CHECK(check_probe_support(cfg, spec, Regime::Gamma).ok);

  // clear of the box but below the shell floor: fine for R, not for Lambda
  spec.y = Eigen::Vector2d(0.6, 0.0);
  CHECK(!check_probe_support(cfg, spec, Regime::Lambda).ok);
  CHECK(check_probe_support(cfg, spec, Regime::R).ok);

  // shifted copy at y - T omega must miss Omega too
  spec.y = Eigen::Vector2d(-1.5, 0.0);
  spec.omega = Eigen::Vector2d(-1.0, 0.0);
  CHECK(check_probe_support(cfg, spec, Regime::Lambda).ok);
}

TEST_CASE("remainder of the free ansatz is small and square integrable") {
  GeometryConfig cfg = GeometryConfig::square(0.9, 2.0, 0.3, 48);
  ProbeSpec spec;
  spec.omega = Eigen::Vector2d(1.0, 0.0);
  spec.y = Eigen::Vector2d(0.55, 0.0);
  spec.h = 0.15;
  spec.sigma = 15.0;
  RemainderReport rep = remainder_report(cfg, nullptr, spec);
  CHECK(rep.r_l2 > 0.0);
  CHECK(rep.r_l2 < 1.0);
  CHECK(rep.grad_r_l2 > 0.0);
  CHECK(rep.sigma_r_l2 == doctest::Approx(spec.sigma * rep.r_l2));
}
