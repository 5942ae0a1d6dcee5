#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "wdn/coefficients.hpp"

using namespace wdn;

namespace {

Grid unit_grid(int nx, int nt) {
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(2, -0.5);
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(2, 0.5);
  return Grid::box(lo, hi, nx, 1.0, nt);
}

} // namespace

TEST_CASE("spatial index round trip") {
  Grid g = unit_grid(7, 4);
  for (long s = 0; s < g.space_points(); ++s) {
    Eigen::VectorXi idx = g.space_multi_index(s);
    CHECK(g.space_index(idx) == s);
  }
  // row major: last axis fastest
  Eigen::VectorXi idx(2);
  idx << 1, 2;
  CHECK(g.space_index(idx) == 1 * 7 + 2);
}

TEST_CASE("trapezoid weights sum to the box volume") {
  Grid g = unit_grid(9, 3);
  double vol = 0.0;
  for (long s = 0; s < g.space_points(); ++s) vol += g.space_weight(s);
  CHECK(vol == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("interp reproduces affine fields and vanishes outside") {
  Grid g = unit_grid(11, 8);
  ScalarField f = ScalarField::sample(g, [](const Eigen::VectorXd &x, double t) {
    return Complex(2.0 * x[0] - x[1] + 0.5 * t + 1.0, 0.0);
  });
  Eigen::Vector2d x(0.137, -0.222);
  CHECK(f.interp(x, 0.481).real() ==
        doctest::Approx(2.0 * x[0] - x[1] + 0.5 * 0.481 + 1.0).epsilon(1e-12));
  CHECK(f.interp(Eigen::Vector2d(0.8, 0.0), 0.5) == Complex{0.0, 0.0});
  CHECK(f.interp(x, 1.7) == Complex{0.0, 0.0});
}

TEST_CASE("l2 of a constant") {
  Grid g = unit_grid(9, 6);
  ScalarField f = ScalarField::sample(
      g, [](const Eigen::VectorXd &, double) { return Complex(3.0, 0.0); });
  CHECK(f.l2() == doctest::Approx(3.0).epsilon(1e-12));  // vol * T = 1
}

TEST_CASE("wdn1 round trip is bit exact") {
  Grid g = unit_grid(6, 3);
  ScalarField f = ScalarField::sample(g, [](const Eigen::VectorXd &x, double t) {
    return Complex(std::sin(7 * x[0] + t), std::cos(3 * x[1]));
  });
  const char *path = "tmp_roundtrip.wdn1";
  write_wdn1(path, f);
  ScalarField back = read_wdn1(path, g);
  std::remove(path);
  REQUIRE(back.values.size() == f.values.size());
  for (long i = 0; i < f.values.size(); ++i) CHECK(back.values[i] == f.values[i]);
}

TEST_CASE("derivatives are exact on quadratics") {
  Grid g = unit_grid(9, 8);
  ScalarField f = ScalarField::sample(g, [](const Eigen::VectorXd &x, double t) {
    return Complex(x[0] * x[0] + 3.0 * x[1] - t * t, 0.0);
  });
  ScalarField dx0 = derivative(f, 0);
  ScalarField dx1 = derivative(f, 1);
  ScalarField dt = derivative(f, 2);
  for (int m = 0; m <= g.nt; ++m) {
    for (long s = 0; s < g.space_points(); ++s) {
      Eigen::VectorXd x = g.point(s);
      CHECK(dx0.at(s, m).real() == doctest::Approx(2.0 * x[0]).epsilon(1e-10));
      CHECK(dx1.at(s, m).real() == doctest::Approx(3.0).epsilon(1e-10));
      CHECK(dt.at(s, m).real() ==
            doctest::Approx(-2.0 * g.time(m)).epsilon(1e-9));
    }
  }
}

TEST_CASE("divergence and curl of a linear field") {
  Grid g = unit_grid(9, 4);
  VectorField A = VectorField::sample(g, 2, [](const Eigen::VectorXd &x, double) {
    Eigen::VectorXcd v(2);
    v << Complex(2.0 * x[0] + x[1], 0.0), Complex(5.0 * x[1] - 3.0 * x[0], 0.0);
    return v;
  });
  ScalarField div = divergence(A);
  CurlComponents curl = curl_components(A);
  REQUIRE(curl.pairs.size() == 1);
  CHECK(curl.pairs[0] == std::make_pair(0, 1));
  for (long i = 0; i < div.values.size(); ++i) {
    CHECK(div.values[i].real() == doctest::Approx(7.0).epsilon(1e-10));
    // beta_01 = d0 a1 - d1 a0 = -3 - 1
    CHECK(curl.beta[0].values[i].real() == doctest::Approx(-4.0).epsilon(1e-10));
  }
}

TEST_CASE("gauge reduction of constant coefficients") {
  Grid g = unit_grid(8, 4);
  CoefficientPair cp;
  cp.V = VectorField::sample(g, 2, [](const Eigen::VectorXd &, double) {
    Eigen::VectorXcd v(2);
    v << Complex(0.6, 0.0), Complex(0.0, 0.0);
    return v;
  });
  cp.p = ScalarField::sample(
      g, [](const Eigen::VectorXd &, double) { return Complex(2.0, 0.0); });
  MagneticPair mp = gauge_reduce(cp);
  for (long i = 0; i < mp.q.values.size(); ++i) {
    CHECK(mp.A.comp[0].values[i] == Complex(0.0, 0.3));
    CHECK(mp.A.comp[1].values[i] == Complex(0.0, 0.0));
    // q = p + V.V/4 - div/2 = 2 + 0.09
    CHECK(mp.q.values[i].real() == doctest::Approx(2.09).epsilon(1e-10));
  }
}

TEST_CASE("gauge lift inverts gauge reduction") {
  Grid g = unit_grid(10, 6);
  CoefficientPair cp;
  cp.V = VectorField::sample(g, 2, [](const Eigen::VectorXd &x, double t) {
    Eigen::VectorXcd v(2);
    v << Complex(0.3 * std::sin(3 * x[0] + t), 0.0),
        Complex(0.2 * std::cos(2 * x[1]), 0.0);
    return v;
  });
  cp.p = ScalarField::sample(g, [](const Eigen::VectorXd &x, double) {
    return Complex(0.5 * x[0] * x[1], 0.0);
  });
  MagneticPair mp = gauge_reduce(cp);
  CoefficientPair back = gauge_lift(mp);
  for (int j = 0; j < 2; ++j)
    for (long i = 0; i < cp.V.comp[j].values.size(); ++i)
      CHECK(std::abs(back.V.comp[j].values[i] - cp.V.comp[j].values[i]) < 1e-12);
  for (long i = 0; i < cp.p.values.size(); ++i)
    CHECK(std::abs(back.p.values[i] - cp.p.values[i]) < 1e-10);
}

TEST_CASE("gauge lift rejects a potential with a real part") {
  Grid g = unit_grid(8, 4);
  MagneticPair mp;
  mp.A = VectorField::sample(g, 2, [](const Eigen::VectorXd &, double) {
    Eigen::VectorXcd v(2);
    v << Complex(0.1, 0.0), Complex(0.0, 0.0);
    return v;
  });
  mp.q = ScalarField(g);
  CHECK_THROWS(gauge_lift(mp));
}

TEST_CASE("norm surrogates on a known field") {
  Grid g = unit_grid(16, 12);
  ScalarField f = ScalarField::sample(
      g, [](const Eigen::VectorXd &, double) { return Complex(2.5, 0.0); });
  CHECK(norm_surrogate(f, NormKind::Linf) == doctest::Approx(2.5));
  CHECK(norm_surrogate(f, NormKind::L2) == doctest::Approx(2.5).epsilon(1e-10));
  // H^{-1} of a constant is dominated by the zero mode: close to L2 up to
  // the O(1/nx) periodization bias of the surrogate
  double hm1 = norm_surrogate(f, NormKind::Hminus1);
  CHECK(hm1 == doctest::Approx(2.5).epsilon(0.2));
  CHECK(wkinf_surrogate(f, 2) == doctest::Approx(2.5));
}

TEST_CASE("slow dft basics") {
  Grid g = unit_grid(15, 10);
  ScalarField f = ScalarField::sample(g, [](const Eigen::VectorXd &x, double t) {
    return Complex(std::cos(4.0 * x[0] + t), 0.0);
  });
  // zero frequency: plain space-time integral
  Complex dc = slow_dft(f, Eigen::Vector2d(0, 0), 0.0);
  // real field: conjugate symmetry
  Complex a = slow_dft(f, Eigen::Vector2d(2.0, -1.0), 0.7);
  Complex b = slow_dft(f, Eigen::Vector2d(-2.0, 1.0), -0.7);
  CHECK(std::abs(a - std::conj(b)) < 1e-12);
  CHECK(std::abs(dc.imag()) < 1e-12);
}
