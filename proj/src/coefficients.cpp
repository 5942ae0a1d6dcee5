#include "wdn/coefficients.hpp"

#include <cmath>
#include <stdexcept>
#include <unsupported/Eigen/FFT>

namespace wdn {

ScalarField derivative(const ScalarField &f, int axis) {
  const Grid &g = f.grid;
  const int n = g.dim();
  ScalarField out(g);
  const long N = g.space_points();

  if (axis == n) {
    // Time derivative.
    if (g.nt < 2) throw std::runtime_error("time derivative needs nt >= 2");
    const double dt = g.dt();
    for (long s = 0; s < N; ++s) {
      out.at(s, 0) = (-3.0 * f.at(s, 0) + 4.0 * f.at(s, 1) - f.at(s, 2)) / (2 * dt);
      for (int m = 1; m < g.nt; ++m)
        out.at(s, m) = (f.at(s, m + 1) - f.at(s, m - 1)) / (2 * dt);
      out.at(s, g.nt) =
          (3.0 * f.at(s, g.nt) - 4.0 * f.at(s, g.nt - 1) + f.at(s, g.nt - 2)) / (2 * dt);
    }
    return out;
  }

  if (axis < 0 || axis >= n) throw std::runtime_error("bad derivative axis");
  const double h = g.dx(axis);
  // Stride of a unit step along `axis` in the row-major spatial flattening.
  long stride = 1;
  for (int i = n - 1; i > axis; --i) stride *= g.nx[i];
  const int na = g.nx[axis];

  for (int m = 0; m <= g.nt; ++m) {
    for (long s = 0; s < N; ++s) {
      long ia = (s / stride) % na;
      Complex d;
      if (ia == 0)
        d = (-3.0 * f.at(s, m) + 4.0 * f.at(s + stride, m) - f.at(s + 2 * stride, m)) / (2 * h);
      else if (ia == na - 1)
        d = (3.0 * f.at(s, m) - 4.0 * f.at(s - stride, m) + f.at(s - 2 * stride, m)) / (2 * h);
      else
        d = (f.at(s + stride, m) - f.at(s - stride, m)) / (2 * h);
      out.at(s, m) = d;
    }
  }
  return out;
}

ScalarField divergence(const VectorField &A) {
  ScalarField out(A.grid());
  for (int j = 0; j < A.n(); ++j) {
    ScalarField dj = derivative(A.comp[j], j);
    out.values += dj.values;
  }
  return out;
}

CurlComponents curl_components(const VectorField &A) {
  CurlComponents out;
  const int n = A.n();
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      ScalarField djak = derivative(A.comp[k], j);
      ScalarField dkaj = derivative(A.comp[j], k);
      ScalarField beta(A.grid());
      beta.values = djak.values - dkaj.values;
      out.pairs.emplace_back(j, k);
      out.beta.push_back(std::move(beta));
    }
  return out;
}

MagneticPair gauge_reduce(const CoefficientPair &cp, const ScalarField *div_V) {
  if (!cp.V.grid().same_as(cp.p.grid))
    throw std::runtime_error("gauge_reduce: V and p grid mismatch");
  MagneticPair mp;
  const Grid &g = cp.grid();
  mp.A = VectorField(g, cp.V.n());
  const Complex ihalf(0.0, 0.5);
  for (int j = 0; j < cp.V.n(); ++j)
    mp.A.comp[j].values = ihalf * cp.V.comp[j].values;

  ScalarField div = div_V ? *div_V : divergence(cp.V);
  mp.q = ScalarField(g);
  Eigen::VectorXcd vsq = Eigen::VectorXcd::Zero(g.total_points());
  for (int j = 0; j < cp.V.n(); ++j)
    vsq += cp.V.comp[j].values.cwiseProduct(cp.V.comp[j].values);
  mp.q.values = cp.p.values + 0.25 * vsq - 0.5 * div.values;
  // Reduced form is exactly real: the inputs are real by contract.
  for (long i = 0; i < mp.q.values.size(); ++i)
    mp.q.values[i] = Complex(mp.q.values[i].real(), 0.0);
  return mp;
}

CoefficientPair gauge_lift(const MagneticPair &mp, double imag_tol,
                           const ScalarField *div_V) {
  CoefficientPair cp;
  const Grid &g = mp.grid();
  cp.V = VectorField(g, mp.A.n());
  double worst = 0.0;
  for (int j = 0; j < mp.A.n(); ++j)
    for (long i = 0; i < mp.A.comp[j].values.size(); ++i)
      worst = std::max(worst, std::abs(mp.A.comp[j].values[i].real()));
  if (worst > imag_tol)
    throw std::runtime_error("gauge_lift: A not purely imaginary (max Re = " +
                             std::to_string(worst) + ")");
  const Complex minus2i(0.0, -2.0);
  for (int j = 0; j < mp.A.n(); ++j) {
    cp.V.comp[j].values = minus2i * mp.A.comp[j].values;
    for (long i = 0; i < cp.V.comp[j].values.size(); ++i)
      cp.V.comp[j].values[i] = Complex(cp.V.comp[j].values[i].real(), 0.0);
  }
  ScalarField div = div_V ? *div_V : divergence(cp.V);
  Eigen::VectorXcd vsq = Eigen::VectorXcd::Zero(g.total_points());
  for (int j = 0; j < cp.V.n(); ++j)
    vsq += cp.V.comp[j].values.cwiseProduct(cp.V.comp[j].values);
  cp.p = ScalarField(g);
  cp.p.values = mp.q.values - 0.25 * vsq + 0.5 * div.values;
  return cp;
}

namespace {

// In-place FFT along every axis (space axes then time) of a flattened
// space-time array; forward sign convention e^{-i x xi}.
void fft_all_axes(const Grid &g, Eigen::VectorXcd &data) {
  Eigen::FFT<double> fft;
  const int n = g.dim();
  std::vector<long> dims;
  for (int i = 0; i < n; ++i) dims.push_back(g.nx[i]);
  dims.push_back(g.time_points());
  const long total = data.size();

  // Axis a (0..n-1 spatial, n time). Layout: time slowest, then spatial
  // axes row-major (last spatial axis fastest).
  for (int a = 0; a <= n; ++a) {
    long len = dims[a];
    if (len < 2) continue;
    long stride = 1;
    if (a < n) {
      for (int i = n - 1; i > a; --i) stride *= dims[i];
    } else {
      stride = total / dims[n];
    }
    long nlines = total / len;
    std::vector<std::complex<double>> line(len), out(len);
    for (long l = 0; l < nlines; ++l) {
      // Base index of line l: enumerate all indices with axis a fixed at 0.
      long inner = l % stride;
      long outer = l / stride;
      long base = outer * stride * len + inner;
      for (long i = 0; i < len; ++i) line[i] = data[base + i * stride];
      fft.fwd(out, line);
      for (long i = 0; i < len; ++i) data[base + i * stride] = out[i];
    }
  }
}

} // namespace

double norm_surrogate(const ScalarField &f, NormKind kind) {
  switch (kind) {
  case NormKind::Linf:
    return f.max_abs();
  case NormKind::L2:
    return f.l2();
  case NormKind::Hminus1: {
    const Grid &g = f.grid;
    const int n = g.dim();
    Eigen::VectorXcd data = f.values;
    fft_all_axes(g, data);
    // DFT bin k on axis of length L corresponds to frequency 2 pi k / L
    // (wrapped); continuous-FT normalization is the cell volume.
    double cellv = g.cell_volume() * (g.nt > 0 ? g.dt() : 1.0);
    std::vector<long> dims;
    for (int i = 0; i < n; ++i) dims.push_back(g.nx[i]);
    dims.push_back(g.time_points());
    std::vector<double> len(n + 1);
    for (int i = 0; i < n; ++i) len[i] = g.dx(i) * g.nx[i];
    len[n] = g.nt > 0 ? g.dt() * g.time_points() : 1.0;

    double acc = 0.0;
    const long total = data.size();
    for (long idx = 0; idx < total; ++idx) {
      long rem = idx;
      double omega2 = 0.0;
      // Unflatten: time slowest then spatial row-major.
      long tpart = idx / (total / dims[n]);
      {
        long k = tpart;
        if (k > dims[n] / 2) k -= dims[n];
        double w = 2 * M_PI * k / len[n];
        if (g.nt > 0) omega2 += w * w;
      }
      rem = idx % (total / dims[n]);
      for (int i = n - 1; i >= 0; --i) {
        long k = rem % dims[i];
        rem /= dims[i];
        if (k > dims[i] / 2) k -= dims[i];
        double w = 2 * M_PI * k / len[i];
        omega2 += w * w;
      }
      acc += std::norm(data[idx] * cellv) / (1.0 + omega2);
    }
    // Frequency-space quadrature measure.
    double dmeas = 1.0;
    for (int i = 0; i <= n; ++i) dmeas *= 2 * M_PI / len[i];
    return std::sqrt(acc * dmeas / std::pow(2 * M_PI, n + 1));
  }
  }
  return 0.0;
}

double wkinf_surrogate(const ScalarField &f, int k) {
  if (k > 3) throw std::runtime_error("wkinf_surrogate: k > 3 unsupported");
  double best = f.max_abs();
  const int naxes = f.grid.dim() + (f.grid.nt > 0 ? 1 : 0);
  for (int axis = 0; axis < naxes; ++axis) {
    ScalarField d = f;
    for (int order = 1; order <= k; ++order) {
      d = derivative(d, axis);
      best = std::max(best, d.max_abs());
    }
  }
  return best;
}

Complex slow_dft(const ScalarField &f, const Eigen::VectorXd &xi, double tau) {
  const Grid &g = f.grid;
  const long N = g.space_points();
  Complex acc{0.0, 0.0};
  for (int m = 0; m <= g.nt; ++m) {
    double wt = g.nt > 0 ? g.dt() : 1.0;
    if (g.nt > 0 && (m == 0 || m == g.nt)) wt *= 0.5;
    double t = g.time(m);
    Complex slice{0.0, 0.0};
    for (long s = 0; s < N; ++s) {
      Eigen::VectorXd x = g.point(s);
      double phase = -(x.dot(xi) + t * tau);
      slice += g.space_weight(s) * f.at(s, m) * Complex(std::cos(phase), std::sin(phase));
    }
    acc += wt * slice;
  }
  return acc;
}

} // namespace wdn
