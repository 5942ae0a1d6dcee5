#include "wdn/field.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace wdn {

Grid Grid::box(const Eigen::VectorXd &lo, const Eigen::VectorXd &hi,
               int nx_per_axis, double T, int nt) {
  Grid g;
  g.lo = lo;
  g.hi = hi;
  g.nx = Eigen::VectorXi::Constant(lo.size(), nx_per_axis);
  g.T = T;
  g.nt = nt;
  return g;
}

Grid Grid::qr_box(const GeometryConfig &cfg, int nx_per_axis, int nt) {
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(cfg.dim, -cfg.r / 2);
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(cfg.dim, cfg.r / 2);
  return box(lo, hi, nx_per_axis, cfg.T, nt);
}

Grid Grid::solver(const GeometryConfig &cfg) {
  Grid g;
  g.lo = cfg.omega_min;
  g.hi = cfg.omega_max;
  g.nx = Eigen::VectorXi::Constant(cfg.dim, cfg.nx);
  g.T = cfg.T;
  g.nt = cfg.effective_nt();
  return g;
}

double Grid::dx_min() const {
  double d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < dim(); ++i) d = std::min(d, dx(i));
  return d;
}

long Grid::space_points() const {
  long p = 1;
  for (int i = 0; i < dim(); ++i) p *= nx[i];
  return p;
}

long Grid::space_index(const Eigen::VectorXi &idx) const {
  long s = 0;
  for (int i = 0; i < dim(); ++i) s = s * nx[i] + idx[i];
  return s;
}

Eigen::VectorXi Grid::space_multi_index(long s) const {
  Eigen::VectorXi idx(dim());
  for (int i = dim() - 1; i >= 0; --i) {
    idx[i] = static_cast<int>(s % nx[i]);
    s /= nx[i];
  }
  return idx;
}

Eigen::VectorXd Grid::point(const Eigen::VectorXi &idx) const {
  Eigen::VectorXd x(dim());
  for (int i = 0; i < dim(); ++i) x[i] = lo[i] + idx[i] * dx(i);
  return x;
}

Eigen::VectorXd Grid::point(long s) const { return point(space_multi_index(s)); }

bool Grid::same_as(const Grid &other, double tol) const {
  if (dim() != other.dim() || nt != other.nt) return false;
  if ((nx - other.nx).cwiseAbs().maxCoeff() != 0) return false;
  return (lo - other.lo).cwiseAbs().maxCoeff() <= tol &&
         (hi - other.hi).cwiseAbs().maxCoeff() <= tol &&
         std::abs(T - other.T) <= tol;
}

double Grid::space_weight(long s) const {
  Eigen::VectorXi idx = space_multi_index(s);
  double w = 1.0;
  for (int i = 0; i < dim(); ++i) {
    double wi = dx(i);
    if (idx[i] == 0 || idx[i] == nx[i] - 1) wi *= 0.5;
    w *= wi;
  }
  return w;
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int i = 0; i < dim(); ++i) v *= dx(i);
  return v;
}

Complex ScalarField::interp(const Eigen::VectorXd &x, double t) const {
  const Grid &g = grid;
  const int n = g.dim();

  // Time bracket; fields vanish outside [0,T].
  int m0 = 0, m1 = 0;
  double wt = 0.0;
  if (g.nt > 0) {
    if (t < 0.0 || t > g.T) return {0.0, 0.0};
    double ft = t / g.dt();
    m0 = std::min(static_cast<int>(std::floor(ft)), g.nt - 1);
    m1 = m0 + 1;
    wt = ft - m0;
  }

  Eigen::VectorXi base(n);
  Eigen::VectorXd frac(n);
  for (int i = 0; i < n; ++i) {
    if (x[i] < g.lo[i] || x[i] > g.hi[i]) return {0.0, 0.0};
    double fi = (x[i] - g.lo[i]) / g.dx(i);
    int b = std::min(static_cast<int>(std::floor(fi)), g.nx[i] - 2);
    base[i] = b;
    frac[i] = fi - b;
  }

  auto corner_sum = [&](int m) {
    Complex acc{0.0, 0.0};
    const long nc = 1L << n;
    const long off = static_cast<long>(m) * g.space_points();
    for (long c = 0; c < nc; ++c) {
      double w = 1.0;
      Eigen::VectorXi idx = base;
      for (int i = 0; i < n; ++i) {
        if (c & (1L << i)) {
          idx[i] += 1;
          w *= frac[i];
        } else {
          w *= 1.0 - frac[i];
        }
      }
      if (w != 0.0) acc += w * values[off + g.space_index(idx)];
    }
    return acc;
  };

  if (g.nt == 0) return corner_sum(0);
  Complex a = corner_sum(m0);
  if (wt == 0.0) return a;
  Complex b = corner_sum(m1);
  return (1.0 - wt) * a + wt * b;
}

ScalarField ScalarField::sample(
    const Grid &g, const std::function<Complex(const Eigen::VectorXd &, double)> &f) {
  ScalarField out(g);
  const long N = g.space_points();
  for (int m = 0; m <= g.nt; ++m) {
    double t = g.time(m);
    for (long s = 0; s < N; ++s) out.at(s, m) = f(g.point(s), t);
  }
  return out;
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (long i = 0; i < values.size(); ++i) m = std::max(m, std::abs(values[i]));
  return m;
}

double ScalarField::l2() const {
  const long N = grid.space_points();
  double acc = 0.0;
  for (int m = 0; m <= grid.nt; ++m) {
    double wt = grid.nt > 0 ? grid.dt() : 1.0;
    if (grid.nt > 0 && (m == 0 || m == grid.nt)) wt *= 0.5;
    double slice = 0.0;
    for (long s = 0; s < N; ++s) slice += grid.space_weight(s) * std::norm(at(s, m));
    acc += wt * slice;
  }
  return std::sqrt(acc);
}

Eigen::VectorXcd VectorField::interp(const Eigen::VectorXd &x, double t) const {
  Eigen::VectorXcd v(n());
  for (int i = 0; i < n(); ++i) v[i] = comp[i].interp(x, t);
  return v;
}

VectorField VectorField::sample(
    const Grid &g, int n,
    const std::function<Eigen::VectorXcd(const Eigen::VectorXd &, double)> &f) {
  VectorField out(g, n);
  const long N = g.space_points();
  for (int m = 0; m <= g.nt; ++m) {
    double t = g.time(m);
    for (long s = 0; s < N; ++s) {
      Eigen::VectorXcd v = f(g.point(s), t);
      for (int i = 0; i < n; ++i) out.comp[i].at(s, m) = v[i];
    }
  }
  return out;
}

double VectorField::max_abs() const {
  double m = 0.0;
  for (const auto &c : comp) m = std::max(m, c.max_abs());
  return m;
}

namespace {
template <typename T> void put(std::ofstream &os, T v) {
  os.write(reinterpret_cast<const char *>(&v), sizeof(T));
}
template <typename T> T get(std::ifstream &is) {
  T v;
  is.read(reinterpret_cast<char *>(&v), sizeof(T));
  return v;
}
} // namespace

void write_wdn1(const std::string &path, const ScalarField &f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  os.write("WDN1", 4);
  put<std::uint32_t>(os, 1);
  put<std::uint8_t>(os, static_cast<std::uint8_t>(f.grid.dim()));
  put<std::uint8_t>(os, 1);  // complex
  for (int i = 0; i < f.grid.dim(); ++i)
    put<std::uint64_t>(os, static_cast<std::uint64_t>(f.grid.nx[i]));
  put<std::uint64_t>(os, static_cast<std::uint64_t>(f.grid.time_points()));
  for (long i = 0; i < f.values.size(); ++i) {
    put<double>(os, f.values[i].real());
    put<double>(os, f.values[i].imag());
  }
}

ScalarField read_wdn1(const std::string &path, const Grid &grid_hint) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (std::memcmp(magic, "WDN1", 4) != 0)
    throw std::runtime_error("bad magic in " + path);
  auto version = get<std::uint32_t>(is);
  if (version != 1) throw std::runtime_error("unsupported version");
  int ndim = get<std::uint8_t>(is);
  int is_complex = get<std::uint8_t>(is);
  if (ndim != grid_hint.dim()) throw std::runtime_error("dimension mismatch");
  for (int i = 0; i < ndim; ++i) {
    auto d = get<std::uint64_t>(is);
    if (static_cast<long>(d) != grid_hint.nx[i])
      throw std::runtime_error("spatial dims mismatch");
  }
  auto ntp = get<std::uint64_t>(is);
  if (static_cast<long>(ntp) != grid_hint.time_points())
    throw std::runtime_error("time dims mismatch");
  ScalarField f(grid_hint);
  for (long i = 0; i < f.values.size(); ++i) {
    double re = get<double>(is);
    double im = is_complex ? get<double>(is) : 0.0;
    f.values[i] = {re, im};
  }
  return f;
}

} // namespace wdn
