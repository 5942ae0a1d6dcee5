#include "wdn/wave.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace wdn {

Region regime_region(Regime regime) {
  switch (regime) {
  case Regime::Lambda: return Region::IStar;
  case Regime::R: return Region::ISharp;
  case Regime::Gamma: return Region::Q;
  }
  return Region::Q;
}

void parallel_for(long count, int threads, const std::function<void(long)> &fn) {
  if (threads <= 1 || count <= 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  int nthreads = static_cast<int>(std::min<long>(threads, count));
  std::vector<std::thread> pool;
  std::atomic<long> next{0};
  for (int t = 0; t < nthreads; ++t)
    pool.emplace_back([&]() {
      for (;;) {
        long i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  for (auto &th : pool) th.join();
}

BoundaryGrid BoundaryGrid::make(const Grid &g) {
  BoundaryGrid bg;
  bg.grid = g;
  const int n = g.dim();
  for (int a = 0; a < n; ++a) {
    for (int side = 0; side < 2; ++side) {
      Face face;
      face.axis = a;
      face.side = side;
      face.shape = Eigen::VectorXi(n - 1);
      int p = 0;
      for (int i = 0; i < n; ++i)
        if (i != a) face.shape[p++] = g.nx[i];
      const long N = g.space_points();
      const int fixed = side == 0 ? 0 : g.nx[a] - 1;
      for (long s = 0; s < N; ++s) {
        Eigen::VectorXi idx = g.space_multi_index(s);
        if (idx[a] != fixed) continue;
        face.sidx.push_back(s);
        double w = 1.0;
        for (int i = 0; i < n; ++i) {
          if (i == a) continue;
          double wi = g.dx(i);
          if (idx[i] == 0 || idx[i] == g.nx[i] - 1) wi *= 0.5;
          w *= wi;
        }
        face.weight.push_back(w);
      }
      bg.faces.push_back(std::move(face));
    }
  }
  return bg;
}

long BoundaryGrid::points() const {
  long p = 0;
  for (const auto &f : faces) p += static_cast<long>(f.sidx.size());
  return p;
}

BoundaryTrace BoundaryTrace::zeros(const BoundaryGrid &bg, Kind kind) {
  BoundaryTrace t;
  t.kind = kind;
  for (const auto &f : bg.faces)
    t.face_vals.push_back(Eigen::MatrixXcd::Zero(
        static_cast<long>(f.sidx.size()), bg.grid.time_points()));
  return t;
}

BoundaryTrace BoundaryTrace::sample(const BoundaryGrid &bg, Kind kind,
                                    const SpaceTimeFn &fn) {
  BoundaryTrace t = zeros(bg, kind);
  for (std::size_t fi = 0; fi < bg.faces.size(); ++fi) {
    const auto &face = bg.faces[fi];
    for (std::size_t p = 0; p < face.sidx.size(); ++p) {
      Eigen::VectorXd x = bg.grid.point(face.sidx[p]);
      for (int m = 0; m <= bg.grid.nt; ++m)
        t.face_vals[fi](p, m) = fn ? fn(x, bg.grid.time(m)) : Complex{0, 0};
    }
  }
  return t;
}

BoundaryTrace &BoundaryTrace::operator+=(const BoundaryTrace &o) {
  for (std::size_t i = 0; i < face_vals.size(); ++i) face_vals[i] += o.face_vals[i];
  return *this;
}
BoundaryTrace &BoundaryTrace::operator-=(const BoundaryTrace &o) {
  for (std::size_t i = 0; i < face_vals.size(); ++i) face_vals[i] -= o.face_vals[i];
  return *this;
}
BoundaryTrace &BoundaryTrace::operator*=(Complex a) {
  for (auto &m : face_vals) m *= a;
  return *this;
}

namespace {

double time_weight(const Grid &g, int m) {
  double w = g.dt();
  if (m == 0 || m == g.nt) w *= 0.5;
  return w;
}

// First differences of a flattened row-major array along one axis,
// second-order one-sided at the ends.
void diff_flat(const Eigen::VectorXcd &v, const Eigen::VectorXi &shape, int axis,
               double h, Eigen::VectorXcd &out) {
  long stride = 1;
  for (int i = shape.size() - 1; i > axis; --i) stride *= shape[i];
  const long len = shape[axis];
  out.resize(v.size());
  for (long s = 0; s < v.size(); ++s) {
    long ia = (s / stride) % len;
    if (len < 3) { out[s] = 0.0; continue; }
    if (ia == 0)
      out[s] = (-3.0 * v[s] + 4.0 * v[s + stride] - v[s + 2 * stride]) / (2 * h);
    else if (ia == len - 1)
      out[s] = (3.0 * v[s] - 4.0 * v[s - stride] + v[s - 2 * stride]) / (2 * h);
    else
      out[s] = (v[s + stride] - v[s - stride]) / (2 * h);
  }
}

} // namespace

Complex trace_dot(const BoundaryGrid &bg, const BoundaryTrace &a, const BoundaryTrace &b) {
  Complex acc{0, 0};
  for (std::size_t fi = 0; fi < bg.faces.size(); ++fi) {
    const auto &face = bg.faces[fi];
    for (int m = 0; m <= bg.grid.nt; ++m) {
      double wt = time_weight(bg.grid, m);
      Complex s{0, 0};
      for (std::size_t p = 0; p < face.sidx.size(); ++p)
        s += face.weight[p] * a.face_vals[fi](p, m) * std::conj(b.face_vals[fi](p, m));
      acc += wt * s;
    }
  }
  return acc;
}

double trace_l2(const BoundaryGrid &bg, const BoundaryTrace &a) {
  return std::sqrt(std::max(0.0, trace_dot(bg, a, a).real()));
}

Complex trace_h1_dot(const BoundaryGrid &bg, const BoundaryTrace &a, const BoundaryTrace &b) {
  Complex acc = trace_dot(bg, a, b);
  const Grid &g = bg.grid;
  for (std::size_t fi = 0; fi < bg.faces.size(); ++fi) {
    const auto &face = bg.faces[fi];
    const long np = static_cast<long>(face.sidx.size());
    // Face-local axes: shape lists the non-normal grid axes plus time.
    Eigen::VectorXi full_shape(face.shape.size() + 1);
    for (int i = 0; i < face.shape.size(); ++i) full_shape[i] = face.shape[i];
    full_shape[face.shape.size()] = g.time_points();
    std::vector<double> hs;
    for (int i = 0, p = 0; i < g.dim(); ++i)
      if (i != face.axis) { (void)p; hs.push_back(g.dx(i)); }
    hs.push_back(g.dt());

    // Flatten (point, time) with time fastest to match full_shape order.
    Eigen::VectorXcd fa(np * g.time_points()), fb(np * g.time_points());
    for (long p = 0; p < np; ++p)
      for (int m = 0; m <= g.nt; ++m) {
        fa[p * g.time_points() + m] = a.face_vals[fi](p, m);
        fb[p * g.time_points() + m] = b.face_vals[fi](p, m);
      }
    Eigen::VectorXcd da, db;
    for (int ax = 0; ax < full_shape.size(); ++ax) {
      diff_flat(fa, full_shape, ax, hs[ax], da);
      diff_flat(fb, full_shape, ax, hs[ax], db);
      for (long p = 0; p < np; ++p) {
        for (int m = 0; m <= g.nt; ++m) {
          double w = face.weight[p] * time_weight(g, m);
          long s = p * g.time_points() + m;
          acc += w * da[s] * std::conj(db[s]);
        }
      }
    }
  }
  return acc;
}

double trace_h1(const BoundaryGrid &bg, const BoundaryTrace &a) {
  return std::sqrt(std::max(0.0, trace_h1_dot(bg, a, a).real()));
}

Complex slice_dot(const Grid &g, const Eigen::VectorXcd &a, const Eigen::VectorXcd &b) {
  Complex acc{0, 0};
  for (long s = 0; s < g.space_points(); ++s)
    acc += g.space_weight(s) * a[s] * std::conj(b[s]);
  return acc;
}

double slice_l2(const Grid &g, const Eigen::VectorXcd &a) {
  return std::sqrt(std::max(0.0, slice_dot(g, a, a).real()));
}

Complex slice_h1_dot(const Grid &g, const Eigen::VectorXcd &a, const Eigen::VectorXcd &b) {
  Complex acc = slice_dot(g, a, b);
  Eigen::VectorXcd da, db;
  for (int ax = 0; ax < g.dim(); ++ax) {
    diff_flat(a, g.nx, ax, g.dx(ax), da);
    diff_flat(b, g.nx, ax, g.dx(ax), db);
    acc += slice_dot(g, da, db);
  }
  return acc;
}

double slice_h1(const Grid &g, const Eigen::VectorXcd &a) {
  return std::sqrt(std::max(0.0, slice_h1_dot(g, a, a).real()));
}

namespace {

// Per-step coefficient slices on the solver grid.
struct CoeffSlices {
  std::vector<Eigen::VectorXcd> first;  ///< V_j or A_j
  Eigen::VectorXcd div_first;           ///< div_x V or div_x A
  Eigen::VectorXcd zeroth;              ///< p or q
  Eigen::VectorXcd first_sq;            ///< A.A (magnetic only)
  bool active = false;
};

// Coefficients live on their own (coarser) grid. Resampling every solver
// step by multilinear interpolation dominates the run time, so the spatial
// interpolation is done once per coefficient time slice up front and each
// step only blends two precomputed columns.
struct CoeffSampler {
  const CoefficientPair *cp = nullptr;
  const MagneticPair *mp = nullptr;
  bool conjugate = false; ///< magnetic adjoint uses conj(A)
  bool active = false;
  bool is_magnetic = false;

  int nt_c = 0;
  double T_c = 0.0;
  std::vector<Eigen::MatrixXcd> first_c;  ///< per component: N x (nt_c+1)
  Eigen::MatrixXcd div_c, zeroth_c;

  void init(const Grid &g) {
    const VectorField *vf = nullptr;
    const ScalarField *sf = nullptr;
    if (cp && !cp->empty()) { vf = &cp->V; sf = &cp->p; }
    if (mp && !mp->empty()) { vf = &mp->A; sf = &mp->q; is_magnetic = true; }
    if (!vf) return;
    active = true;
    ScalarField div_field = divergence(*vf);
    const Grid &cg = vf->grid();
    nt_c = cg.nt;
    T_c = cg.T;
    const long N = g.space_points();
    const int n = g.dim();
    first_c.assign(n, Eigen::MatrixXcd(N, nt_c + 1));
    div_c.resize(N, nt_c + 1);
    zeroth_c.resize(N, nt_c + 1);
    for (int mc = 0; mc <= nt_c; ++mc) {
      double t = cg.time(mc);
      for (long s = 0; s < N; ++s) {
        Eigen::VectorXd x = g.point(s);
        for (int j = 0; j < n; ++j) {
          Complex v = vf->comp[j].interp(x, t);
          first_c[j](s, mc) = conjugate ? std::conj(v) : v;
        }
        Complex dv = div_field.interp(x, t);
        div_c(s, mc) = conjugate ? std::conj(dv) : dv;
        zeroth_c(s, mc) = sf->interp(x, t);
      }
    }
  }

  void sample(const Grid &g, double t, CoeffSlices &out) const {
    out.active = active;
    if (!active) return;
    const long N = g.space_points();
    const int n = g.dim();
    if (out.first.empty()) out.first.resize(n);

    int m0 = 0, m1 = 0;
    double w = 0.0;
    bool outside = false;
    if (nt_c > 0) {
      if (t < 0.0 || t > T_c) {
        outside = true;
      } else {
        double ft = t / (T_c / nt_c);
        m0 = std::min(static_cast<int>(std::floor(ft)), nt_c - 1);
        m1 = m0 + 1;
        w = ft - m0;
      }
    }
    if (outside) {
      for (int j = 0; j < n; ++j) out.first[j] = Eigen::VectorXcd::Zero(N);
      out.div_first = Eigen::VectorXcd::Zero(N);
      out.zeroth = Eigen::VectorXcd::Zero(N);
      if (is_magnetic) out.first_sq = Eigen::VectorXcd::Zero(N);
      return;
    }
    auto blend = [&](const Eigen::MatrixXcd &m) -> Eigen::VectorXcd {
      if (w == 0.0) return m.col(m0);
      return (1.0 - w) * m.col(m0) + w * m.col(m1);
    };
    for (int j = 0; j < n; ++j) out.first[j] = blend(first_c[j]);
    out.div_first = blend(div_c);
    out.zeroth = blend(zeroth_c);
    if (is_magnetic) {
      out.first_sq = Eigen::VectorXcd::Zero(N);
      for (int j = 0; j < n; ++j)
        out.first_sq += out.first[j].cwiseProduct(out.first[j]);
    }
  }
};

} // namespace

SolveResult solve_wave(const GeometryConfig &cfg, const WaveProblem &problem,
                       const SolveOptions &opts) {
  Grid g = Grid::solver(cfg);
  const int n = g.dim();
  const long N = g.space_points();
  const double dt = g.dt();
  const double cfl_dt = 0.9 * g.dx_min() / std::sqrt(static_cast<double>(n));
  if (dt > cfl_dt * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "CFL violated: dt " << dt << " > " << cfl_dt << "; need nt >= "
       << cfg.cfl_nt();
    throw std::runtime_error(os.str());
  }

  std::vector<long> strides(n, 1);
  for (int a = n - 2; a >= 0; --a) strides[a] = strides[a + 1] * g.nx[a + 1];
  std::vector<double> inv_h2(n), inv_2h(n);
  for (int a = 0; a < n; ++a) {
    inv_h2[a] = 1.0 / (g.dx(a) * g.dx(a));
    inv_2h[a] = 1.0 / (2.0 * g.dx(a));
  }

  std::vector<long> interior, boundary;
  interior.reserve(N);
  for (long s = 0; s < N; ++s) {
    Eigen::VectorXi idx = g.space_multi_index(s);
    bool inner = true;
    for (int a = 0; a < n; ++a)
      if (idx[a] == 0 || idx[a] == g.nx[a] - 1) inner = false;
    (inner ? interior : boundary).push_back(s);
  }
  std::vector<Eigen::VectorXd> coords(N);
  for (long s = 0; s < N; ++s) coords[s] = g.point(s);

  const bool forward = problem.direction == Direction::Forward;
  const bool magnetic = problem.form == WaveForm::Magnetic;

  CoeffSampler sampler;
  sampler.cp = problem.convection;
  sampler.mp = problem.magnetic;
  // Magnetic adjoint uses conj(A); convection adjoint flips the sign of the
  // transport term and adds -div(V).
  sampler.conjugate = magnetic && !forward;
  sampler.init(g);
  CoeffSlices cs;

  // rhs(u, t) on interior points, dtt u = rhs.
  Eigen::VectorXcd rhs(N);
  auto eval_rhs = [&](const Eigen::VectorXcd &u, double t) {
    sampler.sample(g, t, cs);
    for (long ii = 0; ii < static_cast<long>(interior.size()); ++ii) {
      const long s = interior[ii];
      Complex lap{0, 0}, grad_term{0, 0};
      for (int a = 0; a < n; ++a) {
        const long str = strides[a];
        lap += (u[s + str] - 2.0 * u[s] + u[s - str]) * inv_h2[a];
        if (cs.active) {
          Complex du = (u[s + str] - u[s - str]) * inv_2h[a];
          grad_term += cs.first[a][s] * du;
        }
      }
      Complex r = lap;
      if (cs.active) {
        if (magnetic) {
          // dtt u = Lap u + 2iA.grad u + i(div A)u - (A.A)u - q u
          r += Complex(0, 2) * grad_term +
               (Complex(0, 1) * cs.div_first[s] - cs.first_sq[s] - cs.zeroth[s]) * u[s];
        } else if (forward) {
          // dtt u = Lap u - V.grad u - p u
          r += -grad_term - cs.zeroth[s] * u[s];
        } else {
          // dtt v = Lap v + V.grad v + (div V) v - p v
          r += grad_term + (cs.div_first[s] - cs.zeroth[s]) * u[s];
        }
      }
      if (problem.source) r += problem.source(coords[s], t);
      rhs[s] = r;
    }
  };

  auto set_boundary = [&](Eigen::VectorXcd &u, double t) {
    for (long s : boundary)
      u[s] = problem.dirichlet ? problem.dirichlet(coords[s], t) : Complex{0, 0};
  };

  SolveResult res;
  if (opts.keep_full_field) res.field = ScalarField(g);
  BoundaryGrid bg;
  if (opts.want_trace) {
    bg = BoundaryGrid::make(g);
    res.trace = BoundaryTrace::zeros(bg, opts.trace_kind);
  }

  auto record_level = [&](int m, const Eigen::VectorXcd &u) {
    if (res.field)
      for (long s = 0; s < N; ++s) res.field->at(s, m) = u[s];
    if (res.trace) {
      for (std::size_t fi = 0; fi < bg.faces.size(); ++fi) {
        const auto &face = bg.faces[fi];
        const long str = strides[face.axis];
        const long in_dir = face.side == 0 ? str : -str;
        const double h = g.dx(face.axis);
        for (std::size_t p = 0; p < face.sidx.size(); ++p) {
          const long s = face.sidx[p];
          Complex dn;
          if (opts.trace_kind == BoundaryTrace::Kind::Dirichlet) {
            dn = u[s];
          } else {
            dn = (3.0 * u[s] - 4.0 * u[s + in_dir] + u[s + 2 * in_dir]) / (2 * h);
            if (opts.trace_kind == BoundaryTrace::Kind::MagneticNeumann &&
                problem.magnetic && !problem.magnetic->empty()) {
              double nu = face.side == 0 ? -1.0 : 1.0;
              Complex an =
                  problem.magnetic->A.comp[face.axis].interp(coords[s], g.time(m));
              if (sampler.conjugate) an = std::conj(an);
              dn += Complex(0, 1) * nu * an * u[s];
            }
          }
          res.trace->face_vals[fi](p, m) = dn;
        }
      }
    }
    if (opts.observer) opts.observer(m, u);
  };

  Eigen::VectorXcd u_a(N), u_b(N), u_c(N);  // three time levels

  auto check_finite = [&](const Eigen::VectorXcd &u, int m) {
    if (!u.allFinite()) {
      std::ostringstream os;
      os << "solver blowup: non-finite values at time step " << m;
      throw std::runtime_error(os.str());
    }
  };

  if (forward) {
    for (long s = 0; s < N; ++s)
      u_a[s] = problem.u0 ? problem.u0(coords[s]) : Complex{0, 0};
    set_boundary(u_a, 0.0);
    record_level(0, u_a);

    eval_rhs(u_a, 0.0);
    for (long s : interior) {
      Complex v1 = problem.u1 ? problem.u1(coords[s]) : Complex{0, 0};
      u_b[s] = u_a[s] + dt * v1 + 0.5 * dt * dt * rhs[s];
    }
    set_boundary(u_b, dt);
    record_level(1, u_b);

    for (int m = 1; m < g.nt; ++m) {
      eval_rhs(u_b, g.time(m));
      for (long s : interior)
        u_c[s] = 2.0 * u_b[s] - u_a[s] + dt * dt * rhs[s];
      set_boundary(u_c, g.time(m + 1));
      if (m % 25 == 0) check_finite(u_c, m + 1);
      record_level(m + 1, u_c);
      std::swap(u_a, u_b);
      std::swap(u_b, u_c);
    }
    check_finite(u_b, g.nt);
    // After the swaps u_b is level nt, u_a is nt-1, u_c is nt-2.
    res.final_u = u_b;
    res.final_ut = (3.0 * u_b - 4.0 * u_a + u_c) / (2 * dt);
  } else {
    for (long s = 0; s < N; ++s)
      u_a[s] = problem.u2 ? problem.u2(coords[s]) : Complex{0, 0};
    set_boundary(u_a, g.T);
    record_level(g.nt, u_a);

    eval_rhs(u_a, g.T);
    for (long s : interior) {
      Complex v3 = problem.u3 ? problem.u3(coords[s]) : Complex{0, 0};
      u_b[s] = u_a[s] - dt * v3 + 0.5 * dt * dt * rhs[s];
    }
    set_boundary(u_b, g.T - dt);
    record_level(g.nt - 1, u_b);

    for (int m = g.nt - 1; m > 0; --m) {
      eval_rhs(u_b, g.time(m));
      for (long s : interior)
        u_c[s] = 2.0 * u_b[s] - u_a[s] + dt * dt * rhs[s];
      set_boundary(u_c, g.time(m - 1));
      if (m % 25 == 0) check_finite(u_c, m - 1);
      record_level(m - 1, u_c);
      std::swap(u_a, u_b);
      std::swap(u_b, u_c);
    }
    check_finite(u_b, 0);
    res.initial_u = u_b;
    res.initial_ut = (-3.0 * u_b + 4.0 * u_a - u_c) / (2 * dt);
    res.final_u = Eigen::VectorXcd();
  }
  return res;
}

ResponseRecord response(const GeometryConfig &cfg, Regime regime, WaveForm form,
                        const CoefficientPair *cp, const MagneticPair *mp,
                        const ProbeInput &input) {
  if (regime != Regime::Gamma && (input.u0 || input.u1))
    throw std::runtime_error("regimes Lambda/R require zero initial data");
  WaveProblem prob;
  prob.form = form;
  prob.direction = Direction::Forward;
  prob.convection = cp;
  prob.magnetic = mp;
  prob.dirichlet = input.f;
  prob.u0 = input.u0;
  prob.u1 = input.u1;

  SolveOptions opts;
  opts.want_trace = true;
  opts.trace_kind = form == WaveForm::Magnetic
                        ? BoundaryTrace::Kind::MagneticNeumann
                        : BoundaryTrace::Kind::Neumann;
  SolveResult sr = solve_wave(cfg, prob, opts);

  ResponseRecord rec;
  rec.regime = regime;
  rec.trace = std::move(*sr.trace);
  if (regime != Regime::Lambda) {
    rec.final_u = std::move(sr.final_u);
    rec.final_ut = std::move(sr.final_ut);
  }
  return rec;
}

ResponseRecord response_difference(const GeometryConfig &cfg, Regime regime,
                                   WaveForm form, const CoefficientPair *cp1,
                                   const MagneticPair *mp1,
                                   const CoefficientPair *cp2,
                                   const MagneticPair *mp2,
                                   const ProbeInput &input) {
  ResponseRecord r1 = response(cfg, regime, form, cp1, mp1, input);
  ResponseRecord r2 = response(cfg, regime, form, cp2, mp2, input);
  ResponseRecord d;
  d.regime = regime;
  d.trace = std::move(r1.trace);
  d.trace -= r2.trace;
  if (regime != Regime::Lambda) {
    d.final_u = r1.final_u - r2.final_u;
    d.final_ut = r1.final_ut - r2.final_ut;
  }
  return d;
}

double response_k_norm(const GeometryConfig &cfg, const BoundaryGrid &bg,
                       const ResponseRecord &rec) {
  return std::sqrt(std::max(0.0, response_k_dot(cfg, bg, rec, rec).real()));
}

Complex response_k_dot(const GeometryConfig &cfg, const BoundaryGrid &bg,
                       const ResponseRecord &a, const ResponseRecord &b) {
  (void)cfg;
  Complex acc = trace_dot(bg, a.trace, b.trace);
  if (a.regime != Regime::Lambda) {
    acc += slice_h1_dot(bg.grid, a.final_u, b.final_u);
    acc += slice_dot(bg.grid, a.final_ut, b.final_ut);
  }
  return acc;
}

namespace {

Eigen::VectorXcd sample_space(const Grid &g, const SpaceFn &fn) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(g.space_points());
  if (fn)
    for (long s = 0; s < g.space_points(); ++s) v[s] = fn(g.point(s));
  return v;
}

} // namespace

Complex input_e_dot(const GeometryConfig &cfg, const BoundaryGrid &bg,
                    Regime regime, const ProbeInput &a, const ProbeInput &b) {
  (void)cfg;
  BoundaryTrace ta = BoundaryTrace::sample(bg, BoundaryTrace::Kind::Dirichlet, a.f);
  BoundaryTrace tb = BoundaryTrace::sample(bg, BoundaryTrace::Kind::Dirichlet, b.f);
  Complex acc = trace_h1_dot(bg, ta, tb);
  if (regime == Regime::Gamma) {
    acc += slice_h1_dot(bg.grid, sample_space(bg.grid, a.u0), sample_space(bg.grid, b.u0));
    acc += slice_dot(bg.grid, sample_space(bg.grid, a.u1), sample_space(bg.grid, b.u1));
  }
  return acc;
}

double input_e_norm(const GeometryConfig &cfg, const BoundaryGrid &bg,
                    Regime regime, const ProbeInput &input) {
  return std::sqrt(std::max(0.0, input_e_dot(cfg, bg, regime, input, input).real()));
}

std::vector<ProbeInput> make_dictionary(const GeometryConfig &cfg, Regime regime,
                                        int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x77d1ull);
  auto unif = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };
  const int n = cfg.dim;
  std::vector<ProbeInput> dict;
  dict.reserve(size);
  for (int i = 0; i < size; ++i) {
    const bool initial_mode = regime == Regime::Gamma && i % 4 == 3;
    ProbeInput in;
    if (!initial_mode) {
      int fi = i % (2 * n);
      int axis = fi / 2, side = fi % 2;
      Eigen::VectorXd c(n);
      for (int a = 0; a < n; ++a) {
        double lo = cfg.omega_min[a], hi = cfg.omega_max[a];
        if (a == axis)
          c[a] = side == 0 ? lo : hi;
        else
          c[a] = lo + (0.2 + 0.6 * unif()) * (hi - lo);
      }
      double wmin = (cfg.omega_max - cfg.omega_min).minCoeff();
      double w = (0.15 + 0.2 * unif()) * wmin;
      int k = 1 + i % 4;
      double T = cfg.T;
      in.f = [c, w, k, T](const Eigen::VectorXd &x, double t) {
        return Complex(std::exp(-(x - c).squaredNorm() / (w * w)) *
                           std::sin(k * M_PI * t / T),
                       0.0);
      };
      in.id = "bdry" + std::to_string(i);
    } else {
      Eigen::VectorXd c(n);
      double wmin = (cfg.omega_max - cfg.omega_min).minCoeff();
      double rho = 0.25 * wmin;
      for (int a = 0; a < n; ++a) {
        double lo = cfg.omega_min[a] + rho, hi = cfg.omega_max[a] - rho;
        c[a] = lo + unif() * (hi - lo);
      }
      bool velocity = (i / 4) % 2 == 1;
      auto bump = [c, rho](const Eigen::VectorXd &x) {
        double z2 = (x - c).squaredNorm() / (rho * rho);
        if (z2 >= 1.0) return Complex{0, 0};
        return Complex(std::exp(-1.0 / (1.0 - z2)), 0.0);
      };
      if (velocity)
        in.u1 = bump;
      else
        in.u0 = bump;
      in.id = "init" + std::to_string(i);
    }
    dict.push_back(std::move(in));
  }
  return dict;
}

double operator_distance(const GeometryConfig &cfg, Regime regime, WaveForm form,
                         const CoefficientPair *cp1, const MagneticPair *mp1,
                         const CoefficientPair *cp2, const MagneticPair *mp2,
                         const std::vector<ProbeInput> &dictionary,
                         const DistanceOptions &opts) {
  if (dictionary.empty()) throw std::runtime_error("empty dictionary");
  const int K = static_cast<int>(dictionary.size());
  BoundaryGrid bg = BoundaryGrid::make(Grid::solver(cfg));

  std::vector<ResponseRecord> diffs(K);
  std::vector<double> input_norms(K);
  parallel_for(K, opts.threads, [&](long i) {
    diffs[i] = response_difference(cfg, regime, form, cp1, mp1, cp2, mp2,
                                   dictionary[i]);
    input_norms[i] = input_e_norm(cfg, bg, regime, dictionary[i]);
  });

  double best = 0.0;
  for (int i = 0; i < K; ++i) {
    if (input_norms[i] <= 0)
      throw std::runtime_error("zero-norm dictionary input " + dictionary[i].id);
    best = std::max(best, response_k_norm(cfg, bg, diffs[i]) / input_norms[i]);
  }

  if (opts.gram_refine && K > 1) {
    Eigen::MatrixXcd Gd(K, K), Gf(K, K);
    for (int i = 0; i < K; ++i)
      for (int j = i; j < K; ++j) {
        Gd(i, j) = response_k_dot(cfg, bg, diffs[i], diffs[j]);
        Gd(j, i) = std::conj(Gd(i, j));
        Gf(i, j) = input_e_dot(cfg, bg, regime, dictionary[i], dictionary[j]);
        Gf(j, i) = std::conj(Gf(i, j));
      }
    // Small diagonal lift keeps the input Gram factorizable when entries
    // are nearly dependent.
    double scale = Gf.diagonal().real().maxCoeff();
    Gf += 1e-12 * scale * Eigen::MatrixXcd::Identity(K, K);
    Eigen::LLT<Eigen::MatrixXcd> llt(Gf);
    if (llt.info() == Eigen::Success) {
      Eigen::MatrixXcd L = llt.matrixL();
      Eigen::MatrixXcd B = L.triangularView<Eigen::Lower>().solve(Gd);
      B = L.conjugate().triangularView<Eigen::Lower>().solve(B.transpose()).transpose();
      // Power iteration on the hermitian pencil transform.
      Eigen::VectorXcd v = Eigen::VectorXcd::Ones(K).normalized();
      double lam = 0.0;
      for (int it = 0; it < opts.power_iters; ++it) {
        Eigen::VectorXcd w = B * v;
        double nl = w.norm();
        if (nl == 0.0) break;
        v = w / nl;
        double prev = lam;
        lam = std::real(v.dot(B * v));
        if (it > 0 && std::abs(lam - prev) <= opts.power_tol * std::abs(lam)) break;
      }
      if (lam > 0) best = std::max(best, std::sqrt(lam));
    }
  }
  return best;
}

ScalarField apply_operator(WaveForm form, const CoefficientPair *cp,
                           const MagneticPair *mp, const ScalarField &u) {
  const Grid &g = u.grid;
  const int n = g.dim();
  const long N = g.space_points();
  if (g.nt < 2) throw std::runtime_error("apply_operator needs nt >= 2");
  ScalarField out(g);

  std::vector<long> strides(n, 1);
  for (int a = n - 2; a >= 0; --a) strides[a] = strides[a + 1] * g.nx[a + 1];

  CoeffSampler sampler;
  sampler.cp = form == WaveForm::Convection ? cp : nullptr;
  sampler.mp = form == WaveForm::Magnetic ? mp : nullptr;
  sampler.init(g);
  CoeffSlices cs;

  const double dt = g.dt();
  for (int m = 1; m < g.nt; ++m) {
    sampler.sample(g, g.time(m), cs);
    for (long s = 0; s < N; ++s) {
      Eigen::VectorXi idx = g.space_multi_index(s);
      bool inner = true;
      for (int a = 0; a < n; ++a)
        if (idx[a] == 0 || idx[a] == g.nx[a] - 1) inner = false;
      if (!inner) continue;
      Complex utt = (u.at(s, m + 1) - 2.0 * u.at(s, m) + u.at(s, m - 1)) / (dt * dt);
      Complex lap{0, 0}, grad{0, 0};
      for (int a = 0; a < n; ++a) {
        long str = strides[a];
        double h = g.dx(a);
        lap += (u.at(s + str, m) - 2.0 * u.at(s, m) + u.at(s - str, m)) / (h * h);
        if (cs.active)
          grad += cs.first[a][s] * (u.at(s + str, m) - u.at(s - str, m)) / (2 * h);
      }
      Complex r = utt - lap;
      if (cs.active) {
        if (form == WaveForm::Magnetic) {
          r += -Complex(0, 2) * grad +
               (-Complex(0, 1) * cs.div_first[s] + cs.first_sq[s] + cs.zeroth[s]) *
                   u.at(s, m);
        } else {
          r += grad + cs.zeroth[s] * u.at(s, m);
        }
      }
      out.at(s, m) = r;
    }
  }
  return out;
}

} // namespace wdn
