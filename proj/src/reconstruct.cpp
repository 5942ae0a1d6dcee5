#include "wdn/reconstruct.hpp"
#include <atomic>

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace wdn {

double ReconstructionParams::sigma_of_alpha(int dim, double a) const {
  double e1 = (dim + 3.0) / (2.0 * mu_ac * gamma_ac);
  double e2 = a * (1.0 - mu_ac) / (mu_ac * gamma_ac);
  return std::pow(a, e1) * std::exp(e2);
}

double ReconstructionParams::alpha_of_eps_A(double eps) const {
  return std::abs(std::log(eps)) / N_ac;
}

double ReconstructionParams::alpha_of_eps_q(double eps) const {
  return mu2 / N_ac * std::log(std::abs(std::log(eps)));
}

ReconstructionContext ReconstructionContext::make(const MagneticPair &m1,
                                                  const MagneticPair &m2) {
  ReconstructionContext ctx;
  ctx.m1 = &m1;
  ctx.m2 = &m2;
  const Grid &g = m1.grid();
  if (!g.same_as(m2.grid()))
    throw std::runtime_error("media live on different grids");
  ctx.A_diff = VectorField(g, m1.A.n());
  for (int j = 0; j < m1.A.n(); ++j)
    ctx.A_diff.comp[j].values = m1.A.comp[j].values - m2.A.comp[j].values;
  ctx.q_diff = ScalarField(g);
  ctx.q_diff.values = m1.q.values - m2.q.values;
  ctx.V_A = ScalarField(g);
  for (int j = 0; j < m1.A.n(); ++j)
    ctx.V_A.values += m2.A.comp[j].values.cwiseProduct(m2.A.comp[j].values) -
                      m1.A.comp[j].values.cwiseProduct(m1.A.comp[j].values);
  return ctx;
}

namespace {

Grid cache_grid(const GeometryConfig &cfg) {
  Grid g;
  g.lo = cfg.omega_min;
  g.hi = cfg.omega_max;
  g.nx = Eigen::VectorXi::Constant(cfg.dim, std::min(25, cfg.nx));
  g.T = cfg.T;
  g.nt = 48;
  return g;
}

// Per-direction probe state: amplitude caches are y-independent, so they
// are built once per omega and shared across bump centers.
struct ProbeWorkspace {
  const GeometryConfig *cfg = nullptr;
  const ReconstructionContext *ctx = nullptr;
  const ReconstructionParams *pr = nullptr;
  Eigen::VectorXd omega;
  Grid cache;
  ScalarField b1c, b2c;  ///< amplitudes of media 1 (adjoint) and 2 (forward)
  bool has_A1 = false, has_A2 = false;
  bool reduced = false;  ///< both potentials purely imaginary (gauge-reduced)

  static bool purely_imag(const VectorField &A) {
    double worst = 0.0, scale = 0.0;
    for (const auto &c : A.comp)
      for (long i = 0; i < c.values.size(); ++i) {
        worst = std::max(worst, std::abs(c.values[i].real()));
        scale = std::max(scale, std::abs(c.values[i]));
      }
    return worst <= 1e-12 * std::max(scale, 1e-300);
  }

  void build(const GeometryConfig &c, const ReconstructionContext &cx,
             const ReconstructionParams &p, const Eigen::VectorXd &w) {
    cfg = &c;
    ctx = &cx;
    pr = &p;
    omega = w;
    cache = cache_grid(c);
    has_A1 = !cx.m1->A.empty() && cx.m1->A.max_abs() > 0;
    has_A2 = !cx.m2->A.empty() && cx.m2->A.max_abs() > 0;
    reduced = purely_imag(cx.m1->A) && purely_imag(cx.m2->A);
    if (has_A1) b1c = amplitude(cx.m1->A, omega, AmplitudeVariant::B1, cache).b;
    if (has_A2) b2c = amplitude(cx.m2->A, omega, AmplitudeVariant::B2, cache).b;
  }

  Complex b1(const Eigen::VectorXd &x, double t) const {
    return has_A1 ? b1c.interp(x, t) : Complex{1.0, 0.0};
  }
  Complex b2(const Eigen::VectorXd &x, double t) const {
    return has_A2 ? b2c.interp(x, t) : Complex{1.0, 0.0};
  }

  Complex forward_ansatz(const Mollifier &phi, const Eigen::VectorXd &x,
                         double t) const {
    double bump = phi.value(x + t * omega);
    if (bump == 0.0) return {0.0, 0.0};
    double ph = pr->sigma * (x.dot(omega) + t);
    return bump * b2(x, t) * Complex(std::cos(ph), std::sin(ph));
  }
  Complex adjoint_ansatz(const Mollifier &phi, const Eigen::VectorXd &x,
                         double t) const {
    double bump = phi.value(x + t * omega);
    if (bump == 0.0) return {0.0, 0.0};
    double ph = pr->sigma * (x.dot(omega) + t);
    return bump * b1(x, t) * Complex(std::cos(ph), std::sin(ph));
  }

  /// Pairing of the measured response difference with the adjoint probe:
  /// S = int_Omega (d_ut vbar(T) - d_u vbar_t(T)) - int_Sigma d_trace vbar.
  Complex pairing(const Eigen::VectorXd &y) const {
    Mollifier phi = make_mollifier(y, pr->h);
    ProbeInput input;
    input.f = [this, phi](const Eigen::VectorXd &x, double t) {
      return forward_ansatz(phi, x, t);
    };
    if (pr->regime == Regime::Gamma) {
      input.u0 = [this, phi](const Eigen::VectorXd &x) {
        return forward_ansatz(phi, x, 0.0);
      };
      const double e = 1e-5;
      input.u1 = [this, phi, e](const Eigen::VectorXd &x) {
        return (-3.0 * forward_ansatz(phi, x, 0.0) +
                4.0 * forward_ansatz(phi, x, e) - forward_ansatz(phi, x, 2 * e)) /
               (2 * e);
      };
    }

    ResponseRecord d = response_difference(*cfg, pr->regime, WaveForm::Magnetic,
                                           nullptr, ctx->m1, nullptr, ctx->m2, input);
    Grid g = Grid::solver(*cfg);
    BoundaryGrid bg = BoundaryGrid::make(g);
    BoundaryTrace vtr = BoundaryTrace::sample(
        bg, BoundaryTrace::Kind::Dirichlet,
        [this, phi](const Eigen::VectorXd &x, double t) {
          return adjoint_ansatz(phi, x, t);
        });
    Complex S = -trace_dot(bg, d.trace, vtr);
    if (pr->regime != Regime::Lambda) {
      const long N = g.space_points();
      Eigen::VectorXcd vT(N), vTt(N);
      const double e = 1e-5 * cfg->T;
      for (long s = 0; s < N; ++s) {
        Eigen::VectorXd x = g.point(s);
        vT[s] = adjoint_ansatz(phi, x, cfg->T);
        vTt[s] = (3.0 * vT[s] - 4.0 * adjoint_ansatz(phi, x, cfg->T - e) +
                  adjoint_ansatz(phi, x, cfg->T - 2 * e)) /
                 (2 * e);
      }
      S += slice_dot(g, d.final_ut, vT) - slice_dot(g, d.final_u, vTt);
    }
    return S;
  }

  /// The A-dependent pairing contribution rebuilt from the reconstructed
  /// difference field: int_Q [2i A_rec.grad(u2) + V_A u2] vbar.
  Complex a_terms(const Eigen::VectorXd &y, const VectorField &A_rec) const {
    Mollifier phi = make_mollifier(y, pr->h);
    ScalarField E2(cache);  // envelope phi(x+tw) b2
    const long N = cache.space_points();
    for (int m = 0; m <= cache.nt; ++m) {
      double t = cache.time(m);
      for (long s = 0; s < N; ++s) {
        double bump = phi.value(cache.point(s) + t * omega);
        if (bump != 0.0) E2.at(s, m) = bump * b2(cache.point(s), t);
      }
    }
    std::vector<ScalarField> dE2;
    for (int a = 0; a < cache.dim(); ++a) dE2.push_back(derivative(E2, a));

    const Complex iu{0.0, 1.0};
    Complex acc{0.0, 0.0};
    for (int m = 0; m <= cache.nt; ++m) {
      double wt = cache.dt();
      if (m == 0 || m == cache.nt) wt *= 0.5;
      double t = cache.time(m);
      for (long s = 0; s < N; ++s) {
        Complex e2 = E2.at(s, m);
        Eigen::VectorXd x = cache.point(s);
        double bump = phi.value(x + t * omega);
        if (bump == 0.0) continue;
        Eigen::VectorXcd ar = A_rec.interp(x, t);
        Eigen::VectorXcd a2 =
            has_A2 ? ctx->m2->A.interp(x, t)
                   : Eigen::VectorXcd::Zero(cache.dim()).eval();
        Complex va{0.0, 0.0};  // V_A from A_rec: A2.A2 - (A2+A_rec).(A2+A_rec)
        Complex grad_term{0.0, 0.0};
        for (int j = 0; j < cache.dim(); ++j) {
          va -= 2.0 * a2[j] * ar[j] + ar[j] * ar[j];
          grad_term += ar[j] * (iu * pr->sigma * omega[j] * e2 + dE2[j].at(s, m));
        }
        Complex integrand = (2.0 * iu * grad_term + va * e2) * bump *
                            std::conj(b1(x, t));
        acc += wt * cache.space_weight(s) * integrand;
      }
    }
    return acc;
  }
};

bool ray_hits_box(const Eigen::VectorXd &y, const Eigen::VectorXd &omega,
                  const Eigen::VectorXd &lo, const Eigen::VectorXd &hi, double T,
                  double margin) {
  double t0 = 0.0, t1 = T;
  for (int i = 0; i < y.size() && t0 <= t1; ++i) {
    double l = lo[i] - margin, h = hi[i] + margin;
    if (std::abs(omega[i]) < 1e-14) {
      if (y[i] < l || y[i] > h) return false;
      continue;
    }
    double a = (y[i] - h) / omega[i];
    double b = (y[i] - l) / omega[i];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
  }
  return t0 <= t1;
}

RayDatum probe_datum_A(const GeometryConfig &cfg, const ReconstructionContext &ctx,
                       const ReconstructionParams &pr, const ProbeWorkspace &ws,
                       const Eigen::VectorXd &y) {
  RayDatum d;
  d.y = y;
  d.omega = ws.omega;
  ProbeSpec spec;
  spec.omega = ws.omega;
  spec.y = y;
  spec.sigma = pr.sigma;
  spec.h = pr.h;
  SupportReport sup = check_probe_support(cfg, spec, pr.regime);
  if (!sup.ok) {
    d.valid = false;
    return d;
  }
  Complex S = ws.pairing(y);
  Complex b_est = 1.0 + S / Complex(0.0, -2.0 * pr.sigma);
  if (b_est.real() <= 0.0) {
    d.valid = false;
    return d;
  }
  d.value = Complex(0.0, 1.0) * std::log(b_est);
  // For gauge-reduced pairs the ray values of omega.(A1-A2) are purely
  // imaginary; the real part of the estimate is a phase artifact of the
  // O(1/sigma) envelope terms and carries no information.
  if (pr.hermitian_reduce && ws.reduced) d.value = Complex(0.0, d.value.imag());
  d.err_tag = 1.0 / pr.sigma;
  (void)ctx;
  return d;
}

} // namespace

RayDatum estimate_ray_A(const GeometryConfig &cfg, const ReconstructionContext &ctx,
                        const ReconstructionParams &params,
                        const Eigen::VectorXd &y, const Eigen::VectorXd &omega) {
  if (params.mode == RecoveryMode::Direct) {
    RayDatum d;
    d.y = y;
    d.omega = omega;
    for (int j = 0; j < ctx.A_diff.n(); ++j)
      d.value += omega[j] * ray_transform(ctx.A_diff.comp[j], y, omega);
    return d;
  }
  ProbeWorkspace ws;
  ws.build(cfg, ctx, params, omega);
  return probe_datum_A(cfg, ctx, params, ws, y);
}

RayDatum estimate_ray_q(const GeometryConfig &cfg, const ReconstructionContext &ctx,
                        const ReconstructionParams &params, const VectorField &A_rec,
                        const Eigen::VectorXd &y, const Eigen::VectorXd &omega) {
  RayDatum d;
  d.y = y;
  d.omega = omega;
  if (params.mode == RecoveryMode::Direct) {
    d.value = ray_transform(ctx.q_diff, y, omega);
    return d;
  }
  ProbeSpec spec;
  spec.omega = omega;
  spec.y = y;
  spec.sigma = params.sigma;
  spec.h = params.h;
  SupportReport sup = check_probe_support(cfg, spec, params.regime);
  if (!sup.ok) {
    d.valid = false;
    return d;
  }
  ProbeWorkspace ws;
  ws.build(cfg, ctx, params, omega);
  Complex S = ws.pairing(y);
  d.value = ws.a_terms(y, A_rec) - S;
  d.err_tag = std::pow(params.sigma, params.delta) * 0.0 + 1.0 / params.sigma;
  return d;
}

namespace {

struct NodePlan {
  FrequencyGrid freq;
  std::vector<char> primary;
  std::vector<long> mirror;
};

NodePlan plan_nodes(const FrequencyGrid &freq, bool hermitian) {
  NodePlan plan;
  plan.freq = freq;
  const long nn = static_cast<long>(freq.nodes.size());
  plan.primary.assign(nn, 1);
  plan.mirror.assign(nn, -1);
  for (long i = 0; i < nn; ++i) {
    for (long j = 0; j < nn; ++j) {
      if ((freq.nodes[i].xi + freq.nodes[j].xi).norm() < 1e-9 &&
          std::abs(freq.nodes[i].tau + freq.nodes[j].tau) < 1e-9) {
        plan.mirror[i] = j;
        break;
      }
    }
  }
  if (!hermitian) return plan;
  for (long i = 0; i < nn; ++i) {
    const auto &nd = freq.nodes[i];
    bool pos = nd.tau > 1e-12;
    if (std::abs(nd.tau) <= 1e-12) {
      for (int a = 0; a < nd.xi.size(); ++a) {
        if (std::abs(nd.xi[a]) > 1e-12) {
          pos = nd.xi[a] > 0;
          break;
        }
      }
    }
    if (!pos && plan.mirror[i] >= 0) plan.primary[i] = 0;
  }
  return plan;
}

} // namespace

VectorField invert_A(const RayDataSet &data, const Grid &out_grid, bool hermitian) {
  const long nn = static_cast<long>(data.freq.nodes.size());
  const int npairs = static_cast<int>(data.pairs.size());
  CurlSpectrum spec;
  spec.freq = data.freq;
  spec.pairs = data.pairs;
  spec.beta.assign(npairs, Eigen::VectorXcd::Zero(nn));
  for (int p = 0; p < npairs; ++p) {
    for (long i = 0; i < nn; ++i) {
      const auto &nd = data.freq.nodes[i];
      if (data.measured[i]) {
        Complex wa = spatial_dft(data.ygrid, data.values[i * npairs + p], nd.xi);
        spec.beta[p][i] = beta_hat_from_slice(wa, nd.xi, nd.tau, data.pairs[p].first,
                                              data.pairs[p].second);
      }
    }
    if (hermitian) {
      for (long i = 0; i < nn; ++i)
        if (!data.measured[i] && data.mirror[i] >= 0)
          spec.beta[p][i] = std::conj(spec.beta[p][data.mirror[i]]);
    }
  }
  std::vector<Eigen::VectorXcd> a_hat = invert_divfree(spec);
  VectorField out(out_grid, static_cast<int>(a_hat.size()));
  for (std::size_t k = 0; k < a_hat.size(); ++k)
    out.comp[k] = synthesize_nodes(data.freq, a_hat[k], out_grid);
  return out;
}

ScalarField invert_q(const RayDataSet &data, const Grid &out_grid, bool hermitian) {
  const long nn = static_cast<long>(data.freq.nodes.size());
  Eigen::VectorXcd q_hat = Eigen::VectorXcd::Zero(nn);
  for (long i = 0; i < nn; ++i)
    if (data.measured[i])
      q_hat[i] = spatial_dft(data.ygrid, data.values[i], data.freq.nodes[i].xi);
  if (hermitian) {
    for (long i = 0; i < nn; ++i)
      if (!data.measured[i] && data.mirror[i] >= 0)
        q_hat[i] = std::conj(q_hat[data.mirror[i]]);
  }
  return synthesize_nodes(data.freq, q_hat, out_grid);
}

CoefficientPair recover_Vp(const VectorField &A_rec, const ScalarField &q_rec,
                           double imag_tol) {
  const Grid &g = A_rec.grid();
  CoefficientPair cp;
  cp.V = VectorField(g, A_rec.n());
  double worst = 0.0;
  for (int j = 0; j < A_rec.n(); ++j) {
    for (long i = 0; i < A_rec.comp[j].values.size(); ++i) {
      Complex a = A_rec.comp[j].values[i];
      worst = std::max(worst, std::abs(a.real()));
      cp.V.comp[j].values[i] = Complex(2.0 * a.imag(), 0.0);
    }
  }
  if (worst > imag_tol)
    std::cerr << "recover_Vp: discarding real part of A (max " << worst << ")\n";
  ScalarField div = divergence(cp.V);
  cp.p = ScalarField(g);
  for (long i = 0; i < cp.p.values.size(); ++i) {
    Complex vsq{0.0, 0.0};
    for (int j = 0; j < cp.V.n(); ++j) {
      Complex v = cp.V.comp[j].values[i];
      vsq += v * v;
    }
    cp.p.values[i] =
        Complex((q_rec.values[i] - 0.25 * vsq + 0.5 * div.values[i]).real(), 0.0);
  }
  return cp;
}

PipelineResult run_pipeline(const GeometryConfig &cfg, const ReconstructionContext &ctx,
                            ReconstructionParams params, double eps_hint) {
  const Grid &fg = ctx.A_diff.grid();
  const int n = fg.dim();

  double alpha_A = params.alpha, alpha_q = params.alpha;
  if (params.schedule && eps_hint > 0.0 && eps_hint < 1.0) {
    alpha_A = params.alpha_of_eps_A(eps_hint);
    alpha_q = std::max(0.5, params.alpha_of_eps_q(eps_hint));
    params.sigma = std::min(params.sigma_of_alpha(n, alpha_A),
                            0.95 * max_resolved_sigma(Grid::solver(cfg)));
  }
  params.sigma = std::min(params.sigma, 0.95 * max_resolved_sigma(Grid::solver(cfg)));

  Grid ygrid = ray_support_grid(fg.lo, fg.hi, fg.T, params.dy);
  Eigen::VectorXd box_len(n);
  for (int i = 0; i < n; ++i) box_len[i] = ygrid.hi[i] - ygrid.lo[i];
  double t_len = params.len_t > 0 ? params.len_t : box_len[0];
  if (params.len_x > 0) box_len.setConstant(params.len_x);

  PipelineResult res;
  res.alpha_used = alpha_A;
  res.sigma_used = params.sigma;

  // ---- stage A: ray data for every node/pair direction ----
  RayDataSet &dA = res.ray_A;
  dA.freq = FrequencyGrid::build(box_len, t_len, alpha_A);
  dA.ygrid = ygrid;
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) dA.pairs.emplace_back(j, k);
  const int npairs = static_cast<int>(dA.pairs.size());
  const long nn = static_cast<long>(dA.freq.nodes.size());
  const long ny = ygrid.space_points();

  NodePlan plan = plan_nodes(dA.freq, params.hermitian_reduce);
  dA.measured.assign(nn, 0);
  dA.mirror = plan.mirror;
  dA.omegas.assign(nn * npairs, Eigen::VectorXd());
  dA.values.assign(nn * npairs, Eigen::VectorXcd::Zero(ny));

  // Probe-mode pairings are reused by the q stage: keyed by (node, pair, y).
  std::vector<Eigen::VectorXcd> pairings(nn * npairs);
  const bool probe = params.mode == RecoveryMode::Probe;
  std::atomic<long> invalid{0}, solves{0};

  for (long i = 0; i < nn; ++i) {
    if (!plan.primary[i]) continue;
    dA.measured[i] = 1;
    const auto &nd = dA.freq.nodes[i];
    for (int p = 0; p < npairs; ++p) {
      Eigen::VectorXd omega =
          slice_direction(nd.xi, nd.tau, dA.pairs[p].first, dA.pairs[p].second);
      dA.omegas[i * npairs + p] = omega;

      ProbeWorkspace ws;
      if (probe) ws.build(cfg, ctx, params, omega);
      if (probe) pairings[i * npairs + p] = Eigen::VectorXcd::Zero(ny);

      std::vector<long> active;
      for (long s = 0; s < ny; ++s)
        if (ray_hits_box(ygrid.point(s), omega, fg.lo, fg.hi, fg.T,
                         probe ? params.h : 0.0))
          active.push_back(s);

      parallel_for(static_cast<long>(active.size()), params.threads, [&](long ai) {
        long s = active[ai];
        Eigen::VectorXd y = ygrid.point(s);
        if (!probe) {
          Complex v{0.0, 0.0};
          for (int j = 0; j < n; ++j)
            v += omega[j] * ray_transform(ctx.A_diff.comp[j], y, omega);
          dA.values[i * npairs + p][s] = v;
          return;
        }
        ProbeSpec spec;
        spec.omega = omega;
        spec.y = y;
        spec.sigma = params.sigma;
        spec.h = params.h;
        if (!check_probe_support(cfg, spec, params.regime).ok) {
          ++invalid;
          return;
        }
        Complex S = ws.pairing(y);
        pairings[i * npairs + p][s] = S;
        solves += 2;
        Complex b_est = 1.0 + S / Complex(0.0, -2.0 * params.sigma);
        if (b_est.real() <= 0.0) {
          ++invalid;
          return;
        }
        dA.values[i * npairs + p][s] = Complex(0.0, 1.0) * std::log(b_est);
      });
    }
  }
  dA.invalid_count = invalid;
  dA.solves = solves;
  res.A_rec = invert_A(dA, fg, params.hermitian_reduce);

  // ---- stage q: reuse the measured pairings on the smaller node ball ----
  RayDataSet &dq = res.ray_q;
  dq.freq = FrequencyGrid::build(box_len, t_len, params.schedule ? alpha_q : alpha_A);
  dq.ygrid = ygrid;
  const long nq = static_cast<long>(dq.freq.nodes.size());
  NodePlan qplan = plan_nodes(dq.freq, params.hermitian_reduce);
  dq.measured.assign(nq, 0);
  dq.mirror = qplan.mirror;
  dq.values.assign(nq, Eigen::VectorXcd::Zero(ny));
  dq.omegas.assign(nq, Eigen::VectorXd());

  auto find_A_node = [&](const FreqNode &nd) -> long {
    for (long i = 0; i < nn; ++i)
      if ((dA.freq.nodes[i].xi - nd.xi).norm() < 1e-9 &&
          std::abs(dA.freq.nodes[i].tau - nd.tau) < 1e-9)
        return i;
    return -1;
  };

  for (long i = 0; i < nq; ++i) {
    if (!qplan.primary[i]) continue;
    dq.measured[i] = 1;
    const auto &nd = dq.freq.nodes[i];
    // Any direction with omega.xi = tau works for the scalar slice; reuse
    // the first pair's data from the A stage.
    long ia = find_A_node(nd);
    Eigen::VectorXd omega;
    if (ia >= 0 && dA.measured[ia]) {
      omega = dA.omegas[ia * npairs + 0];
    } else {
      int pj = 0, pk = 1;
      for (const auto &[j, k] : dA.pairs)
        if (zeta_norm(nd.xi, j, k) > 0) { pj = j; pk = k; break; }
      omega = slice_direction(nd.xi, nd.tau, pj, pk);
    }
    dq.omegas[i] = omega;

    ProbeWorkspace ws;
    if (probe) ws.build(cfg, ctx, params, omega);

    for (long s = 0; s < ny; ++s) {
      Eigen::VectorXd y = ygrid.point(s);
      if (!ray_hits_box(y, omega, fg.lo, fg.hi, fg.T, probe ? params.h : 0.0))
        continue;
      if (!probe) {
        dq.values[i][s] = ray_transform(ctx.q_diff, y, omega);
        continue;
      }
      ProbeSpec spec;
      spec.omega = omega;
      spec.y = y;
      spec.sigma = params.sigma;
      spec.h = params.h;
      if (!check_probe_support(cfg, spec, params.regime).ok) continue;
      Complex S;
      if (ia >= 0 && dA.measured[ia] && pairings[ia * npairs + 0].size() > 0)
        S = pairings[ia * npairs + 0][s];
      else
        S = ws.pairing(y);
      dq.values[i][s] = ws.a_terms(y, res.A_rec) - S;
    }
  }
  res.q_rec = invert_q(dq, fg, params.hermitian_reduce);
  res.vp_rec = recover_Vp(res.A_rec, res.q_rec);
  return res;
}

double linf_region(const GeometryConfig &cfg, Region region, const ScalarField &f) {
  double best = 0.0;
  const Grid &g = f.grid;
  for (int m = 0; m <= g.nt; ++m) {
    double t = g.time(m);
    for (long s = 0; s < g.space_points(); ++s)
      if (in_region(cfg, region, g.point(s), t))
        best = std::max(best, std::abs(f.at(s, m)));
  }
  return best;
}

double linf_region(const GeometryConfig &cfg, Region region, const VectorField &f) {
  double best = 0.0;
  for (const auto &c : f.comp) best = std::max(best, linf_region(cfg, region, c));
  return best;
}

} // namespace wdn
