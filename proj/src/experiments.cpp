#include "wdn/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <stdexcept>

namespace wdn {

const char *regime_name(Regime regime) {
  switch (regime) {
    case Regime::Lambda: return "lambda";
    case Regime::R: return "r";
    case Regime::Gamma: return "gamma";
  }
  return "?";
}

namespace {

// Smooth compactly supported bump on (-1,1), value 1 at the center.
double bump01(double u) {
  double u2 = u * u;
  if (u2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - u2));
}

struct TrigMode {
  double kx, ky, kt, amp, phase;
};

/// Shared state of the family closures: a space-time mask confined to the
/// recovery region times a small random trigonometric sum.
struct FamilyCore {
  double rho = 0.0, tlo = 0.0, thi = 0.0, wx = 0.0, wt = 0.0;
  std::vector<TrigMode> stream_modes, p_modes;
  double stream_scale = 1.0, p_scale = 1.0;

  double mask(const Eigen::VectorXd &x, double t) const {
    double tm = bump01((2.0 * t - tlo - thi) / (thi - tlo));
    if (tm == 0.0) return 0.0;
    double sm = bump01(x.norm() / rho);
    return tm * sm;
  }

  double trig(const std::vector<TrigMode> &ms, const Eigen::VectorXd &x,
              double t) const {
    double acc = 0.0;
    for (const auto &m : ms)
      acc += m.amp * std::cos(wx * (m.kx * x[0] + m.ky * x[1]) + wt * m.kt * t +
                              m.phase);
    return acc;
  }

  double stream(const Eigen::VectorXd &x, double t) const {
    double mk = mask(x, t);
    return mk == 0.0 ? 0.0 : stream_scale * mk * trig(stream_modes, x, t);
  }

  double pval(const Eigen::VectorXd &x, double t) const {
    double mk = mask(x, t);
    return mk == 0.0 ? 0.0 : p_scale * mk * trig(p_modes, x, t);
  }

  // Rotated gradient of the stream function: exactly divergence-free.
  Eigen::VectorXd vshape(const Eigen::VectorXd &x, double t) const {
    const double e = 1e-5;
    Eigen::VectorXd v(2), xp = x, xm = x;
    xp[1] += e;
    xm[1] -= e;
    v[0] = (stream(xp, t) - stream(xm, t)) / (2.0 * e);
    xp = x;
    xm = x;
    xp[0] += e;
    xm[0] -= e;
    v[1] = -(stream(xp, t) - stream(xm, t)) / (2.0 * e);
    return v;
  }
};

} // namespace

SyntheticFamily make_family(const GeometryConfig &cfg, Region region,
                            std::uint64_t seed) {
  if (cfg.dim != 2)
    throw std::runtime_error("make_family: only two spatial dimensions");

  auto core = std::make_shared<FamilyCore>();
  double hw = 0.5 * (cfg.omega_max - cfg.omega_min).minCoeff();
  core->rho = 0.85 * hw;
  const double mrg = 0.02 * cfg.T;
  switch (region) {
    case Region::IStar:
      core->tlo = 0.5 * cfg.r + core->rho + mrg;
      core->thi = cfg.T - 0.5 * cfg.r - core->rho - mrg;
      break;
    case Region::ISharp:
      core->tlo = 0.5 * cfg.r + core->rho + mrg;
      core->thi = cfg.T - mrg;
      break;
    case Region::Q:
      core->tlo = mrg;
      core->thi = cfg.T - mrg;
      break;
  }
  if (core->thi - core->tlo < 4.0 * mrg)
    throw std::runtime_error("make_family: empty time window for this geometry");
  core->wx = M_PI / core->rho;
  core->wt = M_PI / (core->thi - core->tlo);

  std::mt19937_64 rng(seed ^ 0x5eedull);
  auto unif = [&rng] { return (rng() >> 11) * 0x1.0p-53; };
  auto draw_modes = [&](int count) {
    std::vector<TrigMode> ms;
    while (static_cast<int>(ms.size()) < count) {
      TrigMode m;
      m.kx = std::floor(unif() * 3.0) - 1.0;
      m.ky = std::floor(unif() * 3.0) - 1.0;
      m.kt = std::floor(unif() * 2.0);
      m.amp = 0.5 + 0.5 * unif();
      m.phase = 2.0 * M_PI * unif();
      if (m.kx == 0.0 && m.ky == 0.0 && m.kt == 0.0) continue;
      ms.push_back(m);
    }
    return ms;
  };
  core->stream_modes = draw_modes(4);
  core->p_modes = draw_modes(4);

  // Normalize so the shapes have sup-norm close to one.
  double maxv = 0.0, maxp = 0.0;
  const int ns = 25, nts = 13;
  for (int it = 0; it <= nts; ++it) {
    double t = core->tlo + (core->thi - core->tlo) * it / nts;
    for (int i = 0; i <= ns; ++i) {
      for (int j = 0; j <= ns; ++j) {
        Eigen::VectorXd x(2);
        x[0] = -core->rho + 2.0 * core->rho * i / ns;
        x[1] = -core->rho + 2.0 * core->rho * j / ns;
        maxv = std::max(maxv, core->vshape(x, t).norm());
        maxp = std::max(maxp, std::abs(core->pval(x, t)));
      }
    }
  }
  if (maxv == 0.0 || maxp == 0.0)
    throw std::runtime_error("make_family: degenerate draw");
  core->stream_scale = 1.0 / maxv;
  core->p_scale = 1.0 / maxp;

  SyntheticFamily fam;
  fam.region = region;
  fam.seed = seed;
  fam.stream = [core](const Eigen::VectorXd &x, double t) {
    return Complex(core->stream(x, t), 0.0);
  };
  fam.p_shape = [core](const Eigen::VectorXd &x, double t) {
    return Complex(core->pval(x, t), 0.0);
  };
  fam.V_shape = [core](const Eigen::VectorXd &x, double t) {
    return core->vshape(x, t);
  };
  return fam;
}

CoefficientPair SyntheticFamily::sample_pair(const Grid &g, double delta) const {
  CoefficientPair cp;
  cp.V = VectorField::sample(g, 2, [this, delta](const Eigen::VectorXd &x, double t) {
    Eigen::VectorXd v = delta * V_shape(x, t);
    Eigen::VectorXcd out(v.size());
    for (int i = 0; i < v.size(); ++i) out[i] = Complex(v[i], 0.0);
    return out;
  });
  cp.p = ScalarField::sample(g, [this, delta](const Eigen::VectorXd &x, double t) {
    return delta * p_shape(x, t);
  });
  return cp;
}

namespace {

MagneticPair zero_medium(const Grid &g) {
  MagneticPair m;
  m.A = VectorField(g, g.dim());
  m.q = ScalarField(g);
  return m;
}

double measure_distance(const GeometryConfig &cfg, Regime regime,
                        const MagneticPair &m1, const MagneticPair &m2,
                        const std::vector<ProbeInput> &dict, int threads) {
  DistanceOptions dopt;
  dopt.threads = threads;
  return operator_distance(cfg, regime, WaveForm::Magnetic, nullptr, &m1,
                           nullptr, &m2, dict, dopt);
}

} // namespace

StabilityCurve run_stability(const GeometryConfig &cfg, Regime regime,
                             const SyntheticFamily &family,
                             const std::vector<double> &ladder,
                             const StabilityOptions &opts, std::uint64_t seed) {
  StabilityCurve curve;
  curve.regime = regime;
  curve.dictionary_id = std::string("boundary-bumps/") +
                        std::to_string(opts.dict_size) + "/" +
                        std::to_string(seed);

  std::vector<double> deltas = ladder;
  std::sort(deltas.rbegin(), deltas.rend());

  Grid cg = Grid::qr_box(cfg, opts.coeff_nx, opts.coeff_nt);
  ScalarField zero_div(cg);  // the V-shape is divergence-free by construction
  MagneticPair m2 = zero_medium(cg);
  std::vector<ProbeInput> dict =
      make_dictionary(cfg, regime, opts.dict_size, seed);

  for (double delta : deltas) {
    StabilityRung rung;
    rung.delta = delta;
    auto t_start = std::chrono::steady_clock::now();
    auto stamp = [&] {
      rung.wallclock_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                        t_start)
              .count();
    };

    if (delta == 0.0) {
      rung.flagged = true;
      rung.note = "zero perturbation";
      stamp();
      curve.rungs.push_back(rung);
      continue;
    }

    try {
      CoefficientPair cp1 = family.sample_pair(cg, delta);
      MagneticPair m1 = gauge_reduce(cp1, &zero_div);
      rung.epsilon = measure_distance(cfg, regime, m1, m2, dict, opts.threads);
      if (rung.epsilon >= 1.0) {
        rung.flagged = true;
        rung.note = "smallness gate: epsilon >= 1";
        std::cerr << "run_stability: dropping rung delta=" << delta
                  << " (epsilon=" << rung.epsilon << " >= 1)\n";
        stamp();
        curve.rungs.push_back(rung);
        continue;
      }

      ReconstructionContext ctx = ReconstructionContext::make(m1, m2);
      ReconstructionParams rp = opts.recon;
      rp.mode = opts.mode;
      rp.regime = regime;
      rp.schedule = true;
      rp.threads = opts.threads;
      PipelineResult pr = run_pipeline(cfg, ctx, rp, rung.epsilon);
      rung.alpha = pr.alpha_used;
      rung.sigma = pr.sigma_used;

      Region region = regime_region(regime);
      VectorField dV(cg, 2);
      for (int j = 0; j < 2; ++j)
        dV.comp[j].values =
            pr.vp_rec.V.comp[j].values - cp1.V.comp[j].values;
      ScalarField dp(cg);
      dp.values = pr.vp_rec.p.values - cp1.p.values;
      rung.errV = linf_region(cfg, region, dV);
      rung.errP = linf_region(cfg, region, dp);
    } catch (const std::exception &ex) {
      rung.flagged = true;
      rung.note = ex.what();
      std::cerr << "run_stability: rung delta=" << delta
                << " failed: " << ex.what() << "\n";
    }
    stamp();
    curve.rungs.push_back(rung);
  }
  return curve;
}

std::vector<double> calibrate_ladder(const GeometryConfig &cfg, Regime regime,
                                     const SyntheticFamily &family,
                                     const StabilityOptions &opts,
                                     const std::vector<double> &eps_targets,
                                     double delta_pilot, std::uint64_t seed) {
  Grid cg = Grid::qr_box(cfg, opts.coeff_nx, opts.coeff_nt);
  ScalarField zero_div(cg);
  MagneticPair m2 = zero_medium(cg);
  std::vector<ProbeInput> dict =
      make_dictionary(cfg, regime, opts.dict_size, seed);
  CoefficientPair cp1 = family.sample_pair(cg, delta_pilot);
  MagneticPair m1 = gauge_reduce(cp1, &zero_div);
  double eps = measure_distance(cfg, regime, m1, m2, dict, opts.threads);
  if (eps <= 0.0)
    throw std::runtime_error("calibrate_ladder: pilot distance is zero");
  double slope = eps / delta_pilot;
  std::vector<double> out;
  for (double target : eps_targets) out.push_back(target / slope);
  return out;
}

std::string curve_csv(const StabilityCurve &curve, bool with_wallclock) {
  std::string out = "regime,delta,epsilon,errV,errP,alpha,sigma,wallclock_s\n";
  char buf[320];
  for (const auto &r : curve.rungs) {
    std::snprintf(buf, sizeof buf,
                  "%s,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.6g\n",
                  regime_name(curve.regime), r.delta, r.epsilon, r.errV,
                  r.errP, r.alpha, r.sigma,
                  with_wallclock ? r.wallclock_s : 0.0);
    out += buf;
  }
  return out;
}

FitResult fit_log_law(const std::vector<std::pair<double, double>> &eps_err,
                      FitModel model) {
  std::vector<double> X, Y;
  for (const auto &[eps, err] : eps_err) {
    if (!(eps > 0.0 && eps < 1.0))
      throw std::invalid_argument("fit_log_law: epsilon outside (0,1)");
    double L = -std::log(eps);
    if (model == FitModel::LogLog && L <= 1.0)
      throw std::invalid_argument(
          "fit_log_law: loglog model needs epsilon < 1/e");
    if (!(err > 0.0))
      throw std::invalid_argument("fit_log_law: nonpositive error");
    X.push_back(model == FitModel::Log ? std::log(L) : std::log(std::log(L)));
    Y.push_back(std::log(err));
  }
  const long n = static_cast<long>(X.size());
  if (n < 3) throw std::invalid_argument("fit_log_law: need >= 3 rungs");

  double mx = 0.0, my = 0.0;
  for (long i = 0; i < n; ++i) { mx += X[i]; my += Y[i]; }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (long i = 0; i < n; ++i) {
    sxx += (X[i] - mx) * (X[i] - mx);
    sxy += (X[i] - mx) * (Y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_log_law: degenerate ladder");

  FitResult fit;
  fit.model = model;
  double slope = sxy / sxx;
  fit.mu = -slope;
  fit.C = std::exp(my - slope * mx);
  double ss = 0.0;
  for (long i = 0; i < n; ++i) {
    double r = Y[i] - (my + slope * (X[i] - mx));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

FitResult fit_log_law(const StabilityCurve &curve, char which, FitModel model) {
  std::vector<std::pair<double, double>> pts;
  for (const auto &r : curve.rungs)
    if (!r.flagged)
      pts.emplace_back(r.epsilon, which == 'P' ? r.errP : r.errV);
  return fit_log_law(pts, model);
}

namespace {

struct ManufacturedCase {
  WaveForm form = WaveForm::Convection;
  CoefficientPair cp;
  MagneticPair mp;
  bool has_coeff = false;
  SpaceTimeFn exact;
  WaveProblem problem;
};

} // namespace

ConvergenceResult convergence_study(const GeometryConfig &base,
                                    const std::string &case_id,
                                    const std::vector<int> &nx_levels) {
  if (nx_levels.size() < 2)
    throw std::invalid_argument("convergence_study: need >= 2 levels");
  if (base.dim != 2)
    throw std::invalid_argument("convergence_study: only two dimensions");

  const Eigen::VectorXd lo = base.omega_min, hi = base.omega_max;
  const double L0 = hi[0] - lo[0], L1 = hi[1] - lo[1];
  const double k0 = M_PI / L0, k1 = M_PI / L1;
  const double c = std::sqrt(k0 * k0 + k1 * k1);
  auto mode = [=](const Eigen::VectorXd &x) {
    return std::sin(k0 * (x[0] - lo[0])) * std::sin(k1 * (x[1] - lo[1]));
  };
  auto grad_mode = [=](const Eigen::VectorXd &x) {
    Eigen::Vector2d g;
    g[0] = k0 * std::cos(k0 * (x[0] - lo[0])) * std::sin(k1 * (x[1] - lo[1]));
    g[1] = k1 * std::sin(k0 * (x[0] - lo[0])) * std::cos(k1 * (x[1] - lo[1]));
    return g;
  };

  // Smooth coefficient closures shared by the non-free cases.
  auto v_closure = [=](const Eigen::VectorXd &x, double t) {
    Eigen::Vector2d v;
    v[0] = 0.3 * std::sin(M_PI * (x[0] - lo[0]) / L0) * (1.0 + 0.5 * std::sin(t));
    v[1] = 0.3 * std::sin(M_PI * (x[1] - lo[1]) / L1);
    return v;
  };
  auto p_closure = [=](const Eigen::VectorXd &x, double t) {
    return 0.4 * std::cos(M_PI * (x[0] - lo[0]) / L0) * std::cos(0.7 * t);
  };
  const Complex Ac(0.0, 0.25);  // constant purely imaginary potential

  ConvergenceResult res;
  res.nx_levels = nx_levels;
  for (int nx : nx_levels) {
    GeometryConfig cfg = base;
    cfg.nx = nx;
    cfg.nt = 0;
    Grid g = Grid::solver(cfg);

    ManufacturedCase mc;
    if (case_id == "free" || case_id == "convection") {
      // u = mode(x) cos(ct): the d'Alembert part vanishes identically.
      mc.exact = [=](const Eigen::VectorXd &x, double t) {
        return Complex(mode(x) * std::cos(c * t), 0.0);
      };
      mc.problem.form = WaveForm::Convection;
      mc.problem.u0 = [=](const Eigen::VectorXd &x) {
        return Complex(mode(x), 0.0);
      };
      mc.problem.u1 = [](const Eigen::VectorXd &) { return Complex(0.0, 0.0); };
      if (case_id == "convection") {
        mc.has_coeff = true;
        mc.cp.V = VectorField::sample(g, 2, [&](const Eigen::VectorXd &x, double t) {
          Eigen::Vector2d v = v_closure(x, t);
          Eigen::VectorXcd out(2);
          out << Complex(v[0], 0.0), Complex(v[1], 0.0);
          return out;
        });
        mc.cp.p = ScalarField::sample(g, [&](const Eigen::VectorXd &x, double t) {
          return Complex(p_closure(x, t), 0.0);
        });
        mc.problem.convection = &mc.cp;
        mc.problem.source = [=](const Eigen::VectorXd &x, double t) {
          Eigen::Vector2d v = v_closure(x, t), gm = grad_mode(x);
          double u = mode(x) * std::cos(c * t);
          double vg = (v[0] * gm[0] + v[1] * gm[1]) * std::cos(c * t);
          return Complex(vg + p_closure(x, t) * u, 0.0);
        };
      }
    } else if (case_id == "magnetic") {
      mc.exact = [=](const Eigen::VectorXd &x, double t) {
        return mode(x) * std::exp(Complex(0.0, -c * t));
      };
      mc.problem.form = WaveForm::Magnetic;
      mc.has_coeff = true;
      mc.mp.A = VectorField::sample(g, 2, [&](const Eigen::VectorXd &, double) {
        Eigen::VectorXcd out(2);
        out << Ac, Ac;
        return out;
      });
      mc.mp.q = ScalarField::sample(g, [&](const Eigen::VectorXd &x, double t) {
        return Complex(p_closure(x, t), 0.0);
      });
      mc.problem.magnetic = &mc.mp;
      mc.problem.u0 = [=](const Eigen::VectorXd &x) {
        return Complex(mode(x), 0.0);
      };
      mc.problem.u1 = [=](const Eigen::VectorXd &x) {
        return Complex(0.0, -c) * mode(x);
      };
      mc.problem.source = [=](const Eigen::VectorXd &x, double t) {
        Complex u = mode(x) * std::exp(Complex(0.0, -c * t));
        Eigen::Vector2d gm = grad_mode(x);
        Complex gu0 = gm[0] * std::exp(Complex(0.0, -c * t));
        Complex gu1 = gm[1] * std::exp(Complex(0.0, -c * t));
        Complex iu(0.0, 1.0);
        return -2.0 * iu * (Ac * gu0 + Ac * gu1) + 2.0 * Ac * Ac * u +
               p_closure(x, t) * u;
      };
    } else {
      throw std::invalid_argument("convergence_study: unknown case " + case_id);
    }
    mc.problem.dirichlet = mc.exact;

    const long N = g.space_points();
    std::vector<Eigen::VectorXd> coords(N);
    for (long s = 0; s < N; ++s) coords[s] = g.point(s);

    double acc = 0.0;
    SolveOptions opts;
    opts.observer = [&](int m, const Eigen::VectorXcd &u) {
      double wt = g.dt() * ((m == 0 || m == g.nt) ? 0.5 : 1.0);
      double t = g.time(m);
      for (long s = 0; s < N; ++s) {
        Complex e = u[s] - mc.exact(coords[s], t);
        acc += wt * g.space_weight(s) * std::norm(e);
      }
    };
    solve_wave(cfg, mc.problem, opts);
    res.errors.push_back(std::sqrt(acc));
  }
  for (std::size_t i = 0; i + 1 < res.errors.size(); ++i)
    res.orders.push_back(std::log2(res.errors[i] / res.errors[i + 1]));
  return res;
}

} // namespace wdn
