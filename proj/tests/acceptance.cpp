// Acceptance harness: nine pinned criteria, one PASS/FAIL line each.
// Exit code is the number of failed criteria.

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <random>

#include "wdn/experiments.hpp"

using namespace wdn;

namespace {

int g_failures = 0;

void report(int idx, const char *name, bool ok, const std::string &detail) {
  std::printf("[%s] %d. %s: %s\n", ok ? "PASS" : "FAIL", idx, name,
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double unif(std::mt19937_64 &rng) { return (rng() >> 11) * 0x1.0p-53; }

std::string fmt(const char *pattern, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, pattern);
  std::vsnprintf(buf, sizeof(buf), pattern, ap);
  va_end(ap);
  return buf;
}

double rel_l2(const Eigen::VectorXcd &a, const Eigen::VectorXcd &b) {
  return (a - b).norm() / b.norm();
}

// smooth medium with a purely imaginary, exactly divergence-free potential
// (rotated gradient of a gaussian stream function) and a real q
MagneticPair gauss_medium(const Grid &cg, double amp, double width) {
  auto stream = [width](const Eigen::VectorXd &x, double t) {
    double win = std::sin(M_PI * t / 2.0);
    return std::exp(-x.squaredNorm() / (width * width)) * win * win;
  };
  MagneticPair mp;
  mp.A = VectorField::sample(cg, 2, [&](const Eigen::VectorXd &x, double t) {
    const double e = 1e-5;
    Eigen::Vector2d xp = x, xm = x;
    Eigen::VectorXcd v(2);
    xp[1] += e; xm[1] -= e;
    double v0 = (stream(xp, t) - stream(xm, t)) / (2 * e);
    xp = x; xm = x; xp[0] += e; xm[0] -= e;
    double v1 = -(stream(xp, t) - stream(xm, t)) / (2 * e);
    v << Complex(0.0, 0.5 * amp * v0), Complex(0.0, 0.5 * amp * v1);
    return v;
  });
  mp.q = ScalarField::sample(cg, [&](const Eigen::VectorXd &x, double t) {
    return Complex(0.6 * amp * stream(x, t), 0.0);
  });
  return mp;
}

// ---------------------------------------------------------------- criterion 1

// The two operator forms differ only through the divergence term, so the
// study supplies the analytic divergence to the reduction and measures how
// fast the stencil divergence inside the magnetic form catches up.
void criterion_1() {
  std::mt19937_64 rng(101);
  const std::vector<int> levels = {32, 64, 128};
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(2, -0.3);
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(2, 0.3);

  double worst_order = 1e9, worst_rel = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    double a0 = 0.2 + 0.6 * unif(rng), a1 = 0.2 + 0.6 * unif(rng);
    double p0 = 0.3 + unif(rng);
    int k0 = 2 + static_cast<int>(3 * unif(rng));
    int k1 = 2 + static_cast<int>(3 * unif(rng));
    int k2 = 1 + static_cast<int>(3 * unif(rng));
    int k3 = 2 + static_cast<int>(3 * unif(rng));
    double ph = 2 * M_PI * unif(rng);

    auto Vfn = [=](const Eigen::VectorXd &x, double t) {
      Eigen::VectorXcd v(2);
      v << Complex(a0 * std::sin(k0 * x[0] + ph) * std::cos(k1 * x[1]) *
                       std::cos(t), 0.0),
          Complex(a1 * std::cos(k2 * x[0]) * std::sin(k3 * x[1] - ph), 0.0);
      return v;
    };
    auto divfn = [=](const Eigen::VectorXd &x, double t) {
      return Complex(a0 * k0 * std::cos(k0 * x[0] + ph) * std::cos(k1 * x[1]) *
                             std::cos(t) +
                         a1 * k3 * std::cos(k2 * x[0]) *
                             std::cos(k3 * x[1] - ph),
                     0.0);
    };
    auto pfn = [=](const Eigen::VectorXd &x, double t) {
      return Complex(p0 * std::cos(k1 * x[0] * x[1]) + 0.2 * t, 0.0);
    };
    auto ufn = [=](const Eigen::VectorXd &x, double t) {
      return Complex(std::sin(k0 * x[0] - k2 * t + ph),
                     std::cos(k3 * x[1] + k1 * t));
    };

    std::vector<double> errs, dxs;
    for (int nx : levels) {
      Grid g = Grid::box(lo, hi, nx, 1.0, 16);
      CoefficientPair cp;
      cp.V = VectorField::sample(g, 2, Vfn);
      cp.p = ScalarField::sample(g, pfn);
      ScalarField divV = ScalarField::sample(g, divfn);
      MagneticPair mp = gauge_reduce(cp, &divV);
      ScalarField u = ScalarField::sample(g, ufn);
      ScalarField Lu = apply_operator(WaveForm::Convection, &cp, nullptr, u);
      ScalarField Hu = apply_operator(WaveForm::Magnetic, nullptr, &mp, u);
      errs.push_back(rel_l2(Hu.values, Lu.values));
      dxs.push_back(0.6 / (nx - 1));
    }
    for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
      double order =
          std::log(errs[i] / errs[i + 1]) / std::log(dxs[i] / dxs[i + 1]);
      worst_order = std::min(worst_order, order);
    }
    worst_rel = std::max(worst_rel, errs.back());
  }
  bool ok = worst_order >= 1.9 && worst_rel <= 1e-3;
  report(1, "gauge reduction identity",
         ok,
         fmt("min order %.3f (>= 1.9), max rel at nx=128 %.3g (<= 1e-3)",
             worst_order, worst_rel));
}

// ---------------------------------------------------------------- criterion 2

void criterion_2() {
  GeometryConfig base = GeometryConfig::square(0.9, 2.0, 0.3, 64);
  SyntheticFamily fam = make_family(base, Region::IStar, 21);

  bool ok = true;
  std::string detail;
  for (Regime regime : {Regime::Lambda, Regime::R, Regime::Gamma}) {
    std::vector<ProbeInput> dict = make_dictionary(base, regime, 32, 77);
    std::vector<double> gap;
    for (int nx : {64, 128}) {
      GeometryConfig cfg = base;
      cfg.nx = nx;
      // coefficient grid refined with the solver grid so the agreement
      // floor shrinks under refinement too
      Grid cg = Grid::qr_box(cfg, nx / 2 + 1, nx / 2 + 1);
      CoefficientPair cp1 = fam.sample_pair(cg, 0.5);
      CoefficientPair cp2;
      cp2.V = VectorField(cg, 2);
      cp2.p = ScalarField(cg);
      // the family velocity is an exact rotated gradient: analytic div = 0
      ScalarField zero_div(cg);
      MagneticPair mp1 = gauge_reduce(cp1, &zero_div);
      MagneticPair mp2 = gauge_reduce(cp2, &zero_div);
      double dc = operator_distance(cfg, regime, WaveForm::Convection, &cp1,
                                    nullptr, &cp2, nullptr, dict);
      double dm = operator_distance(cfg, regime, WaveForm::Magnetic, nullptr,
                                    &mp1, nullptr, &mp2, dict);
      gap.push_back(std::abs(dm - dc) / std::max(dc, dm));
    }
    bool r_ok = gap[1] <= 0.05 && gap[1] < gap[0];
    ok = ok && r_ok;
    detail += fmt("%s%s gap %.3g -> %.3g", detail.empty() ? "" : ", ",
                  regime_name(regime), gap[0], gap[1]);
  }
  report(2, "form-agnostic operator distance", ok,
         detail + " (final <= 0.05, improving)");
}

// ---------------------------------------------------------------- criterion 3

void criterion_3() {
  // short horizon and fine grid keep the solver's dispersion floor well
  // under the true remainder at sigma = 40; the narrow bump raises the
  // remainder constant (~ h^-2) above that floor
  GeometryConfig cfg = GeometryConfig::square(0.9, 1.1, 0.3, 256);
  Grid cg = Grid::box(Eigen::VectorXd::Constant(2, -0.45),
                      Eigen::VectorXd::Constant(2, 0.45), 41, cfg.T, 36);
  MagneticPair mp = gauss_medium(cg, 0.5, 0.16);

  ProbeSpec spec;
  spec.omega = Eigen::Vector2d(1.0, 0.0);
  spec.y = Eigen::Vector2d(0.5, 0.0);
  spec.h = 0.12;

  bool ok = true;
  std::string detail;
  for (const MagneticPair *medium :
       {static_cast<const MagneticPair *>(nullptr),
        static_cast<const MagneticPair *>(&mp)}) {
    std::vector<double> sr, gr;
    for (double sigma : {10.0, 20.0, 40.0}) {
      spec.sigma = sigma;
      RemainderReport rep = remainder_report(cfg, medium, spec);
      sr.push_back(rep.sigma_r_l2);
      gr.push_back(rep.grad_r_l2);
    }
    double flat = *std::max_element(sr.begin(), sr.end()) /
                  *std::min_element(sr.begin(), sr.end());
    double growth = gr.back() / gr.front();
    ok = ok && flat <= 4.0 && growth <= 2.0;
    detail += fmt("%s%s: sigma||r|| spread %.2f, grad ratio %.2f",
                  detail.empty() ? "" : "; ", medium ? "coupled" : "free",
                  flat, growth);
  }
  report(3, "oscillatory remainder bound", ok,
         detail + " (spread <= 4, ratio <= 2)");
}

// ---------------------------------------------------------------- criterion 4

struct GaussAtom {
  Eigen::Vector2d x0, k;
  double s = 0.06, st = 0.07, t0 = 0.7, nu = 1.0, amp = 1.0, phase = 0.0;

  Complex operator()(const Eigen::VectorXd &x, double t) const {
    double g = std::exp(-(x - x0).squaredNorm() / (2 * s * s) -
                        (t - t0) * (t - t0) / (2 * st * st));
    return amp * g * std::exp(Complex(0.0, k.dot(x) + nu * t + phase));
  }
  Complex hat(const Eigen::VectorXd &xi, double tau) const {
    Eigen::Vector2d dxi = xi - k;
    double dtau = tau - nu;
    double a = 2.0 * M_PI * s * s * std::sqrt(2.0 * M_PI) * st *
               std::exp(-0.5 * s * s * dxi.squaredNorm() -
                        0.5 * st * st * dtau * dtau);
    return amp * a * std::exp(Complex(0.0, phase - x0.dot(dxi) - t0 * dtau));
  }
};

void criterion_4() {
  std::mt19937_64 rng(404);
  double worst = 0.0;
  int queries = 0;
  for (int field = 0; field < 10; ++field) {
    std::vector<GaussAtom> atoms(2);
    for (auto &a : atoms) {
      a.x0 = Eigen::Vector2d(0.24 * unif(rng) - 0.12, 0.24 * unif(rng) - 0.12);
      a.k = Eigen::Vector2d(8.0 * unif(rng) - 4.0, 8.0 * unif(rng) - 4.0);
      a.nu = 4.0 * unif(rng) - 2.0;
      a.t0 = 0.55 + 0.3 * unif(rng);
      a.amp = 0.5 + unif(rng);
      a.phase = 2.0 * M_PI * unif(rng);
    }
    SampledField f;
    f.lo = Eigen::VectorXd::Constant(2, -0.55);
    f.hi = Eigen::VectorXd::Constant(2, 0.55);
    f.T = 1.4;
    f.fn = [&](const Eigen::VectorXd &x, double t) {
      return atoms[0](x, t) + atoms[1](x, t);
    };
    for (int qi = 0; qi < 5; ++qi) {
      SliceQuery q;
      double ang = 2.0 * M_PI * unif(rng);
      double len = 0.8 + 4.2 * unif(rng);
      q.xi = len * Eigen::Vector2d(std::cos(ang), std::sin(ang));
      q.tau = (unif(rng) - 0.5) * 0.98 * len;
      Eigen::VectorXd omega = slice_direction(q.xi, q.tau, 0, 1);
      Complex num = fourier_slice(f, q, omega, 0.03, 0.005);
      Complex exact = atoms[0].hat(q.xi, q.tau) + atoms[1].hat(q.xi, q.tau);
      worst = std::max(worst, std::abs(num - exact) / std::abs(exact));
      ++queries;
    }
  }
  report(4, "fourier slice identity", worst <= 1e-6 && queries == 50,
         fmt("max rel error %.3g over %d queries (<= 1e-6)", worst, queries));
}

// ---------------------------------------------------------------- criterion 5

void criterion_5() {
  // Fourier-domain round trip on random div-free spectra.
  std::mt19937_64 rng(505);
  FrequencyGrid fg = FrequencyGrid::build(Eigen::VectorXd::Constant(2, 4.6),
                                          4.6, 4.0);
  const long nn = static_cast<long>(fg.nodes.size());
  CurlSpectrum spec;
  spec.freq = fg;
  spec.pairs = {{0, 1}};
  spec.beta.assign(1, Eigen::VectorXcd(nn));
  std::vector<Eigen::VectorXcd> a_true(2, Eigen::VectorXcd(nn));
  for (long i = 0; i < nn; ++i) {
    const Eigen::VectorXd &xi = fg.nodes[i].xi;
    Complex c(2 * unif(rng) - 1, 2 * unif(rng) - 1);
    a_true[0][i] = -c * xi[1];
    a_true[1][i] = c * xi[0];
    spec.beta[0][i] = xi[0] * a_true[1][i] - xi[1] * a_true[0][i];
  }
  std::vector<Eigen::VectorXcd> a_rec = invert_divfree(spec);
  double fourier_err = std::max((a_rec[0] - a_true[0]).cwiseAbs().maxCoeff(),
                                (a_rec[1] - a_true[1]).cwiseAbs().maxCoeff());

  // Physical round trip against the self-filtered truth.
  GeometryConfig cfg = GeometryConfig::square(0.9, 2.0, 0.3, 32);
  Grid cg = Grid::qr_box(cfg, 49, 48);
  MagneticPair m1 = gauss_medium(cg, 0.5, 0.14);
  MagneticPair m2;
  m2.A = VectorField(cg, 2);
  m2.q = ScalarField(cg);
  ReconstructionContext ctx = ReconstructionContext::make(m1, m2);
  ReconstructionParams params;
  params.alpha = 5.0;
  params.dy = 0.1;
  PipelineResult res = run_pipeline(cfg, ctx, params);
  double num = 0.0, den = 0.0;
  for (int j = 0; j < 2; ++j) {
    Eigen::VectorXcd coef = analyze_nodes(ctx.A_diff.comp[j], res.ray_A.freq);
    ScalarField truth = synthesize_nodes(res.ray_A.freq, coef, cg);
    num += (res.A_rec.comp[j].values - truth.values).squaredNorm();
    den += truth.values.squaredNorm();
  }
  double phys_err = std::sqrt(num / den);

  bool ok = fourier_err <= 1e-10 && phys_err <= 0.05;
  report(5, "curl algebra and div-free inversion", ok,
         fmt("fourier round trip %.3g (<= 1e-10), physical round trip %.3g "
             "(<= 0.05)",
             fourier_err, phys_err));
}

// ---------------------------------------------------------------- criterion 6

void criterion_6() {
  GeometryConfig cfg = GeometryConfig::square(0.9, 2.0, 0.3, 32);
  SyntheticFamily fam = make_family(cfg, Region::IStar, 66);
  Grid cg = Grid::qr_box(cfg, 49, 48);
  CoefficientPair cp = fam.sample_pair(cg, 1.0);

  std::mt19937_64 rng(606);
  double worst = 0.0;
  for (int it = 0; it < 100; ++it) {
    // centers strictly outside the accessible shell r/2 < |y| < T - r/2
    double rad = it % 2 == 0 ? 0.43 * unif(rng) : 1.57 + 0.63 * unif(rng);
    double ya = 2 * M_PI * unif(rng), wa = 2 * M_PI * unif(rng);
    Eigen::Vector2d y = rad * Eigen::Vector2d(std::cos(ya), std::sin(ya));
    Eigen::Vector2d omega(std::cos(wa), std::sin(wa));
    worst = std::max(worst, std::abs(ray_transform(cp.p, y, omega)));
    for (int j = 0; j < 2; ++j)
      worst = std::max(worst, std::abs(ray_transform(cp.V.comp[j], y, omega)));
  }
  report(6, "rays outside the accessible shell vanish", worst <= 1e-10,
         fmt("max |ray| %.3g over 100 samples (<= 1e-10)", worst));
}

// ---------------------------------------------------------------- criterion 7

void criterion_7() {
  GeometryConfig cfg = GeometryConfig::square(0.9, 2.0, 0.3, 160);
  Grid cg = Grid::qr_box(cfg, 49, 48);
  // wide bump: the estimator error scales like 1/(sigma h^2), so sigma = 40
  // needs the envelope curvature kept small
  const double h = 0.3;
  Eigen::Vector2d omega(1.0, 0.0);

  // probe centers with the bump ball inside the shell, clear of the box and
  // its T-shifts
  std::vector<Eigen::Vector2d> centers;
  for (double y0 : {0.8, 0.93, 1.06, 1.19})
    for (double y1 : {-0.1, 0.0, 0.1}) centers.emplace_back(y0, y1);

  auto oracle = [&](const VectorField &A_diff, const Eigen::Vector2d &y) {
    // bump-squared-weighted average of the exact ray values
    Mollifier phi = make_mollifier(y, h);
    const int nq = 28;
    Complex acc{0.0, 0.0};
    for (int i = 0; i <= nq; ++i)
      for (int j = 0; j <= nq; ++j) {
        Eigen::Vector2d z = y + Eigen::Vector2d(-h + 2.0 * h * i / nq,
                                                -h + 2.0 * h * j / nq);
        double w = ((i == 0 || i == nq) ? 0.5 : 1.0) *
                   ((j == 0 || j == nq) ? 0.5 : 1.0) * (2.0 * h / nq) *
                   (2.0 * h / nq);
        double p = phi.value(z);
        if (p == 0.0) continue;
        Complex r{0.0, 0.0};
        for (int c = 0; c < 2; ++c)
          r += omega[c] * ray_transform(A_diff.comp[c], z, omega);
        acc += w * p * p * r;
      }
    return acc;
  };

  bool ok = true;
  std::string detail;
  for (Regime regime : {Regime::Lambda, Regime::R}) {
    Region region = regime_region(regime);
    SyntheticFamily fam = make_family(cfg, region, 70 + static_cast<int>(regime));
    ScalarField zero_div(cg);
    MagneticPair m1 = gauge_reduce(fam.sample_pair(cg, 0.35), &zero_div);
    MagneticPair m2;
    m2.A = VectorField(cg, 2);
    m2.q = ScalarField(cg);
    ReconstructionContext ctx = ReconstructionContext::make(m1, m2);

    std::vector<double> errs;
    for (double sigma : {20.0, 40.0}) {
      ReconstructionParams params;
      params.mode = RecoveryMode::Probe;
      params.regime = regime;
      params.sigma = sigma;
      params.h = h;
      double num = 0.0, den = 0.0;
      for (const auto &y : centers) {
        RayDatum d = estimate_ray_A(cfg, ctx, params, y, omega);
        Complex truth = oracle(ctx.A_diff, y);
        if (!d.valid) {
          num += 1e6;  // support rejection would be a setup bug
          continue;
        }
        num += std::norm(d.value - truth);
        den += std::norm(truth);
      }
      errs.push_back(std::sqrt(num / den));
    }
    bool r_ok = errs[1] <= 0.2 && errs[1] < errs[0];
    ok = ok && r_ok;
    detail += fmt("%s%s: %.3g -> %.3g", detail.empty() ? "" : "; ",
                  regime_name(regime), errs[0], errs[1]);
  }
  report(7, "probe data matches the mollified ray oracle", ok,
         detail + " (final <= 0.2, improving)");
}

// ---------------------------------------------------------------- criterion 8

void criterion_8() {
  GeometryConfig cfg = GeometryConfig::square(0.9, 2.0, 0.3, 32);
  // spacing chosen so the exactly-linear small-delta regime sits well
  // within the fit-residual gate for both law models
  const std::vector<double> eps_targets = {0.30, 0.26, 0.22, 0.18, 0.15};

  bool ok = true;
  std::string detail;
  for (Regime regime : {Regime::Lambda, Regime::R, Regime::Gamma}) {
    SyntheticFamily fam =
        make_family(cfg, regime_region(regime), 80 + static_cast<int>(regime));
    StabilityOptions opts;
    opts.dict_size = 8;
    opts.coeff_nx = 29;
    opts.coeff_nt = 28;
    opts.mode = RecoveryMode::Probe;
    std::vector<double> ladder =
        calibrate_ladder(cfg, regime, fam, opts, eps_targets, 0.1, 11);
    StabilityCurve curve = run_stability(cfg, regime, fam, ladder, opts, 11);

    bool monotone = curve.rungs.size() == 5;
    for (std::size_t k = 0; k + 1 < curve.rungs.size(); ++k) {
      monotone = monotone && !curve.rungs[k].flagged &&
                 curve.rungs[k + 1].epsilon <= curve.rungs[k].epsilon * 1.1 &&
                 curve.rungs[k + 1].errV <= curve.rungs[k].errV * 1.1;
    }
    if (!curve.rungs.empty()) monotone = monotone && !curve.rungs.back().flagged;

    bool fit_ok = false;
    double muV = 0.0, resV = 1.0, muP = 0.0, resP = 1.0;
    try {
      FitResult fv = fit_log_law(curve, 'V', FitModel::Log);
      FitResult fp = fit_log_law(curve, 'P', FitModel::LogLog);
      muV = fv.mu; resV = fv.residual;
      muP = fp.mu; resP = fp.residual;
      fit_ok = muV > 0.0 && resV <= 0.2 && muP > 0.0 && resP <= 0.2;
    } catch (const std::exception &) {
      fit_ok = false;
    }
    ok = ok && monotone && fit_ok;
    detail += fmt("%s%s: muV %.2f resV %.3f muP %.2f resP %.3f%s",
                  detail.empty() ? "" : "; ", regime_name(regime), muV, resV,
                  muP, resP, monotone ? "" : " [not monotone]");
  }
  report(8, "stability ladders and log-law fits", ok,
         detail + " (mu > 0, res <= 0.2)");
}

// ---------------------------------------------------------------- criterion 9

void criterion_9() {
  // fit recovery at pinned tolerances
  std::vector<std::pair<double, double>> pts1, pts2;
  for (int k = 1; k <= 6; ++k) {
    double eps = std::pow(10.0, -k);
    pts1.emplace_back(eps, 2.0 * std::pow(-std::log(eps), -0.5));
    pts2.emplace_back(eps, 3.0 * std::pow(std::log(-std::log(eps)), -0.7));
  }
  FitResult f1 = fit_log_law(pts1, FitModel::Log);
  FitResult f2 = fit_log_law(pts2, FitModel::LogLog);
  bool fits_ok = std::abs(f1.C - 2.0) <= 0.02 && std::abs(f1.mu - 0.5) <= 0.005 &&
                 std::abs(f2.C - 3.0) <= 0.15 && std::abs(f2.mu - 0.7) <= 0.035;

  // manufactured-solution orders on all three cases
  GeometryConfig cfg = GeometryConfig::square(0.9, 2.0, 0.3, 32);
  bool conv_ok = true;
  std::string orders;
  for (const char *cid : {"free", "convection", "magnetic"}) {
    ConvergenceResult res = convergence_study(cfg, cid, {17, 33, 65});
    for (double o : res.orders) {
      conv_ok = conv_ok && o >= 1.9 && o <= 2.1;
      orders += fmt(" %.2f", o);
    }
  }

  // determinism of seeded runs
  SyntheticFamily fam = make_family(cfg, Region::IStar, 9);
  StabilityOptions opts;
  opts.dict_size = 2;
  opts.coeff_nx = 13;
  opts.coeff_nt = 10;
  opts.mode = RecoveryMode::Direct;
  opts.recon.dy = 0.4;
  StabilityCurve c1 = run_stability(cfg, Regime::Lambda, fam, {0.2, 0.1}, opts, 3);
  StabilityCurve c2 = run_stability(cfg, Regime::Lambda, fam, {0.2, 0.1}, opts, 3);
  bool det_ok = curve_csv(c1, false) == curve_csv(c2, false);

  bool ok = fits_ok && conv_ok && det_ok;
  report(9, "harness self-tests", ok,
         fmt("fits %s, orders%s (in [1.9,2.1] %s), determinism %s",
             fits_ok ? "ok" : "off", orders.c_str(), conv_ok ? "ok" : "off",
             det_ok ? "ok" : "broken"));
}

} // namespace

int main() {
  using Clock = std::chrono::steady_clock;
  void (*criteria[])() = {criterion_1, criterion_2, criterion_3,
                          criterion_4, criterion_5, criterion_6,
                          criterion_7, criterion_8, criterion_9};
  for (auto *fn : criteria) {
    auto t0 = Clock::now();
    try {
      fn();
    } catch (const std::exception &ex) {
      std::printf("[FAIL] criterion threw: %s\n", ex.what());
      ++g_failures;
    }
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("       (%.1f s)\n", secs);
    std::fflush(stdout);
  }
  std::printf("%d of 9 criteria failed\n", g_failures);
  return g_failures;
}
