// Command-line surface of the laboratory: geometry validation, single
// solves, response records, operator distances, probe diagnostics, ray
// checks, the reconstruction pipeline, stability curves and convergence
// studies. Configuration comes from a JSON file; every run is seeded.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "wdn/experiments.hpp"

using json = nlohmann::json;
namespace fs = std::filesystem;
using namespace wdn;

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  int threads = 1;
};

json load_config(const GlobalArgs &ga) {
  if (ga.config_path.empty()) return json::object();
  std::ifstream in(ga.config_path);
  if (!in) throw std::invalid_argument("cannot open config " + ga.config_path);
  json j;
  in >> j;
  return j;
}

GeometryConfig geometry_from(const json &cfg) {
  json g = cfg.value("geometry", json::object());
  return GeometryConfig::square(g.value("r", 1.0), g.value("T", 3.0),
                                g.value("half_width", 0.3), g.value("nx", 32),
                                g.value("nt", 0));
}

Regime regime_from(const std::string &s) {
  if (s == "lambda") return Regime::Lambda;
  if (s == "r") return Regime::R;
  if (s == "gamma") return Regime::Gamma;
  throw std::invalid_argument("unknown regime " + s);
}

Region region_from(const std::string &s) {
  if (s == "istar") return Region::IStar;
  if (s == "isharp") return Region::ISharp;
  if (s == "q") return Region::Q;
  throw std::invalid_argument("unknown region " + s);
}

ReconstructionParams recon_from(const json &cfg, const GlobalArgs &ga) {
  json r = cfg.value("recon", json::object());
  ReconstructionParams p;
  p.alpha = r.value("alpha", p.alpha);
  p.sigma = r.value("sigma", p.sigma);
  p.h = r.value("h", p.h);
  p.dy = r.value("dy", p.dy);
  p.len_x = r.value("len_x", p.len_x);
  p.len_t = r.value("len_t", p.len_t);
  p.schedule = r.value("schedule", p.schedule);
  p.mu2 = r.value("mu2", p.mu2);
  p.N_ac = r.value("N", p.N_ac);
  p.mu_ac = r.value("mu", p.mu_ac);
  p.gamma_ac = r.value("gamma", p.gamma_ac);
  p.hermitian_reduce = r.value("hermitian_reduce", p.hermitian_reduce);
  p.threads = ga.threads;
  return p;
}

/// The standard test media of the CLI: a seeded region-masked family at the
/// configured scale against the zero medium.
struct Media {
  Grid cg;
  CoefficientPair cp1;
  ScalarField zero_div;
  MagneticPair m1, m2;
};

Media media_from(const json &cfg, const GeometryConfig &geo, std::uint64_t seed) {
  json f = cfg.value("family", json::object());
  Region region = region_from(f.value("region", "istar"));
  double delta = f.value("delta", 0.1);
  SyntheticFamily fam = make_family(geo, region, f.value("seed", seed));
  Media md;
  md.cg = Grid::qr_box(geo, f.value("nx", 33), f.value("nt", 40));
  md.cp1 = fam.sample_pair(md.cg, delta);
  md.zero_div = ScalarField(md.cg);
  md.m1 = gauge_reduce(md.cp1, &md.zero_div);
  md.m2.A = VectorField(md.cg, geo.dim);
  md.m2.q = ScalarField(md.cg);
  return md;
}

void write_json(const fs::path &path, const json &j) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path);
  out << j.dump(2) << "\n";
}

void write_field(const fs::path &dir, const std::string &name,
                 const ScalarField &f, const json &sidecar) {
  fs::create_directories(dir);
  write_wdn1((dir / (name + ".wdn1")).string(), f);
  json j = sidecar;
  j["file"] = name + ".wdn1";
  j["nt"] = f.grid.nt;
  j["nx"] = f.grid.nx[0];
  write_json(dir / (name + ".json"), j);
}

json grid_json(const Grid &g) {
  json j;
  j["nx"] = g.nx[0];
  j["nt"] = g.nt;
  j["T"] = g.T;
  j["lo"] = {g.lo[0], g.lo[1]};
  j["hi"] = {g.hi[0], g.hi[1]};
  return j;
}

int cmd_validate(const GlobalArgs &ga) {
  json cfg = load_config(ga);
  GeometryConfig geo = geometry_from(cfg);
  GeometryReport rep = validate_geometry(geo);
  json out;
  out["ok"] = rep.ok;
  out["violations"] = rep.violations;
  out["diam_omega"] = geo.diam_omega();
  out["cfl_nt"] = geo.cfl_nt();
  write_json(fs::path(ga.out_dir) / "validate.json", out);
  std::cout << (rep.ok ? "geometry ok" : "geometry invalid") << "\n";
  for (const auto &v : rep.violations) std::cout << "  " << v << "\n";
  return rep.ok ? 0 : 2;
}

int cmd_forward(const GlobalArgs &ga, const std::string &form_s) {
  json cfg = load_config(ga);
  GeometryConfig geo = geometry_from(cfg);
  Media md = media_from(cfg, geo, ga.seed);
  std::vector<ProbeInput> dict = make_dictionary(geo, Regime::Lambda, 1, ga.seed);

  WaveProblem prob;
  prob.form = form_s == "magnetic" ? WaveForm::Magnetic : WaveForm::Convection;
  if (prob.form == WaveForm::Magnetic)
    prob.magnetic = &md.m1;
  else
    prob.convection = &md.cp1;
  prob.dirichlet = dict[0].f;

  SolveOptions opts;
  opts.want_trace = true;
  opts.keep_full_field = true;
  SolveResult res = solve_wave(geo, prob, opts);

  json side;
  side["form"] = form_s;
  side["grid"] = grid_json(res.field->grid);
  side["final_u_l2"] = slice_l2(res.field->grid, res.final_u);
  write_field(fs::path(ga.out_dir), "forward_u", *res.field, side);
  std::cout << "forward solve done, |u(T)|_L2 = "
            << slice_l2(res.field->grid, res.final_u) << "\n";
  return 0;
}

int cmd_response(const GlobalArgs &ga, const std::string &regime_s) {
  json cfg = load_config(ga);
  GeometryConfig geo = geometry_from(cfg);
  Regime regime = regime_from(regime_s);
  Media md = media_from(cfg, geo, ga.seed);
  std::vector<ProbeInput> dict = make_dictionary(geo, regime, 1, ga.seed);
  ResponseRecord rec = response(geo, regime, WaveForm::Magnetic, nullptr,
                                &md.m1, dict[0]);
  Grid g = Grid::solver(geo);
  BoundaryGrid bg = BoundaryGrid::make(g);

  // Flatten the trace onto a per-face stacked field for serialization.
  json out;
  out["regime"] = regime_s;
  out["trace_l2"] = trace_l2(bg, rec.trace);
  if (regime != Regime::Lambda) {
    out["final_u_l2"] = slice_l2(g, rec.final_u);
    out["final_ut_l2"] = slice_l2(g, rec.final_ut);
  }
  write_json(fs::path(ga.out_dir) / "response.json", out);
  std::cout << "response trace L2 = " << trace_l2(bg, rec.trace) << "\n";
  return 0;
}

int cmd_distance(const GlobalArgs &ga, const std::string &regime_s, int dict_size) {
  json cfg = load_config(ga);
  GeometryConfig geo = geometry_from(cfg);
  Regime regime = regime_from(regime_s);
  Media md = media_from(cfg, geo, ga.seed);
  std::vector<ProbeInput> dict = make_dictionary(geo, regime, dict_size, ga.seed);
  DistanceOptions dopt;
  dopt.threads = ga.threads;
  double eps = operator_distance(geo, regime, WaveForm::Magnetic, nullptr,
                                 &md.m1, nullptr, &md.m2, dict, dopt);
  json out;
  out["regime"] = regime_s;
  out["dictionary"] = dict_size;
  out["epsilon"] = eps;
  write_json(fs::path(ga.out_dir) / "distance.json", out);
  std::cout << "operator distance = " << eps << "\n";
  return 0;
}

int cmd_probe(const GlobalArgs &ga) {
  json cfg = load_config(ga);
  GeometryConfig geo = geometry_from(cfg);
  json p = cfg.value("probe", json::object());
  ProbeSpec spec;
  spec.omega = Eigen::Vector2d(p.value("omega_x", 1.0), p.value("omega_y", 0.0));
  spec.omega.normalize();
  std::vector<double> yv = p.value("y", std::vector<double>{1.5, 0.0});
  spec.y = Eigen::Vector2d(yv.at(0), yv.at(1));
  spec.sigma = p.value("sigma", 20.0);
  spec.h = p.value("h", 0.2);

  Media md = media_from(cfg, geo, ga.seed);
  RemainderReport rep = remainder_report(geo, &md.m1, spec);
  json out;
  out["r_l2"] = rep.r_l2;
  out["grad_r_l2"] = rep.grad_r_l2;
  out["sigma"] = spec.sigma;
  out["sigma_r_l2"] = spec.sigma * rep.r_l2;
  write_json(fs::path(ga.out_dir) / "probe.json", out);
  std::cout << "remainder: sigma*|r|_L2 = " << spec.sigma * rep.r_l2
            << ", |grad r|_L2 = " << rep.grad_r_l2 << "\n";
  return 0;
}

int cmd_ray(const GlobalArgs &ga) {
  json cfg = load_config(ga);
  GeometryConfig geo = geometry_from(cfg);
  Media md = media_from(cfg, geo, ga.seed);
  json p = cfg.value("ray", json::object());
  Eigen::Vector2d omega(p.value("omega_x", 0.6), p.value("omega_y", 0.8));
  omega.normalize();
  // default ray passes through the slab center at t = 1
  std::vector<double> yv = p.value("y", std::vector<double>{0.6, 0.8});
  Eigen::Vector2d y(yv.at(0), yv.at(1));

  Complex rq = ray_transform(md.m1.q, y, omega);
  Complex ra{0.0, 0.0};
  for (int j = 0; j < 2; ++j)
    ra += omega[j] * ray_transform(md.m1.A.comp[j], y, omega);
  json out;
  out["y"] = {y[0], y[1]};
  out["omega"] = {omega[0], omega[1]};
  out["ray_q"] = {rq.real(), rq.imag()};
  out["ray_omega_dot_A"] = {ra.real(), ra.imag()};
  write_json(fs::path(ga.out_dir) / "ray.json", out);
  std::cout << "ray(q) = " << rq << ", ray(omega.A) = " << ra << "\n";
  return 0;
}

int cmd_reconstruct(const GlobalArgs &ga, const std::string &mode_s,
                    const std::string &regime_s) {
  json cfg = load_config(ga);
  GeometryConfig geo = geometry_from(cfg);
  Media md = media_from(cfg, geo, ga.seed);
  ReconstructionParams params = recon_from(cfg, ga);
  params.mode = mode_s == "probe" ? RecoveryMode::Probe : RecoveryMode::Direct;
  params.regime = regime_from(regime_s);

  ReconstructionContext ctx = ReconstructionContext::make(md.m1, md.m2);
  double eps_hint = cfg.value("recon", json::object()).value("eps_hint", 0.0);
  PipelineResult res = run_pipeline(geo, ctx, params, eps_hint);

  Region region = regime_region(params.regime);
  VectorField dV(md.cg, 2);
  for (int j = 0; j < 2; ++j)
    dV.comp[j].values = res.vp_rec.V.comp[j].values - md.cp1.V.comp[j].values;
  ScalarField dp(md.cg);
  dp.values = res.vp_rec.p.values - md.cp1.p.values;

  json side;
  side["mode"] = mode_s;
  side["regime"] = regime_s;
  side["alpha"] = res.alpha_used;
  side["sigma"] = res.sigma_used;
  side["nodes_A"] = res.ray_A.freq.nodes.size();
  side["nodes_q"] = res.ray_q.freq.nodes.size();
  side["invalid_rays"] = res.ray_A.invalid_count;
  side["solves"] = res.ray_A.solves;
  side["errV_region"] = linf_region(geo, region, dV);
  side["errP_region"] = linf_region(geo, region, dp);

  fs::path dir(ga.out_dir);
  write_field(dir, "A_rec_0", res.A_rec.comp[0], side);
  write_field(dir, "A_rec_1", res.A_rec.comp[1], side);
  write_field(dir, "q_rec", res.q_rec, side);
  write_field(dir, "V_rec_0", res.vp_rec.V.comp[0], side);
  write_field(dir, "V_rec_1", res.vp_rec.V.comp[1], side);
  write_field(dir, "p_rec", res.vp_rec.p, side);
  write_json(dir / "reconstruct.json", side);
  std::cout << "reconstruction done: errV(region) = " << side["errV_region"]
            << ", errP(region) = " << side["errP_region"] << "\n";
  return 0;
}

int cmd_stability(const GlobalArgs &ga, const std::string &regime_s) {
  json cfg = load_config(ga);
  GeometryConfig geo = geometry_from(cfg);
  Regime regime = regime_from(regime_s);
  json st = cfg.value("stability", json::object());

  StabilityOptions opts;
  opts.dict_size = st.value("dict_size", 16);
  opts.coeff_nx = st.value("coeff_nx", 33);
  opts.coeff_nt = st.value("coeff_nt", 40);
  opts.mode = st.value("mode", std::string("probe")) == "direct"
                  ? RecoveryMode::Direct
                  : RecoveryMode::Probe;
  opts.recon = recon_from(cfg, ga);
  opts.threads = ga.threads;

  SyntheticFamily fam = make_family(geo, regime_region(regime), ga.seed);
  std::vector<double> ladder = st.value("ladder", std::vector<double>{});
  if (ladder.empty()) {
    std::vector<double> targets =
        st.value("eps_targets", std::vector<double>{0.30, 0.24, 0.18, 0.12, 0.08});
    ladder = calibrate_ladder(geo, regime, fam, opts, targets,
                              st.value("delta_pilot", 0.1), ga.seed);
  }

  StabilityCurve curve = run_stability(geo, regime, fam, ladder, opts, ga.seed);
  fs::create_directories(ga.out_dir);
  std::ofstream csv(fs::path(ga.out_dir) / ("stability_" + regime_s + ".csv"));
  csv << curve_csv(curve);

  json out;
  out["regime"] = regime_s;
  out["dictionary_id"] = curve.dictionary_id;
  try {
    FitResult fv = fit_log_law(curve, 'V', FitModel::Log);
    FitResult fp = fit_log_law(curve, 'P', FitModel::LogLog);
    out["fit_V"] = {{"C", fv.C}, {"mu", fv.mu}, {"residual", fv.residual}};
    out["fit_P"] = {{"C", fp.C}, {"mu", fp.mu}, {"residual", fp.residual}};
    std::cout << "fit V: mu = " << fv.mu << " (residual " << fv.residual
              << "), fit p: mu = " << fp.mu << " (residual " << fp.residual
              << ")\n";
  } catch (const std::exception &ex) {
    out["fit_error"] = ex.what();
    std::cout << "fit failed: " << ex.what() << "\n";
  }
  write_json(fs::path(ga.out_dir) / ("stability_" + regime_s + ".json"), out);
  std::cout << curve_csv(curve);
  return 0;
}

int cmd_convergence(const GlobalArgs &ga, const std::string &case_id) {
  json cfg = load_config(ga);
  GeometryConfig geo = geometry_from(cfg);
  std::vector<int> levels =
      cfg.value("convergence", json::object())
          .value("levels", std::vector<int>{17, 33, 65});
  ConvergenceResult res = convergence_study(geo, case_id, levels);
  json out;
  out["case"] = case_id;
  out["levels"] = res.nx_levels;
  out["errors"] = res.errors;
  out["orders"] = res.orders;
  write_json(fs::path(ga.out_dir) / ("convergence_" + case_id + ".json"), out);
  fs::create_directories(ga.out_dir);
  std::ofstream csv(fs::path(ga.out_dir) / ("convergence_" + case_id + ".csv"));
  csv << "nx,error,order\n";
  for (std::size_t i = 0; i < res.errors.size(); ++i) {
    csv << res.nx_levels[i] << "," << res.errors[i] << ",";
    if (i > 0) csv << res.orders[i - 1];
    csv << "\n";
  }
  for (std::size_t i = 0; i < res.orders.size(); ++i)
    std::cout << "levels " << res.nx_levels[i] << "->" << res.nx_levels[i + 1]
              << ": order " << res.orders[i] << "\n";
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"wave response laboratory"};
  app.require_subcommand(1);

  GlobalArgs ga;
  app.add_option("--config", ga.config_path, "JSON configuration file");
  app.add_option("--out", ga.out_dir, "output directory");
  app.add_option("--seed", ga.seed, "random seed");
  app.add_option("--threads", ga.threads, "worker threads");

  std::string form = "convection", regime = "lambda", mode = "direct",
              conv_case = "free";
  int dict_size = 16;

  app.add_subcommand("validate", "check the geometry configuration");
  auto *fwd = app.add_subcommand("forward", "run one forward solve");
  fwd->add_option("--form", form, "convection | magnetic");
  auto *rsp = app.add_subcommand("response", "emit one response record");
  rsp->add_option("--regime", regime, "lambda | r | gamma");
  auto *dst = app.add_subcommand("distance", "dictionary operator distance");
  dst->add_option("--regime", regime, "lambda | r | gamma");
  dst->add_option("--dict", dict_size, "dictionary size");
  app.add_subcommand("probe", "geometric-optics remainder report");
  app.add_subcommand("ray", "ray-transform spot checks");
  auto *rec = app.add_subcommand("reconstruct", "run the full pipeline");
  rec->add_option("--mode", mode, "direct | probe");
  rec->add_option("--regime", regime, "lambda | r | gamma");
  auto *stb = app.add_subcommand("stability", "stability curve and log-law fit");
  stb->add_option("--regime", regime, "lambda | r | gamma");
  auto *cnv = app.add_subcommand("convergence", "manufactured-solution orders");
  cnv->add_option("--case", conv_case, "free | convection | magnetic");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("validate")) return cmd_validate(ga);
    if (app.got_subcommand("forward")) return cmd_forward(ga, form);
    if (app.got_subcommand("response")) return cmd_response(ga, regime);
    if (app.got_subcommand("distance")) return cmd_distance(ga, regime, dict_size);
    if (app.got_subcommand("probe")) return cmd_probe(ga);
    if (app.got_subcommand("ray")) return cmd_ray(ga);
    if (app.got_subcommand("reconstruct")) return cmd_reconstruct(ga, mode, regime);
    if (app.got_subcommand("stability")) return cmd_stability(ga, regime);
    if (app.got_subcommand("convergence")) return cmd_convergence(ga, conv_case);
  } catch (const std::invalid_argument &ex) {
    std::cerr << "validation failure: " << ex.what() << "\n";
    return 2;
  } catch (const std::exception &ex) {
    std::cerr << "numerical failure: " << ex.what() << "\n";
    return 3;
  }
  return 0;
}
