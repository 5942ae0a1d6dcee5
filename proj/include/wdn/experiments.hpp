#pragma once

#include "wdn/reconstruct.hpp"

namespace wdn {

/// Seeded band-limited perturbation family: the V-shape is a rotated
/// gradient (exactly divergence-free) of a masked trigonometric stream
/// function, with support inside the requested recovery region.
struct SyntheticFamily {
  Region region = Region::IStar;
  std::uint64_t seed = 0;
  SpaceTimeFn stream;   ///< scalar stream function g
  SpaceTimeFn p_shape;  ///< scalar shape for the zero-order coefficient
  std::function<Eigen::VectorXd(const Eigen::VectorXd &, double)> V_shape;

  /// Coefficients at perturbation scale delta, sampled on the given grid.
  CoefficientPair sample_pair(const Grid &g, double delta) const;
};

SyntheticFamily make_family(const GeometryConfig &cfg, Region region,
                            std::uint64_t seed);

struct StabilityRung {
  double delta = 0.0, epsilon = 0.0, errV = 0.0, errP = 0.0;
  double alpha = 0.0, sigma = 0.0, wallclock_s = 0.0;
  bool flagged = false;  ///< smallness gate violated or degenerate
  std::string note;
};

struct StabilityCurve {
  Regime regime = Regime::Lambda;
  std::string dictionary_id;
  std::vector<StabilityRung> rungs;  ///< sorted by delta descending
};

struct StabilityOptions {
  int dict_size = 16;
  int coeff_nx = 33, coeff_nt = 40;
  RecoveryMode mode = RecoveryMode::Probe;
  ReconstructionParams recon;  ///< sigma/h/dy and schedule exponents
  int threads = 1;
};

StabilityCurve run_stability(const GeometryConfig &cfg, Regime regime,
                             const SyntheticFamily &family,
                             const std::vector<double> &ladder,
                             const StabilityOptions &opts, std::uint64_t seed);

/// Perturbation scales whose measured operator distances land near
/// eps_targets, assuming the distance is linear in the scale; costs one
/// pilot measurement at delta_pilot.
std::vector<double> calibrate_ladder(const GeometryConfig &cfg, Regime regime,
                                     const SyntheticFamily &family,
                                     const StabilityOptions &opts,
                                     const std::vector<double> &eps_targets,
                                     double delta_pilot, std::uint64_t seed);

const char *regime_name(Regime regime);

/// CSV with the frozen schema
/// regime, delta, epsilon, errV, errP, alpha, sigma, wallclock_s.
/// with_wallclock=false zeroes the timing column for byte-comparisons.
std::string curve_csv(const StabilityCurve &curve, bool with_wallclock = true);

enum class FitModel { Log, LogLog };

struct FitResult {
  FitModel model = FitModel::Log;
  double C = 0.0, mu = 0.0, residual = 0.0;
};

/// Least squares of log err against log|log eps| (Log) or
/// log log|log eps| (LogLog); needs >= 3 points with eps in (0,1)
/// (LogLog additionally eps < 1/e).
FitResult fit_log_law(const std::vector<std::pair<double, double>> &eps_err,
                      FitModel model);
/// which = 'V' or 'P'; skips flagged rungs.
FitResult fit_log_law(const StabilityCurve &curve, char which, FitModel model);

struct ConvergenceResult {
  std::vector<int> nx_levels;
  std::vector<double> errors;  ///< L2(Q) error against the closed form
  std::vector<double> orders;  ///< log2 ratios of successive errors
};

/// case_id: "free" | "convection" | "magnetic"; each level halves the grid
/// spacing of the previous one.
ConvergenceResult convergence_study(const GeometryConfig &base,
                                    const std::string &case_id,
                                    const std::vector<int> &nx_levels);

} // namespace wdn
