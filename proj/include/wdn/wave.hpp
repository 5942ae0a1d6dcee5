#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "wdn/coefficients.hpp"
#include "wdn/field.hpp"
#include "wdn/geometry.hpp"

namespace wdn {

enum class WaveForm { Convection, Magnetic };
enum class Direction { Forward, Adjoint };
enum class Regime { Lambda, R, Gamma };

Region regime_region(Regime regime);

using SpaceFn = std::function<Complex(const Eigen::VectorXd &)>;
using SpaceTimeFn = std::function<Complex(const Eigen::VectorXd &, double)>;

/// Boundary points of the solver grid, organized per box face with
/// trapezoidal surface weights.
struct BoundaryGrid {
  struct Face {
    int axis;                    ///< normal axis
    int side;                    ///< 0 = lower face, 1 = upper face
    Eigen::VectorXi shape;       ///< face grid extents (n-1 axes, grid order)
    std::vector<long> sidx;      ///< global spatial indices, face row-major
    std::vector<double> weight;  ///< per-point surface quadrature weight
  };
  Grid grid;
  std::vector<Face> faces;

  static BoundaryGrid make(const Grid &g);
  long points() const;
};

/// Samples on the lateral boundary Sigma = dOmega x (0,T).
struct BoundaryTrace {
  enum class Kind { Dirichlet, Neumann, MagneticNeumann };
  Kind kind = Kind::Dirichlet;
  std::vector<Eigen::MatrixXcd> face_vals;  ///< per face: points x (nt+1)

  static BoundaryTrace zeros(const BoundaryGrid &bg, Kind kind);
  static BoundaryTrace sample(const BoundaryGrid &bg, Kind kind, const SpaceTimeFn &f);
  BoundaryTrace &operator+=(const BoundaryTrace &o);
  BoundaryTrace &operator-=(const BoundaryTrace &o);
  BoundaryTrace &operator*=(Complex a);
};

Complex trace_dot(const BoundaryGrid &bg, const BoundaryTrace &a, const BoundaryTrace &b);
double trace_l2(const BoundaryGrid &bg, const BoundaryTrace &a);
/// H1(Sigma) surrogate: values plus first differences along face tangents
/// and time.
Complex trace_h1_dot(const BoundaryGrid &bg, const BoundaryTrace &a, const BoundaryTrace &b);
double trace_h1(const BoundaryGrid &bg, const BoundaryTrace &a);

/// Spatial-slice inner products on the solver grid (trapezoid weights).
Complex slice_dot(const Grid &g, const Eigen::VectorXcd &a, const Eigen::VectorXcd &b);
double slice_l2(const Grid &g, const Eigen::VectorXcd &a);
Complex slice_h1_dot(const Grid &g, const Eigen::VectorXcd &a, const Eigen::VectorXcd &b);
double slice_h1(const Grid &g, const Eigen::VectorXcd &a);

/// One wave problem: coefficients, direction and data. Unset functions are
/// treated as zero. Forward runs carry (u0, u1), adjoint runs (u2, u3)
/// prescribed at t = T.
struct WaveProblem {
  WaveForm form = WaveForm::Convection;
  Direction direction = Direction::Forward;
  const CoefficientPair *convection = nullptr;
  const MagneticPair *magnetic = nullptr;
  SpaceTimeFn dirichlet;  ///< f on Sigma
  SpaceFn u0, u1;         ///< initial data (forward)
  SpaceFn u2, u3;         ///< final data (adjoint)
  SpaceTimeFn source;     ///< manufactured-solution forcing, testing only
};

struct SolveOptions {
  bool keep_full_field = false;
  bool want_trace = false;
  BoundaryTrace::Kind trace_kind = BoundaryTrace::Kind::Neumann;
  /// Called once per completed time level with the solution slice.
  std::function<void(int, const Eigen::VectorXcd &)> observer;
};

struct SolveResult {
  std::optional<ScalarField> field;
  std::optional<BoundaryTrace> trace;
  Eigen::VectorXcd final_u;   ///< u(.,T) on the spatial grid
  Eigen::VectorXcd final_ut;  ///< d_t u(.,T), one-sided second order
  Eigen::VectorXcd initial_u, initial_ut;  ///< same at t=0 (adjoint runs)
};

/// Explicit three-level leapfrog, second order in space and time. Throws
/// on CFL violation (message carries the required nt) and on NaN blowup.
SolveResult solve_wave(const GeometryConfig &cfg, const WaveProblem &problem,
                       const SolveOptions &opts = {});

/// One response-operator input. Lambda/R regimes require zero initial data.
struct ProbeInput {
  SpaceTimeFn f;
  SpaceFn u0, u1;
  std::string id;
};

struct ResponseRecord {
  Regime regime = Regime::Lambda;
  BoundaryTrace trace;
  Eigen::VectorXcd final_u, final_ut;  ///< present iff regime != Lambda
};

ResponseRecord response(const GeometryConfig &cfg, Regime regime, WaveForm form,
                        const CoefficientPair *cp, const MagneticPair *mp,
                        const ProbeInput &input);

ResponseRecord response_difference(const GeometryConfig &cfg, Regime regime,
                                   WaveForm form, const CoefficientPair *cp1,
                                   const MagneticPair *mp1,
                                   const CoefficientPair *cp2,
                                   const MagneticPair *mp2,
                                   const ProbeInput &input);

/// K-norm of a response record: L2(Sigma) plus, for R/Gamma, H1(Omega) and
/// L2(Omega) of the final Cauchy pair.
double response_k_norm(const GeometryConfig &cfg, const BoundaryGrid &bg,
                       const ResponseRecord &rec);
Complex response_k_dot(const GeometryConfig &cfg, const BoundaryGrid &bg,
                       const ResponseRecord &a, const ResponseRecord &b);

/// Input-space norm: H1_0(Sigma) surrogate, plus H1 x L2 initial terms in
/// the Gamma regime.
double input_e_norm(const GeometryConfig &cfg, const BoundaryGrid &bg,
                    Regime regime, const ProbeInput &input);
Complex input_e_dot(const GeometryConfig &cfg, const BoundaryGrid &bg,
                    Regime regime, const ProbeInput &a, const ProbeInput &b);

/// Deterministic probing dictionary: boundary Gaussian bumps times temporal
/// sinusoids vanishing at t=0; the Gamma regime interleaves initial-data
/// modes with f=0.
std::vector<ProbeInput> make_dictionary(const GeometryConfig &cfg, Regime regime,
                                        int size, std::uint64_t seed);

struct DistanceOptions {
  bool gram_refine = true;
  int power_iters = 50;
  double power_tol = 1e-10;
  int threads = 1;
};

/// Lower-bound estimate of the operator-norm distance over the dictionary
/// span: max Rayleigh quotient of the response-difference Gram pencil.
double operator_distance(const GeometryConfig &cfg, Regime regime, WaveForm form,
                         const CoefficientPair *cp1, const MagneticPair *mp1,
                         const CoefficientPair *cp2, const MagneticPair *mp2,
                         const std::vector<ProbeInput> &dictionary,
                         const DistanceOptions &opts = {});

/// Discrete operator application on a space-time field (interior points of
/// the time/space box; boundary layers are left zero). Used to check the
/// reduction identity H_{A,q} = L_{V,p}.
ScalarField apply_operator(WaveForm form, const CoefficientPair *cp,
                           const MagneticPair *mp, const ScalarField &u);

/// Simple index-parallel loop used by probe batches; order-independent
/// writes only.
void parallel_for(long count, int threads, const std::function<void(long)> &fn);

} // namespace wdn
