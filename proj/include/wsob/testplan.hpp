#pragma once

// Finitely supported test plans: weighted ensembles of curves with a declared
// compression constant, and the checks run against a discretized measure.

#include "wsob/bundle.hpp"
#include "wsob/fields.hpp"
#include "wsob/measure.hpp"
#include "wsob/report.hpp"

#include <json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace wsob {

class Curve {
 public:
  using PathFn = std::function<Vector(double)>;

  Curve(Index dim, PathFn path, PathFn velocity, nlohmann::json descriptor);

  static Curve segment(const Vector& from, const Vector& to);
  static Curve stationary(const Vector& point);
  /// t -> phi(u0 + t (u1 - u0)) inside a patch.
  static Curve patch_path(const Patch& patch, const Vector& u0, const Vector& u1);
  /// t -> c + R (cos a(t) e1 + sin a(t) e2), a(t) = a0 + t (a1 - a0).
  static Curve arc(const Vector& center, double radius, double angle0, double angle1,
                   const Vector& e1, const Vector& e2);

  /// gamma(t^2), with velocity 2t gamma'(t^2).
  Curve reparametrized_quadratic() const;
  /// The curve translated by `offset`.
  Curve translated(const Vector& offset) const;

  Index dim() const { return dim_; }
  Vector at(double t) const { return (*path_)(t); }
  Vector velocity(double t) const { return (*velocity_)(t); }
  const nlohmann::json& descriptor() const { return descriptor_; }

 private:
  Index dim_;
  std::shared_ptr<const PathFn> path_;
  std::shared_ptr<const PathFn> velocity_;
  nlohmann::json descriptor_;
};

struct WeightedCurve {
  Curve curve;
  double weight;
};

struct CurveEnsemble {
  std::string name = "ensemble";
  std::vector<WeightedCurve> curves;
  int time_steps = 64;  ///< uniform grid t_j = j / time_steps, j = 0..time_steps
  double comp = 1.0;    ///< declared compression constant
  std::string note;     ///< how `comp` was derived

  Index dim() const;
  /// Weights positive and summing to 1, comp > 0, common dimension.
  void validate() const;
  std::vector<double> times() const;
  /// Trapezoid weights on times().
  std::vector<double> time_weights() const;
  CurveEnsemble reparametrized_quadratic() const;
  nlohmann::json to_json() const;
};

struct Spread {
  Vector direction;  ///< unit vector
  double length;
  int count;  ///< translates at offsets (i + 1/2) length / count
};

/// Uniform family of translates of the segment start -> start + displacement.
CurveEnsemble translates_ensemble(std::string name, const Vector& start, const Vector& displacement,
                                  const std::vector<Spread>& spreads, double comp, std::string note,
                                  int time_steps = 64);

/// (s + t/2, 0), s uniform on [0, 1/2] (256 translates); compression 2 against
/// H^1 on the unit segment.
CurveEnsemble sliding_segment_ensemble();
/// Translates of the unit segment's sliding family in the y direction over
/// [0,1]; compression 2 against Lebesgue on the unit square.
CurveEnsemble sliding_square_ensemble();
/// (s, t), s uniform on [0,1] (32 curves): leaves the x-axis at t > 0.
CurveEnsemble transversal_ensemble();
/// Within-patch paths u -> u + t/2, u uniform on [0, 1/2], for a curve patch.
CurveEnsemble patch_sliding_ensemble(const Patch& patch, int count = 256);
/// A single curve with weight 1.
CurveEnsemble single_curve_ensemble(const Curve& curve, double comp);

/// Atoms at the curve positions at time t, weighted by the curve weights.
Measure empirical_measure(const CurveEnsemble& plan, double t);

/// (curve index, time, point) at which a check failed.
struct PlanWitness {
  std::size_t curve = 0;
  double t = 0.0;
  Vector point;
  double magnitude = 0.0;
  nlohmann::json to_json() const;
};

struct CompressionRow {
  double t;
  int bins;
  double max_ratio;
};

struct CompressionReport {
  bool pass = false;
  double declared = 0.0;
  double threshold = 0.0;  ///< declared * 1.1
  double max_ratio = 0.0;
  std::vector<CompressionRow> rows;
  std::optional<PlanWitness> witness;  ///< curve off the support
  std::string reason;
  nlohmann::json to_json() const;
  CsvTable table(const std::string& ensemble, const std::string& measure) const;
};

inline const std::vector<double> kDefaultProbeTimes{0.0, 0.25, 0.5, 0.75, 1.0};
inline const std::vector<int> kDefaultBinCounts{8, 16, 32};

/// Histograms (e_t)_* pi and the discretized measure on a common grid of
/// `bins` cells per non-degenerate axis and compares cell masses.
CompressionReport check_compression(const CurveEnsemble& plan, const Discretization& disc,
                                    const std::vector<double>& times = kDefaultProbeTimes,
                                    const std::vector<int>& bins = kDefaultBinCounts);

double kinetic_energy(const CurveEnsemble& plan);

struct TangencyReport {
  bool pass = false;
  double tol = 1e-9;
  double max_residual = 0.0;  ///< max |v - P_V v|
  double max_scaled = 0.0;    ///< max |v - P_V v| / (1 + |v|)
  std::size_t pairs = 0;
  std::optional<PlanWitness> witness;  ///< worst pair when failing
  nlohmann::json to_json() const;
};

TangencyReport check_tangency(const CurveEnsemble& plan, const BundleField& bundle, double tol = 1e-9);

using PointFunction = std::function<double(const Vector&)>;

/// x -> |P_V(x) grad f(x)|.
PointFunction am_gradient_norm(const ScalarField& f, const BundleField& bundle);

struct WugReport {
  bool pass = false;
  std::size_t pairs = 0;
  std::size_t violations = 0;
  double satisfied_fraction = 0.0;
  double max_violation = 0.0;  ///< max(|(f o g)'| - G |g'|), 0 if none
  double fd_max_error = 0.0;   ///< analytic vs central-difference derivative
  std::vector<PlanWitness> violation_list;
  nlohmann::json to_json() const;
};

/// Excess below this (relative to 1 + |(f o gamma)'|) is rounding, not a violation.
inline constexpr double kWugRoundoff = 1e-12;

/// |(f o gamma)'(t)| <= G(gamma(t)) |gamma'(t)| at every (curve, time) pair.
WugReport check_wug(const ScalarField& f, const PointFunction& upper_gradient, const CurveEnsemble& plan);

/// max over pairs of |(f o gamma)'(t) - grad_AM f(gamma(t)) . gamma'(t)|.
double chain_rule_defect(const ScalarField& f, const BundleField& bundle, const CurveEnsemble& plan);

struct LowerBound {
  std::optional<double> value;  ///< LB; squared and halved it bounds E_Ch from below
  double increment = 0.0;       ///< sum_gamma w (f(gamma_1) - f(gamma_0))
  double kinetic = 0.0;
  double comp = 0.0;
  std::string refusal;
  double energy_bound() const { return value ? 0.5 * *value * *value : 0.0; }
  nlohmann::json to_json() const;
};

/// LB = increment / (comp * KE)^{1/2}. Refused unless `compression` passed and
/// KE > 0.
LowerBound cheeger_lower_bound(const ScalarField& f, const CurveEnsemble& plan,
                               const CompressionReport& compression);

/// Ensemble config: {"type": "sliding-segment" | "sliding-square" |
/// "transversal" | "patch-sliding" | "translates" | "curves", ...}.
/// `patch-sliding` needs `measure` (uses its component "component").
CurveEnsemble parse_ensemble(const nlohmann::json& j, const Measure* measure = nullptr);

}  // namespace wsob
