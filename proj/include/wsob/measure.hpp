#pragma once

// Structured Radon measures on R^d: finite weighted mixtures of Lebesgue boxes,
// rectifiable patches, Cantor sets and atoms, each with an exact-structure
// quadrature rule and a membership oracle.

#include "wsob/core.hpp"
#include "wsob/fields.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace wsob {

/// Lebesgue measure on a box, weighted by a density field.
struct LebesgueBox {
  Box box;
  std::optional<ScalarField> density;  ///< absent means density 1

  Box bounding_box() const { return box; }
  bool contains(const Vector& x, double tol) const { return box.contains(x, tol); }
  std::optional<double> closed_form_mass() const;
};

enum class PatchKind { segment, arc, graph, affine };

/// A k-dimensional parametrized piece phi: [0,1]^k -> R^d, k < d, carrying
/// k-dimensional Hausdorff measure times an optional density on parameters.
class Patch {
 public:
  static Patch segment(const Vector& from, const Vector& to);
  /// Circular arc c + R(cos t e1 + sin t e2), t in [angle0, angle1].
  static Patch arc(const Vector& center, double radius, double angle0, double angle1,
                   const Vector& e1, const Vector& e2);
  /// Graph x_k = h(x_0..x_{k-1}) over `parameter_box` (dimension k), other
  /// coordinates zero.
  static Patch graph(const Box& parameter_box, const ScalarField& height, Index ambient_dim);
  /// origin + directions * u, u in [0,1]^k.
  static Patch affine(const Vector& origin, const Matrix& directions);

  Patch with_density(const ScalarField& density_on_parameters) const;

  PatchKind kind() const { return kind_; }
  Index ambient_dim() const { return ambient_dim_; }
  Index param_dim() const { return param_dim_; }

  Vector map(const Vector& u) const;
  Matrix jacobian(const Vector& u) const;  ///< d x k
  /// k-dimensional area factor sqrt(det(J^T J)).
  double area_factor(const Vector& u) const;
  double density(const Vector& u) const;
  Vector closest_parameter(const Vector& x) const;
  double distance(const Vector& x) const;
  bool contains(const Vector& x, double tol) const { return distance(x) <= tol; }
  Box bounding_box() const;
  std::optional<double> closed_form_mass() const;

  // Geometry accessors used by constructors in other modules.
  const Vector& origin() const { return origin_; }      ///< segment/affine origin, arc center
  const Matrix& directions() const { return dirs_; }    ///< affine directions, arc plane (e1 e2)
  double radius() const { return radius_; }
  double angle0() const { return angle0_; }
  double angle1() const { return angle1_; }
  const Box& parameter_box() const { return param_box_; }
  const std::optional<ScalarField>& height() const { return height_; }

  nlohmann::json to_json() const;

 private:
  Patch() = default;

  PatchKind kind_ = PatchKind::segment;
  Index ambient_dim_ = 0;
  Index param_dim_ = 0;
  Vector origin_;
  Matrix dirs_;
  Matrix pseudo_inverse_;
  double radius_ = 0.0;
  double angle0_ = 0.0;
  double angle1_ = 0.0;
  Box param_box_;
  std::optional<ScalarField> height_;
  std::optional<ScalarField> density_;
};

/// Cantor set on a segment of the axis `axis` through `origin`, parameter
/// t in [0, length].
///
/// classic: each interval keeps two end pieces of relative length `ratio`;
///   the measure is the self-similar one, every stage-n interval carrying
///   mass * 2^-n.
/// fat: at stage j a centered gap of length length * removal_base^-j is
///   removed from every interval; the measure is Lebesgue restricted to the
///   stage-n set, so interval masses are interval lengths.
struct CantorSet {
  enum class Variant { classic, fat };

  struct Interval {
    double lo;
    double hi;
    double mass;
    double center() const { return 0.5 * (lo + hi); }
    double width() const { return hi - lo; }
  };

  Variant variant = Variant::classic;
  Index ambient_dim = 1;
  Index axis = 0;
  Vector origin;  ///< point at t = 0
  double length = 1.0;
  double ratio = 1.0 / 3.0;
  double removal_base = 4.0;
  double mass = 1.0;  ///< classic only
  int depth_default = 12;

  void validate() const;
  std::vector<Interval> stage(int n) const;
  /// Closed-form mass of the stage-n set.
  double stage_mass(int n) const;
  Vector point(double t) const;
  /// Axis coordinate of x relative to origin.
  double parameter_of(const Vector& x) const;
  Box bounding_box() const;
  /// Membership in the union of `intervals` (a stage of this set).
  bool contains(const Vector& x, const std::vector<Interval>& intervals, double tol) const;
};

struct Atom {
  Vector point;
  double mass;
};

struct Atoms {
  std::vector<Atom> atoms;

  Box bounding_box() const;
  bool contains(const Vector& x, double tol) const;
  double total_mass() const;
};

struct Resolution;

using ComponentShape = std::variant<LebesgueBox, Patch, CantorSet, Atoms>;

struct MeasureComponent {
  double weight = 1.0;
  ComponentShape shape;
  std::string label;

  std::string type_name() const;
  Box bounding_box() const;
};

class Measure {
 public:
  Measure(Index dim, std::string name = "measure");

  Measure& add(double weight, ComponentShape shape, std::string label = {});

  Index dim() const { return dim_; }
  const std::string& name() const { return name_; }
  const std::vector<MeasureComponent>& components() const { return components_; }
  const MeasureComponent& component(std::size_t i) const { return components_.at(i); }

  /// Same measure with every weight multiplied by c > 0.
  Measure scaled(double c) const;
  Measure renamed(std::string name) const;
  Box bounding_box() const;
  /// Closed-form total mass of the discretized measure when every component
  /// has one (Cantor components use their stage mass at `resolution`).
  std::optional<double> closed_form_mass(const Resolution& resolution) const;
  /// Throws InvalidInput when the measure is empty or inconsistent.
  void validate() const;

 private:
  Index dim_;
  std::string name_;
  std::vector<MeasureComponent> components_;
};

/// Discretization parameters. Every report embeds to_json().
struct Resolution {
  int lebesgue_cells = 64;    ///< midpoint cells per axis
  int patch_nodes = 256;      ///< target parameter-node count per patch
  int cantor_depth = -1;      ///< -1: use each component's depth_default
  int cantor_depth_offset = 0;
  double membership_tol = 1e-9;
  std::map<std::size_t, int> component_override;  ///< component index -> node count (boxes, patches)

  /// Doubles every node count and adds one Cantor stage.
  Resolution refined() const;
  Resolution scaled(double factor) const;
  int lebesgue_cells_for(std::size_t component) const;
  int patch_nodes_per_axis_for(std::size_t component, Index param_dim) const;
  int cantor_depth_for(std::size_t component, const CantorSet& set) const;

  /// Compact single-token summary for CSV rows.
  std::string tag() const;
  nlohmann::json to_json() const;
  static Resolution from_json(const nlohmann::json& j);
};

struct QuadratureRule {
  Matrix nodes;  ///< d x N
  Vector weights;
  std::vector<std::size_t> component;  ///< owning component of each node
  std::vector<Vector> parameter;       ///< patch parameter per node (empty otherwise)
  nlohmann::json resolution;

  Index size() const { return weights.size(); }
  Index dim() const { return nodes.rows(); }
  Vector node(Index i) const { return nodes.col(i); }
  double mass() const;
};

QuadratureRule quadrature(const Measure& measure, const Resolution& resolution);

/// sum_i w_i g(x_i), summed in node order.
double integrate(const QuadratureRule& rule, const ScalarField& g);
/// (int |g|^2 dmu)^(1/2).
double l2_norm(const QuadratureRule& rule, const ScalarField& g);
/// L^2 norm of node samples; `samples` is m x N (m = 1 for scalar samples).
double l2_norm(const QuadratureRule& rule, const Matrix& samples);

nlohmann::json measure_to_json(const Measure& measure);
/// Schema: {"dim", "name"?, "components": [{"type", "weight", ...}]}.
Measure parse_measure(const nlohmann::json& j);

}  // namespace wsob
