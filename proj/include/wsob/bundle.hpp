#pragma once

// Decomposability-bundle fields x -> V(mu, x) for structured measures.
//
// Per-component rules:
//   lebesgue          R^d (Rademacher)
//   patch             tangent space span{d phi / d u_i} at the node
//   cantor, fat       the embedding axis (the measure is absolutely continuous on its line)
//   cantor, classic   {0}
//   atoms             {0}
// Where the membership oracles of several components fire at a point, the
// bundle is the span of their subspaces.

#include "wsob/fields.hpp"
#include "wsob/grassmann.hpp"
#include "wsob/measure.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace wsob {

class BundleField {
 public:
  using Override = std::function<SubspaceD(const Vector&)>;

  BundleField(const Measure& measure, const Resolution& resolution);

  /// Replaces the per-component rules by `rule`. Reports mark such fields
  /// as unsound.
  BundleField with_override(Override rule) const;
  bool overridden() const { return static_cast<bool>(override_); }

  /// Bundle at an arbitrary point: span over all components whose membership
  /// oracle fires; the zero subspace off the support.
  SubspaceD at(const Vector& x) const;
  /// Bundle at node i of `rule`: the owning component's rule joined with every
  /// other component that contains the node.
  SubspaceD at_node(const QuadratureRule& rule, Index i) const;
  std::vector<SubspaceD> at_nodes(const QuadratureRule& rule) const;

  /// Subspace assigned by component c's own rule at x (x on that component).
  SubspaceD component_rule(std::size_t c, const Vector& x, const Vector* parameter = nullptr) const;
  bool component_contains(std::size_t c, const Vector& x) const;
  bool on_support(const Vector& x) const;

  const Measure& measure() const { return *measure_; }

 private:
  std::shared_ptr<const Measure> measure_;
  Resolution resolution_;
  std::vector<std::vector<CantorSet::Interval>> cantor_stages_;
  Override override_;
};

BundleField assign_bundle(const Measure& measure, const Resolution& resolution = {});

/// For each radius r: max over a net of v in V with |v| = r of
/// |f(x+v) - f(x) - P_V(grad f(x)) . v| / |v|. Zero for V = {0}.
std::vector<double> differentiability_residual(const ScalarField& f, const SubspaceD& space,
                                               const Vector& x, const std::vector<double>& radii,
                                               int net_per_axis = 8);

/// A measure together with its quadrature rule and the bundle at every node.
class Discretization {
 public:
  explicit Discretization(Measure measure, Resolution resolution = {});
  Discretization(Measure measure, Resolution resolution, BundleField::Override bundle_override);

  const Measure& measure() const { return *measure_; }
  const Resolution& resolution() const { return resolution_; }
  const QuadratureRule& rule() const { return rule_; }
  const BundleField& bundle() const { return bundle_; }
  const std::vector<SubspaceD>& node_bundle() const { return node_bundle_; }
  const SubspaceD& node_bundle(Index i) const { return node_bundle_[std::size_t(i)]; }
  Index dim() const { return measure_->dim(); }
  Index size() const { return rule_.size(); }

 private:
  std::shared_ptr<const Measure> measure_;
  Resolution resolution_;
  QuadratureRule rule_;
  BundleField bundle_;
  std::vector<SubspaceD> node_bundle_;
};

}  // namespace wsob
