#include "wsob/bundle.hpp"

#include <algorithm>
#include <cmath>

namespace wsob {

namespace {

constexpr double kTangentRankTol = 1e-8;

SubspaceD tangent_space(const Patch& patch, const Vector& u, const std::string& where) {
  const Matrix j = patch.jacobian(u);
  Eigen::JacobiSVD<Matrix> svd(j);
  const Vector& sv = svd.singularValues();
  if (sv.size() < patch.param_dim() || sv[sv.size() - 1] <= kTangentRankTol) {
    throw InvalidInput("rank-deficient tangent " + where);
  }
  return SubspaceD::spanned_by(j);
}

}  // namespace

BundleField::BundleField(const Measure& measure, const Resolution& resolution)
    : measure_(std::make_shared<const Measure>(measure)), resolution_(resolution) {
  measure_->validate();
  cantor_stages_.resize(measure_->components().size());
  for (std::size_t c = 0; c < measure_->components().size(); ++c) {
    if (const auto* s = std::get_if<CantorSet>(&measure_->components()[c].shape)) {
      cantor_stages_[c] = s->stage(resolution_.cantor_depth_for(c, *s));
    }
  }
}

BundleField BundleField::with_override(Override rule) const {
  BundleField copy = *this;
  copy.override_ = std::move(rule);
  return copy;
}

bool BundleField::component_contains(std::size_t c, const Vector& x) const {
  const double tol = resolution_.membership_tol;
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CantorSet>) {
          return s.contains(x, cantor_stages_[c], tol);
        } else {
          return s.contains(x, tol);
        }
      },
      measure_->components()[c].shape);
}

bool BundleField::on_support(const Vector& x) const {
  for (std::size_t c = 0; c < measure_->components().size(); ++c) {
    if (component_contains(c, x)) return true;
  }
  return false;
}

SubspaceD BundleField::component_rule(std::size_t c, const Vector& x, const Vector* parameter) const {
  const Index d = measure_->dim();
  return std::visit(
      [&](const auto& s) -> SubspaceD {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LebesgueBox>) {
          return SubspaceD::full(d);
        } else if constexpr (std::is_same_v<T, Patch>) {
          const Vector u = parameter && parameter->size() > 0 ? *parameter : s.closest_parameter(x);
          return tangent_space(s, u, "in component '" + measure_->components()[c].label + "'");
        } else if constexpr (std::is_same_v<T, CantorSet>) {
          if (s.variant == CantorSet::Variant::classic) return SubspaceD::zero(d);
          return SubspaceD::spanned_by(Vector::Unit(d, s.axis));
        } else {
          return SubspaceD::zero(d);
        }
      },
      measure_->components()[c].shape);
}

SubspaceD BundleField::at(const Vector& x) const {
  require_same_dim(x.size(), measure_->dim(), "BundleField::at");
  if (override_) return override_(x);
  SubspaceD v = SubspaceD::zero(measure_->dim());
  for (std::size_t c = 0; c < measure_->components().size(); ++c) {
    if (component_contains(c, x)) v = span_union(v, component_rule(c, x));
  }
  return v;
}

SubspaceD BundleField::at_node(const QuadratureRule& rule, Index i) const {
  const Vector x = rule.nodes.col(i);
  if (override_) return override_(x);
  const std::size_t owner = rule.component[std::size_t(i)];
  SubspaceD v;
  try {
    v = component_rule(owner, x, &rule.parameter[std::size_t(i)]);
  } catch (const InvalidInput& e) {
    throw InvalidInput(std::string(e.what()) + " at node " + std::to_string(i));
  }
  if (v.is_full()) return v;
  for (std::size_t c = 0; c < measure_->components().size(); ++c) {
    if (c == owner || !component_contains(c, x)) continue;
    v = span_union(v, component_rule(c, x));
  }
  return v;
}

std::vector<SubspaceD> BundleField::at_nodes(const QuadratureRule& rule) const {
  require_same_dim(rule.dim(), measure_->dim(), "BundleField::at_nodes");
  std::vector<SubspaceD> out;
  out.reserve(std::size_t(rule.size()));
  for (Index i = 0; i < rule.size(); ++i) out.push_back(at_node(rule, i));
  return out;
}

BundleField assign_bundle(const Measure& measure, const Resolution& resolution) {
  return BundleField(measure, resolution);
}

std::vector<double> differentiability_residual(const ScalarField& f, const SubspaceD& space,
                                               const Vector& x, const std::vector<double>& radii,
                                               int net_per_axis) {
  require_same_dim(space.ambient_dim(), f.dim(), "differentiability_residual");
  require_same_dim(x.size(), f.dim(), "differentiability_residual");
  std::vector<double> out(radii.size(), 0.0);
  const Index k = space.dim();
  if (k == 0) return out;

  // Directions: normalized points on the surface of the cube [-m, m]^k.
  std::vector<Vector> directions;
  const int m = std::max(1, net_per_axis);
  const int side = 2 * m + 1;
  Index total = 1;
  for (Index i = 0; i < k; ++i) total *= side;
  Vector c(k);
  for (Index flat = 0; flat < total; ++flat) {
    Index r = flat;
    for (Index i = 0; i < k; ++i) {
      c[i] = double(r % side - m);
      r /= side;
    }
    if (c.cwiseAbs().maxCoeff() != m) continue;
    directions.push_back(space.basis() * c.normalized());
  }

  const double fx = f.value(x);
  const Vector g = project(space, f.gradient(x));
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    const double r = radii[ri];
    double worst = 0.0;
    for (const auto& dir : directions) {
      const Vector v = r * dir;
      worst = std::max(worst, std::abs(f.value(x + v) - fx - g.dot(v)) / r);
    }
    out[ri] = worst;
  }
  return out;
}

Discretization::Discretization(Measure measure, Resolution resolution)
    : measure_(std::make_shared<const Measure>(std::move(measure))),
      resolution_(std::move(resolution)),
      rule_(quadrature(*measure_, resolution_)),
      bundle_(*measure_, resolution_),
      node_bundle_(bundle_.at_nodes(rule_)) {}

Discretization::Discretization(Measure measure, Resolution resolution,
                               BundleField::Override bundle_override)
    : measure_(std::make_shared<const Measure>(std::move(measure))),
      resolution_(std::move(resolution)),
      rule_(quadrature(*measure_, resolution_)),
      bundle_(BundleField(*measure_, resolution_).with_override(std::move(bundle_override))),
      node_bundle_(bundle_.at_nodes(rule_)) {}

}  // namespace wsob
