#include "wsob/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wsob {

using nlohmann::json;

namespace {

constexpr double kRankTol = 1e-8;

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

std::optional<double> constant_value(const std::optional<ScalarField>& f) {
  if (!f) return 1.0;
  const json& d = f->descriptor();
  if (d.value("type", "") == "constant") return d.at("value").get<double>();
  return std::nullopt;
}

double min_singular_value(const Matrix& j) {
  if (j.cols() == 0) return kInf;
  Eigen::JacobiSVD<Matrix> svd(j);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

}  // namespace

// LebesgueBox -----------------------------------------------------------------

std::optional<double> LebesgueBox::closed_form_mass() const {
  const auto c = constant_value(density);
  if (!c) return std::nullopt;
  return *c * (box.hi - box.lo).prod();
}

// Patch -----------------------------------------------------------------------

Patch Patch::segment(const Vector& from, const Vector& to) {
  require_same_dim(from.size(), to.size(), "Patch::segment");
  Matrix dir(from.size(), 1);
  dir.col(0) = to - from;
  Patch p = affine(from, dir);
  p.kind_ = PatchKind::segment;
  return p;
}

Patch Patch::affine(const Vector& origin, const Matrix& directions) {
  require_same_dim(origin.size(), directions.rows(), "Patch::affine");
  if (directions.cols() < 1 || directions.cols() >= origin.size()) {
    throw InvalidInput("Patch: parameter dimension must satisfy 1 <= k < d");
  }
  if (min_singular_value(directions) <= kRankTol) {
    throw InvalidInput("Patch: direction vectors are rank-deficient");
  }
  Patch p;
  p.kind_ = PatchKind::affine;
  p.ambient_dim_ = origin.size();
  p.param_dim_ = directions.cols();
  p.origin_ = origin;
  p.dirs_ = directions;
  p.pseudo_inverse_ = directions.completeOrthogonalDecomposition().pseudoInverse();
  return p;
}

Patch Patch::arc(const Vector& center, double radius, double angle0, double angle1,
                 const Vector& e1, const Vector& e2) {
  require_same_dim(center.size(), e1.size(), "Patch::arc");
  require_same_dim(center.size(), e2.size(), "Patch::arc");
  if (center.size() < 2) throw InvalidInput("Patch::arc: needs ambient dimension >= 2");
  if (!(radius > 0.0)) throw InvalidInput("Patch::arc: radius must be positive");
  const double span = angle1 - angle0;
  if (!(span > 0.0) || span > 2.0 * std::numbers::pi) {
    throw InvalidInput("Patch::arc: need 0 < angle1 - angle0 <= 2 pi");
  }
  if (std::abs(e1.norm() - 1.0) > 1e-9 || std::abs(e2.norm() - 1.0) > 1e-9 ||
      std::abs(e1.dot(e2)) > 1e-9) {
    throw InvalidInput("Patch::arc: plane vectors must be orthonormal");
  }
  Patch p;
  p.kind_ = PatchKind::arc;
  p.ambient_dim_ = center.size();
  p.param_dim_ = 1;
  p.origin_ = center;
  p.dirs_.resize(center.size(), 2);
  p.dirs_.col(0) = e1.normalized();
  p.dirs_.col(1) = (e2 - e2.dot(p.dirs_.col(0)) * p.dirs_.col(0)).normalized();
  p.radius_ = radius;
  p.angle0_ = angle0;
  p.angle1_ = angle1;
  return p;
}

Patch Patch::graph(const Box& parameter_box, const ScalarField& height, Index ambient_dim) {
  const Index k = parameter_box.dim();
  require_same_dim(height.dim(), k, "Patch::graph height");
  if (k < 1 || k >= ambient_dim) throw InvalidInput("Patch::graph: need 1 <= k < d");
  if (!parameter_box.bounded() || (parameter_box.hi - parameter_box.lo).minCoeff() <= 0.0) {
    throw InvalidInput("Patch::graph: parameter box must be bounded and non-degenerate");
  }
  Patch p;
  p.kind_ = PatchKind::graph;
  p.ambient_dim_ = ambient_dim;
  p.param_dim_ = k;
  p.param_box_ = parameter_box;
  p.height_ = height;
  return p;
}

Patch Patch::with_density(const ScalarField& density_on_parameters) const {
  require_same_dim(density_on_parameters.dim(), param_dim_, "Patch::with_density");
  Patch p = *this;
  p.density_ = density_on_parameters;
  return p;
}

Vector Patch::map(const Vector& u) const {
  require_same_dim(u.size(), param_dim_, "Patch::map");
  switch (kind_) {
    case PatchKind::segment:
    case PatchKind::affine: return origin_ + dirs_ * u;
    case PatchKind::arc: {
      const double t = angle0_ + u[0] * (angle1_ - angle0_);
      return origin_ + radius_ * (std::cos(t) * dirs_.col(0) + std::sin(t) * dirs_.col(1));
    }
    case PatchKind::graph: {
      const Vector p = param_box_.lo + u.cwiseProduct(param_box_.hi - param_box_.lo);
      Vector x = Vector::Zero(ambient_dim_);
      x.head(param_dim_) = p;
      x[param_dim_] = height_->value(p);
      return x;
    }
  }
  return {};
}

Matrix Patch::jacobian(const Vector& u) const {
  require_same_dim(u.size(), param_dim_, "Patch::jacobian");
  switch (kind_) {
    case PatchKind::segment:
    case PatchKind::affine: return dirs_;
    case PatchKind::arc: {
      const double span = angle1_ - angle0_;
      const double t = angle0_ + u[0] * span;
      Matrix j(ambient_dim_, 1);
      j.col(0) = radius_ * span * (-std::sin(t) * dirs_.col(0) + std::cos(t) * dirs_.col(1));
      return j;
    }
    case PatchKind::graph: {
      const Vector w = param_box_.hi - param_box_.lo;
      const Vector p = param_box_.lo + u.cwiseProduct(w);
      const Vector dh = height_->gradient(p);
      Matrix j = Matrix::Zero(ambient_dim_, param_dim_);
      for (Index i = 0; i < param_dim_; ++i) {
        j(i, i) = w[i];
        j(param_dim_, i) = w[i] * dh[i];
      }
      return j;
    }
  }
  return {};
}

double Patch::area_factor(const Vector& u) const {
  const Matrix j = jacobian(u);
  return std::sqrt(std::max(0.0, (j.transpose() * j).determinant()));
}

double Patch::density(const Vector& u) const { return density_ ? density_->value(u) : 1.0; }

Vector Patch::closest_parameter(const Vector& x) const {
  require_same_dim(x.size(), ambient_dim_, "Patch::closest_parameter");
  switch (kind_) {
    case PatchKind::segment:
    case PatchKind::affine: {
      Vector u = pseudo_inverse_ * (x - origin_);
      return u.cwiseMax(0.0).cwiseMin(1.0);
    }
    case PatchKind::arc: {
      const Vector p = x - origin_;
      const double theta = std::atan2(p.dot(dirs_.col(1)), p.dot(dirs_.col(0)));
      const double two_pi = 2.0 * std::numbers::pi;
      const double span = angle1_ - angle0_;
      double rel = std::fmod(theta - angle0_, two_pi);
      if (rel < 0.0) rel += two_pi;
      Vector u(1);
      if (rel <= span) {
        u[0] = rel / span;
      } else {
        u[0] = (rel - span) < (two_pi - rel) ? 1.0 : 0.0;
      }
      return u;
    }
    case PatchKind::graph: {
      const Vector p = x.head(param_dim_);
      const Vector w = param_box_.hi - param_box_.lo;
      Vector u = (p - param_box_.lo).cwiseQuotient(w);
      return u.cwiseMax(0.0).cwiseMin(1.0);
    }
  }
  return {};
}

double Patch::distance(const Vector& x) const { return (map(closest_parameter(x)) - x).norm(); }

Box Patch::bounding_box() const {
  if (kind_ == PatchKind::segment || kind_ == PatchKind::affine) {
    Vector lo = origin_, hi = origin_;
    for (Index j = 0; j < param_dim_; ++j) {
      lo += dirs_.col(j).cwiseMin(0.0);
      hi += dirs_.col(j).cwiseMax(0.0);
    }
    return Box(lo, hi);
  }
  // Dense parameter sampling for curved patches.
  const int per_axis = param_dim_ == 1 ? 4097 : 65;
  Vector lo = Vector::Constant(ambient_dim_, kInf), hi = Vector::Constant(ambient_dim_, -kInf);
  const Index total = static_cast<Index>(std::pow(per_axis, param_dim_));
  Vector u(param_dim_);
  for (Index flat = 0; flat < total; ++flat) {
    Index r = flat;
    for (Index i = 0; i < param_dim_; ++i) {
      u[i] = double(r % per_axis) / (per_axis - 1);
      r /= per_axis;
    }
    const Vector x = map(u);
    lo = lo.cwiseMin(x);
    hi = hi.cwiseMax(x);
  }
  return Box(lo, hi);
}

std::optional<double> Patch::closed_form_mass() const {
  const auto c = constant_value(density_);
  if (!c) return std::nullopt;
  switch (kind_) {
    case PatchKind::segment:
    case PatchKind::affine: return *c * std::sqrt((dirs_.transpose() * dirs_).determinant());
    case PatchKind::arc: return *c * radius_ * (angle1_ - angle0_);
    case PatchKind::graph: return std::nullopt;
  }
  return std::nullopt;
}

json Patch::to_json() const {
  json j;
  switch (kind_) {
    case PatchKind::segment:
      j = {{"patch", "segment"}, {"from", to_std(origin_)}, {"to", to_std(origin_ + dirs_.col(0))}};
      break;
    case PatchKind::affine: {
      json dirs = json::array();
      for (Index c = 0; c < dirs_.cols(); ++c) dirs.push_back(to_std(dirs_.col(c)));
      j = {{"patch", "affine"}, {"origin", to_std(origin_)}, {"directions", dirs}};
      break;
    }
    case PatchKind::arc:
      j = {{"patch", "arc"},
           {"center", to_std(origin_)},
           {"radius", radius_},
           {"angles", {angle0_, angle1_}},
           {"plane", {to_std(dirs_.col(0)), to_std(dirs_.col(1))}}};
      break;
    case PatchKind::graph:
      j = {{"patch", "graph"},
           {"lo", to_std(param_box_.lo)},
           {"hi", to_std(param_box_.hi)},
           {"height", height_->descriptor()}};
      break;
  }
  if (density_) j["density"] = density_->descriptor();
  return j;
}

// CantorSet -------------------------------------------------------------------

void CantorSet::validate() const {
  if (axis < 0 || axis >= ambient_dim) throw InvalidInput("cantor: axis out of range");
  require_same_dim(origin.size(), ambient_dim, "cantor origin");
  if (!(length > 0.0)) throw InvalidInput("cantor: length must be positive");
  if (depth_default < 0) throw InvalidInput("cantor: depth_default must be >= 0");
  if (variant == Variant::classic) {
    if (!(ratio > 0.0 && ratio < 0.5)) throw InvalidInput("cantor: classic ratio must lie in (0, 1/2)");
    if (!(mass > 0.0)) throw InvalidInput("cantor: mass must be positive");
  } else if (!(removal_base > 2.0)) {
    throw InvalidInput("cantor: fat removal_base must exceed 2");
  }
}

std::vector<CantorSet::Interval> CantorSet::stage(int n) const {
  if (n < 0) throw InvalidInput("cantor: negative stage");
  if (n > 26) throw InvalidInput("cantor: stage above 26 is not supported");
  std::vector<Interval> cur{{0.0, length, variant == Variant::classic ? mass : length}};
  for (int j = 1; j <= n; ++j) {
    std::vector<Interval> next;
    next.reserve(cur.size() * 2);
    if (variant == Variant::classic) {
      for (const auto& iv : cur) {
        const double piece = ratio * iv.width();
        next.push_back({iv.lo, iv.lo + piece, 0.5 * iv.mass});
        next.push_back({iv.hi - piece, iv.hi, 0.5 * iv.mass});
      }
    } else {
      const double gap = length * std::pow(removal_base, -j);
      for (const auto& iv : cur) {
        if (!(gap < iv.width())) {
          throw InvalidInput("cantor: stage " + std::to_string(j) + " gap does not fit its interval");
        }
        const double c = iv.center();
        next.push_back({iv.lo, c - 0.5 * gap, 0.0});
        next.push_back({c + 0.5 * gap, iv.hi, 0.0});
      }
      for (auto& iv : next) iv.mass = iv.width();
    }
    cur = std::move(next);
  }
  return cur;
}

double CantorSet::stage_mass(int n) const {
  if (variant == Variant::classic) return mass;
  // length * (1 - sum_{j=1..n} 2^(j-1) b^-j)
  const double q = 2.0 / removal_base;
  return length * (1.0 - (1.0 / removal_base) * (1.0 - std::pow(q, n)) / (1.0 - q));
}

Vector CantorSet::point(double t) const {
  Vector x = origin;
  x[axis] += t;
  return x;
}

double CantorSet::parameter_of(const Vector& x) const { return x[axis] - origin[axis]; }

Box CantorSet::bounding_box() const { return Box(point(0.0), point(length)); }

bool CantorSet::contains(const Vector& x, const std::vector<Interval>& intervals, double tol) const {
  for (Index i = 0; i < ambient_dim; ++i) {
    if (i != axis && std::abs(x[i] - origin[i]) > tol) return false;
  }
  const double t = parameter_of(x);
  auto it = std::lower_bound(intervals.begin(), intervals.end(), t - tol,
                             [](const Interval& iv, double v) { return iv.hi < v; });
  return it != intervals.end() && it->lo - tol <= t;
}

// Atoms -----------------------------------------------------------------------

Box Atoms::bounding_box() const {
  Box b(atoms.front().point, atoms.front().point);
  for (const auto& a : atoms) b = bounding_union(b, Box(a.point, a.point));
  return b;
}

bool Atoms::contains(const Vector& x, double tol) const {
  return std::any_of(atoms.begin(), atoms.end(),
                     [&](const Atom& a) { return (a.point - x).norm() <= tol; });
}

double Atoms::total_mass() const {
  double m = 0.0;
  for (const auto& a : atoms) m += a.mass;
  return m;
}

// MeasureComponent / Measure --------------------------------------------------

std::string MeasureComponent::type_name() const {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LebesgueBox>) return "lebesgue";
        if constexpr (std::is_same_v<T, Patch>) return "patch";
        if constexpr (std::is_same_v<T, CantorSet>) return "cantor";
        return "atoms";
      },
      shape);
}

Box MeasureComponent::bounding_box() const {
  return std::visit([](const auto& s) { return s.bounding_box(); }, shape);
}

Measure::Measure(Index dim, std::string name) : dim_(dim), name_(std::move(name)) {
  if (dim <= 0) throw InvalidInput("Measure: dimension must be positive");
}

Measure& Measure::add(double weight, ComponentShape shape, std::string label) {
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    throw InvalidInput("Measure: component weight must be positive and finite");
  }
  const std::size_t index = components_.size();
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LebesgueBox>) {
          require_same_dim(s.box.dim(), dim_, "lebesgue box");
          if (!s.box.bounded() || (s.box.hi - s.box.lo).minCoeff() <= 0.0) {
            throw InvalidInput("lebesgue: box must be bounded with positive side lengths");
          }
          if (s.density) require_same_dim(s.density->dim(), dim_, "lebesgue density");
        } else if constexpr (std::is_same_v<T, Patch>) {
          require_same_dim(s.ambient_dim(), dim_, "patch");
        } else if constexpr (std::is_same_v<T, CantorSet>) {
          require_same_dim(s.ambient_dim, dim_, "cantor");
          s.validate();
        } else {
          if (s.atoms.empty()) throw InvalidInput("atoms: list must be non-empty");
          for (const auto& a : s.atoms) {
            require_same_dim(a.point.size(), dim_, "atom");
            if (!(a.mass > 0.0) || !std::isfinite(a.mass)) {
              throw InvalidInput("atoms: masses must be positive and finite");
            }
          }
        }
      },
      shape);
  MeasureComponent c{weight, std::move(shape), std::move(label)};
  if (c.label.empty()) c.label = c.type_name() + "#" + std::to_string(index);
  components_.push_back(std::move(c));
  return *this;
}

Measure Measure::scaled(double c) const {
  if (!(c > 0.0)) throw InvalidInput("Measure::scaled: factor must be positive");
  Measure m = *this;
  for (auto& comp : m.components_) comp.weight *= c;
  return m;
}

Measure Measure::renamed(std::string name) const {
  Measure m = *this;
  m.name_ = std::move(name);
  return m;
}

Box Measure::bounding_box() const {
  Box b = components_.front().bounding_box();
  for (const auto& c : components_) b = bounding_union(b, c.bounding_box());
  return b;
}

std::optional<double> Measure::closed_form_mass(const Resolution& resolution) const {
  double total = 0.0;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const MeasureComponent& c = components_[i];
    std::optional<double> m = std::visit(
        [&](const auto& s) -> std::optional<double> {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, CantorSet>) {
            return s.stage_mass(resolution.cantor_depth_for(i, s));
          } else if constexpr (std::is_same_v<T, Atoms>) {
            return s.total_mass();
          } else {
            return s.closed_form_mass();
          }
        },
        c.shape);
    if (!m) return std::nullopt;
    total += c.weight * *m;
  }
  return total;
}

void Measure::validate() const {
  if (components_.empty()) throw InvalidInput("Measure '" + name_ + "': needs at least one component");
}

// Resolution ------------------------------------------------------------------

Resolution Resolution::refined() const { return scaled(2.0); }

Resolution Resolution::scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidInput("Resolution: scale must be positive");
  Resolution r = *this;
  r.lebesgue_cells = std::max(1, static_cast<int>(std::lround(lebesgue_cells * factor)));
  r.patch_nodes = std::max(1, static_cast<int>(std::lround(patch_nodes * factor)));
  const int delta = static_cast<int>(std::lround(std::log2(factor)));
  r.cantor_depth_offset += delta;
  for (auto& [index, value] : r.component_override) {
    (void)index;
    value = std::max(1, static_cast<int>(std::lround(value * factor)));
  }
  return r;
}

int Resolution::lebesgue_cells_for(std::size_t component) const {
  auto it = component_override.find(component);
  return it != component_override.end() ? it->second : lebesgue_cells;
}

int Resolution::patch_nodes_per_axis_for(std::size_t component, Index param_dim) const {
  auto it = component_override.find(component);
  const int total = it != component_override.end() ? it->second : patch_nodes;
  return std::max(1, static_cast<int>(std::lround(std::pow(double(total), 1.0 / double(param_dim)))));
}

int Resolution::cantor_depth_for(std::size_t component, const CantorSet& set) const {
  (void)component;
  const int base = cantor_depth >= 0 ? cantor_depth : set.depth_default;
  return std::max(0, base + cantor_depth_offset);
}

std::string Resolution::tag() const {
  std::string t = "L" + std::to_string(lebesgue_cells) + "-P" + std::to_string(patch_nodes) + "-D" +
                  (cantor_depth >= 0 ? std::to_string(cantor_depth) : std::string("def"));
  if (cantor_depth_offset != 0) t += (cantor_depth_offset > 0 ? "+" : "") + std::to_string(cantor_depth_offset);
  for (const auto& [k, v] : component_override) t += "-c" + std::to_string(k) + "=" + std::to_string(v);
  return t;
}

json Resolution::to_json() const {
  json overrides = json::object();
  for (const auto& [k, v] : component_override) overrides[std::to_string(k)] = v;
  return json{{"lebesgue_cells", lebesgue_cells},     {"patch_nodes", patch_nodes},
              {"cantor_depth", cantor_depth},         {"cantor_depth_offset", cantor_depth_offset},
              {"membership_tol", membership_tol},     {"component_override", overrides}};
}

Resolution Resolution::from_json(const json& j) {
  require_keys(j,
               {"lebesgue_cells", "patch_nodes", "cantor_depth", "cantor_depth_offset",
                "membership_tol", "component_override"},
               "resolution");
  Resolution r;
  r.lebesgue_cells = j.value("lebesgue_cells", r.lebesgue_cells);
  r.patch_nodes = j.value("patch_nodes", r.patch_nodes);
  r.cantor_depth = j.value("cantor_depth", r.cantor_depth);
  r.cantor_depth_offset = j.value("cantor_depth_offset", r.cantor_depth_offset);
  r.membership_tol = j.value("membership_tol", r.membership_tol);
  if (j.contains("component_override")) {
    for (const auto& [k, v] : j.at("component_override").items()) {
      r.component_override[std::stoul(k)] = v.get<int>();
    }
  }
  if (r.lebesgue_cells < 1 || r.patch_nodes < 1 || r.cantor_depth < -1 || !(r.membership_tol >= 0.0)) {
    throw InvalidInput("resolution: counts must be positive, cantor_depth >= -1");
  }
  return r;
}

// Quadrature ------------------------------------------------------------------

double QuadratureRule::mass() const { return weights.sum(); }

namespace {

struct RuleBuilder {
  std::vector<Vector> nodes;
  std::vector<double> weights;
  std::vector<std::size_t> component;
  std::vector<Vector> parameter;

  void push(Vector x, double w, std::size_t c, Vector u = {}) {
    nodes.push_back(std::move(x));
    weights.push_back(w);
    component.push_back(c);
    parameter.push_back(std::move(u));
  }
};

// Iterates the midpoints of an n^k tensor grid on [0,1]^k.
template <typename F>
void for_each_midpoint(Index k, int n, F&& visit) {
  Index total = 1;
  for (Index i = 0; i < k; ++i) total *= n;
  Vector u(k);
  for (Index flat = 0; flat < total; ++flat) {
    Index r = flat;
    for (Index i = 0; i < k; ++i) {
      u[i] = (double(r % n) + 0.5) / n;
      r /= n;
    }
    visit(u);
  }
}

}  // namespace

QuadratureRule quadrature(const Measure& measure, const Resolution& resolution) {
  measure.validate();
  RuleBuilder b;
  const Index d = measure.dim();
  for (std::size_t ci = 0; ci < measure.components().size(); ++ci) {
    const MeasureComponent& comp = measure.components()[ci];
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, LebesgueBox>) {
            const int n = resolution.lebesgue_cells_for(ci);
            if (n < 1 || std::pow(double(n), double(d)) > 2e7) {
              throw InvalidInput("lebesgue: resolution " + std::to_string(n) + "^" +
                                 std::to_string(d) + " is out of range");
            }
            const Vector width = s.box.hi - s.box.lo;
            const double cell = width.prod() / std::pow(double(n), double(d));
            for_each_midpoint(d, n, [&](const Vector& u) {
              Vector x = s.box.lo + u.cwiseProduct(width);
              const double rho = s.density ? s.density->value(x) : 1.0;
              if (!(rho >= 0.0)) {
                throw InvalidInput("lebesgue: density is negative or non-finite in component '" +
                                   comp.label + "'");
              }
              b.push(std::move(x), comp.weight * cell * rho, ci);
            });
          } else if constexpr (std::is_same_v<T, Patch>) {
            const int n = resolution.patch_nodes_per_axis_for(ci, s.param_dim());
            const double cell = 1.0 / std::pow(double(n), double(s.param_dim()));
            for_each_midpoint(s.param_dim(), n, [&](const Vector& u) {
              const Matrix j = s.jacobian(u);
              if (min_singular_value(j) <= kRankTol) {
                throw InvalidInput("degenerate patch: component " + std::to_string(ci) + " ('" +
                                   comp.label + "') has a rank-deficient Jacobian at parameter u=" +
                                   json(to_std(u)).dump());
              }
              const double rho = s.density(u);
              if (!(rho >= 0.0)) {
                throw InvalidInput("patch: density is negative or non-finite in component '" +
                                   comp.label + "'");
              }
              const double area = std::sqrt((j.transpose() * j).determinant());
              b.push(s.map(u), comp.weight * cell * rho * area, ci, u);
            });
          } else if constexpr (std::is_same_v<T, CantorSet>) {
            for (const auto& iv : s.stage(resolution.cantor_depth_for(ci, s))) {
              b.push(s.point(iv.center()), comp.weight * iv.mass, ci);
            }
          } else {
            for (const auto& a : s.atoms) b.push(a.point, comp.weight * a.mass, ci);
          }
        },
        comp.shape);
  }
  QuadratureRule rule;
  const Index n = static_cast<Index>(b.nodes.size());
  rule.nodes.resize(d, n);
  rule.weights.resize(n);
  for (Index i = 0; i < n; ++i) {
    rule.nodes.col(i) = b.nodes[std::size_t(i)];
    rule.weights[i] = b.weights[std::size_t(i)];
  }
  rule.component = std::move(b.component);
  rule.parameter = std::move(b.parameter);
  rule.resolution = resolution.to_json();
  return rule;
}

double integrate(const QuadratureRule& rule, const ScalarField& g) {
  require_same_dim(g.dim(), rule.dim(), "integrate");
  const Vector values = g.values(rule.nodes);
  for (Index i = 0; i < rule.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw EvaluationError("integrate: non-finite value of field '" + g.label() + "' at node " +
                            std::to_string(i));
    }
  }
  double s = 0.0;
  for (Index i = 0; i < rule.size(); ++i) s += rule.weights[i] * values[i];
  return s;
}

double l2_norm(const QuadratureRule& rule, const ScalarField& g) {
  require_same_dim(g.dim(), rule.dim(), "l2_norm");
  return l2_norm(rule, Matrix(g.values(rule.nodes).transpose()));
}

double l2_norm(const QuadratureRule& rule, const Matrix& samples) {
  require_same_dim(samples.cols(), rule.size(), "l2_norm samples");
  double s = 0.0;
  for (Index i = 0; i < rule.size(); ++i) {
    const double sq = samples.col(i).squaredNorm();
    if (!std::isfinite(sq)) throw EvaluationError("l2_norm: non-finite sample at node " + std::to_string(i));
    s += rule.weights[i] * sq;
  }
  return std::sqrt(s);
}

// JSON ------------------------------------------------------------------------

json measure_to_json(const Measure& measure) {
  json comps = json::array();
  for (const auto& c : measure.components()) {
    json j = std::visit(
        [](const auto& s) -> json {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, LebesgueBox>) {
            json o = {{"type", "lebesgue"}, {"lo", to_std(s.box.lo)}, {"hi", to_std(s.box.hi)}};
            if (s.density) o["density"] = s.density->descriptor();
            return o;
          } else if constexpr (std::is_same_v<T, Patch>) {
            json o = s.to_json();
            o["type"] = "patch";
            return o;
          } else if constexpr (std::is_same_v<T, CantorSet>) {
            json o = {{"type", "cantor"},
                      {"variant", s.variant == CantorSet::Variant::classic ? "classic" : "fat"},
                      {"axis", s.axis},
                      {"origin", to_std(s.origin)},
                      {"length", s.length},
                      {"depth_default", s.depth_default}};
            if (s.variant == CantorSet::Variant::classic) {
              o["ratio"] = s.ratio;
              o["mass"] = s.mass;
            } else {
              o["removal_base"] = s.removal_base;
            }
            return o;
          } else {
            json atoms = json::array();
            for (const auto& a : s.atoms) atoms.push_back({{"point", to_std(a.point)}, {"mass", a.mass}});
            return {{"type", "atoms"}, {"atoms", atoms}};
          }
        },
        c.shape);
    j["weight"] = c.weight;
    j["label"] = c.label;
    comps.push_back(std::move(j));
  }
  return json{{"dim", measure.dim()}, {"name", measure.name()}, {"components", comps}};
}

namespace {

double num(const json& j, const char* key, const std::string& where, std::optional<double> fallback = {}) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw InvalidInput(where + ": missing field '" + key + "'");
  }
  if (!j.at(key).is_number()) throw InvalidInput(where + "." + key + ": expected a number");
  return j.at(key).get<double>();
}

ComponentShape parse_component(const json& c, Index d, const std::string& where) {
  const std::string type = c.at("type").get<std::string>();
  if (type == "lebesgue") {
    require_keys(c, {"type", "weight", "label", "lo", "hi", "density"}, where);
    LebesgueBox lb{Box(vector_from_json(c.at("lo"), d, where + ".lo"),
                       vector_from_json(c.at("hi"), d, where + ".hi")),
                   std::nullopt};
    if (c.contains("density")) lb.density = parse_field(c.at("density"), d);
    return lb;
  }
  if (type == "patch") {
    if (!c.contains("patch")) throw InvalidInput(where + ": missing field 'patch'");
    const std::string kind = c.at("patch").get<std::string>();
    std::optional<Patch> p;
    if (kind == "segment") {
      require_keys(c, {"type", "weight", "label", "patch", "from", "to", "density"}, where);
      p = Patch::segment(vector_from_json(c.at("from"), d, where + ".from"),
                         vector_from_json(c.at("to"), d, where + ".to"));
    } else if (kind == "arc") {
      require_keys(c, {"type", "weight", "label", "patch", "center", "radius", "angles", "plane", "density"},
                   where);
      const Vector angles = vector_from_json(c.at("angles"), 2, where + ".angles");
      Vector e1 = Vector::Unit(d, 0), e2 = Vector::Unit(d, 1);
      if (c.contains("plane")) {
        const json& pl = c.at("plane");
        if (!pl.is_array() || pl.size() != 2) throw InvalidInput(where + ".plane: expected two vectors");
        e1 = vector_from_json(pl[0], d, where + ".plane[0]");
        e2 = vector_from_json(pl[1], d, where + ".plane[1]");
      }
      p = Patch::arc(vector_from_json(c.at("center"), d, where + ".center"), num(c, "radius", where),
                     angles[0], angles[1], e1, e2);
    } else if (kind == "graph") {
      require_keys(c, {"type", "weight", "label", "patch", "lo", "hi", "height", "density"}, where);
      const Vector lo = vector_from_json(c.at("lo"), -1, where + ".lo");
      const Vector hi = vector_from_json(c.at("hi"), lo.size(), where + ".hi");
      p = Patch::graph(Box(lo, hi), parse_field(c.at("height"), lo.size()), d);
    } else if (kind == "affine") {
      require_keys(c, {"type", "weight", "label", "patch", "origin", "directions", "density"}, where);
      const json& dirs = c.at("directions");
      if (!dirs.is_array() || dirs.empty()) throw InvalidInput(where + ".directions: expected vectors");
      Matrix m(d, static_cast<Index>(dirs.size()));
      for (std::size_t i = 0; i < dirs.size(); ++i) {
        m.col(Index(i)) = vector_from_json(dirs[i], d, where + ".directions");
      }
      p = Patch::affine(vector_from_json(c.at("origin"), d, where + ".origin"), m);
    } else {
      throw InvalidInput(where + ": unknown patch kind '" + kind + "'");
    }
    if (c.contains("density")) p = p->with_density(parse_field(c.at("density"), p->param_dim()));
    return *p;
  }
  if (type == "cantor") {
    require_keys(c,
                 {"type", "weight", "label", "variant", "axis", "origin", "length", "ratio",
                  "removal_base", "mass", "depth_default"},
                 where);
    CantorSet s;
    const std::string variant = c.value("variant", std::string("classic"));
    if (variant == "classic") {
      s.variant = CantorSet::Variant::classic;
    } else if (variant == "fat") {
      s.variant = CantorSet::Variant::fat;
    } else {
      throw InvalidInput(where + ".variant: expected 'classic' or 'fat'");
    }
    s.ambient_dim = d;
    s.axis = static_cast<Index>(num(c, "axis", where, 0.0));
    s.origin = c.contains("origin") ? vector_from_json(c.at("origin"), d, where + ".origin") : Vector::Zero(d);
    s.length = num(c, "length", where, 1.0);
    s.ratio = num(c, "ratio", where, 1.0 / 3.0);
    s.removal_base = num(c, "removal_base", where, 4.0);
    s.mass = num(c, "mass", where, 1.0);
    s.depth_default = static_cast<int>(num(c, "depth_default", where, 12.0));
    return s;
  }
  if (type == "atoms") {
    require_keys(c, {"type", "weight", "label", "atoms"}, where);
    Atoms a;
    for (const auto& item : c.at("atoms")) {
      require_keys(item, {"point", "mass"}, where + ".atoms");
      a.atoms.push_back({vector_from_json(item.at("point"), d, where + ".atoms.point"),
                         num(item, "mass", where + ".atoms", 1.0)});
    }
    return a;
  }
  throw InvalidInput(where + ": unknown component type '" + type + "'");
}

}  // namespace

Measure parse_measure(const json& j) {
  require_keys(j, {"dim", "name", "components"}, "measure");
  if (!j.contains("dim") || !j.at("dim").is_number_integer()) {
    throw InvalidInput("measure: missing integer field 'dim'");
  }
  const Index d = j.at("dim").get<Index>();
  Measure m(d, j.value("name", std::string("measure")));
  if (!j.contains("components") || !j.at("components").is_array() || j.at("components").empty()) {
    throw InvalidInput("measure: 'components' must be a non-empty array");
  }
  std::size_t i = 0;
  for (const auto& c : j.at("components")) {
    const std::string where = "measure.components[" + std::to_string(i++) + "]";
    if (!c.is_object() || !c.contains("type")) throw InvalidInput(where + ": missing 'type'");
    m.add(num(c, "weight", where, 1.0), parse_component(c, d, where), c.value("label", std::string()));
  }
  return m;
}

}  // namespace wsob
