#include "wsob/fields.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace wsob {

using nlohmann::json;

// NormPlugin ------------------------------------------------------------------

NormPlugin NormPlugin::parse(const std::string& p) {
  if (p == "1") return {NormKind::l1};
  if (p == "2") return {NormKind::l2};
  if (p == "inf" || p == "infinity") return {NormKind::linf};
  throw InvalidInput("unsupported norm p='" + p + "' (expected 1, 2 or inf)");
}

double NormPlugin::norm(const Vector& v) const {
  switch (kind) {
    case NormKind::l1: return v.lpNorm<1>();
    case NormKind::l2: return v.norm();
    case NormKind::linf: return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
  }
  return 0.0;
}

double NormPlugin::dual_norm(const Vector& v) const {
  switch (kind) {
    case NormKind::l1: return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
    case NormKind::l2: return v.norm();
    case NormKind::linf: return v.lpNorm<1>();
  }
  return 0.0;
}

std::string NormPlugin::label() const {
  switch (kind) {
    case NormKind::l1: return "1";
    case NormKind::l2: return "2";
    case NormKind::linf: return "inf";
  }
  return "?";
}

// ScalarField -----------------------------------------------------------------

ScalarField::ScalarField(Index dim, ValueFn value, GradientFn gradient, BoundsFn bounds,
                         std::optional<Box> support, json descriptor)
    : dim_(dim),
      value_(std::make_shared<const ValueFn>(std::move(value))),
      gradient_(std::make_shared<const GradientFn>(std::move(gradient))),
      bounds_(std::make_shared<const BoundsFn>(std::move(bounds))),
      support_(std::move(support)),
      descriptor_(std::move(descriptor)) {
  if (dim_ <= 0) throw InvalidInput("ScalarField: dimension must be positive");
  if (support_) require_same_dim(support_->dim(), dim_, "ScalarField support");
}

double ScalarField::value(const Vector& x) const {
  require_same_dim(x.size(), dim_, "ScalarField::value");
  return (*value_)(x);
}

Vector ScalarField::gradient(const Vector& x) const {
  require_same_dim(x.size(), dim_, "ScalarField::gradient");
  return (*gradient_)(x);
}

Vector ScalarField::values(const Matrix& points) const {
  require_same_dim(points.rows(), dim_, "ScalarField::values");
  if (batch_value_) return (*batch_value_)(points);
  Vector out(points.cols());
  for (Index j = 0; j < points.cols(); ++j) out[j] = (*value_)(points.col(j));
  return out;
}

Matrix ScalarField::gradients(const Matrix& points) const {
  require_same_dim(points.rows(), dim_, "ScalarField::gradients");
  if (batch_gradient_) return (*batch_gradient_)(points);
  Matrix out(dim_, points.cols());
  for (Index j = 0; j < points.cols(); ++j) out.col(j) = (*gradient_)(points.col(j));
  return out;
}

ScalarField ScalarField::with_batch(BatchValueFn values, BatchGradientFn gradients) const {
  ScalarField copy = *this;
  copy.batch_value_ = std::make_shared<const BatchValueFn>(std::move(values));
  copy.batch_gradient_ = std::make_shared<const BatchGradientFn>(std::move(gradients));
  return copy;
}

FieldBounds ScalarField::bounds_on(const Box& region) const {
  Box r = support_ ? intersect(region, *support_) : region;
  if (r.empty()) return {0.0, 0.0};
  return (*bounds_)(r);
}

double ScalarField::lipschitz() const { return bounds_on(Box::everywhere(dim_)).lipschitz; }

ScalarField ScalarField::named(std::string name) const {
  ScalarField copy = *this;
  copy.name_ = std::move(name);
  return copy;
}

std::string ScalarField::label() const { return name_.empty() ? descriptor_.dump() : name_; }

// Profiles --------------------------------------------------------------------

double smoothstep(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

double smoothstep_derivative(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  const double w = u * (1.0 - u);
  return 30.0 * w * w;
}

double lip(const ScalarField& f, const Vector& x, NormPlugin norm) {
  return norm.dual_norm(f.gradient(x));
}

// Catalog ---------------------------------------------------------------------

ScalarField constant(Index dim, double c) {
  std::optional<Box> support;
  if (c == 0.0) support = Box::cube(dim, 0.0, 0.0);
  return ScalarField(
      dim, [c](const Vector&) { return c; },
      [dim](const Vector&) { return Vector::Zero(dim).eval(); },
      [c](const Box&) { return FieldBounds{std::abs(c), 0.0}; }, support,
      json{{"type", "constant"}, {"value", c}})
      .with_batch([c](const Matrix& x) { return Vector::Constant(x.cols(), c).eval(); },
                  [dim](const Matrix& x) { return Matrix::Zero(dim, x.cols()).eval(); });
}

ScalarField coordinate(Index dim, Index axis) {
  if (axis < 0 || axis >= dim) throw InvalidInput("coordinate: axis out of range");
  return ScalarField(
      dim, [axis](const Vector& x) { return x[axis]; },
      [dim, axis](const Vector&) { return Vector::Unit(dim, axis).eval(); },
      [axis](const Box& r) { return FieldBounds{r.abs_max()[axis], 1.0}; }, std::nullopt,
      json{{"type", "coordinate"}, {"index", axis}})
      .with_batch([axis](const Matrix& x) { return Vector(x.row(axis).transpose()); },
                  [dim, axis](const Matrix& x) {
                    Matrix g = Matrix::Zero(dim, x.cols());
                    g.row(axis).setOnes();
                    return g;
                  });
}

ScalarField linear(const Vector& slope, double offset) {
  const Index dim = slope.size();
  std::vector<double> a(slope.data(), slope.data() + dim);
  return ScalarField(
      dim, [slope, offset](const Vector& x) { return slope.dot(x) + offset; },
      [slope](const Vector&) { return slope; },
      [slope, offset](const Box& r) {
        double sup = std::abs(offset);
        const Vector m = r.abs_max();
        for (Index i = 0; i < slope.size(); ++i) {
          if (slope[i] != 0.0) sup += std::abs(slope[i]) * m[i];
        }
        return FieldBounds{sup, slope.norm()};
      },
      std::nullopt, json{{"type", "linear"}, {"slope", a}, {"offset", offset}})
      .with_batch(
          [slope, offset](const Matrix& x) {
            Vector v(x.cols());
            for (Index j = 0; j < x.cols(); ++j) v[j] = slope.dot(x.col(j)) + offset;
            return v;
          },
          [slope](const Matrix& x) { return slope.replicate(1, x.cols()).eval(); });
}

ScalarField polynomial(Index dim, std::vector<Monomial> terms) {
  json jterms = json::array();
  for (const auto& t : terms) {
    if (static_cast<Index>(t.exponents.size()) != dim) {
      throw InvalidInput("polynomial: exponent vector length must equal the dimension");
    }
    for (int e : t.exponents) {
      if (e < 0) throw InvalidInput("polynomial: negative exponent");
    }
    jterms.push_back({{"coefficient", t.coefficient}, {"exponents", t.exponents}});
  }
  auto ipow = [](double b, int e) {
    double r = 1.0;
    for (int k = 0; k < e; ++k) r *= b;
    return r;
  };
  auto value_at = [terms, ipow](const auto& x) {
    double s = 0.0;
    for (const auto& t : terms) {
      double m = t.coefficient;
      for (Index i = 0; i < x.size(); ++i) m *= ipow(x[i], t.exponents[i]);
      s += m;
    }
    return s;
  };
  auto gradient_at = [terms, dim, ipow](const auto& x, auto&& g) {
    g.setZero();
    for (const auto& t : terms) {
      for (Index i = 0; i < dim; ++i) {
        if (t.exponents[i] == 0) continue;
        double m = t.coefficient * t.exponents[i];
        for (Index j = 0; j < dim; ++j) {
          const int e = j == i ? t.exponents[j] - 1 : t.exponents[j];
          m *= ipow(x[j], e);
        }
        g[i] += m;
      }
    }
  };
  auto value = [value_at](const Vector& x) { return value_at(x); };
  auto gradient = [gradient_at, dim](const Vector& x) {
    Vector g(dim);
    gradient_at(x, g);
    return g;
  };
  auto bounds = [terms, dim](const Box& r) {
    const Vector m = r.abs_max();
    auto power = [](double base, int e) { return e == 0 ? 1.0 : std::pow(base, e); };
    double sup = 0.0;
    Vector partial = Vector::Zero(dim);
    for (const auto& t : terms) {
      if (t.coefficient == 0.0) continue;
      double mono = std::abs(t.coefficient);
      for (Index i = 0; i < dim; ++i) mono *= power(m[i], t.exponents[i]);
      sup += mono;
      for (Index i = 0; i < dim; ++i) {
        if (t.exponents[i] == 0) continue;
        double p = std::abs(t.coefficient) * t.exponents[i];
        for (Index j = 0; j < dim; ++j) p *= power(m[j], j == i ? t.exponents[j] - 1 : t.exponents[j]);
        partial[i] += p;
      }
    }
    return FieldBounds{sup, partial.norm()};
  };
  return ScalarField(dim, value, gradient, bounds, std::nullopt,
                     json{{"type", "polynomial"}, {"terms", jterms}})
      .with_batch(
          [value_at](const Matrix& x) {
            Vector v(x.cols());
            for (Index j = 0; j < x.cols(); ++j) v[j] = value_at(x.col(j));
            return v;
          },
          [gradient_at, dim](const Matrix& x) {
            Matrix g(dim, x.cols());
            for (Index j = 0; j < x.cols(); ++j) gradient_at(x.col(j), g.col(j));
            return g;
          });
}

ScalarField gaussian(const Vector& center, double sigma, double amplitude) {
  if (!(sigma > 0.0)) throw InvalidInput("gaussian: sigma must be positive");
  const Index dim = center.size();
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  std::vector<double> c(center.data(), center.data() + dim);
  return ScalarField(
      dim,
      [=](const Vector& x) { return amplitude * std::exp(-(x - center).squaredNorm() * inv2s2); },
      [=](const Vector& x) {
        const Vector r = x - center;
        return (-2.0 * inv2s2 * amplitude * std::exp(-r.squaredNorm() * inv2s2) * r).eval();
      },
      [=](const Box&) {
        return FieldBounds{std::abs(amplitude), std::abs(amplitude) / sigma * std::exp(-0.5)};
      },
      std::nullopt,
      json{{"type", "gaussian"}, {"center", c}, {"sigma", sigma}, {"amplitude", amplitude}})
      .with_batch(
          [=](const Matrix& x) {
            Vector v(x.cols());
            for (Index j = 0; j < x.cols(); ++j) {
              v[j] = amplitude * std::exp(-(x.col(j) - center).squaredNorm() * inv2s2);
            }
            return v;
          },
          [=](const Matrix& x) {
            Matrix g(dim, x.cols());
            for (Index j = 0; j < x.cols(); ++j) {
              const double r2 = (x.col(j) - center).squaredNorm();
              g.col(j) = -2.0 * inv2s2 * amplitude * std::exp(-r2 * inv2s2) * (x.col(j) - center);
            }
            return g;
          });
}

namespace {

// One axis of the tensor-product cutoff.
struct RampProfile {
  double outer_lo, inner_lo, inner_hi, outer_hi;

  double value(double t) const {
    if (t <= outer_lo || t >= outer_hi) return 0.0;
    if (t < inner_lo) return smoothstep((t - outer_lo) / (inner_lo - outer_lo));
    if (t > inner_hi) return smoothstep((outer_hi - t) / (outer_hi - inner_hi));
    return 1.0;
  }
  double derivative(double t) const {
    if (t <= outer_lo || t >= outer_hi) return 0.0;
    if (t < inner_lo) {
      const double w = inner_lo - outer_lo;
      return smoothstep_derivative((t - outer_lo) / w) / w;
    }
    if (t > inner_hi) {
      const double w = outer_hi - inner_hi;
      return -smoothstep_derivative((outer_hi - t) / w) / w;
    }
    return 0.0;
  }
  double max_slope() const {
    return kSmoothstepMaxSlope / std::min(inner_lo - outer_lo, outer_hi - inner_hi);
  }
};

}  // namespace

ScalarField bump_cutoff(const Box& inner, const Box& outer) {
  require_same_dim(inner.dim(), outer.dim(), "bump_cutoff");
  const Index dim = inner.dim();
  if (!inner.bounded() || !outer.bounded()) throw InvalidInput("bump_cutoff: boxes must be bounded");
  std::vector<RampProfile> axes;
  for (Index i = 0; i < dim; ++i) {
    if (!(inner.lo[i] <= inner.hi[i]) || !(outer.lo[i] < inner.lo[i]) || !(inner.hi[i] < outer.hi[i])) {
      throw InvalidInput("bump_cutoff: inner box must lie strictly inside the outer box (axis " +
                         std::to_string(i) + ")");
    }
    axes.push_back({outer.lo[i], inner.lo[i], inner.hi[i], outer.hi[i]});
  }
  auto value_at = [axes](const auto& x) {
    double v = 1.0;
    for (std::size_t i = 0; i < axes.size() && v != 0.0; ++i) v *= axes[i].value(x[Index(i)]);
    return v;
  };
  auto gradient_at = [axes, dim](const auto& x, auto&& g) {
    g.setZero();
    double vals[16], ders[16];
    std::vector<double> vbuf, dbuf;
    double* pv = vals;
    double* pd = ders;
    if (dim > 16) {
      vbuf.resize(std::size_t(dim));
      dbuf.resize(std::size_t(dim));
      pv = vbuf.data();
      pd = dbuf.data();
    }
    for (Index i = 0; i < dim; ++i) {
      pv[i] = axes[std::size_t(i)].value(x[i]);
      pd[i] = axes[std::size_t(i)].derivative(x[i]);
    }
    for (Index i = 0; i < dim; ++i) {
      if (pd[i] == 0.0) continue;
      double p = pd[i];
      for (Index j = 0; j < dim; ++j) {
        if (j != i) p *= pv[j];
      }
      g[i] = p;
    }
  };
  auto value = [value_at](const Vector& x) { return value_at(x); };
  auto gradient = [gradient_at, dim](const Vector& x) {
    Vector g(dim);
    gradient_at(x, g);
    return g;
  };
  double lip2 = 0.0;
  for (const auto& a : axes) lip2 += a.max_slope() * a.max_slope();
  const double lipschitz = std::sqrt(lip2);
  return ScalarField(
      dim, value, gradient, [lipschitz](const Box&) { return FieldBounds{1.0, lipschitz}; }, outer,
      json{{"type", "bump"}, {"inner", box_to_json(inner)}, {"outer", box_to_json(outer)}})
      .with_batch(
          [value_at](const Matrix& x) {
            Vector v(x.cols());
            for (Index j = 0; j < x.cols(); ++j) v[j] = value_at(x.col(j));
            return v;
          },
          [gradient_at, dim](const Matrix& x) {
            Matrix g(dim, x.cols());
            for (Index j = 0; j < x.cols(); ++j) gradient_at(x.col(j), g.col(j));
            return g;
          });
}

ScalarField unit_cutoff(Index dim) {
  return bump_cutoff(Box::cube(dim, 0.0, 1.0), Box::cube(dim, -0.5, 1.5));
}

ScalarField tent(const Vector& center, double radius) {
  if (!(radius > 0.0)) throw InvalidInput("tent: radius must be positive");
  const Index dim = center.size();
  const double inv_r2 = 1.0 / (radius * radius);
  std::vector<double> c(center.data(), center.data() + dim);
  const double lipschitz = 8.0 / (3.0 * std::sqrt(3.0) * radius);
  return ScalarField(
      dim,
      [=](const Vector& x) {
        const double q = 1.0 - (x - center).squaredNorm() * inv_r2;
        return q > 0.0 ? q * q : 0.0;
      },
      [=](const Vector& x) {
        const Vector r = x - center;
        const double q = 1.0 - r.squaredNorm() * inv_r2;
        if (q <= 0.0) return Vector::Zero(dim).eval();
        return (-4.0 * q * inv_r2 * r).eval();
      },
      [=](const Box&) { return FieldBounds{1.0, lipschitz}; },
      Box(center.array() - radius, center.array() + radius),
      json{{"type", "tent"}, {"center", c}, {"radius", radius}})
      .with_batch(
          [=](const Matrix& x) {
            Vector v(x.cols());
            for (Index j = 0; j < x.cols(); ++j) {
              const double q = 1.0 - (x.col(j) - center).squaredNorm() * inv_r2;
              v[j] = q > 0.0 ? q * q : 0.0;
            }
            return v;
          },
          [=](const Matrix& x) {
            Matrix g(dim, x.cols());
            for (Index j = 0; j < x.cols(); ++j) {
              const double q = 1.0 - (x.col(j) - center).squaredNorm() * inv_r2;
              if (q <= 0.0) {
                g.col(j).setZero();
              } else {
                g.col(j) = -4.0 * q * inv_r2 * (x.col(j) - center);
              }
            }
            return g;
          });
}

// Combinators -----------------------------------------------------------------

ScalarField combine(const ScalarField& f, const ScalarField& g, CombineOp op) {
  const Index dim = f.dim();
  switch (op.kind) {
    case CombineKind::scale: {
      const double a = op.factor;
      return ScalarField(
          dim, [f, a](const Vector& x) { return a * f.value(x); },
          [f, a](const Vector& x) { return (a * f.gradient(x)).eval(); },
          [f, a](const Box& r) {
            const FieldBounds b = f.bounds_on(r);
            return FieldBounds{std::abs(a) * b.sup, std::abs(a) * b.lipschitz};
          },
          f.support(), json{{"type", "scale"}, {"factor", a}, {"arg", f.descriptor()}})
          .with_batch([f, a](const Matrix& x) { return (a * f.values(x)).eval(); },
                      [f, a](const Matrix& x) { return (a * f.gradients(x)).eval(); });
    }
    case CombineKind::add:
    case CombineKind::sub: {
      require_same_dim(f.dim(), g.dim(), "combine");
      const double s = op.kind == CombineKind::add ? 1.0 : -1.0;
      std::optional<Box> support;
      if (f.support() && g.support()) support = bounding_union(*f.support(), *g.support());
      return ScalarField(
          dim, [f, g, s](const Vector& x) { return f.value(x) + s * g.value(x); },
          [f, g, s](const Vector& x) { return (f.gradient(x) + s * g.gradient(x)).eval(); },
          [f, g](const Box& r) {
            const FieldBounds a = f.bounds_on(r), b = g.bounds_on(r);
            return FieldBounds{a.sup + b.sup, a.lipschitz + b.lipschitz};
          },
          support,
          json{{"type", op.kind == CombineKind::add ? "add" : "sub"},
               {"args", {f.descriptor(), g.descriptor()}}})
          .with_batch([f, g, s](const Matrix& x) { return (f.values(x) + s * g.values(x)).eval(); },
                      [f, g, s](const Matrix& x) { return (f.gradients(x) + s * g.gradients(x)).eval(); });
    }
    case CombineKind::mul: {
      require_same_dim(f.dim(), g.dim(), "combine");
      std::optional<Box> support;
      if (f.support() && g.support()) {
        support = intersect(*f.support(), *g.support());
      } else if (f.support()) {
        support = f.support();
      } else if (g.support()) {
        support = g.support();
      }
      return ScalarField(
          dim, [f, g](const Vector& x) { return f.value(x) * g.value(x); },
          [f, g](const Vector& x) {
            return (g.value(x) * f.gradient(x) + f.value(x) * g.gradient(x)).eval();
          },
          [f, g](const Box& r) {
            Box rr = r;
            if (f.support()) rr = intersect(rr, *f.support());
            if (g.support()) rr = intersect(rr, *g.support());
            if (rr.empty()) return FieldBounds{0.0, 0.0};
            const FieldBounds a = f.bounds_on(rr), b = g.bounds_on(rr);
            auto prod = [](double u, double v) { return (u == 0.0 || v == 0.0) ? 0.0 : u * v; };
            return FieldBounds{prod(a.sup, b.sup), prod(a.sup, b.lipschitz) + prod(b.sup, a.lipschitz)};
          },
          support, json{{"type", "mul"}, {"args", {f.descriptor(), g.descriptor()}}})
          .with_batch([f, g](const Matrix& x) { return f.values(x).cwiseProduct(g.values(x)).eval(); },
                      [f, g](const Matrix& x) {
                        const Vector vf = f.values(x), vg = g.values(x);
                        const Matrix gf = f.gradients(x), gg = g.gradients(x);
                        Matrix out(gf.rows(), gf.cols());
                        for (Index j = 0; j < out.cols(); ++j) out.col(j) = vg[j] * gf.col(j) + vf[j] * gg.col(j);
                        return out;
                      });
    }
  }
  throw InvalidInput("combine: unknown operation");
}

ScalarField scale(double factor, const ScalarField& f) {
  return combine(f, f, {CombineKind::scale, factor});
}

ScalarField operator+(const ScalarField& f, const ScalarField& g) {
  return combine(f, g, {CombineKind::add});
}
ScalarField operator-(const ScalarField& f, const ScalarField& g) {
  return combine(f, g, {CombineKind::sub});
}
ScalarField operator*(const ScalarField& f, const ScalarField& g) {
  return combine(f, g, {CombineKind::mul});
}
ScalarField operator*(double a, const ScalarField& f) { return scale(a, f); }

// JSON ------------------------------------------------------------------------

json box_to_json(const Box& box) {
  return json{{"lo", std::vector<double>(box.lo.data(), box.lo.data() + box.dim())},
              {"hi", std::vector<double>(box.hi.data(), box.hi.data() + box.dim())}};
}

Vector vector_from_json(const json& j, Index dim, const std::string& where) {
  if (!j.is_array()) throw InvalidInput(where + ": expected an array of numbers");
  if (dim >= 0 && static_cast<Index>(j.size()) != dim) {
    throw InvalidInput(where + ": expected " + std::to_string(dim) + " entries, got " +
                       std::to_string(j.size()));
  }
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InvalidInput(where + "[" + std::to_string(i) + "]: not a number");
    v[Index(i)] = j[i].get<double>();
  }
  return v;
}

Box box_from_json(const json& j, Index dim) {
  require_keys(j, {"lo", "hi"}, "box");
  if (!j.contains("lo") || !j.contains("hi")) throw InvalidInput("box: requires 'lo' and 'hi'");
  return Box(vector_from_json(j.at("lo"), dim, "box.lo"), vector_from_json(j.at("hi"), dim, "box.hi"));
}

void require_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw InvalidInput(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.count(key)) throw InvalidInput(where + ": unknown key '" + key + "'");
  }
}

namespace {

double number_at(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw InvalidInput(where + ": missing numeric field '" + key + "'");
  }
  return j.at(key).get<double>();
}

}  // namespace

ScalarField parse_field(const json& j, Index dim) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    throw InvalidInput("field: expected an object with a string 'type'");
  }
  const std::string type = j.at("type").get<std::string>();
  const std::string where = "field(" + type + ")";
  std::optional<std::string> name;
  if (j.contains("name")) name = j.at("name").get<std::string>();
  auto finish = [&](ScalarField f) { return name ? f.named(*name) : f; };

  if (type == "constant") {
    require_keys(j, {"type", "name", "value"}, where);
    return finish(constant(dim, number_at(j, "value", where)));
  }
  if (type == "coordinate") {
    require_keys(j, {"type", "name", "index"}, where);
    return finish(coordinate(dim, static_cast<Index>(number_at(j, "index", where))));
  }
  if (type == "linear") {
    require_keys(j, {"type", "name", "slope", "offset"}, where);
    const double offset = j.contains("offset") ? number_at(j, "offset", where) : 0.0;
    return finish(linear(vector_from_json(j.at("slope"), dim, where + ".slope"), offset));
  }
  if (type == "polynomial") {
    require_keys(j, {"type", "name", "terms"}, where);
    std::vector<Monomial> terms;
    for (const auto& t : j.at("terms")) {
      require_keys(t, {"coefficient", "exponents"}, where + ".terms");
      terms.push_back({number_at(t, "coefficient", where), t.at("exponents").get<std::vector<int>>()});
    }
    return finish(polynomial(dim, std::move(terms)));
  }
  if (type == "gaussian") {
    require_keys(j, {"type", "name", "center", "sigma", "amplitude"}, where);
    const double amp = j.contains("amplitude") ? number_at(j, "amplitude", where) : 1.0;
    return finish(gaussian(vector_from_json(j.at("center"), dim, where + ".center"),
                           number_at(j, "sigma", where), amp));
  }
  if (type == "bump") {
    require_keys(j, {"type", "name", "inner", "outer"}, where);
    return finish(bump_cutoff(box_from_json(j.at("inner"), dim), box_from_json(j.at("outer"), dim)));
  }
  if (type == "cutoff") {
    require_keys(j, {"type", "name"}, where);
    return finish(unit_cutoff(dim));
  }
  if (type == "tent") {
    require_keys(j, {"type", "name", "center", "radius"}, where);
    return finish(tent(vector_from_json(j.at("center"), dim, where + ".center"),
                       number_at(j, "radius", where)));
  }
  if (type == "add" || type == "sub" || type == "mul") {
    require_keys(j, {"type", "name", "args"}, where);
    const json& args = j.at("args");
    if (!args.is_array() || args.size() < 2) throw InvalidInput(where + ": 'args' needs >= 2 fields");
    ScalarField acc = parse_field(args[0], dim);
    const CombineKind kind =
        type == "add" ? CombineKind::add : type == "sub" ? CombineKind::sub : CombineKind::mul;
    for (std::size_t i = 1; i < args.size(); ++i) acc = combine(acc, parse_field(args[i], dim), {kind});
    return finish(acc);
  }
  if (type == "scale") {
    require_keys(j, {"type", "name", "factor", "arg"}, where);
    return finish(scale(number_at(j, "factor", where), parse_field(j.at("arg"), dim)));
  }
  throw InvalidInput("field: unknown type '" + type + "'");
}

}  // namespace wsob
