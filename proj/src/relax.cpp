#include "wsob/relax.hpp"

#include <algorithm>
#include <cmath>

namespace wsob {

using nlohmann::json;

namespace {

struct PlateauProfile {
  std::vector<CantorSet::Interval> intervals;
  std::vector<double> values;
  double ramp = 0.0;

  // Value and t-derivative of the profile at axis parameter t.
  std::pair<double, double> eval(double t) const {
    const double lo = intervals.front().lo;
    const double hi = intervals.back().hi;
    if (t <= lo - ramp || t >= hi + ramp) return {0.0, 0.0};
    if (t < lo) {
      const double u = (t - (lo - ramp)) / ramp;
      return {values.front() * smoothstep(u), values.front() * smoothstep_derivative(u) / ramp};
    }
    if (t > hi) {
      const double u = ((hi + ramp) - t) / ramp;
      return {values.back() * smoothstep(u), -values.back() * smoothstep_derivative(u) / ramp};
    }
    // First interval with hi >= t.
    auto it = std::lower_bound(intervals.begin(), intervals.end(), t,
                               [](const CantorSet::Interval& iv, double v) { return iv.hi < v; });
    const std::size_t k = std::size_t(it - intervals.begin());
    if (it->lo <= t) return {values[k], 0.0};
    const double a = intervals[k - 1].hi;
    const double gap = it->lo - a;
    const double u = (t - a) / gap;
    const double jump = values[k] - values[k - 1];
    return {values[k - 1] + jump * smoothstep(u), jump * smoothstep_derivative(u) / gap};
  }

  double lipschitz() const {
    double l = std::max(std::abs(values.front()), std::abs(values.back())) / ramp;
    for (std::size_t k = 1; k < intervals.size(); ++k) {
      l = std::max(l, std::abs(values[k] - values[k - 1]) / (intervals[k].lo - intervals[k - 1].hi));
    }
    return l * kSmoothstepMaxSlope;
  }
};

const CantorSet& cantor_component(const Measure& measure, std::size_t component) {
  if (component >= measure.components().size()) {
    throw InvalidInput("plateau_sequence: no component " + std::to_string(component));
  }
  const auto* s = std::get_if<CantorSet>(&measure.component(component).shape);
  if (!s) throw InvalidInput("plateau_sequence: component " + std::to_string(component) + " is not a Cantor set");
  return *s;
}

}  // namespace

ScalarField plateau_sequence(const ScalarField& f, const Measure& measure, std::size_t component, int n,
                             int max_depth) {
  const CantorSet& set = cantor_component(measure, component);
  require_same_dim(f.dim(), measure.dim(), "plateau_sequence");
  if (n < 0 || n > max_depth) {
    throw InvalidInput("plateau_sequence: stage " + std::to_string(n) + " outside [0, " +
                       std::to_string(max_depth) + "]");
  }
  auto profile = std::make_shared<PlateauProfile>();
  profile->intervals = set.stage(n);
  profile->ramp = set.length / 4.0;
  double sup = 0.0;
  for (const auto& iv : profile->intervals) {
    const double v = f.value(set.point(iv.center()));
    if (!std::isfinite(v)) throw EvaluationError("plateau_sequence: target is not finite on the set");
    profile->values.push_back(v);
    sup = std::max(sup, std::abs(v));
  }
  const double lip = profile->lipschitz();
  const Index d = measure.dim();
  const Index axis = set.axis;
  const Vector origin = set.origin;

  Vector lo = origin, hi = origin;
  lo[axis] += -profile->ramp;
  hi[axis] += set.length + profile->ramp;
  const Box support(lo, hi);

  json descriptor{{"type", "plateau"},
                  {"target", f.descriptor()},
                  {"component", component},
                  {"stage", n}};
  ScalarField along(
      d,
      [profile, origin, axis](const Vector& x) { return profile->eval(x[axis] - origin[axis]).first; },
      [profile, origin, axis, d](const Vector& x) -> Vector {
        Vector g = Vector::Zero(d);
        g[axis] = profile->eval(x[axis] - origin[axis]).second;
        return g;
      },
      [sup, lip](const Box&) { return FieldBounds{sup, lip}; }, support, descriptor);
  if (d == 1) return along.named("plateau[" + std::to_string(n) + "](" + f.label() + ")");

  const double w = set.length / 8.0;
  Box inner((support.lo.array() - w).matrix(), (support.hi.array() + w).matrix());
  Box outer((support.lo.array() - 2 * w).matrix(), (support.hi.array() + 2 * w).matrix());
  for (Index a = 0; a < d; ++a) {
    if (a == axis) continue;
    inner.lo[a] = origin[a] - w;
    inner.hi[a] = origin[a] + w;
    outer.lo[a] = origin[a] - 2 * w;
    outer.hi[a] = origin[a] + 2 * w;
  }
  ScalarField result = along * bump_cutoff(inner, outer);
  json wrapped = descriptor;
  wrapped["transverse_cutoff"] = {{"inner", box_to_json(inner)}, {"outer", box_to_json(outer)}};
  return ScalarField(
             d, [result](const Vector& x) { return result.value(x); },
             [result](const Vector& x) { return result.gradient(x); },
             [result](const Box& b) { return result.bounds_on(b); }, result.support(), wrapped)
      .named("plateau[" + std::to_string(n) + "](" + f.label() + ")");
}

ScalarField plateau_sequence(const ScalarField& f, const Discretization& disc, std::size_t component, int n) {
  const CantorSet& set = cantor_component(disc.measure(), component);
  return plateau_sequence(f, disc.measure(), component, n, disc.resolution().cantor_depth_for(component, set));
}

json RelaxationCertificate::to_json() const {
  json st = json::array();
  for (const auto& s : stages) st.push_back({{"n", s.n}, {"l2_error", s.l2_error}, {"energy", s.energy}});
  return json{{"target", target},         {"measure", measure},
              {"constructor", constructor}, {"descriptor", descriptor},
              {"energy", energy_spec.label()}, {"stages", st},
              {"E_Ch_upper", upper}};
}

CsvTable RelaxationCertificate::table() const {
  CsvTable t{"relaxation", {"measure", "field", "constructor", "stage", "energy_functional", "energy", "l2_error"}, {}};
  for (const auto& s : stages) {
    t.add_row({measure, target, constructor, std::to_string(s.n), energy_spec.label(), format_number(s.energy),
               format_number(s.l2_error)});
  }
  return t;
}

RelaxationCertificate trivial_constructor(const ScalarField& f, const Discretization& disc) {
  RelaxationCertificate c;
  c.target = f.label();
  c.measure = disc.measure().name();
  c.constructor = "trivial";
  c.descriptor = json{{"constructor", "trivial"}, {"target", f.descriptor()}};
  c.energy_spec = {Functional::am, NormPlugin::euclidean()};
  c.stages.push_back({0, 0.0, energy_am(f, disc).value});
  c.upper = c.stages.front().energy;
  return c;
}

bool plateau_applicable(const Measure& measure) {
  return measure.components().size() == 1 && std::holds_alternative<CantorSet>(measure.component(0).shape);
}

std::vector<std::string> default_constructors(const Measure& measure) {
  std::vector<std::string> c{"trivial"};
  if (plateau_applicable(measure)) c.push_back("plateau");
  return c;
}

RelaxationCertificate plateau_constructor(const ScalarField& f, const Discretization& disc, int max_stage) {
  if (!plateau_applicable(disc.measure())) {
    throw InvalidInput("plateau constructor needs a measure made of one Cantor component");
  }
  const CantorSet& set = std::get<CantorSet>(disc.measure().component(0).shape);
  const int depth = disc.resolution().cantor_depth_for(0, set);
  if (max_stage <= 0) max_stage = depth;
  if (max_stage > depth) {
    throw InvalidInput("plateau constructor: stage " + std::to_string(max_stage) + " exceeds depth " +
                       std::to_string(depth));
  }
  RelaxationCertificate c;
  c.target = f.label();
  c.measure = disc.measure().name();
  c.constructor = "plateau";
  c.descriptor = json{{"constructor", "plateau"}, {"target", f.descriptor()}, {"component", 0},
                      {"stages", max_stage}};
  c.energy_spec = {Functional::lip, NormPlugin::euclidean()};
  for (int n = 1; n <= max_stage; ++n) {
    const ScalarField fn = plateau_sequence(f, disc, 0, n);
    const double err = l2_norm(disc.rule(), fn - f);
    const double e = energy_lip(fn, disc).value;
    c.stages.push_back({n, err, e});
    c.upper = std::min(c.upper, e);
  }
  return c;
}

json CheegerInterval::to_json() const {
  json rel = json::array();
  for (const auto& r : relaxations) rel.push_back(r.to_json());
  json lbs = json::array();
  for (const auto& [name, lb] : lower_bounds) {
    json j = lb.to_json();
    j["ensemble"] = name;
    lbs.push_back(j);
  }
  return json{{"measure", measure},     {"field", field},         {"E_Ch_lower", lower},
              {"E_Ch_upper", upper},    {"E_AM", energy_am},      {"E_lip(2)", energy_lip2},
              {"relaxations", rel},     {"lower_bounds", lbs},    {"resolution", resolution_tag}};
}

CheegerInterval assemble_cheeger_interval(const ScalarField& f, const Discretization& disc,
                                          const std::vector<CurveEnsemble>& ensembles,
                                          const std::vector<std::string>& constructors) {
  CheegerInterval out;
  out.measure = disc.measure().name();
  out.field = f.label();
  out.resolution_tag = disc.resolution().tag();
  out.energy_am = energy_am(f, disc).value;
  out.energy_lip2 = energy_lip(f, disc).value;

  std::vector<std::string> names = constructors;
  if (std::find(names.begin(), names.end(), "trivial") == names.end()) names.insert(names.begin(), "trivial");
  for (const auto& name : names) {
    if (name == "trivial") {
      out.relaxations.push_back(trivial_constructor(f, disc));
    } else if (name == "plateau") {
      out.relaxations.push_back(plateau_constructor(f, disc));
    } else {
      throw InvalidInput("unknown relaxation constructor '" + name + "'");
    }
    out.upper = std::min(out.upper, out.relaxations.back().upper);
  }

  for (const auto& plan : ensembles) {
    const CompressionReport comp = check_compression(plan, disc);
    LowerBound lb = cheeger_lower_bound(f, plan, comp);
    out.lower = std::max(out.lower, lb.energy_bound());
    out.lower_bounds.emplace_back(plan.name, std::move(lb));
  }

  constexpr double slack = 1e-10;
  if (out.lower > out.upper + slack) {
    throw InvariantViolation("Cheeger interval inverted for '" + out.field + "' on '" + out.measure +
                             "': lower " + format_number(out.lower) + " > upper " + format_number(out.upper));
  }
  if (out.upper > out.energy_am + slack || out.energy_am > out.energy_lip2 + slack) {
    throw InvariantViolation("energy sandwich violated for '" + out.field + "' on '" + out.measure + "'");
  }
  return out;
}

}  // namespace wsob
