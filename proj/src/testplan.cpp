#include "wsob/testplan.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace wsob {

using nlohmann::json;

namespace {

json vec_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

}  // namespace

// Curves ----------------------------------------------------------------------

Curve::Curve(Index dim, PathFn path, PathFn velocity, json descriptor)
    : dim_(dim),
      path_(std::make_shared<const PathFn>(std::move(path))),
      velocity_(std::make_shared<const PathFn>(std::move(velocity))),
      descriptor_(std::move(descriptor)) {
  if (dim_ <= 0) throw InvalidInput("Curve: dimension must be positive");
}

Curve Curve::segment(const Vector& from, const Vector& to) {
  require_same_dim(from.size(), to.size(), "Curve::segment");
  const Vector d = to - from;
  return Curve(
      from.size(), [from, d](double t) -> Vector { return from + t * d; },
      [d](double) -> Vector { return d; },
      json{{"type", "segment"}, {"from", vec_json(from)}, {"to", vec_json(to)}});
}

Curve Curve::stationary(const Vector& point) {
  const Index dim = point.size();
  return Curve(
      dim, [point](double) -> Vector { return point; },
      [dim](double) -> Vector { return Vector::Zero(dim); },
      json{{"type", "stationary"}, {"point", vec_json(point)}});
}

Curve Curve::patch_path(const Patch& patch, const Vector& u0, const Vector& u1) {
  require_same_dim(u0.size(), patch.param_dim(), "Curve::patch_path");
  require_same_dim(u1.size(), patch.param_dim(), "Curve::patch_path");
  const Vector du = u1 - u0;
  return Curve(
      patch.ambient_dim(), [patch, u0, du](double t) -> Vector { return patch.map(u0 + t * du); },
      [patch, u0, du](double t) -> Vector { return patch.jacobian(u0 + t * du) * du; },
      json{{"type", "patch_path"}, {"patch", patch.to_json()}, {"u0", vec_json(u0)}, {"u1", vec_json(u1)}});
}

Curve Curve::arc(const Vector& center, double radius, double angle0, double angle1, const Vector& e1,
                 const Vector& e2) {
  require_same_dim(center.size(), e1.size(), "Curve::arc");
  require_same_dim(center.size(), e2.size(), "Curve::arc");
  const double span = angle1 - angle0;
  return Curve(
      center.size(),
      [=](double t) -> Vector {
        const double a = angle0 + t * span;
        return center + radius * (std::cos(a) * e1 + std::sin(a) * e2);
      },
      [=](double t) -> Vector {
        const double a = angle0 + t * span;
        return radius * span * (-std::sin(a) * e1 + std::cos(a) * e2);
      },
      json{{"type", "arc"},
           {"center", vec_json(center)},
           {"radius", radius},
           {"angles", {angle0, angle1}},
           {"plane", {vec_json(e1), vec_json(e2)}}});
}

Curve Curve::reparametrized_quadratic() const {
  auto path = path_;
  auto velocity = velocity_;
  return Curve(
      dim_, [path](double t) -> Vector { return (*path)(t * t); },
      [velocity](double t) -> Vector { return 2.0 * t * (*velocity)(t * t); },
      json{{"type", "reparametrized"}, {"map", "t^2"}, {"base", descriptor_}});
}

Curve Curve::translated(const Vector& offset) const {
  require_same_dim(offset.size(), dim_, "Curve::translated");
  auto path = path_;
  json d = descriptor_;
  if (d.value("type", "") == "segment") {
    const Vector from = vector_from_json(d.at("from"), dim_, "segment.from") + offset;
    const Vector to = vector_from_json(d.at("to"), dim_, "segment.to") + offset;
    return Curve::segment(from, to);
  }
  return Curve(
      dim_, [path, offset](double t) -> Vector { return (*path)(t) + offset; }, *velocity_,
      json{{"type", "translated"}, {"offset", vec_json(offset)}, {"base", descriptor_}});
}

// Ensembles -------------------------------------------------------------------

Index CurveEnsemble::dim() const { return curves.empty() ? 0 : curves.front().curve.dim(); }

void CurveEnsemble::validate() const {
  if (curves.empty()) throw InvalidInput("ensemble '" + name + "' has no curves");
  if (!(comp > 0.0) || !std::isfinite(comp)) {
    throw InvalidInput("ensemble '" + name + "': compression constant must be positive");
  }
  if (time_steps < 1) throw InvalidInput("ensemble '" + name + "': time_steps must be >= 1");
  double total = 0.0;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    if (curves[i].curve.dim() != dim()) {
      throw InvalidInput("ensemble '" + name + "': curve " + std::to_string(i) + " has mismatched dimension");
    }
    if (!(curves[i].weight > 0.0)) {
      throw InvalidInput("ensemble '" + name + "': curve " + std::to_string(i) + " has non-positive weight");
    }
    total += curves[i].weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidInput("ensemble '" + name + "': weights sum to " + format_number(total) + ", not 1");
  }
}

std::vector<double> CurveEnsemble::times() const {
  std::vector<double> t(std::size_t(time_steps) + 1);
  for (int j = 0; j <= time_steps; ++j) t[std::size_t(j)] = double(j) / time_steps;
  return t;
}

std::vector<double> CurveEnsemble::time_weights() const {
  std::vector<double> w(std::size_t(time_steps) + 1, 1.0 / time_steps);
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

CurveEnsemble CurveEnsemble::reparametrized_quadratic() const {
  CurveEnsemble out = *this;
  out.name = name + "@t^2";
  for (auto& wc : out.curves) wc.curve = wc.curve.reparametrized_quadratic();
  return out;
}

json CurveEnsemble::to_json() const {
  json cs = json::array();
  for (const auto& wc : curves) cs.push_back({{"weight", wc.weight}, {"curve", wc.curve.descriptor()}});
  return json{{"name", name}, {"comp", comp}, {"note", note}, {"time_steps", time_steps}, {"curves", cs}};
}

CurveEnsemble translates_ensemble(std::string name, const Vector& start, const Vector& displacement,
                                  const std::vector<Spread>& spreads, double comp, std::string note,
                                  int time_steps) {
  require_same_dim(start.size(), displacement.size(), "translates_ensemble");
  std::vector<Vector> offsets{Vector::Zero(start.size())};
  for (const auto& s : spreads) {
    require_same_dim(s.direction.size(), start.size(), "translates_ensemble");
    if (s.count < 1 || !(s.length >= 0.0)) throw InvalidInput("translates_ensemble: bad spread");
    std::vector<Vector> next;
    next.reserve(offsets.size() * std::size_t(s.count));
    for (const auto& o : offsets) {
      for (int i = 0; i < s.count; ++i) {
        next.push_back(o + ((i + 0.5) * s.length / s.count) * s.direction);
      }
    }
    offsets = std::move(next);
  }
  CurveEnsemble e;
  e.name = std::move(name);
  e.comp = comp;
  e.note = std::move(note);
  e.time_steps = time_steps;
  const double w = 1.0 / double(offsets.size());
  for (const auto& o : offsets) e.curves.push_back({Curve::segment(start + o, start + o + displacement), w});
  return e;
}

CurveEnsemble sliding_segment_ensemble() {
  return translates_ensemble("sliding-segment", Vector::Zero(2), Vector::Unit(2, 0) * 0.5,
                             {{Vector::Unit(2, 0), 0.5, 256}}, 2.0,
                             "(e_t)_* pi is uniform on [t/2, 1/2 + t/2] x {0}: density 2 against H^1");
}

CurveEnsemble sliding_square_ensemble() {
  return translates_ensemble("sliding-square", Vector::Zero(2), Vector::Unit(2, 0) * 0.5,
                             {{Vector::Unit(2, 0), 0.5, 32}, {Vector::Unit(2, 1), 1.0, 32}}, 2.0,
                             "(e_t)_* pi is uniform on [t/2, 1/2 + t/2] x [0,1]: density 2 against L^2");
}

CurveEnsemble transversal_ensemble() {
  return translates_ensemble("transversal", Vector::Zero(2), Vector::Unit(2, 1),
                             {{Vector::Unit(2, 0), 1.0, 32}}, 1.0,
                             "declared for the unit segment; the curves leave it for t > 0");
}

CurveEnsemble patch_sliding_ensemble(const Patch& patch, int count) {
  if (patch.param_dim() != 1) throw InvalidInput("patch_sliding_ensemble: patch must be a curve");
  if (count < 1) throw InvalidInput("patch_sliding_ensemble: count must be >= 1");
  CurveEnsemble e;
  e.name = "patch-sliding";
  e.comp = 2.0;
  e.note = "parameter pushforward uniform on [t/2, 1/2 + t/2]: density 2 against the parameter law";
  for (int i = 0; i < count; ++i) {
    const double u = (i + 0.5) * 0.5 / count;
    Vector u0(1), u1(1);
    u0 << u;
    u1 << u + 0.5;
    e.curves.push_back({Curve::patch_path(patch, u0, u1), 1.0 / count});
  }
  return e;
}

CurveEnsemble single_curve_ensemble(const Curve& curve, double comp) {
  CurveEnsemble e;
  e.name = "single-curve";
  e.comp = comp;
  e.note = "declared";
  e.curves.push_back({curve, 1.0});
  return e;
}

Measure empirical_measure(const CurveEnsemble& plan, double t) {
  plan.validate();
  Atoms atoms;
  for (const auto& wc : plan.curves) atoms.atoms.push_back({wc.curve.at(t), wc.weight});
  Measure m(plan.dim(), "empirical(" + plan.name + ", t=" + format_number(t) + ")");
  m.add(1.0, atoms, "atoms");
  return m;
}

json PlanWitness::to_json() const {
  return json{{"curve", curve}, {"t", t}, {"point", vec_json(point)}, {"magnitude", magnitude}};
}

// Compression -----------------------------------------------------------------

json CompressionReport::to_json() const {
  json rs = json::array();
  for (const auto& r : rows) rs.push_back({{"t", r.t}, {"bins", r.bins}, {"max_ratio", r.max_ratio}});
  json j{{"pass", pass}, {"declared", declared}, {"threshold", threshold},
         {"max_ratio", max_ratio}, {"rows", rs}, {"reason", reason}};
  if (witness) j["witness"] = witness->to_json();
  return j;
}

CsvTable CompressionReport::table(const std::string& ensemble, const std::string& measure) const {
  CsvTable t{"compression", {"ensemble", "measure", "t", "bins", "max_ratio", "declared"}, {}};
  for (const auto& r : rows) {
    t.add_row({ensemble, measure, format_number(r.t), std::to_string(r.bins), format_number(r.max_ratio),
               format_number(declared)});
  }
  return t;
}

namespace {

struct Grid {
  Vector lo;
  Vector width;
  std::vector<int> cells;

  Grid(const Box& box, int bins) : lo(box.lo), width(box.dim()), cells(std::size_t(box.dim())) {
    for (Index a = 0; a < box.dim(); ++a) {
      const double extent = box.hi[a] - box.lo[a];
      const bool degenerate = !(extent > 1e-12);
      cells[std::size_t(a)] = degenerate ? 1 : bins;
      width[a] = degenerate ? 1.0 : extent / bins;
    }
  }

  long long index(const Vector& x) const {
    long long flat = 0;
    for (Index a = 0; a < lo.size(); ++a) {
      const int n = cells[std::size_t(a)];
      int i = n == 1 ? 0 : static_cast<int>(std::floor((x[a] - lo[a]) / width[a]));
      i = std::clamp(i, 0, n - 1);
      flat = flat * n + i;
    }
    return flat;
  }
};

}  // namespace

CompressionReport check_compression(const CurveEnsemble& plan, const Discretization& disc,
                                    const std::vector<double>& times, const std::vector<int>& bins) {
  plan.validate();
  require_same_dim(plan.dim(), disc.dim(), "check_compression");
  CompressionReport report;
  report.declared = plan.comp;
  report.threshold = plan.comp * 1.1;

  Box region = disc.measure().bounding_box();
  std::vector<std::vector<Vector>> positions(times.size());
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    for (std::size_t c = 0; c < plan.curves.size(); ++c) {
      const Vector x = plan.curves[c].curve.at(times[ti]);
      if (!x.allFinite()) {
        throw EvaluationError("check_compression: curve " + std::to_string(c) + " is not finite at t = " +
                              format_number(times[ti]));
      }
      if (!report.witness && !disc.bundle().on_support(x)) {
        report.witness = PlanWitness{c, times[ti], x, 0.0};
      }
      region = bounding_union(region, Box(x, x));
      positions[ti].push_back(x);
    }
  }

  const QuadratureRule& rule = disc.rule();
  for (int b : bins) {
    if (b < 1) throw InvalidInput("check_compression: bin counts must be positive");
    const Grid grid(region, b);
    std::map<long long, double> mu_mass;
    for (Index i = 0; i < rule.size(); ++i) mu_mass[grid.index(rule.nodes.col(i))] += rule.weights[i];
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      std::map<long long, double> pi_mass;
      for (std::size_t c = 0; c < plan.curves.size(); ++c) {
        pi_mass[grid.index(positions[ti][c])] += plan.curves[c].weight;
      }
      double worst = 0.0;
      for (const auto& [cell, m] : pi_mass) {
        auto it = mu_mass.find(cell);
        const double denom = it == mu_mass.end() ? 0.0 : it->second;
        worst = std::max(worst, denom > 0.0 ? m / denom : kInf);
      }
      report.rows.push_back({times[ti], b, worst});
      report.max_ratio = std::max(report.max_ratio, worst);
    }
  }

  if (report.witness) {
    report.pass = false;
    report.reason = "curve " + std::to_string(report.witness->curve) + " leaves the support at t = " +
                    format_number(report.witness->t);
  } else if (report.max_ratio > report.threshold) {
    report.pass = false;
    report.reason = "binned density ratio " + format_number(report.max_ratio) + " exceeds " +
                    format_number(report.threshold);
  } else {
    report.pass = true;
  }
  return report;
}

double kinetic_energy(const CurveEnsemble& plan) {
  plan.validate();
  const auto ts = plan.times();
  const auto tw = plan.time_weights();
  double total = 0.0;
  for (const auto& wc : plan.curves) {
    double inner = 0.0;
    for (std::size_t j = 0; j < ts.size(); ++j) inner += tw[j] * wc.curve.velocity(ts[j]).squaredNorm();
    total += wc.weight * inner;
  }
  return total;
}

// Tangency --------------------------------------------------------------------

json TangencyReport::to_json() const {
  json j{{"pass", pass}, {"tol", tol}, {"max_residual", max_residual}, {"max_scaled", max_scaled},
         {"pairs", pairs}};
  if (witness) j["witness"] = witness->to_json();
  return j;
}

TangencyReport check_tangency(const CurveEnsemble& plan, const BundleField& bundle, double tol) {
  plan.validate();
  require_same_dim(plan.dim(), bundle.measure().dim(), "check_tangency");
  TangencyReport r;
  r.tol = tol;
  const auto ts = plan.times();
  for (std::size_t c = 0; c < plan.curves.size(); ++c) {
    const Curve& curve = plan.curves[c].curve;
    for (double t : ts) {
      const Vector x = curve.at(t);
      const Vector v = curve.velocity(t);
      const double res = (v - project(bundle.at(x), v)).norm();
      const double scaled = res / (1.0 + v.norm());
      ++r.pairs;
      r.max_residual = std::max(r.max_residual, res);
      if (scaled > r.max_scaled) {
        r.max_scaled = scaled;
        r.witness = PlanWitness{c, t, x, res};
      }
    }
  }
  r.pass = r.max_scaled <= tol;
  if (r.pass) r.witness.reset();
  return r;
}

// Weak upper gradients --------------------------------------------------------

PointFunction am_gradient_norm(const ScalarField& f, const BundleField& bundle) {
  return [f, bundle](const Vector& x) { return project(bundle.at(x), f.gradient(x)).norm(); };
}

json WugReport::to_json() const {
  json vs = json::array();
  for (const auto& w : violation_list) vs.push_back(w.to_json());
  return json{{"pass", pass},
              {"pairs", pairs},
              {"violations", violations},
              {"satisfied_fraction", satisfied_fraction},
              {"max_violation", max_violation},
              {"fd_max_error", fd_max_error},
              {"violation_list", vs}};
}

namespace {

double fd_derivative(const ScalarField& f, const Curve& c, double t) {
  constexpr double h = 1e-5;
  const double a = std::max(0.0, t - h);
  const double b = std::min(1.0, t + h);
  return (f.value(c.at(b)) - f.value(c.at(a))) / (b - a);
}

}  // namespace

WugReport check_wug(const ScalarField& f, const PointFunction& upper_gradient, const CurveEnsemble& plan) {
  plan.validate();
  require_same_dim(f.dim(), plan.dim(), "check_wug");
  WugReport r;
  const auto ts = plan.times();
  for (std::size_t c = 0; c < plan.curves.size(); ++c) {
    const Curve& curve = plan.curves[c].curve;
    for (double t : ts) {
      const Vector x = curve.at(t);
      const Vector v = curve.velocity(t);
      const double derivative = f.gradient(x).dot(v);
      const double g = upper_gradient(x);
      if (!(g >= 0.0)) throw InvalidInput("check_wug: upper gradient must be non-negative");
      ++r.pairs;
      const double violation = std::abs(derivative) - g * v.norm();
      r.max_violation = std::max(r.max_violation, violation);
      if (violation > kWugRoundoff * (1.0 + std::abs(derivative))) {
        ++r.violations;
        if (r.violation_list.size() < 16) r.violation_list.push_back({c, t, x, violation});
      }
      r.fd_max_error = std::max(r.fd_max_error, std::abs(derivative - fd_derivative(f, curve, t)));
    }
  }
  r.satisfied_fraction = r.pairs ? double(r.pairs - r.violations) / double(r.pairs) : 1.0;
  r.pass = r.satisfied_fraction >= 0.99 && r.max_violation <= 1e-9;
  return r;
}

double chain_rule_defect(const ScalarField& f, const BundleField& bundle, const CurveEnsemble& plan) {
  plan.validate();
  double worst = 0.0;
  for (const auto& wc : plan.curves) {
    for (double t : plan.times()) {
      const Vector x = wc.curve.at(t);
      const Vector v = wc.curve.velocity(t);
      const Vector g = f.gradient(x);
      worst = std::max(worst, std::abs(g.dot(v) - project(bundle.at(x), g).dot(v)));
    }
  }
  return worst;
}

// Lower bound -----------------------------------------------------------------

json LowerBound::to_json() const {
  json j{{"increment", increment}, {"kinetic_energy", kinetic}, {"comp", comp}};
  if (value) {
    j["value"] = *value;
    j["energy_bound"] = energy_bound();
  } else {
    j["value"] = nullptr;
    j["refusal"] = refusal;
  }
  return j;
}

LowerBound cheeger_lower_bound(const ScalarField& f, const CurveEnsemble& plan,
                               const CompressionReport& compression) {
  plan.validate();
  LowerBound lb;
  lb.comp = plan.comp;
  lb.kinetic = kinetic_energy(plan);
  for (const auto& wc : plan.curves) lb.increment += wc.weight * (f.value(wc.curve.at(1.0)) - f.value(wc.curve.at(0.0)));
  if (!compression.pass) {
    lb.refusal = "compression certificate failed: " + compression.reason;
  } else if (compression.declared != plan.comp) {
    lb.refusal = "compression report belongs to a different declared constant";
  } else if (!(lb.kinetic > 0.0)) {
    lb.refusal = "kinetic energy is zero";
  } else {
    lb.value = lb.increment / std::sqrt(lb.comp * lb.kinetic);
  }
  return lb;
}

// Config ----------------------------------------------------------------------

CurveEnsemble parse_ensemble(const json& j, const Measure* measure) {
  if (!j.is_object() || !j.contains("type")) throw InvalidInput("ensemble: expected an object with \"type\"");
  const std::string type = j.at("type").get<std::string>();
  CurveEnsemble e;
  if (type == "sliding-segment") {
    require_keys(j, {"type", "name", "reparametrize", "time_steps"}, "ensemble");
    e = sliding_segment_ensemble();
  } else if (type == "sliding-square") {
    require_keys(j, {"type", "name", "reparametrize", "time_steps"}, "ensemble");
    e = sliding_square_ensemble();
  } else if (type == "transversal") {
    require_keys(j, {"type", "name", "reparametrize", "time_steps"}, "ensemble");
    e = transversal_ensemble();
  } else if (type == "patch-sliding") {
    require_keys(j, {"type", "name", "reparametrize", "time_steps", "component", "count"}, "ensemble");
    if (!measure) throw InvalidInput("ensemble patch-sliding: needs a measure");
    const auto c = j.value("component", std::size_t{0});
    if (c >= measure->components().size()) throw InvalidInput("ensemble patch-sliding: no component " + std::to_string(c));
    const auto* patch = std::get_if<Patch>(&measure->component(c).shape);
    if (!patch) throw InvalidInput("ensemble patch-sliding: component " + std::to_string(c) + " is not a patch");
    e = patch_sliding_ensemble(*patch, j.value("count", 256));
  } else if (type == "translates") {
    require_keys(j, {"type", "name", "reparametrize", "time_steps", "start", "displacement", "spreads", "comp", "note"},
                 "ensemble");
    const Vector start = vector_from_json(j.at("start"), -1, "ensemble.start");
    const Vector disp = vector_from_json(j.at("displacement"), start.size(), "ensemble.displacement");
    std::vector<Spread> spreads;
    for (const auto& s : j.value("spreads", json::array())) {
      require_keys(s, {"direction", "length", "count"}, "ensemble.spreads");
      spreads.push_back({vector_from_json(s.at("direction"), start.size(), "ensemble.spreads.direction"),
                         s.at("length").get<double>(), s.at("count").get<int>()});
    }
    e = translates_ensemble("translates", start, disp, spreads, j.at("comp").get<double>(), j.value("note", "declared"));
  } else if (type == "curves") {
    require_keys(j, {"type", "name", "reparametrize", "time_steps", "curves", "comp", "note"}, "ensemble");
    e.name = "curves";
    e.comp = j.at("comp").get<double>();
    e.note = j.value("note", "declared");
    for (const auto& c : j.at("curves")) {
      require_keys(c, {"from", "to", "weight"}, "ensemble.curves");
      const Vector from = vector_from_json(c.at("from"), -1, "ensemble.curves.from");
      const Vector to = vector_from_json(c.at("to"), from.size(), "ensemble.curves.to");
      e.curves.push_back({Curve::segment(from, to), c.at("weight").get<double>()});
    }
  } else {
    throw InvalidInput("ensemble: unknown type '" + type + "'");
  }
  if (j.contains("time_steps")) e.time_steps = j.at("time_steps").get<int>();
  if (j.contains("name")) e.name = j.at("name").get<std::string>();
  if (j.contains("reparametrize")) {
    if (j.at("reparametrize") != "quadratic") throw InvalidInput("ensemble: reparametrize must be \"quadratic\"");
    e = e.reparametrized_quadratic();
  }
  e.validate();
  return e;
}

}  // namespace wsob
