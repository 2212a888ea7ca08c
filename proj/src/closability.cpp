#include "wsob/closability.hpp"

#include <algorithm>
#include <cmath>

namespace wsob {

using nlohmann::json;

double theta(double t) {
  if (!(std::abs(t) < 1.0)) return 0.0;
  const double q = 1.0 - t * t;
  return t * std::exp(1.0 - 1.0 / q);
}

double theta_derivative(double t) {
  if (!(std::abs(t) < 1.0)) return 0.0;
  const double q = 1.0 - t * t;
  return std::exp(1.0 - 1.0 / q) * (1.0 - 2.0 * t * t / (q * q));
}

std::string to_string(Verdict v) {
  return v == Verdict::not_closable ? "NOT_CLOSABLE" : "NO_COUNTEREXAMPLE_FOUND";
}

std::string to_string(WitnessKind w) {
  switch (w) {
    case WitnessKind::none: return "none";
    case WitnessKind::sequence: return "sequence";
    case WitnessKind::identity_gap: return "identity_gap";
  }
  return "none";
}

namespace {

constexpr double kThetaLipschitz = 1.51;  // max |theta'| is about 1.5011
constexpr double kThetaSup = 0.36;        // max |theta| is about 0.35897
const std::vector<int> kSequenceStages{1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};

json vec_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

std::vector<ClosabilityStage> stages_from_json(const json& j) {
  std::vector<ClosabilityStage> out;
  for (const auto& s : j) out.push_back({s.at("n").get<int>(), s.at("f_norm").get<double>(), s.at("residual").get<double>()});
  return out;
}

json stages_to_json(const std::vector<ClosabilityStage>& stages) {
  json out = json::array();
  for (const auto& s : stages) out.push_back({{"n", s.n}, {"f_norm", s.f_norm}, {"residual", s.residual}});
  return out;
}

/// theta(n s(x)) / n for a transversal coordinate s with gradient ds.
ScalarField scaled_theta(Index d, int n, std::function<double(const Vector&)> s,
                         std::function<Vector(const Vector&)> ds, double ds_bound, json descriptor) {
  const double nn = n;
  return ScalarField(
      d, [s, nn](const Vector& x) { return theta(nn * s(x)) / nn; },
      [s, ds, nn](const Vector& x) -> Vector { return theta_derivative(nn * s(x)) * ds(x); },
      [nn, ds_bound](const Box&) { return FieldBounds{kThetaSup / nn, kThetaLipschitz * ds_bound}; }, std::nullopt,
      std::move(descriptor));
}

ScalarField box_bump(const Box& core, double margin) {
  return bump_cutoff(core.expanded(margin), core.expanded(2.0 * margin));
}

/// Smooth radial profile around the circle |Q^T (x - c)| = R: 1 within w, 0
/// beyond 2w.
ScalarField annulus(const Vector& center, const Matrix& plane, double radius, double w) {
  const Index d = center.size();
  auto radial = [center, plane](const Vector& x) { return (plane.transpose() * (x - center)).norm(); };
  return ScalarField(
      d,
      [=](const Vector& x) { return smoothstep((2.0 * w - std::abs(radial(x) - radius)) / w); },
      [=](const Vector& x) -> Vector {
        const Vector p = plane * (plane.transpose() * (x - center));
        const double r = p.norm();
        const double u = (2.0 * w - std::abs(r - radius)) / w;
        const double ds = smoothstep_derivative(u);
        if (ds == 0.0 || r == 0.0) return Vector::Zero(d);
        const double sign = r > radius ? -1.0 : 1.0;
        return (ds * sign / w / r) * p;
      },
      [w](const Box&) { return FieldBounds{1.0, kSmoothstepMaxSlope / w}; }, std::nullopt,
      json{{"type", "annulus"}, {"center", vec_json(center)}, {"radius", radius}, {"width", w}});
}

Vector clean_unit(Vector v) {
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) <= 1e-14) v[i] = 0.0;
  }
  v.normalize();
  for (Index i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) {
      if (v[i] < 0.0) v = -v;
      break;
    }
  }
  return v;
}

/// Nodes of components other than `self` (at a fine rule) or, for atoms,
/// other atoms of the same component.
std::vector<Vector> foreign_points(const Measure& measure, const Resolution& resolution, std::size_t self) {
  const QuadratureRule fine = quadrature(measure, resolution.scaled(4.0));
  std::vector<Vector> pts;
  for (Index i = 0; i < fine.size(); ++i) {
    if (fine.component[std::size_t(i)] != self) pts.push_back(fine.nodes.col(i));
  }
  return pts;
}

/// Largest margin 2^-k / 4 whose outer boxes (core + 2m) avoid every foreign point.
std::optional<double> choose_margin(const std::vector<Box>& cores, const std::vector<std::vector<Vector>>& foreign) {
  double m = 0.25;
  for (int attempt = 0; attempt < 40; ++attempt, m *= 0.5) {
    bool clear = true;
    for (std::size_t k = 0; k < cores.size() && clear; ++k) {
      const Box outer = cores[k].expanded(2.0 * m);
      for (const auto& p : foreign[k]) {
        if (outer.contains(p, 0.0)) {
          clear = false;
          break;
        }
      }
    }
    if (clear) return m;
  }
  return std::nullopt;
}

}  // namespace

TransversalSequence build_sequence(const Measure& measure, const json& descriptor) {
  if (descriptor.value("constructor", "") != "transversal") {
    throw InvalidInput("sequence descriptor: unknown constructor");
  }
  const std::string variant = descriptor.at("variant").get<std::string>();
  const auto c = descriptor.at("component").get<std::size_t>();
  if (c >= measure.components().size()) throw InvalidInput("sequence descriptor: no component " + std::to_string(c));
  const Index d = measure.dim();
  const double margin = descriptor.at("margin").get<double>();
  const MeasureComponent& comp = measure.component(c);
  TransversalSequence seq;
  seq.descriptor = descriptor;
  seq.stages = descriptor.at("stages").get<std::vector<int>>();

  if (variant == "flat" || variant == "frozen_normal") {
    const Vector v = vector_from_json(descriptor.at("v"), d, "sequence.v");
    const Vector anchor = vector_from_json(descriptor.at("anchor"), d, "sequence.anchor");
    const ScalarField eta = box_bump(comp.bounding_box(), margin);
    auto s = [v, anchor](const Vector& x) { return (x - anchor).dot(v); };
    auto ds = [v](const Vector&) -> Vector { return v; };
    seq.member = [=](int n) { return eta * scaled_theta(d, n, s, ds, v.norm(), {{"type", "theta"}, {"n", n}}); };
    seq.limit = [eta, v](const Vector& x) -> Vector { return eta.value(x) * v; };
    return seq;
  }
  if (variant == "flat_atoms") {
    const auto* atoms = std::get_if<Atoms>(&comp.shape);
    if (!atoms) throw InvalidInput("sequence descriptor: component is not an atom list");
    const Vector v = vector_from_json(descriptor.at("v"), d, "sequence.v");
    std::vector<std::pair<ScalarField, Vector>> pieces;
    for (const auto& a : atoms->atoms) pieces.emplace_back(box_bump(Box(a.point, a.point), margin), a.point);
    seq.member = [=](int n) {
      std::optional<ScalarField> sum;
      for (const auto& [eta, p] : pieces) {
        const Vector anchor = p;
        auto s = [v, anchor](const Vector& x) { return (x - anchor).dot(v); };
        auto ds = [v](const Vector&) -> Vector { return v; };
        ScalarField term = eta * scaled_theta(d, n, s, ds, v.norm(), {{"type", "theta"}, {"n", n}});
        sum = sum ? *sum + term : term;
      }
      return *sum;
    };
    seq.limit = [pieces, v](const Vector& x) -> Vector {
      double e = 0.0;
      for (const auto& piece : pieces) e += piece.first.value(x);
      return e * v;
    };
    return seq;
  }
  if (variant == "curved_distance") {
    const auto* patch = std::get_if<Patch>(&comp.shape);
    if (!patch || patch->kind() != PatchKind::arc) throw InvalidInput("sequence descriptor: component is not an arc");
    const Vector center = patch->origin();
    const Matrix plane = patch->directions();
    const double radius = patch->radius();
    const ScalarField eta = box_bump(comp.bounding_box(), margin) * annulus(center, plane, radius, radius / 4.0);
    auto s = [center, plane, radius](const Vector& x) { return (plane.transpose() * (x - center)).norm() - radius; };
    auto ds = [center, plane](const Vector& x) -> Vector {
      const Vector p = plane * (plane.transpose() * (x - center));
      const double r = p.norm();
      return r > 0.0 ? Vector(p / r) : Vector(Vector::Zero(p.size()));
    };
    seq.member = [=](int n) { return eta * scaled_theta(d, n, s, ds, 1.0, {{"type", "theta"}, {"n", n}}); };
    seq.limit = [eta, ds](const Vector& x) -> Vector { return eta.value(x) * ds(x); };
    return seq;
  }
  if (variant == "graph_defining") {
    const auto* patch = std::get_if<Patch>(&comp.shape);
    if (!patch || patch->kind() != PatchKind::graph) throw InvalidInput("sequence descriptor: component is not a graph");
    const Index k = patch->param_dim();
    const ScalarField h = *patch->height();
    const ScalarField eta = box_bump(comp.bounding_box(), margin);
    const double hl = h.bounds_on(patch->parameter_box().expanded(2.0 * margin)).lipschitz;
    auto s = [h, k](const Vector& x) { return x[k] - h.value(x.head(k)); };
    auto ds = [h, k, d](const Vector& x) -> Vector {
      Vector g = Vector::Zero(d);
      g.head(k) = -h.gradient(x.head(k));
      g[k] = 1.0;
      return g;
    };
    seq.member = [=](int n) {
      return eta * scaled_theta(d, n, s, ds, std::sqrt(1.0 + hl * hl), {{"type", "theta"}, {"n", n}});
    };
    seq.limit = [eta, ds](const Vector& x) -> Vector { return eta.value(x) * ds(x); };
    return seq;
  }
  if (variant == "cantor_sawtooth") {
    const auto* set = std::get_if<CantorSet>(&comp.shape);
    if (!set || d != 1) throw InvalidInput("sequence descriptor: component is not a Cantor set on the line");
    const ScalarField eta = box_bump(comp.bounding_box(), margin);
    const ScalarField x = coordinate(1, 0);
    const int depth = *std::max_element(seq.stages.begin(), seq.stages.end());
    const Measure m = measure;
    seq.member = [=](int n) { return eta * (x - plateau_sequence(x * eta, m, c, n, depth)); };
    seq.limit = [eta](const Vector& p) -> Vector { return Vector::Constant(1, eta.value(p)); };
    return seq;
  }
  throw InvalidInput("sequence descriptor: unknown variant '" + variant + "'");
}

json SequenceAttempt::to_json() const {
  return json{{"constructor", constructor}, {"stages", stages_to_json(stages)}, {"v_norm", v_norm},
              {"accepted", accepted}, {"note", note}};
}

SequenceAttempt evaluate_sequence(const TransversalSequence& seq, const Discretization& disc) {
  SequenceAttempt a;
  a.constructor = seq.descriptor;
  const QuadratureRule& rule = disc.rule();
  Matrix limit(disc.dim(), rule.size());
  for (Index i = 0; i < rule.size(); ++i) limit.col(i) = seq.limit(rule.nodes.col(i));
  a.v_norm = l2_norm(rule, limit);
  for (int n : seq.stages) {
    const ScalarField fn = seq.member(n);
    Matrix diff(disc.dim(), rule.size());
    for (Index i = 0; i < rule.size(); ++i) diff.col(i) = fn.gradient(rule.nodes.col(i)) - limit.col(i);
    a.stages.push_back({n, l2_norm(rule, fn), l2_norm(rule, diff)});
  }
  return a;
}

bool sequence_invariants_hold(const std::vector<ClosabilityStage>& stages, double v_norm, double slack,
                              std::string* why) {
  auto fail = [why](std::string m) {
    if (why) *why = std::move(m);
    return false;
  };
  if (stages.empty()) return fail("no stages recorded");
  for (std::size_t k = 1; k < stages.size(); ++k) {
    if (stages[k].f_norm > stages[k - 1].f_norm) {
      return fail("||f_n|| increases between stages " + std::to_string(stages[k - 1].n) + " and " +
                  std::to_string(stages[k].n));
    }
  }
  if (!(stages.back().f_norm <= 1e-6 * slack)) {
    return fail("||f_n|| = " + format_number(stages.back().f_norm) + " at the last stage");
  }
  if (!(stages.back().residual <= 1e-9 * slack)) {
    return fail("||grad f_n - v|| = " + format_number(stages.back().residual) + " at the last stage");
  }
  if (!(v_norm >= 0.1 / slack)) return fail("||v|| = " + format_number(v_norm) + " is too small");
  return true;
}

namespace {

std::vector<json> candidate_descriptors(const Discretization& disc, std::size_t c, double margin) {
  const Measure& mu = disc.measure();
  const Index d = mu.dim();
  const MeasureComponent& comp = mu.component(c);
  json base{{"constructor", "transversal"}, {"component", c}, {"margin", margin}, {"stages", kSequenceStages}};
  std::vector<json> out;
  auto flat = [&](const Vector& v, const Vector& anchor) {
    json j = base;
    j["variant"] = "flat";
    j["v"] = vec_json(clean_unit(v));
    j["anchor"] = vec_json(anchor);
    out.push_back(j);
  };
  if (const auto* p = std::get_if<Patch>(&comp.shape)) {
    switch (p->kind()) {
      case PatchKind::segment:
      case PatchKind::affine: {
        const SubspaceD normal = orthogonal_complement(SubspaceD::spanned_by(p->directions()));
        flat(normal.basis().col(0), p->origin());
        break;
      }
      case PatchKind::arc: {
        const double mid = 0.5 * (p->angle0() + p->angle1());
        const Vector n = std::cos(mid) * p->directions().col(0) + std::sin(mid) * p->directions().col(1);
        json frozen = base;
        frozen["variant"] = "frozen_normal";
        frozen["v"] = vec_json(n);
        frozen["anchor"] = vec_json(p->origin() + p->radius() * n);
        out.push_back(frozen);
        json curved = base;
        curved["variant"] = "curved_distance";
        out.push_back(curved);
        break;
      }
      case PatchKind::graph: {
        json g = base;
        g["variant"] = "graph_defining";
        out.push_back(g);
        break;
      }
    }
  } else if (const auto* s = std::get_if<CantorSet>(&comp.shape)) {
    if (d >= 2) {
      flat(Vector::Unit(d, s->axis == 0 ? 1 : 0), s->origin);
    } else if (s->variant == CantorSet::Variant::classic) {
      json saw = base;
      saw["variant"] = "cantor_sawtooth";
      std::vector<int> st;
      for (int n = 1; n <= disc.resolution().cantor_depth_for(c, *s); ++n) st.push_back(n);
      saw["stages"] = st;
      out.push_back(saw);
    }
  } else if (std::holds_alternative<Atoms>(comp.shape)) {
    json a = base;
    a["variant"] = "flat_atoms";
    a["v"] = vec_json(Vector::Unit(d, d - 1));
    out.push_back(a);
  }
  return out;
}

std::string attempt_note(const json& descriptor) {
  const std::string v = descriptor.value("variant", "");
  if (v == "frozen_normal") return "constant normal frozen at the arc midpoint: curvature keeps grad f_n away from v";
  if (v == "curved_distance") return "s = signed distance to the arc, eta supported inside the reach";
  return {};
}

}  // namespace

json ClosabilityCertificate::to_json() const {
  json j{{"verdict", to_string(verdict)}, {"witness", to_string(witness)}, {"measure", measure},
         {"resolution", resolution}, {"reason", reason}};
  if (witness == WitnessKind::sequence) {
    j["constructor"] = constructor;
    j["stages"] = stages_to_json(stages);
    j["v_norm"] = v_norm;
  }
  if (witness == WitnessKind::identity_gap || !field.empty()) {
    j["field"] = field;
    j["field_descriptor"] = field_descriptor;
    j["constructors"] = constructors;
    j["E_Ch_upper"] = cheeger_upper;
    j["E_lip(2)"] = energy_lip2;
    j["gap"] = gap;
  }
  json at = json::array();
  for (const auto& a : attempts) at.push_back(a.to_json());
  j["attempts"] = at;
  return j;
}

ClosabilityCertificate ClosabilityCertificate::from_json(const json& j) {
  ClosabilityCertificate c;
  const std::string v = j.at("verdict").get<std::string>();
  if (v == "NOT_CLOSABLE") {
    c.verdict = Verdict::not_closable;
  } else if (v == "NO_COUNTEREXAMPLE_FOUND") {
    c.verdict = Verdict::no_counterexample_found;
  } else {
    throw InvalidInput("certificate: unknown verdict '" + v + "'");
  }
  const std::string w = j.at("witness").get<std::string>();
  if (w == "sequence") {
    c.witness = WitnessKind::sequence;
  } else if (w == "identity_gap") {
    c.witness = WitnessKind::identity_gap;
  } else if (w == "none") {
    c.witness = WitnessKind::none;
  } else {
    throw InvalidInput("certificate: unknown witness kind '" + w + "'");
  }
  c.measure = j.value("measure", "");
  c.resolution = j.value("resolution", json::object());
  c.reason = j.value("reason", "");
  if (j.contains("constructor")) c.constructor = j.at("constructor");
  if (j.contains("stages")) c.stages = stages_from_json(j.at("stages"));
  c.v_norm = j.value("v_norm", 0.0);
  c.field = j.value("field", "");
  if (j.contains("field_descriptor")) c.field_descriptor = j.at("field_descriptor");
  if (j.contains("constructors")) c.constructors = j.at("constructors").get<std::vector<std::string>>();
  c.cheeger_upper = j.value("E_Ch_upper", 0.0);
  c.energy_lip2 = j.value("E_lip(2)", 0.0);
  c.gap = j.value("gap", 0.0);
  for (const auto& a : j.value("attempts", json::array())) {
    SequenceAttempt s;
    s.constructor = a.at("constructor");
    s.stages = stages_from_json(a.at("stages"));
    s.v_norm = a.at("v_norm").get<double>();
    s.accepted = a.at("accepted").get<bool>();
    s.note = a.value("note", "");
    c.attempts.push_back(std::move(s));
  }
  return c;
}

CsvTable ClosabilityCertificate::table() const {
  CsvTable t{"closability",
             {"measure", "verdict", "witness", "variant", "stage", "f_norm", "residual", "v_norm", "accepted"},
             {}};
  for (const auto& a : attempts) {
    for (const auto& s : a.stages) {
      t.add_row({measure, to_string(verdict), to_string(witness), a.constructor.value("variant", ""),
                 std::to_string(s.n), format_number(s.f_norm), format_number(s.residual), format_number(a.v_norm),
                 a.accepted ? "true" : "false"});
    }
  }
  if (witness == WitnessKind::identity_gap || (attempts.empty() && !field.empty())) {
    t.add_row({measure, to_string(verdict), to_string(witness), "identity_gap", "0", format_number(cheeger_upper),
               format_number(energy_lip2), format_number(gap), verdict == Verdict::not_closable ? "true" : "false"});
  }
  return t;
}

ClosabilityCertificate transversal_counterexample(const Measure& measure, const Resolution& resolution) {
  const Discretization disc(measure, resolution);
  const Index d = measure.dim();
  ClosabilityCertificate cert;
  cert.measure = measure.name();
  cert.resolution = resolution.to_json();

  std::vector<std::string> skipped;
  for (std::size_t c = 0; c < measure.components().size(); ++c) {
    Index max_dim = -1;
    for (Index i = 0; i < disc.size(); ++i) {
      if (disc.rule().component[std::size_t(i)] == c) max_dim = std::max(max_dim, disc.node_bundle(i).dim());
    }
    const std::string label = measure.component(c).label;
    if (max_dim < 0) {
      skipped.push_back(label + ": no nodes");
      continue;
    }
    if (max_dim >= d) {
      skipped.push_back(label + ": bundle is full at some node");
      continue;
    }

    std::vector<Box> cores;
    std::vector<std::vector<Vector>> foreign;
    std::vector<Vector> others = foreign_points(measure, resolution, c);
    if (const auto* atoms = std::get_if<Atoms>(&measure.component(c).shape)) {
      for (std::size_t a = 0; a < atoms->atoms.size(); ++a) {
        cores.emplace_back(atoms->atoms[a].point, atoms->atoms[a].point);
        std::vector<Vector> f = others;
        for (std::size_t b = 0; b < atoms->atoms.size(); ++b) {
          if (b != a) f.push_back(atoms->atoms[b].point);
        }
        foreign.push_back(std::move(f));
      }
    } else {
      cores.push_back(measure.component(c).bounding_box());
      foreign.push_back(others);
    }
    const auto margin = choose_margin(cores, foreign);
    if (!margin) {
      skipped.push_back(label + ": no cutoff margin separates it from the other components");
      continue;
    }

    for (const json& descriptor : candidate_descriptors(disc, c, *margin)) {
      SequenceAttempt attempt = evaluate_sequence(build_sequence(measure, descriptor), disc);
      std::string why;
      attempt.accepted = sequence_invariants_hold(attempt.stages, attempt.v_norm, 1.0, &why);
      attempt.note = attempt_note(descriptor);
      if (!attempt.accepted) attempt.note += (attempt.note.empty() ? "" : "; ") + std::string("rejected: ") + why;
      cert.attempts.push_back(attempt);
      if (attempt.accepted) {
        cert.verdict = Verdict::not_closable;
        cert.witness = WitnessKind::sequence;
        cert.constructor = attempt.constructor;
        cert.stages = attempt.stages;
        cert.v_norm = attempt.v_norm;
        cert.reason = "component '" + label + "' has bundle dimension " + std::to_string(max_dim) + " < " +
                      std::to_string(d);
        return cert;
      }
    }
    skipped.push_back(label + ": every candidate sequence was rejected");
  }
  cert.reason = "no transversal sequence found";
  for (const auto& s : skipped) cert.reason += "; " + s;
  return cert;
}

ClosabilityCertificate identity_gap_check(const ScalarField& f, const Discretization& disc,
                                          const std::vector<CurveEnsemble>& ensembles,
                                          const std::vector<std::string>& constructors) {
  const CheegerInterval interval = assemble_cheeger_interval(f, disc, ensembles, constructors);
  ClosabilityCertificate cert;
  cert.measure = disc.measure().name();
  cert.resolution = disc.resolution().to_json();
  cert.field = f.label();
  cert.field_descriptor = f.descriptor();
  cert.constructors = constructors;
  cert.cheeger_upper = interval.upper;
  cert.energy_lip2 = interval.energy_lip2;
  cert.gap = interval.energy_lip2 - interval.upper;
  if (interval.upper < 0.5 * interval.energy_lip2) {
    cert.verdict = Verdict::not_closable;
    cert.witness = WitnessKind::identity_gap;
    cert.reason = "E_Ch_upper = " + format_number(interval.upper) + " < E_lip(2) / 2 = " +
                  format_number(0.5 * interval.energy_lip2);
  } else {
    cert.reason = "E_Ch_upper is not below half of E_lip(2) for this field";
  }
  return cert;
}

json VerificationReport::to_json() const {
  json j{{"pass", pass}, {"reasons", reasons}};
  if (recomputed) j["recomputed"] = recomputed->to_json();
  if (cheeger_upper != 0.0 || energy_lip2 != 0.0) {
    j["E_Ch_upper"] = cheeger_upper;
    j["E_lip(2)"] = energy_lip2;
  }
  return j;
}

namespace {

bool close(double stored, double recomputed, double rel, double abs) {
  return std::abs(stored - recomputed) <= rel * std::max(std::abs(stored), std::abs(recomputed)) + abs;
}

}  // namespace

VerificationReport verify_certificate(const ClosabilityCertificate& certificate, const Measure& measure,
                                      const Resolution& resolution) {
  VerificationReport r;
  if (certificate.verdict == Verdict::no_counterexample_found) {
    r.pass = true;
    r.reasons.push_back("no claim to verify");
    return r;
  }
  constexpr double kSlack = 2.0;
  constexpr double kRel = 1e-2;
  if (certificate.witness == WitnessKind::sequence) {
    TransversalSequence seq;
    try {
      seq = build_sequence(measure, certificate.constructor);
    } catch (const std::exception& e) {
      r.reasons.push_back(std::string("constructor not reproducible: ") + e.what());
      return r;
    }
    const Discretization disc(measure, resolution);
    SequenceAttempt again = evaluate_sequence(seq, disc);
    std::string why;
    if (!sequence_invariants_hold(again.stages, again.v_norm, kSlack, &why)) r.reasons.push_back(why);
    if (again.stages.size() != certificate.stages.size()) {
      r.reasons.push_back("stage count differs from the stored certificate");
    } else {
      for (std::size_t k = 0; k < again.stages.size(); ++k) {
        const auto& s = certificate.stages[k];
        const auto& t = again.stages[k];
        if (s.n != t.n || !close(s.f_norm, t.f_norm, kRel, kSlack * 1e-6) ||
            !close(s.residual, t.residual, kRel, kSlack * 1e-9)) {
          r.reasons.push_back("stage " + std::to_string(s.n) + " does not match the stored values");
        }
      }
    }
    if (!close(certificate.v_norm, again.v_norm, kRel, 0.0)) {
      r.reasons.push_back("stored ||v|| = " + format_number(certificate.v_norm) + " but recomputed " +
                          format_number(again.v_norm));
    }
    r.recomputed = std::move(again);
  } else if (certificate.witness == WitnessKind::identity_gap) {
    std::optional<ScalarField> f;
    try {
      f = parse_field(certificate.field_descriptor, measure.dim());
    } catch (const std::exception& e) {
      r.reasons.push_back(std::string("field not reproducible: ") + e.what());
      return r;
    }
    const Discretization disc(measure, resolution);
    const CheegerInterval interval = assemble_cheeger_interval(*f, disc, {}, certificate.constructors);
    r.cheeger_upper = interval.upper;
    r.energy_lip2 = interval.energy_lip2;
    if (!(interval.upper < (1.0 - 0.5 / kSlack) * interval.energy_lip2)) {
      r.reasons.push_back("E_Ch_upper = " + format_number(interval.upper) + " is not below " +
                          format_number((1.0 - 0.5 / kSlack) * interval.energy_lip2));
    }
    if (!close(certificate.energy_lip2, interval.energy_lip2, kRel, 1e-9) ||
        !close(certificate.cheeger_upper, interval.upper, kRel, kRel * interval.energy_lip2 + 1e-9) ||
        !close(certificate.gap, interval.energy_lip2 - interval.upper, kRel, 1e-9)) {
      r.reasons.push_back("stored energies do not match the recomputation");
    }
  } else {
    r.reasons.push_back("NOT_CLOSABLE without a witness");
  }
  r.pass = r.reasons.empty();
  return r;
}

}  // namespace wsob
