#include "wsob/energy.hpp"

#include <cmath>

namespace wsob {

using nlohmann::json;

std::string EnergySpec::label() const {
  switch (functional) {
    case Functional::lip: return "E_lip(" + norm.label() + ")";
    case Functional::am: return "E_AM";
    case Functional::cheeger_upper: return "E_Ch_upper";
    case Functional::cheeger_lower: return "E_Ch_lower";
  }
  return "?";
}

EnergySpec EnergySpec::parse(const std::string& functional, const std::string& p) {
  EnergySpec s;
  s.norm = NormPlugin::parse(p);
  if (functional == "lip" || functional == "E_lip") {
    s.functional = Functional::lip;
  } else if (functional == "am" || functional == "E_AM") {
    s.functional = Functional::am;
    if (s.norm.kind != NormKind::l2) throw InvalidInput("E_AM is defined for p = 2 only");
  } else {
    throw InvalidInput("unknown functional '" + functional + "' (expected lip or am)");
  }
  return s;
}

json EnergyReport::to_json() const {
  return json{{"measure", measure}, {"field", field},           {"functional", spec.label()},
              {"p", spec.norm.label()}, {"value", value},       {"resolution", resolution}};
}

std::vector<std::string> EnergyReport::csv_header() {
  return {"measure", "field", "functional", "p", "resolution", "value"};
}

std::vector<std::string> EnergyReport::csv_row() const {
  return {measure, field, spec.label(), spec.norm.label(), resolution_tag, format_number(value)};
}

void require_compact_support(const ScalarField& f, const char* operation) {
  if (!f.compactly_supported()) {
    throw InvalidInput(std::string(operation) + ": field '" + f.label() +
                       "' must lie in LIP_c(X), i.e. declare a bounded support box");
  }
}

namespace {

EnergyReport make_report(const ScalarField& f, const Discretization& disc, EnergySpec spec, double value) {
  EnergyReport r;
  r.measure = disc.measure().name();
  r.field = f.label();
  r.spec = spec;
  r.value = value;
  r.resolution = disc.resolution().to_json();
  r.resolution_tag = disc.resolution().tag();
  return r;
}

void check_finite(double v, Index node, const char* what) {
  if (!std::isfinite(v)) {
    throw EvaluationError(std::string(what) + ": non-finite value at node " + std::to_string(node));
  }
}

}  // namespace

EnergyReport energy_lip(const ScalarField& f, const Discretization& disc, NormPlugin norm) {
  require_compact_support(f, "energy_lip");
  require_same_dim(f.dim(), disc.dim(), "energy_lip");
  const QuadratureRule& rule = disc.rule();
  const Matrix grads = f.gradients(rule.nodes);
  double sum = 0.0;
  for (Index i = 0; i < rule.size(); ++i) {
    const double l = norm.dual_norm(grads.col(i));
    check_finite(l, i, "energy_lip");
    sum += rule.weights[i] * l * l;
  }
  return make_report(f, disc, {Functional::lip, norm}, 0.5 * sum);
}

Matrix am_gradient_field(const ScalarField& f, const std::vector<SubspaceD>& node_bundle,
                         const QuadratureRule& rule) {
  require_same_dim(f.dim(), rule.dim(), "am_gradient_field");
  if (Index(node_bundle.size()) != rule.size()) {
    throw InvalidInput("am_gradient_field: bundle has " + std::to_string(node_bundle.size()) +
                       " entries for " + std::to_string(rule.size()) + " nodes");
  }
  Matrix out = f.gradients(rule.nodes);
  for (Index i = 0; i < rule.size(); ++i) {
    const SubspaceD& v = node_bundle[std::size_t(i)];
    if (v.is_full()) continue;
    if (v.is_zero()) {
      out.col(i).setZero();
    } else {
      out.col(i) = project(v, Vector(out.col(i)));
    }
  }
  return out;
}

Matrix am_gradient_field(const ScalarField& f, const Discretization& disc) {
  return am_gradient_field(f, disc.node_bundle(), disc.rule());
}

EnergyReport energy_am(const ScalarField& f, const Discretization& disc) {
  require_compact_support(f, "energy_am");
  const Matrix g = am_gradient_field(f, disc);
  const QuadratureRule& rule = disc.rule();
  double sum = 0.0;
  for (Index i = 0; i < rule.size(); ++i) {
    const double s = g.col(i).squaredNorm();
    check_finite(s, i, "energy_am");
    sum += rule.weights[i] * s;
  }
  return make_report(f, disc, {Functional::am, NormPlugin::euclidean()}, 0.5 * sum);
}

EnergyReport energy(const EnergySpec& spec, const ScalarField& f, const Discretization& disc) {
  switch (spec.functional) {
    case Functional::lip: return energy_lip(f, disc, spec.norm);
    case Functional::am: return energy_am(f, disc);
    default: throw InvalidInput("energy: " + spec.label() + " is not a pointwise functional");
  }
}

json DefectReport::to_json() const {
  return json{{"measure", measure},        {"f", f},
              {"g", g},                    {"functional", spec.label()},
              {"p", spec.norm.label()},    {"E(f+g)", energy_sum},
              {"E(f-g)", energy_diff},     {"E(f)", energy_f},
              {"E(g)", energy_g},          {"defect", defect},
              {"relative_defect", relative}, {"resolution", resolution_tag}};
}

std::vector<std::string> DefectReport::csv_header() {
  return {"measure", "f", "g", "functional", "p", "resolution",
          "E(f+g)", "E(f-g)", "E(f)", "E(g)", "defect", "relative_defect"};
}

std::vector<std::string> DefectReport::csv_row() const {
  return {measure,
          f,
          g,
          spec.label(),
          spec.norm.label(),
          resolution_tag,
          format_number(energy_sum),
          format_number(energy_diff),
          format_number(energy_f),
          format_number(energy_g),
          format_number(defect),
          format_number(relative)};
}

DefectReport parallelogram_defect(const EnergySpec& spec, const ScalarField& f, const ScalarField& g,
                                  const Discretization& disc) {
  DefectReport r;
  r.measure = disc.measure().name();
  r.f = f.label();
  r.g = g.label();
  r.spec = spec;
  r.resolution_tag = disc.resolution().tag();
  r.energy_sum = energy(spec, f + g, disc).value;
  r.energy_diff = energy(spec, f - g, disc).value;
  r.energy_f = energy(spec, f, disc).value;
  r.energy_g = energy(spec, g, disc).value;
  r.defect = r.energy_sum + r.energy_diff - 2.0 * r.energy_f - 2.0 * r.energy_g;
  const double scale = 2.0 * r.energy_f + 2.0 * r.energy_g;
  r.relative = scale > 0.0 ? r.defect / scale : (r.defect == 0.0 ? 0.0 : kInf);
  return r;
}

SobolevNorm sobolev_norm(const ScalarField& f, const Discretization& disc, EnergySpec surrogate) {
  SobolevNorm out;
  out.surrogate = surrogate;
  const double l2 = l2_norm(disc.rule(), f);
  out.l2_squared = l2 * l2;
  out.energy = energy(surrogate, f, disc).value;
  out.value = std::sqrt(out.l2_squared + 2.0 * out.energy);
  return out;
}

}  // namespace wsob
