#include "wsob/experiments.hpp"

#include "wsob/catalog.hpp"
#include "wsob/closability.hpp"
#include "wsob/relax.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <set>

namespace wsob {

using nlohmann::json;

std::string to_string(ExperimentStatus s) {
  switch (s) {
    case ExperimentStatus::complete: return "complete";
    case ExperimentStatus::invariant_violation: return "invariant_violation";
    case ExperimentStatus::error: return "error";
  }
  return "error";
}

namespace {

constexpr std::uint64_t kDefaultSeed = 20240501;

const std::vector<std::string> kKinds{"energy", "defect", "sandwich", "plan-check", "relax", "closability"};

struct Context {
  Resolution resolution;
  std::uint64_t seed = kDefaultSeed;
  std::size_t index = 0;
  std::string name;
};

using Runner = std::function<ExperimentOutcome()>;

/// Rethrows any parse failure as InvalidInput prefixed by a JSON path.
template <class F>
auto at_path(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

void allow(const json& e, std::initializer_list<const char*> keys, const std::string& path) {
  std::vector<const char*> all{"name", "kind", "resolution"};
  all.insert(all.end(), keys.begin(), keys.end());
  for (const auto& [k, v] : e.items()) {
    (void)v;
    if (std::none_of(all.begin(), all.end(), [&](const char* a) { return k == a; })) {
      throw InvalidInput(path + "/" + k + ": unknown key");
    }
  }
}

const json& required(const json& e, const char* key, const std::string& path) {
  if (!e.contains(key)) throw InvalidInput(path + "/" + key + ": missing");
  return e.at(key);
}

std::vector<Measure> parse_measures(const json& e, const std::string& path) {
  std::vector<Measure> out;
  if (e.contains("measure")) {
    out.push_back(at_path(path + "/measure", [&] { return resolve_measure(e.at("measure")); }));
  }
  if (e.contains("measures")) {
    const json& ms = e.at("measures");
    if (ms.is_string() && ms.get<std::string>() == "all") {
      for (const auto& n : catalog_measure_names()) out.push_back(catalog_measure(n));
    } else if (ms.is_array()) {
      for (std::size_t i = 0; i < ms.size(); ++i) {
        out.push_back(at_path(path + "/measures/" + std::to_string(i), [&] { return resolve_measure(ms[i]); }));
      }
    } else {
      throw InvalidInput(path + "/measures: expected \"all\" or an array");
    }
  }
  if (out.empty()) throw InvalidInput(path + ": needs \"measure\" or \"measures\"");
  return out;
}

Measure parse_single_measure(const json& e, const std::string& path) {
  return at_path(path + "/measure", [&] { return resolve_measure(required(e, "measure", path)); });
}

std::vector<ScalarField> parse_fields(const json& refs, Index dim, const std::string& path) {
  if (!refs.is_array()) throw InvalidInput(path + ": expected an array of fields");
  std::vector<ScalarField> out;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    out.push_back(at_path(path + "/" + std::to_string(i), [&] { return resolve_field(refs[i], dim); }));
  }
  return out;
}

std::vector<CurveEnsemble> parse_ensembles(const json& refs, const Measure& m, const std::string& path) {
  std::vector<CurveEnsemble> out;
  if (!refs.is_array()) throw InvalidInput(path + ": expected an array of ensembles");
  for (std::size_t i = 0; i < refs.size(); ++i) {
    CurveEnsemble e = at_path(path + "/" + std::to_string(i), [&] { return parse_ensemble(refs[i], &m); });
    if (e.dim() != m.dim()) {
      throw InvalidInput(path + "/" + std::to_string(i) + ": ensemble dimension differs from the measure's");
    }
    out.push_back(std::move(e));
  }
  return out;
}

EnergySpec parse_spec(const json& j, const std::string& path) {
  return at_path(path, [&] {
    require_keys(j, {"functional", "p"}, "functional");
    std::string p = "2";
    if (j.contains("p")) p = j.at("p").is_string() ? j.at("p").get<std::string>() : j.at("p").dump();
    return EnergySpec::parse(j.at("functional").get<std::string>(), p);
  });
}

std::vector<std::string> parse_constructors(const json& e, const Measure& m, const std::string& path) {
  if (!e.contains("constructors")) return default_constructors(m);
  auto c = at_path(path + "/constructors", [&] { return e.at("constructors").get<std::vector<std::string>>(); });
  for (const auto& name : c) {
    if (name != "trivial" && name != "plateau") throw InvalidInput(path + "/constructors: unknown '" + name + "'");
    if (name == "plateau" && !plateau_applicable(m)) {
      throw InvalidInput(path + "/constructors: plateau needs a measure made of one Cantor component");
    }
  }
  return c;
}

ExperimentOutcome outcome(const Context& ctx, const std::string& kind) {
  ExperimentOutcome o;
  o.name = ctx.name;
  o.kind = kind;
  o.report = json{{"resolution", ctx.resolution.to_json()}, {"seed", ctx.seed}};
  return o;
}

void violate(ExperimentOutcome& o, const std::string& what) {
  o.status = ExperimentStatus::invariant_violation;
  o.report["violations"].push_back(what);
}

// energy ----------------------------------------------------------------------

Runner prepare_energy(const json& e, const Context& ctx, const std::string& path) {
  allow(e, {"measure", "measures", "fields", "functionals"}, path);
  const auto measures = parse_measures(e, path);
  std::vector<std::vector<ScalarField>> fields;
  for (const auto& m : measures) fields.push_back(parse_fields(required(e, "fields", path), m.dim(), path + "/fields"));
  std::vector<EnergySpec> specs{{Functional::lip, NormPlugin::euclidean()}, {Functional::am, NormPlugin::euclidean()}};
  if (e.contains("functionals")) {
    specs.clear();
    for (std::size_t i = 0; i < e.at("functionals").size(); ++i) {
      specs.push_back(parse_spec(e.at("functionals")[i], path + "/functionals/" + std::to_string(i)));
    }
  }
  return [=] {
    ExperimentOutcome o = outcome(ctx, "energy");
    CsvTable t{"energy", EnergyReport::csv_header(), {}};
    json rows = json::array();
    for (std::size_t k = 0; k < measures.size(); ++k) {
      const Discretization disc(measures[k], ctx.resolution);
      for (const auto& f : fields[k]) {
        for (const auto& s : specs) {
          const EnergyReport r = energy(s, f, disc);
          t.add_row(r.csv_row());
          rows.push_back(r.to_json());
        }
      }
    }
    o.report["energies"] = rows;
    o.summary = std::to_string(t.rows.size()) + " energies on " + std::to_string(measures.size()) + " measure(s)";
    o.tables.push_back(std::move(t));
    return o;
  };
}

// defect ----------------------------------------------------------------------

Runner prepare_defect(const json& e, const Context& ctx, const std::string& path) {
  allow(e, {"measure", "measures", "pairs", "random_pairs", "functional", "expect"}, path);
  const auto measures = parse_measures(e, path);
  const EnergySpec spec = e.contains("functional") ? parse_spec(e.at("functional"), path + "/functional") : EnergySpec{};
  std::vector<std::vector<std::pair<ScalarField, ScalarField>>> pairs(measures.size());
  if (e.contains("pairs")) {
    const json& ps = e.at("pairs");
    for (std::size_t k = 0; k < measures.size(); ++k) {
      for (std::size_t i = 0; i < ps.size(); ++i) {
        const std::string p = path + "/pairs/" + std::to_string(i);
        if (!ps[i].is_array() || ps[i].size() != 2) throw InvalidInput(p + ": expected [f, g]");
        const auto fg = parse_fields(ps[i], measures[k].dim(), p);
        pairs[k].emplace_back(fg[0], fg[1]);
      }
    }
  }
  const int random_pairs = at_path(path + "/random_pairs", [&] { return e.value("random_pairs", 0); });
  if (random_pairs < 0) throw InvalidInput(path + "/random_pairs: must be >= 0");
  std::optional<double> max_relative, expect_defect;
  double tol = 0.0;
  if (e.contains("expect")) {
    const json& x = e.at("expect");
    at_path(path + "/expect", [&] {
      require_keys(x, {"max_relative", "defect", "tol"}, "expect");
      if (x.contains("max_relative")) max_relative = x.at("max_relative").get<double>();
      if (x.contains("defect")) expect_defect = x.at("defect").get<double>();
      tol = x.value("tol", 0.0);
      return 0;
    });
  }
  return [=] {
    ExperimentOutcome o = outcome(ctx, "defect");
    CsvTable t{"defect", DefectReport::csv_header(), {}};
    std::mt19937_64 rng = task_rng(ctx.seed, ctx.index);
    double worst_rel = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < measures.size(); ++k) {
      const Discretization disc(measures[k], ctx.resolution);
      auto list = pairs[k];
      for (int r = 0; r < random_pairs; ++r) {
        const std::string tag = "random[" + std::to_string(r) + "]";
        ScalarField f = random_catalog_field(measures[k].dim(), rng).named(tag + ".f");
        ScalarField g = random_catalog_field(measures[k].dim(), rng).named(tag + ".g");
        list.emplace_back(f, g);
      }
      for (const auto& [f, g] : list) {
        const DefectReport d = parallelogram_defect(spec, f, g, disc);
        t.add_row(d.csv_row());
        ++count;
        worst_rel = std::max(worst_rel, std::abs(d.relative));
        if (max_relative && !(std::abs(d.relative) <= *max_relative)) {
          violate(o, "relative defect " + format_number(d.relative) + " for (" + d.f + ", " + d.g + ") on " + d.measure);
        }
        if (expect_defect && !(std::abs(d.defect - *expect_defect) <= tol)) {
          violate(o, "defect " + format_number(d.defect) + " differs from " + format_number(*expect_defect) + " on " +
                         d.measure);
        }
      }
    }
    o.report["functional"] = spec.label();
    o.report["pairs"] = count;
    o.report["max_abs_relative_defect"] = worst_rel;
    o.summary = spec.label() + " parallelogram defect over " + std::to_string(count) +
                " pair(s): max |relative| = " + format_number(worst_rel);
    o.tables.push_back(std::move(t));
    return o;
  };
}

// sandwich --------------------------------------------------------------------

struct IntervalExpectation {
  std::string field;
  std::optional<double> lower, upper;
  double tol = 1e-12;
};

Runner prepare_sandwich(const json& e, const Context& ctx, const std::string& path) {
  allow(e, {"measure", "fields", "ensembles", "constructors", "expect"}, path);
  const Measure m = parse_single_measure(e, path);
  const auto fields = parse_fields(required(e, "fields", path), m.dim(), path + "/fields");
  const auto ensembles =
      e.contains("ensembles") ? parse_ensembles(e.at("ensembles"), m, path + "/ensembles") : std::vector<CurveEnsemble>{};
  const auto constructors = parse_constructors(e, m, path);
  std::vector<IntervalExpectation> expects;
  if (e.contains("expect")) {
    for (std::size_t i = 0; i < e.at("expect").size(); ++i) {
      const json& x = e.at("expect")[i];
      expects.push_back(at_path(path + "/expect/" + std::to_string(i), [&] {
        require_keys(x, {"field", "lower", "upper", "tol"}, "expect");
        IntervalExpectation ie;
        ie.field = resolve_field(x.at("field"), m.dim()).label();
        if (x.contains("lower")) ie.lower = x.at("lower").get<double>();
        if (x.contains("upper")) ie.upper = x.at("upper").get<double>();
        ie.tol = x.value("tol", ie.tol);
        return ie;
      }));
    }
  }
  return [=] {
    ExperimentOutcome o = outcome(ctx, "sandwich");
    CsvTable t{"sandwich", {"measure", "field", "resolution", "E_Ch_lower", "E_Ch_upper", "E_AM", "E_lip(2)"}, {}};
    CsvTable lbt{"lower_bounds", {"measure", "field", "ensemble", "increment", "kinetic_energy", "comp", "bound", "refusal"}, {}};
    const Discretization disc(m, ctx.resolution);
    json intervals = json::array();
    for (const auto& f : fields) {
      CheegerInterval ci;
      try {
        ci = assemble_cheeger_interval(f, disc, ensembles, constructors);
      } catch (const InvariantViolation& err) {
        violate(o, err.what());
        continue;
      }
      t.add_row({ci.measure, ci.field, ci.resolution_tag, format_number(ci.lower), format_number(ci.upper),
                 format_number(ci.energy_am), format_number(ci.energy_lip2)});
      for (const auto& [name, lb] : ci.lower_bounds) {
        lbt.add_row({ci.measure, ci.field, name, format_number(lb.increment), format_number(lb.kinetic),
                     format_number(lb.comp), lb.value ? format_number(lb.energy_bound()) : "", lb.refusal});
      }
      for (const auto& x : expects) {
        if (x.field != ci.field) continue;
        if (x.lower && !(std::abs(ci.lower - *x.lower) <= x.tol)) {
          violate(o, "E_Ch_lower(" + ci.field + ") = " + format_number(ci.lower) + ", expected " + format_number(*x.lower));
        }
        if (x.upper && !(std::abs(ci.upper - *x.upper) <= x.tol)) {
          violate(o, "E_Ch_upper(" + ci.field + ") = " + format_number(ci.upper) + ", expected " + format_number(*x.upper));
        }
      }
      intervals.push_back(ci.to_json());
    }
    o.report["intervals"] = intervals;
    o.summary = std::to_string(t.rows.size()) + " Cheeger interval(s) on " + m.name() +
                (o.status == ExperimentStatus::complete ? ", sandwich order holds" : ", violations recorded");
    o.tables.push_back(std::move(t));
    o.tables.push_back(std::move(lbt));
    return o;
  };
}

// plan-check ------------------------------------------------------------------

Runner prepare_plan_check(const json& e, const Context& ctx, const std::string& path) {
  allow(e, {"measure", "ensemble", "fields", "expect"}, path);
  const Measure m = parse_single_measure(e, path);
  const CurveEnsemble plan = parse_ensembles(json::array({required(e, "ensemble", path)}), m, path + "/ensemble").front();
  const auto fields =
      e.contains("fields") ? parse_fields(e.at("fields"), m.dim(), path + "/fields") : std::vector<ScalarField>{};
  std::map<std::string, bool> expect;
  if (e.contains("expect")) {
    at_path(path + "/expect", [&] {
      require_keys(e.at("expect"), {"compression", "tangency", "wug"}, "expect");
      for (const auto& [k, v] : e.at("expect").items()) expect[k] = v.get<bool>();
      return 0;
    });
  }
  return [=] {
    ExperimentOutcome o = outcome(ctx, "plan-check");
    const Discretization disc(m, ctx.resolution);
    CsvTable t{"plan_check", {"ensemble", "measure", "check", "field", "pass", "value", "witness_curve", "witness_t"}, {}};
    auto witness_cells = [](const std::optional<PlanWitness>& w) -> std::pair<std::string, std::string> {
      if (!w) return {"", ""};
      return {std::to_string(w->curve), format_number(w->t)};
    };
    auto check = [&](const std::string& name, bool pass) {
      auto it = expect.find(name);
      if (it != expect.end() && it->second != pass) {
        violate(o, name + " " + (pass ? "passed" : "failed") + " but was expected to " + (it->second ? "pass" : "fail"));
      }
    };

    const CompressionReport comp = check_compression(plan, disc);
    auto [cc, ct] = witness_cells(comp.witness);
    t.add_row({plan.name, m.name(), "compression", "", comp.pass ? "true" : "false", format_number(comp.max_ratio), cc, ct});
    check("compression", comp.pass);

    const TangencyReport tan = check_tangency(plan, disc.bundle());
    auto [tc, tt] = witness_cells(tan.witness);
    t.add_row({plan.name, m.name(), "tangency", "", tan.pass ? "true" : "false", format_number(tan.max_residual), tc, tt});
    check("tangency", tan.pass);

    const double ke = kinetic_energy(plan);
    t.add_row({plan.name, m.name(), "kinetic_energy", "", "", format_number(ke), "", ""});

    json per_field = json::array();
    bool all_wug = true;
    for (const auto& f : fields) {
      const WugReport w = check_wug(f, am_gradient_norm(f, disc.bundle()), plan);
      all_wug = all_wug && w.pass;
      std::optional<PlanWitness> first;
      if (!w.violation_list.empty()) first = w.violation_list.front();
      auto [wc, wt] = witness_cells(first);
      t.add_row({plan.name, m.name(), "wug", f.label(), w.pass ? "true" : "false", format_number(w.max_violation), wc, wt});
      const double chain = chain_rule_defect(f, disc.bundle(), plan);
      t.add_row({plan.name, m.name(), "chain_rule_defect", f.label(), "", format_number(chain), "", ""});
      const LowerBound lb = cheeger_lower_bound(f, plan, comp);
      t.add_row({plan.name, m.name(), "cheeger_lower_bound", f.label(), lb.value ? "true" : "false",
                 lb.value ? format_number(*lb.value) : "", "", ""});
      per_field.push_back({{"field", f.label()}, {"wug", w.to_json()}, {"chain_rule_defect", chain},
                           {"lower_bound", lb.to_json()}});
    }
    if (!fields.empty()) check("wug", all_wug);

    o.report["ensemble"] = plan.to_json();
    o.report["ensemble"].erase("curves");
    o.report["ensemble"]["curve_count"] = plan.curves.size();
    o.report["compression"] = comp.to_json();
    o.report["tangency"] = tan.to_json();
    o.report["kinetic_energy"] = ke;
    o.report["fields"] = per_field;
    o.summary = plan.name + " on " + m.name() + ": compression " + (comp.pass ? "PASS" : "FAIL") + ", tangency " +
                (tan.pass ? "PASS" : "FAIL") + (fields.empty() ? "" : std::string(", wug ") + (all_wug ? "PASS" : "FAIL"));
    o.tables.push_back(std::move(t));
    o.tables.push_back(comp.table(plan.name, m.name()));
    return o;
  };
}

// relax -----------------------------------------------------------------------

Runner prepare_relax(const json& e, const Context& ctx, const std::string& path) {
  allow(e, {"measure", "field", "constructors", "depths", "expect"}, path);
  const Measure m = parse_single_measure(e, path);
  const ScalarField f = at_path(path + "/field", [&] { return resolve_field(required(e, "field", path), m.dim()); });
  const auto constructors = parse_constructors(e, m, path);
  const auto depths = at_path(path + "/depths", [&] { return e.value("depths", std::vector<int>{}); });
  std::optional<double> upper, am_min, am_max, decay;
  if (e.contains("expect")) {
    at_path(path + "/expect", [&] {
      const json& x = e.at("expect");
      require_keys(x, {"upper", "am_min", "am_max", "max_decay_ratio"}, "expect");
      if (x.contains("upper")) upper = x.at("upper").get<double>();
      if (x.contains("am_min")) am_min = x.at("am_min").get<double>();
      if (x.contains("am_max")) am_max = x.at("am_max").get<double>();
      if (x.contains("max_decay_ratio")) decay = x.at("max_decay_ratio").get<double>();
      return 0;
    });
  }
  return [=] {
    ExperimentOutcome o = outcome(ctx, "relax");
    const Discretization disc(m, ctx.resolution);
    CheegerInterval ci;
    try {
      ci = assemble_cheeger_interval(f, disc, {}, constructors);
    } catch (const InvariantViolation& err) {
      violate(o, err.what());
      return o;
    }
    CsvTable stages{"stages", {"measure", "field", "constructor", "stage", "energy_functional", "energy", "l2_error"}, {}};
    double worst_ratio = 0.0;
    for (const auto& r : ci.relaxations) {
      for (auto& row : r.table().rows) stages.add_row(row);
      if (r.constructor != "plateau") continue;
      for (std::size_t k = 1; k < r.stages.size(); ++k) {
        if (r.stages[k - 1].l2_error > 0.0) {
          worst_ratio = std::max(worst_ratio, r.stages[k].l2_error / r.stages[k - 1].l2_error);
        }
      }
    }
    if (upper && !(ci.upper == *upper)) violate(o, "E_Ch_upper = " + format_number(ci.upper) + ", expected " + format_number(*upper));
    if (am_min && !(ci.energy_am >= *am_min)) violate(o, "E_AM = " + format_number(ci.energy_am) + " below " + format_number(*am_min));
    if (am_max && !(ci.energy_am <= *am_max)) violate(o, "E_AM = " + format_number(ci.energy_am) + " above " + format_number(*am_max));
    if (decay && !(worst_ratio <= *decay)) {
      violate(o, "L2 error ratio " + format_number(worst_ratio) + " exceeds " + format_number(*decay));
    }

    CsvTable sweep{"depth_sweep", {"measure", "field", "depth", "E_AM", "E_lip(2)", "E_Ch_upper", "final_l2_error"}, {}};
    for (int depth : depths) {
      Resolution r = ctx.resolution;
      r.cantor_depth = depth;
      r.cantor_depth_offset = 0;
      const Discretization dd(m, r);
      const CheegerInterval c = assemble_cheeger_interval(f, dd, {}, constructors);
      const double last = c.relaxations.back().stages.back().l2_error;
      sweep.add_row({m.name(), f.label(), std::to_string(depth), format_number(c.energy_am), format_number(c.energy_lip2),
                     format_number(c.upper), format_number(last)});
    }

    o.report["interval"] = ci.to_json();
    o.report["max_l2_decay_ratio"] = worst_ratio;
    o.summary = f.label() + " on " + m.name() + ": E_Ch in [" + format_number(ci.lower) + ", " + format_number(ci.upper) +
                "], E_AM = " + format_number(ci.energy_am) + ", max L2 decay ratio " + format_number(worst_ratio);
    o.tables.push_back(std::move(stages));
    if (!depths.empty()) o.tables.push_back(std::move(sweep));
    return o;
  };
}

// closability -----------------------------------------------------------------

Runner prepare_closability(const json& e, const Context& ctx, const std::string& path) {
  allow(e, {"measure", "transversal", "identity_gap_fields", "constructors", "ensembles", "verify", "expect"}, path);
  const Measure m = parse_single_measure(e, path);
  const bool transversal = at_path(path + "/transversal", [&] { return e.value("transversal", true); });
  const bool verify = at_path(path + "/verify", [&] { return e.value("verify", true); });
  const auto fields = e.contains("identity_gap_fields")
                          ? parse_fields(e.at("identity_gap_fields"), m.dim(), path + "/identity_gap_fields")
                          : std::vector<ScalarField>{};
  const auto ensembles =
      e.contains("ensembles") ? parse_ensembles(e.at("ensembles"), m, path + "/ensembles") : std::vector<CurveEnsemble>{};
  const auto constructors = parse_constructors(e, m, path);
  std::optional<std::string> expect_verdict, expect_witness;
  if (e.contains("expect")) {
    at_path(path + "/expect", [&] {
      require_keys(e.at("expect"), {"verdict", "witness"}, "expect");
      if (e.at("expect").contains("verdict")) expect_verdict = e.at("expect").at("verdict").get<std::string>();
      if (e.at("expect").contains("witness")) expect_witness = e.at("expect").at("witness").get<std::string>();
      return 0;
    });
  }
  return [=] {
    ExperimentOutcome o = outcome(ctx, "closability");
    std::vector<std::pair<std::string, ClosabilityCertificate>> certs;
    if (transversal) certs.emplace_back("transversal", transversal_counterexample(m, ctx.resolution));
    if (!fields.empty()) {
      const Discretization disc(m, ctx.resolution);
      for (const auto& f : fields) {
        certs.emplace_back("identity_gap:" + f.label(), identity_gap_check(f, disc, ensembles, constructors));
      }
    }
    CsvTable summary{"certificates", {"measure", "source", "verdict", "witness", "reason", "verified"}, {}};
    CsvTable stages{"stages", ClosabilityCertificate{}.table().header, {}};
    json list = json::array();
    Verdict overall = Verdict::no_counterexample_found;
    WitnessKind overall_witness = WitnessKind::none;
    const Resolution finer = ctx.resolution.refined();
    for (const auto& [source, c] : certs) {
      std::string verified = "n/a";
      json j = c.to_json();
      j["source"] = source;
      if (c.verdict == Verdict::not_closable) {
        if (overall == Verdict::no_counterexample_found) overall_witness = c.witness;
        overall = Verdict::not_closable;
        if (verify) {
          const VerificationReport v = verify_certificate(c, m, finer);
          verified = v.pass ? "PASS" : "FAIL";
          j["verification"] = v.to_json();
          j["verification"]["resolution"] = finer.to_json();
          if (!v.pass) violate(o, source + " certificate failed re-verification");
        }
      }
      summary.add_row({m.name(), source, to_string(c.verdict), to_string(c.witness), c.reason, verified});
      for (auto& row : c.table().rows) stages.add_row(row);
      list.push_back(j);
    }
    if (expect_verdict && *expect_verdict != to_string(overall)) {
      violate(o, "verdict " + to_string(overall) + ", expected " + *expect_verdict);
    }
    if (expect_witness && *expect_witness != to_string(overall_witness)) {
      violate(o, "witness " + to_string(overall_witness) + ", expected " + *expect_witness);
    }
    o.report["verdict"] = to_string(overall);
    o.report["witness"] = to_string(overall_witness);
    o.report["certificates"] = list;
    o.summary = m.name() + ": " + to_string(overall) +
                (overall == Verdict::not_closable ? " (" + to_string(overall_witness) + ")" : "");
    o.tables.push_back(std::move(summary));
    o.tables.push_back(std::move(stages));
    return o;
  };
}

Runner prepare(const json& e, const Context& ctx, const std::string& path) {
  const std::string kind = required(e, "kind", path).get<std::string>();
  if (kind == "energy") return prepare_energy(e, ctx, path);
  if (kind == "defect") return prepare_defect(e, ctx, path);
  if (kind == "sandwich") return prepare_sandwich(e, ctx, path);
  if (kind == "plan-check") return prepare_plan_check(e, ctx, path);
  if (kind == "relax") return prepare_relax(e, ctx, path);
  if (kind == "closability") return prepare_closability(e, ctx, path);
  throw InvalidInput(path + "/kind: unknown experiment kind '" + kind + "'");
}

std::string safe_file_stem(const std::string& s) {
  std::string out;
  for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return out;
}

}  // namespace

std::vector<std::string> preset_names() { return {"hilbertianity-defect", "cantor-gap", "fukushima"}; }

json preset_config(const std::string& name) {
  if (name == "hilbertianity-defect") {
    return json::parse(R"({
      "name": "hilbertianity-defect",
      "seed": 20240501,
      "experiments": [
        {"name": "am-defect", "kind": "defect", "measures": "all", "pairs": [["x", "gaussian"]],
         "random_pairs": 100, "functional": {"functional": "am"}, "expect": {"max_relative": 1e-10}},
        {"name": "am-defect-xy", "kind": "defect",
         "measures": ["lebesgue-square", "segment", "arc", "cantor-classic", "atoms", "mixture-disjoint",
                      "mixture-overlap", "graph", "plane-r3"],
         "pairs": [["x", "y"]], "functional": {"functional": "am"}, "expect": {"max_relative": 1e-10}},
        {"name": "lip-inf-defect", "kind": "defect", "measures": ["lebesgue-square"], "pairs": [["x", "y"]],
         "functional": {"functional": "lip", "p": "inf"}, "expect": {"defect": 2.0, "tol": 1e-9}},
        {"name": "lip-2-defect", "kind": "defect", "measures": ["lebesgue-square"], "pairs": [["x", "y"]],
         "functional": {"functional": "lip", "p": "2"}, "expect": {"defect": 0.0, "tol": 1e-9}}
      ]})");
  }
  if (name == "cantor-gap") {
    return json::parse(R"({
      "name": "cantor-gap",
      "seed": 20240501,
      "experiments": [
        {"name": "cantor-gap", "kind": "relax", "measure": "cantor-fat", "field": "x",
         "depths": [2, 4, 6, 8, 10, 12],
         "expect": {"upper": 0.0, "am_min": 0.2, "am_max": 0.26, "max_decay_ratio": 0.6}}
      ]})");
  }
  if (name == "fukushima") {
    return json::parse(R"({
      "name": "fukushima",
      "seed": 20240501,
      "experiments": [
        {"name": "segment", "kind": "closability", "measure": "segment",
         "expect": {"verdict": "NOT_CLOSABLE", "witness": "sequence"}},
        {"name": "fat-cantor", "kind": "closability", "measure": "cantor-fat", "transversal": true,
         "identity_gap_fields": ["x"], "expect": {"verdict": "NOT_CLOSABLE", "witness": "identity_gap"}},
        {"name": "lebesgue", "kind": "closability", "measure": "lebesgue-square", "identity_gap_fields": ["x"],
         "expect": {"verdict": "NO_COUNTEREXAMPLE_FOUND"}}
      ]})");
  }
  throw InvalidInput("unknown preset '" + name + "'");
}

BatchOutcome run_batch(const json& config, const RunOptions& options) {
  BatchOutcome out;
  json resolved = config;
  std::vector<Runner> runners;
  std::vector<Context> contexts;
  try {
    if (!config.is_object()) throw InvalidInput(": config must be a JSON object");
    for (const auto& [k, v] : config.items()) {
      (void)v;
      if (k != "name" && k != "seed" && k != "resolution" && k != "resolution_scale" && k != "experiments") {
        throw InvalidInput("/" + k + ": unknown key");
      }
    }
    std::uint64_t seed = kDefaultSeed;
    if (config.contains("seed")) seed = at_path("/seed", [&] { return config.at("seed").get<std::uint64_t>(); });
    if (options.seed) seed = *options.seed;
    double scale = options.resolution_scale;
    if (config.contains("resolution_scale") && options.resolution_scale == 1.0) {
      scale = at_path("/resolution_scale", [&] { return config.at("resolution_scale").get<double>(); });
    }
    if (!(scale > 0.0)) throw InvalidInput("/resolution_scale: must be positive");
    const json base_res = config.value("resolution", json::object());
    at_path("/resolution", [&] { return Resolution::from_json(base_res); });
    resolved["seed"] = seed;
    resolved["resolution_scale"] = scale;
    resolved["resolution"] = Resolution::from_json(base_res).to_json();

    const json& exps = required(config, "experiments", "");
    if (!exps.is_array() || exps.empty()) throw InvalidInput("/experiments: expected a non-empty array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < exps.size(); ++i) {
      const std::string path = "/experiments/" + std::to_string(i);
      try {
        const json& e = exps[i];
        if (!e.is_object()) throw InvalidInput(path + ": expected an object");
        Context ctx;
        ctx.seed = seed;
        ctx.index = i;
        ctx.name = e.value("name", std::string(required(e, "kind", path).get<std::string>()) + "-" + std::to_string(i));
        if (!names.insert(ctx.name).second) throw InvalidInput(path + "/name: duplicate experiment name");
        json res = base_res;
        if (e.contains("resolution")) res.merge_patch(e.at("resolution"));
        ctx.resolution = at_path(path + "/resolution", [&] { return Resolution::from_json(res); }).scaled(scale);
        resolved["experiments"][i]["name"] = ctx.name;
        resolved["experiments"][i]["effective_resolution"] = ctx.resolution.to_json();
        runners.push_back(prepare(e, ctx, path));
        contexts.push_back(ctx);
      } catch (const std::exception& err) {
        out.config_errors.push_back(err.what());
      }
    }
  } catch (const std::exception& err) {
    out.config_errors.push_back(err.what());
  }
  out.resolved_config = resolved;
  if (!out.config_errors.empty()) {
    out.exit_code = 1;
    out.report = json{{"config", resolved}, {"config_errors", out.config_errors}};
    return out;
  }

  std::vector<std::future<ExperimentOutcome>> futures;
  for (std::size_t i = 0; i < runners.size(); ++i) {
    futures.push_back(std::async(std::launch::async, [runner = runners[i], ctx = contexts[i]]() {
      try {
        return runner();
      } catch (const InvariantViolation& e) {
        ExperimentOutcome o = outcome(ctx, "?");
        violate(o, e.what());
        o.summary = std::string("invariant violation: ") + e.what();
        return o;
      } catch (const std::exception& e) {
        ExperimentOutcome o = outcome(ctx, "?");
        o.status = ExperimentStatus::error;
        o.summary = std::string("error: ") + e.what();
        o.report["error"] = e.what();
        return o;
      }
    }));
  }
  json experiments = json::array();
  bool violation = false, error = false;
  for (std::size_t i = 0; i < futures.size(); ++i) {
    ExperimentOutcome o = futures[i].get();
    if (o.kind == "?") o.kind = resolved["experiments"][i].value("kind", "?");
    violation = violation || o.status == ExperimentStatus::invariant_violation;
    error = error || o.status == ExperimentStatus::error;
    json tables = json::array();
    for (const auto& t : o.tables) {
      const std::string file = safe_file_stem(o.name) + "." + safe_file_stem(t.name) + ".csv";
      out.files.emplace_back(file, t.render());
      tables.push_back(file);
    }
    experiments.push_back({{"name", o.name}, {"kind", o.kind}, {"status", to_string(o.status)},
                           {"summary", o.summary}, {"tables", tables}, {"report", o.report}});
    out.experiments.push_back(std::move(o));
  }
  out.exit_code = violation ? 2 : error ? 1 : 0;
  out.report = json{{"config", resolved}, {"seed", resolved["seed"]}, {"experiments", experiments},
                    {"exit_code", out.exit_code}};
  out.files.insert(out.files.begin(), {"report.json", out.report.dump(2) + "\n"});
  if (options.out_dir) {
    for (const auto& [file, content] : out.files) write_atomic(*options.out_dir / file, content);
  }
  return out;
}

json catalog_listing() {
  json measures = json::array();
  for (const auto& n : catalog_measure_names()) {
    const Measure m = catalog_measure(n);
    json comps = json::array();
    for (const auto& c : m.components()) comps.push_back({{"label", c.label}, {"type", c.type_name()}, {"weight", c.weight}});
    measures.push_back({{"name", n}, {"dim", m.dim()}, {"components", comps}});
  }
  return json{{"measures", measures},
              {"fields", catalog_field_names()},
              {"ensembles", {"sliding-segment", "sliding-square", "transversal", "patch-sliding", "translates", "curves"}},
              {"experiment_kinds", kKinds},
              {"presets", preset_names()}};
}

}  // namespace wsob
