#include "oracles.hpp"

#include "wsob/closability.hpp"

#include <doctest.h>

using namespace wsob;
using oracle::vec;

TEST_CASE("theta profile") {
  CHECK(theta(0.0) == 0.0);
  CHECK(theta_derivative(0.0) == 1.0);
  CHECK(theta(1.0) == 0.0);
  CHECK(theta(-1.5) == 0.0);
  CHECK(theta_derivative(1.0) == 0.0);
  for (double t = -0.95; t < 0.95; t += 0.0371) {
    const double fd3 = (theta(t + 1e-3) - theta(t - 1e-3)) / 2e-3;
    const double fd4 = (theta(t + 1e-4) - theta(t - 1e-4)) / 2e-4;
    const double e3 = std::abs(fd3 - theta_derivative(t)), e4 = std::abs(fd4 - theta_derivative(t));
    CHECK(e4 <= 0.05 * e3 + 1e-9);
  }
}

TEST_CASE("segment sequence certificate") {
  const ClosabilityCertificate c = transversal_counterexample(catalog_measure("segment"));
  CHECK(c.verdict == Verdict::not_closable);
  CHECK(c.witness == WitnessKind::sequence);
  CHECK(c.v_norm == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE_FALSE(c.stages.empty());
  for (const auto& s : c.stages) {
    CHECK(s.f_norm == 0.0);
    CHECK(s.residual <= 1e-12);
  }
  Resolution fine;
  fine.patch_nodes = 1024;
  CHECK(verify_certificate(c, catalog_measure("segment"), fine).pass);
}

TEST_CASE("tampered certificates fail verification") {
  const Measure seg = catalog_measure("segment");
  ClosabilityCertificate c = transversal_counterexample(seg);
  c.v_norm = 2.0;
  CHECK_FALSE(verify_certificate(c, seg, Resolution{}.refined()).pass);
  ClosabilityCertificate d = transversal_counterexample(seg);
  d.stages.back().residual = 0.5;
  CHECK_FALSE(verify_certificate(d, seg, Resolution{}.refined()).pass);
  ClosabilityCertificate e = transversal_counterexample(seg);
  e.constructor["v"] = {1.0, 0.0};
  CHECK_FALSE(verify_certificate(e, seg, Resolution{}.refined()).pass);
}

TEST_CASE("arc: frozen normal is rejected, distance variant accepted") {
  const Measure arc = catalog_measure("arc");
  const ClosabilityCertificate c = transversal_counterexample(arc);
  CHECK(c.verdict == Verdict::not_closable);
  REQUIRE(c.attempts.size() >= 2);
  const SequenceAttempt& frozen = c.attempts.front();
  CHECK_FALSE(frozen.accepted);
  CHECK(frozen.constructor.at("variant") == "frozen_normal");
  CHECK(frozen.stages.back().residual > 0.1);
  CHECK(c.constructor.at("variant") == "curved_distance");
  for (const auto& s : c.stages) {
    CHECK(s.f_norm <= 1e-12);
    CHECK(s.residual <= 1e-9);
  }
  CHECK(verify_certificate(c, arc, Resolution{}.refined()).pass);
}

TEST_CASE("Lebesgue and fat Cantor have no transversal sequence") {
  for (const char* name : {"lebesgue-square", "cantor-fat"}) {
    const ClosabilityCertificate c = transversal_counterexample(catalog_measure(name));
    CHECK(c.verdict == Verdict::no_counterexample_found);
    CHECK(c.witness == WitnessKind::none);
  }
}

TEST_CASE("transversal coverage of singular catalog measures") {
  for (const char* name : {"segment", "arc", "cantor-classic", "atoms", "mixture-disjoint", "graph", "plane-r3"}) {
    const Measure m = catalog_measure(name);
    const ClosabilityCertificate c = transversal_counterexample(m);
    INFO(name, ": ", c.reason);
    CHECK(c.verdict == Verdict::not_closable);
    CHECK(verify_certificate(c, m, Resolution{}.refined()).pass);
  }
}

TEST_CASE("overlap union hides the midline of mixture-overlap") {
  const ClosabilityCertificate c = transversal_counterexample(catalog_measure("mixture-overlap"));
  CHECK(c.verdict == Verdict::no_counterexample_found);
}

TEST_CASE("fat Cantor sawtooth in one dimension is not needed, classic line is") {
  CantorSet s;
  s.origin = vec({0});
  Measure m(1, "classic-line");
  m.add(1.0, s);
  const ClosabilityCertificate c = transversal_counterexample(m);
  CHECK(c.verdict == Verdict::not_closable);
  CHECK(verify_certificate(c, m, Resolution{}.refined()).pass);
}

TEST_CASE("identity gap examples") {
  const Discretization fat(catalog_measure("cantor-fat"));
  const ClosabilityCertificate g =
      identity_gap_check(catalog_field("x", 1), fat, {}, default_constructors(fat.measure()));
  CHECK(g.verdict == Verdict::not_closable);
  CHECK(g.witness == WitnessKind::identity_gap);
  CHECK(g.cheeger_upper == 0.0);
  CHECK(g.gap >= 0.2);
  Resolution deeper;
  deeper.cantor_depth = 16;
  CHECK(verify_certificate(g, fat.measure(), deeper).pass);

  const Discretization sq(catalog_measure("lebesgue-square"));
  CHECK(identity_gap_check(catalog_field("x", 2), sq, {}, {"trivial"}).verdict == Verdict::no_counterexample_found);
  CHECK(identity_gap_check(catalog_field("zero", 1), fat, {}, {"trivial", "plateau"}).verdict ==
        Verdict::no_counterexample_found);
}

TEST_CASE("certificate JSON round trip") {
  const Measure seg = catalog_measure("segment");
  const ClosabilityCertificate c = transversal_counterexample(seg);
  const ClosabilityCertificate back = ClosabilityCertificate::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK(verify_certificate(back, seg, Resolution{}.refined()).pass);
  const ClosabilityCertificate none = transversal_counterexample(catalog_measure("lebesgue-square"));
  CHECK(verify_certificate(none, catalog_measure("lebesgue-square"), Resolution{}).pass);
}
