#include "oracles.hpp"

#include <doctest.h>

#include <numbers>

using namespace wsob;
using oracle::vec;

namespace {

Measure fat_cantor(int depth = 12) {
  CantorSet s;
  s.variant = CantorSet::Variant::fat;
  s.origin = vec({0});
  s.depth_default = depth;
  Measure m(1, "fat");
  m.add(1.0, s);
  return m;
}

Measure classic_cantor() {
  CantorSet s;
  s.origin = vec({0});
  Measure m(1, "classic");
  m.add(1.0, s);
  return m;
}

}  // namespace

TEST_CASE("unit segment rule") {
  Resolution r;
  r.patch_nodes = 100;
  const QuadratureRule q = quadrature(catalog_measure("segment"), r);
  CHECK(q.size() == 100);
  for (Index i = 0; i < q.size(); ++i) CHECK(std::abs(q.weights[i] - 0.01) <= 1e-15);
  CHECK(std::abs(q.mass() - 1.0) <= 1e-12);
  CHECK(std::abs(integrate(q, coordinate(2, 0)) - 0.5) <= 1e-9);
  CHECK(std::abs(l2_norm(q, coordinate(2, 0)) - std::sqrt(1.0 / 3.0)) <= 1e-4);
  CHECK(l2_norm(q, constant(2, 0.0)) == 0.0);
}

TEST_CASE("l2 norm of x on the segment at default resolution") {
  const QuadratureRule q = quadrature(catalog_measure("segment"), Resolution{}.scaled(8));
  CHECK(std::abs(l2_norm(q, coordinate(2, 0)) - std::sqrt(1.0 / 3.0)) <= 1e-6);
  CHECK(std::abs(l2_norm(q, constant(2, 1.0)) - 1.0) <= 1e-12);
}

TEST_CASE("first moment of Lebesgue on [0,1]") {
  Measure m(1, "unit");
  m.add(1.0, LebesgueBox{Box::cube(1, 0.0, 1.0), std::nullopt});
  Resolution r;
  r.lebesgue_cells = 1000;
  const QuadratureRule q = quadrature(m, r);
  CHECK(std::abs(integrate(q, coordinate(1, 0)) - 0.5) <= 1e-6);
  CHECK(std::abs(integrate(q, constant(1, 1.0)) - 1.0) <= 1e-12);
}

TEST_CASE("fat Cantor mass follows the removal schedule") {
  for (int depth : {0, 1, 2, 5, 10, 12, 16}) {
    const auto oracle_intervals = oracle::fat_cantor_intervals(0.0, 1.0, 4.0, depth);
    double len = 0.0;
    for (auto [lo, hi] : oracle_intervals) len += hi - lo;
    Resolution r;
    r.cantor_depth = depth;
    const QuadratureRule q = quadrature(fat_cantor(), r);
    CHECK(q.size() == Index(oracle_intervals.size()));
    CHECK(std::abs(q.mass() - len) <= 1e-12);
    CHECK(std::abs(q.mass() - (0.5 + std::pow(2.0, -depth - 1))) <= 1e-12);
  }
}

TEST_CASE("Cantor exactness at every depth") {
  for (int depth = 0; depth <= 14; ++depth) {
    Resolution r;
    r.cantor_depth = depth;
    for (const Measure& m : {fat_cantor(), classic_cantor(), catalog_measure("cantor-classic")}) {
      const auto* set = std::get_if<CantorSet>(&m.component(0).shape);
      REQUIRE(set != nullptr);
      CHECK(std::abs(quadrature(m, r).mass() - set->stage_mass(depth)) <= 1e-12);
    }
  }
}

TEST_CASE("x^2 over the fat Cantor set matches the interval-sum oracle") {
  const QuadratureRule q = quadrature(fat_cantor(), Resolution{});
  const auto s = oracle::x_squared_over(oracle::fat_cantor_intervals(0.0, 1.0, 4.0, 12));
  const double value = integrate(q, polynomial(1, {{1.0, {2}}}));
  CHECK(std::abs(value - s.exact) <= 1e-9);
  CHECK(value >= s.lower - 1e-12);
  CHECK(value <= s.upper + 1e-12);
}

TEST_CASE("second moment of the middle-thirds measure") {
  // X = sum_k 2 b_k 3^-k with fair bits: mean 1/2, variance sum 9^-k = 1/8.
  const QuadratureRule q = quadrature(classic_cantor(), Resolution{});
  CHECK(std::abs(integrate(q, polynomial(1, {{1.0, {2}}})) - 3.0 / 8.0) <= 1e-9);
  CHECK(std::abs(integrate(q, coordinate(1, 0)) - 0.5) <= 1e-12);
}

TEST_CASE("refinement stability on Lebesgue and patch components") {
  auto rng = task_rng(41, 0);
  for (const char* name : {"lebesgue-square", "segment", "arc", "graph", "plane-r3"}) {
    const Measure m = catalog_measure(name);
    for (int k = 0; k < 3; ++k) {
      const ScalarField g = random_catalog_field(m.dim(), rng);
      Resolution r;
      r.lebesgue_cells = 8;
      r.patch_nodes = 16;
      const double i1 = integrate(quadrature(m, r), g);
      const double i2 = integrate(quadrature(m, r.refined()), g);
      const double i3 = integrate(quadrature(m, r.refined().refined()), g);
      INFO(name, ": ", i1, " ", i2, " ", i3);
      CHECK(std::abs(i3 - i2) <= 0.55 * std::abs(i2 - i1) + 1e-12);
    }
  }
}

TEST_CASE("mixture mass is additive") {
  for (const char* name : {"mixture-disjoint", "mixture-overlap"}) {
    const Measure m = catalog_measure(name);
    double sum = 0.0;
    for (std::size_t c = 0; c < m.components().size(); ++c) {
      Measure single(m.dim());
      single.add(m.component(c).weight, m.component(c).shape);
      sum += quadrature(single, Resolution{}).mass();
    }
    CHECK(quadrature(m, Resolution{}).mass() == doctest::Approx(sum).epsilon(1e-15));
    const auto closed = m.closed_form_mass(Resolution{});
    REQUIRE(closed.has_value());
    CHECK(std::abs(*closed - sum) <= 1e-12);
  }
}

TEST_CASE("closed-form masses of catalog measures") {
  CHECK(*catalog_measure("arc").closed_form_mass(Resolution{}) == doctest::Approx(std::numbers::pi / 2));
  CHECK(std::abs(quadrature(catalog_measure("arc"), Resolution{}).mass() - std::numbers::pi / 2) <= 1e-12);
  CHECK(*catalog_measure("atoms").closed_form_mass(Resolution{}) == doctest::Approx(1.0));
  CHECK(*catalog_measure("cantor-fat").closed_form_mass(Resolution{}) == doctest::Approx(0.5 + std::pow(2.0, -13)));
}

TEST_CASE("weights scale with the measure") {
  const Measure m = catalog_measure("mixture-disjoint");
  const QuadratureRule a = quadrature(m, Resolution{});
  const QuadratureRule b = quadrature(m.scaled(3.0), Resolution{});
  CHECK((b.weights - 3.0 * a.weights).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("degenerate inputs are rejected") {
  Measure m(2);
  CHECK_THROWS_AS(m.add(1.0, Patch::segment(vec({0, 0}), vec({0, 0}))), InvalidInput);
  CHECK_THROWS_AS(m.add(-1.0, Atoms{{{vec({0, 0}), 1.0}}}), InvalidInput);
  CHECK_THROWS_AS(m.add(1.0, Atoms{{{vec({0, 0, 0}), 1.0}}}), InvalidInput);
  CHECK_THROWS_AS(Measure(2).validate(), InvalidInput);
  CHECK_THROWS_AS(quadrature(Measure(2), Resolution{}), InvalidInput);
  CantorSet bad;
  bad.origin = vec({0});
  bad.ratio = 0.6;
  Measure c(1);
  CHECK_THROWS_AS(c.add(1.0, bad), InvalidInput);
}

TEST_CASE("measure JSON round trip") {
  for (const auto& name : catalog_measure_names()) {
    const Measure m = catalog_measure(name);
    const Measure back = parse_measure(measure_to_json(m));
    const QuadratureRule a = quadrature(m, Resolution{});
    const QuadratureRule b = quadrature(back, Resolution{});
    REQUIRE(a.size() == b.size());
    CHECK((a.nodes - b.nodes).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((a.weights - b.weights).cwiseAbs().maxCoeff() <= 1e-15);
  }
  CHECK_THROWS_AS(parse_measure(nlohmann::json::parse(R"({"dim": 2, "components": [{"type": "blob"}]})")),
                  InvalidInput);
}

TEST_CASE("resolution parameters") {
  Resolution r;
  const Resolution f = r.refined();
  CHECK(f.lebesgue_cells == 128);
  CHECK(f.patch_nodes == 512);
  CHECK(f.cantor_depth_offset == 1);
  CHECK(f.cantor_depth_for(0, CantorSet{}) == 13);
  const Resolution back = Resolution::from_json(f.to_json());
  CHECK(back.to_json() == f.to_json());
  CHECK_THROWS_AS(Resolution::from_json(nlohmann::json{{"lebesgue_cells", 0}}), InvalidInput);
  CHECK_THROWS_AS(Resolution::from_json(nlohmann::json{{"cells", 3}}), InvalidInput);
}

TEST_CASE("membership oracles") {
  const Measure m = catalog_measure("cantor-fat");
  const auto& s = std::get<CantorSet>(m.component(0).shape);
  const auto st = s.stage(3);
  CHECK(s.contains(vec({0.01}), st, 0.0));
  CHECK_FALSE(s.contains(vec({0.5}), st, 0.0));
  const Patch arc = std::get<Patch>(catalog_measure("arc").component(0).shape);
  CHECK(arc.contains(vec({std::sqrt(0.5), std::sqrt(0.5)}), 1e-12));
  CHECK_FALSE(arc.contains(vec({0.5, 0.5}), 1e-3));
  CHECK(arc.distance(vec({-1, 0})) == doctest::Approx(std::sqrt(2.0)));
}
