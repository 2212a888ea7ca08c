#include "oracles.hpp"

#include "wsob/relax.hpp"

#include <doctest.h>

using namespace wsob;
using oracle::vec;

TEST_CASE("plateau stages have zero Lipschitz energy on the fat Cantor set") {
  const Discretization fat(catalog_measure("cantor-fat"));
  const ScalarField f = catalog_field("x", 1);
  const ScalarField f3 = plateau_sequence(f, fat, 0, 3);
  CHECK(energy_lip(f3, fat).value == 0.0);
  for (Index i = 0; i < fat.size(); ++i) CHECK(f3.gradient(fat.rule().node(i)).norm() == 0.0);
  for (int k = 0; k < 50; ++k) {
    const auto c = oracle::fd_check(f3, vec({-0.2 + 1.4 * k / 50.0 + 1e-3}));
    CHECK(c.pass);
  }
}

TEST_CASE("plateau L2 error is bounded by half the stage width") {
  const Measure m = catalog_measure("cantor-fat");
  const Discretization fat(m);
  const auto& set = std::get<CantorSet>(m.component(0).shape);
  const double mass = fat.rule().mass();
  const ScalarField f = catalog_field("x", 1);
  for (int n = 1; n <= 12; ++n) {
    double width = 0.0;
    for (const auto& iv : set.stage(n)) width = std::max(width, iv.width());
    const ScalarField fn = plateau_sequence(f, fat, 0, n);
    double sup = 0.0;
    for (Index i = 0; i < fat.size(); ++i) {
      const Vector x = fat.rule().node(i);
      sup = std::max(sup, std::abs(fn.value(x) - f.value(x)));
    }
    CHECK(sup <= 0.5 * width + 1e-15);
    CHECK(l2_norm(fat.rule(), fn - f) <= 0.5 * width * std::sqrt(mass) + 1e-15);
  }
}

TEST_CASE("plateau of a constant is the constant on the set") {
  const Discretization fat(catalog_measure("cantor-fat"));
  const ScalarField c = scale(1.5, catalog_field("one", 1));
  for (int n : {1, 4, 9}) {
    const ScalarField cn = plateau_sequence(c, fat, 0, n);
    for (Index i = 0; i < fat.size(); i += 7) CHECK(cn.value(fat.rule().node(i)) == 1.5);
    for (double x : {0.0, 0.3, 0.5, 0.77, 1.0}) CHECK(cn.value(vec({x})) == 1.5);
  }
}

TEST_CASE("plateau in the plane carries a transverse cutoff") {
  const Discretization c(catalog_measure("cantor-classic"));
  const ScalarField f = catalog_field("x+y", 2);
  const ScalarField fn = plateau_sequence(f, c, 0, 5);
  CHECK(fn.compactly_supported());
  CHECK(energy_lip(fn, c).value == 0.0);
  CHECK(fn.value(vec({0.5, 5.0})) == 0.0);
}

TEST_CASE("Cheeger interval examples") {
  for (int depth : {4, 8, 12}) {
    Resolution r;
    r.cantor_depth = depth;
    const Discretization fat(catalog_measure("cantor-fat"), r);
    const CheegerInterval ci = assemble_cheeger_interval(catalog_field("x", 1), fat, {}, default_constructors(fat.measure()));
    CHECK(ci.lower == 0.0);
    CHECK(ci.upper == 0.0);
    if (depth >= 8) CHECK(ci.energy_am >= 0.2);
  }
  const Discretization seg(catalog_measure("segment"));
  const CheegerInterval s = assemble_cheeger_interval(catalog_field("x", 2), seg, {sliding_segment_ensemble()}, {"trivial"});
  CHECK(std::abs(s.lower - 0.25) <= 1e-12);
  CHECK(std::abs(s.upper - 0.5) <= 1e-12);
  const CheegerInterval k = assemble_cheeger_interval(catalog_field("zero", 2), seg, {sliding_segment_ensemble()}, {"trivial"});
  CHECK(k.lower == 0.0);
  CHECK(k.upper == 0.0);
}

TEST_CASE("trivial constructor is optimal for Lebesgue") {
  const Discretization sq(catalog_measure("lebesgue-square"));
  for (const auto& f : oracle::curated_fields(2, 2)) {
    const CheegerInterval ci = assemble_cheeger_interval(f, sq, {sliding_square_ensemble()}, default_constructors(sq.measure()));
    CHECK(ci.upper == ci.energy_am);
    CHECK(std::abs(ci.energy_am - ci.energy_lip2) <= 1e-12 * (1 + ci.energy_lip2));
  }
}

TEST_CASE("sandwich order on every catalog measure and field") {
  for (const auto& name : catalog_measure_names()) {
    const Discretization disc(catalog_measure(name));
    std::vector<CurveEnsemble> ensembles;
    if (name == "segment") ensembles.push_back(sliding_segment_ensemble());
    if (name == "lebesgue-square") ensembles.push_back(sliding_square_ensemble());
    if (name == "arc") ensembles.push_back(patch_sliding_ensemble(std::get<Patch>(disc.measure().component(0).shape)));
    for (const auto& f : oracle::curated_fields(disc.dim(), 2)) {
      const CheegerInterval ci = assemble_cheeger_interval(f, disc, ensembles, default_constructors(disc.measure()));
      INFO(name, " ", f.label());
      CHECK(ci.lower <= ci.upper + 1e-10);
      CHECK(ci.upper <= ci.energy_am + 1e-10);
      CHECK(ci.energy_am <= ci.energy_lip2 + 1e-10);
    }
  }
}

TEST_CASE("monotonicity in ensembles and constructors") {
  const Discretization seg(catalog_measure("segment"));
  const ScalarField f = catalog_field("x+y", 2);
  const double without = assemble_cheeger_interval(f, seg, {}, {"trivial"}).lower;
  const double with = assemble_cheeger_interval(f, seg, {sliding_segment_ensemble()}, {"trivial"}).lower;
  CHECK(with >= without);
  const Discretization fat(catalog_measure("cantor-fat"));
  const ScalarField g = catalog_field("gaussian", 1);
  const double one = assemble_cheeger_interval(g, fat, {}, {"trivial"}).upper;
  const double two = assemble_cheeger_interval(g, fat, {}, {"trivial", "plateau"}).upper;
  CHECK(two <= one);
}

TEST_CASE("relaxation certificates serialize their stages") {
  const Discretization fat(catalog_measure("cantor-fat"));
  const RelaxationCertificate c = plateau_constructor(catalog_field("x", 1), fat);
  CHECK(c.stages.size() == 12);
  CHECK(c.upper == 0.0);
  CHECK(c.table().rows.size() == 12);
  CHECK(c.to_json().at("stages").size() == 12);
  CHECK_THROWS_AS(plateau_constructor(catalog_field("x", 2), Discretization(catalog_measure("segment"))), InvalidInput);
}
