#include "oracles.hpp"

#include "wsob/energy.hpp"

#include <doctest.h>

using namespace wsob;
using oracle::vec;

namespace {

const NormPlugin kL2 = NormPlugin::parse("2");
const NormPlugin kLinf = NormPlugin::parse("inf");

}  // namespace

TEST_CASE("E_lip examples") {
  const Discretization seg(catalog_measure("segment"));
  CHECK(std::abs(energy_lip(catalog_field("x", 2), seg, kL2).value - 0.5) <= 1e-9);
  CHECK(energy_lip(catalog_field("zero", 2), seg, kL2).value == 0.0);
  const Discretization sq(catalog_measure("lebesgue-square"));
  CHECK(std::abs(energy_lip(catalog_field("x+y", 2), sq, kLinf).value - 2.0) <= 1e-9);
}

TEST_CASE("E_AM examples") {
  const Discretization seg(catalog_measure("segment"));
  CHECK(energy_am(catalog_field("y", 2), seg).value == 0.0);
  CHECK(std::abs(energy_am(catalog_field("x", 2), seg).value - 0.5) <= 1e-9);
  const Discretization fat(catalog_measure("cantor-fat"));
  const double mass12 = 0.5 + std::pow(2.0, -13);
  CHECK(std::abs(energy_am(catalog_field("x", 1), fat).value - 0.5 * mass12) <= 1e-12);
  Resolution deep;
  deep.cantor_depth = 20;
  const double e20 = energy_am(catalog_field("x", 1), Discretization(catalog_measure("cantor-fat"), deep)).value;
  CHECK(std::abs(e20 - 0.25) <= 1e-6);
}

TEST_CASE("non compactly supported fields are refused") {
  const Discretization seg(catalog_measure("segment"));
  CHECK_THROWS_WITH_AS(energy_am(coordinate(2, 0), seg), doctest::Contains("LIP_c"), InvalidInput);
  CHECK_THROWS_AS(EnergySpec::parse("am", "inf"), InvalidInput);
}

TEST_CASE("am_gradient_field linearity and domination") {
  for (const auto& name : catalog_measure_names()) {
    const Discretization disc(catalog_measure(name));
    auto rng = task_rng(7, 0);
    const ScalarField f = random_catalog_field(disc.dim(), rng), g = random_catalog_field(disc.dim(), rng);
    const Matrix gf = am_gradient_field(f, disc), gg = am_gradient_field(g, disc);
    CHECK((am_gradient_field(f + g, disc) - (gf + gg)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((am_gradient_field(f - g, disc) - (gf - gg)).cwiseAbs().maxCoeff() <= 1e-12);
    for (Index i = 0; i < disc.size(); ++i) {
      CHECK(gf.col(i).norm() <= lip(f, disc.rule().node(i), kL2) + 1e-12);
    }
    CHECK(am_gradient_field(catalog_field("zero", disc.dim()), disc).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("parallelogram defect examples") {
  for (const auto& name : catalog_measure_names()) {
    const Discretization disc(catalog_measure(name));
    const Index d = disc.dim();
    const ScalarField f = catalog_field("x", d), g = catalog_field(d > 1 ? "y" : "gaussian", d);
    const DefectReport r = parallelogram_defect(EnergySpec{}, f, g, disc);
    CHECK(std::abs(r.defect) <= 1e-10);
  }
  const Discretization sq(catalog_measure("lebesgue-square"));
  const ScalarField x = catalog_field("x", 2), y = catalog_field("y", 2);
  CHECK(std::abs(parallelogram_defect(EnergySpec::parse("lip", "2"), x, y, sq).defect) <= 1e-9);
  const DefectReport inf = parallelogram_defect(EnergySpec::parse("lip", "inf"), x, y, sq);
  CHECK(std::abs(inf.defect - 2.0) <= 1e-9);
  CHECK(std::abs(inf.relative - 1.0) <= 1e-9);
  const DefectReport zero = parallelogram_defect(EnergySpec{}, catalog_field("zero", 2), catalog_field("zero", 2), sq);
  CHECK(zero.relative == 0.0);
}

TEST_CASE("Sobolev norm") {
  const Discretization seg(catalog_measure("segment"), Resolution{}.scaled(8));
  CHECK(sobolev_norm(catalog_field("zero", 2), seg).value == 0.0);
  const ScalarField x = catalog_field("x", 2);
  CHECK(std::abs(sobolev_norm(x, seg).value - std::sqrt(4.0 / 3.0)) <= 1e-6);
  CHECK(std::abs(sobolev_norm(scale(-3.0, x), seg).value - 3.0 * sobolev_norm(x, seg).value) <= 1e-12);
  CHECK(sobolev_norm(x, seg).upper_bound_surrogate);
}

TEST_CASE("E_AM <= E_lip(2) on every catalog measure and field") {
  for (const auto& name : catalog_measure_names()) {
    const Discretization disc(catalog_measure(name));
    for (const auto& f : oracle::curated_fields(disc.dim(), 3)) {
      CHECK(energy_am(f, disc).value <= energy_lip(f, disc, kL2).value + 1e-10);
    }
  }
}

TEST_CASE("mass linearity") {
  for (const auto& name : catalog_measure_names()) {
    const Measure m = catalog_measure(name);
    const Discretization a(m), b(m.scaled(4.0));
    for (const auto& f : oracle::curated_fields(m.dim(), 1)) {
      CHECK(energy_am(f, b).value == 4.0 * energy_am(f, a).value);
      CHECK(energy_lip(f, b, kLinf).value == 4.0 * energy_lip(f, a, kLinf).value);
    }
  }
}

TEST_CASE("energy reports") {
  const Discretization seg(catalog_measure("segment"));
  const EnergyReport r = energy(EnergySpec::parse("lip", "inf"), catalog_field("x", 2), seg);
  CHECK(r.spec.label() == "E_lip(inf)");
  CHECK(r.csv_row().size() == EnergyReport::csv_header().size());
  CHECK(r.to_json().at("resolution").at("patch_nodes") == 256);
}
