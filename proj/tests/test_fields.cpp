#include "oracles.hpp"

#include <doctest.h>

using namespace wsob;
using oracle::vec;

TEST_CASE("combinator examples") {
  const ScalarField x = coordinate(2, 0), y = coordinate(2, 1);
  CHECK(((x + y).gradient(vec({0.3, -2})) - vec({1, 1})).norm() == 0.0);
  CHECK((scale(2.0, x).gradient(vec({5, 1})) - vec({2, 0})).norm() == 0.0);
  CHECK(((x * y).gradient(vec({2, 3})) - vec({3, 2})).norm() == 0.0);
  CHECK((x - y).value(vec({2, 3})) == -1.0);
  CHECK_THROWS_AS(x + coordinate(3, 0), InvalidInput);
}

TEST_CASE("bump cutoff") {
  const ScalarField b = bump_cutoff(Box::cube(2, 0.0, 1.0), Box::cube(2, -1.0, 2.0));
  CHECK(b.value(vec({0.5, 0.2})) == 1.0);
  CHECK(b.gradient(vec({0.5, 0.2})).norm() == 0.0);
  CHECK(b.value(vec({2.5, 0.2})) == 0.0);
  CHECK(b.gradient(vec({2.5, 0.2})).norm() == 0.0);
  CHECK(std::abs(b.value(vec({1.5, 0.5})) - 0.5) <= 1e-12);
  CHECK(std::abs(b.value(vec({-0.5, 0.5})) - 0.5) <= 1e-12);
  CHECK(b.compactly_supported());
  CHECK_THROWS_AS(bump_cutoff(Box::cube(2, 0.0, 1.0), Box::cube(2, 0.0, 2.0)), InvalidInput);
}

TEST_CASE("smoothstep profile") {
  CHECK(smoothstep(0.0) == 0.0);
  CHECK(smoothstep(1.0) == 1.0);
  CHECK(smoothstep(0.5) == 0.5);
  double slope = 0.0;
  for (int i = 0; i <= 10000; ++i) slope = std::max(slope, smoothstep_derivative(i / 10000.0));
  CHECK(slope == doctest::Approx(kSmoothstepMaxSlope).epsilon(1e-12));
}

TEST_CASE("lip examples") {
  const ScalarField f = coordinate(2, 0) + coordinate(2, 1);
  const Vector p = vec({0.2, 0.7});
  CHECK(std::abs(lip(f, p, NormPlugin::parse("2")) - std::sqrt(2.0)) <= 1e-15);
  CHECK(lip(f, p, NormPlugin::parse("inf")) == 2.0);
  CHECK(lip(f, p, NormPlugin::parse("1")) == 1.0);
  for (const char* q : {"1", "2", "inf"}) CHECK(lip(constant(2, 3.0), p, NormPlugin::parse(q)) == 0.0);
  CHECK_THROWS_AS(NormPlugin::parse("3"), InvalidInput);
}

TEST_CASE("lip is 1-homogeneous and subadditive") {
  auto rng = task_rng(3, 0);
  for (int i = 0; i < 20; ++i) {
    const ScalarField f = random_catalog_field(2, rng), g = random_catalog_field(2, rng);
    const Vector x = vec({uniform01(rng) * 2 - 0.5, uniform01(rng) * 2 - 0.5});
    for (const char* q : {"1", "2", "inf"}) {
      const NormPlugin n = NormPlugin::parse(q);
      CHECK(std::abs(lip(scale(-2.5, f), x, n) - 2.5 * lip(f, x, n)) <= 1e-12 * (1 + lip(f, x, n)));
      CHECK(lip(f + g, x, n) <= lip(f, x, n) + lip(g, x, n) + 1e-12);
    }
  }
}

TEST_CASE("analytic gradients pass finite-difference validation") {
  for (Index d = 1; d <= 3; ++d) {
    auto rng = task_rng(17, std::uint64_t(d));
    auto fields = oracle::curated_fields(d, 5);
    fields.push_back(bump_cutoff(Box::cube(d, 0.0, 1.0), Box::cube(d, -0.5, 1.5)));
    fields.push_back(tent(Vector::Constant(d, 0.2), 0.9));
    for (const auto& f : fields) {
      for (int k = 0; k < 25; ++k) {
        Vector x(d);
        for (Index i = 0; i < d; ++i) x[i] = -0.7 + 2.4 * uniform01(rng);
        const auto c = oracle::fd_check(f, x);
        INFO(f.label(), " at ", x.transpose(), ": ", c.err_coarse, " -> ", c.err_fine);
        CHECK(c.pass);
      }
    }
  }
}

TEST_CASE("dual-norm lip matches the net-sampled slope oracle") {
  auto rng = task_rng(23, 0);
  for (Index d = 1; d <= 3; ++d) {
    const int m = d == 1 ? 1 : d == 2 ? 64 : 12;
    for (const auto& f : oracle::curated_fields(d, 3)) {
      for (int k = 0; k < 4; ++k) {
        Vector x(d);
        for (Index i = 0; i < d; ++i) x[i] = 0.05 + 0.9 * uniform01(rng);
        for (const char* q : {"1", "2", "inf"}) {
          const NormPlugin n = NormPlugin::parse(q);
          const double exact = lip(f, x, n);
          const double net = oracle::slope_oracle(f, x, n, 1e-4, m);
          INFO(f.label(), " p=", q, " exact ", exact, " net ", net);
          CHECK(std::abs(net - exact) <= 0.05 * exact + 1e-6);
        }
      }
    }
  }
}

TEST_CASE("global Lipschitz bounds dominate sampled gradients") {
  auto rng = task_rng(29, 0);
  for (const auto& f : oracle::curated_fields(2, 5)) {
    const double L = f.lipschitz();
    for (int k = 0; k < 200; ++k) {
      const Vector x = vec({-1 + 3 * uniform01(rng), -1 + 3 * uniform01(rng)});
      CHECK(f.gradient(x).norm() <= L * (1 + 1e-12));
    }
  }
}

TEST_CASE("field JSON round trip") {
  const nlohmann::json j = nlohmann::json::parse(R"({
    "type": "add", "name": "combo", "args": [
      {"type": "mul", "args": [{"type": "coordinate", "index": 0}, {"type": "cutoff"}]},
      {"type": "scale", "factor": -2, "arg": {"type": "gaussian", "center": [0.5, 0.5], "sigma": 0.3, "amplitude": 1}},
      {"type": "polynomial", "terms": [{"coefficient": 1.5, "exponents": [1, 2]}]},
      {"type": "tent", "center": [0.5, 0.5], "radius": 0.5},
      {"type": "linear", "slope": [1, -1], "offset": 0.25}
    ]})");
  const ScalarField f = parse_field(j, 2);
  CHECK(f.label() == "combo");
  const ScalarField g = parse_field(f.descriptor(), 2);
  for (const Vector& x : {vec({0.1, 0.2}), vec({0.7, 0.4}), vec({1.2, -0.3})}) {
    CHECK(f.value(x) == g.value(x));
    CHECK((f.gradient(x) - g.gradient(x)).norm() == 0.0);
  }
  CHECK_THROWS_AS(parse_field(nlohmann::json{{"type", "coordinate"}, {"index", 0}, {"bogus", 1}}, 2), InvalidInput);
  CHECK_THROWS_AS(parse_field(nlohmann::json{{"type", "coordinate"}, {"index", 4}}, 2), InvalidInput);
  CHECK_THROWS_AS(parse_field(nlohmann::json{{"type", "wavelet"}}, 2), InvalidInput);
}

TEST_CASE("support declarations") {
  CHECK(catalog_field("x", 2).compactly_supported());
  CHECK_FALSE(coordinate(2, 0).compactly_supported());
  const ScalarField p = coordinate(2, 0) * unit_cutoff(2);
  CHECK(p.value(vec({3, 0.5})) == 0.0);
}
