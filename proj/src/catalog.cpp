#include "wsob/catalog.hpp"

#include <cmath>
#include <numbers>

namespace wsob {

using nlohmann::json;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(Index(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

std::vector<std::string> catalog_measure_names() {
  return {"lebesgue-square", "segment",          "arc",           "cantor-classic", "cantor-fat",
          "atoms",           "mixture-disjoint", "mixture-overlap", "graph",        "plane-r3"};
}

Measure catalog_measure(const std::string& name) {
  if (name == "lebesgue-square") {
    Measure m(2, name);
    m.add(1.0, LebesgueBox{Box::cube(2, 0.0, 1.0), std::nullopt}, "square");
    return m;
  }
  if (name == "segment") {
    Measure m(2, name);
    m.add(1.0, Patch::segment(vec({0, 0}), vec({1, 0})), "segment");
    return m;
  }
  if (name == "arc") {
    Measure m(2, name);
    m.add(1.0, Patch::arc(vec({0, 0}), 1.0, 0.0, std::numbers::pi / 2, vec({1, 0}), vec({0, 1})), "quarter-arc");
    return m;
  }
  if (name == "cantor-classic") {
    CantorSet s;
    s.variant = CantorSet::Variant::classic;
    s.ambient_dim = 2;
    s.axis = 0;
    s.origin = vec({0, 0});
    s.depth_default = 12;
    Measure m(2, name);
    m.add(1.0, s, "middle-thirds");
    return m;
  }
  if (name == "cantor-fat") {
    CantorSet s;
    s.variant = CantorSet::Variant::fat;
    s.ambient_dim = 1;
    s.axis = 0;
    s.origin = vec({0});
    s.removal_base = 4.0;
    s.depth_default = 12;
    Measure m(1, name);
    m.add(1.0, s, "fat-cantor");
    return m;
  }
  if (name == "atoms") {
    Measure m(2, name);
    m.add(1.0, Atoms{{{vec({0.25, 0.25}), 0.5}, {vec({0.75, 0.5}), 0.3}, {vec({0.5, 0.9}), 0.2}}}, "three-atoms");
    return m;
  }
  if (name == "mixture-disjoint") {
    Measure m(2, name);
    m.add(1.0, LebesgueBox{Box(vec({0, 0}), vec({0.4, 1})), std::nullopt}, "strip");
    m.add(0.5, Patch::segment(vec({0.6, 0.5}), vec({1, 0.5})), "segment");
    m.add(1.0, Atoms{{{vec({0.8, 0.9}), 0.25}}}, "atom");
    return m;
  }
  if (name == "mixture-overlap") {
    Measure m(2, name);
    m.add(1.0, LebesgueBox{Box::cube(2, 0.0, 1.0), std::nullopt}, "square");
    m.add(0.5, Patch::segment(vec({0, 0.5}), vec({1, 0.5})), "midline");
    return m;
  }
  if (name == "graph") {
    Measure m(2, name);
    const ScalarField h = polynomial(1, {{0.3, {0}}, {0.2, {2}}});
    m.add(1.0, Patch::graph(Box::cube(1, 0.0, 1.0), h, 2), "parabola");
    return m;
  }
  if (name == "plane-r3") {
    Measure m(3, name);
    Matrix dirs = Matrix::Zero(3, 2);
    dirs(0, 0) = 1.0;
    dirs(1, 1) = 1.0;
    m.add(1.0, Patch::affine(vec({0, 0, 0.5}), dirs), "plane");
    return m;
  }
  throw InvalidInput("unknown catalog measure '" + name + "'");
}

Measure resolve_measure(const json& ref) {
  if (ref.is_string()) return catalog_measure(ref.get<std::string>());
  return parse_measure(ref);
}

std::vector<std::string> catalog_field_names() {
  return {"x", "y", "z", "x+y", "x*y", "gaussian", "tent", "zero", "one"};
}

ScalarField catalog_field(const std::string& name, Index dim) {
  const ScalarField chi = unit_cutoff(dim);
  auto axis = [&](Index a) {
    if (a >= dim) throw InvalidInput("catalog field '" + name + "' needs dimension > " + std::to_string(a));
    return coordinate(dim, a);
  };
  ScalarField f = [&]() -> ScalarField {
    if (name == "x") return axis(0) * chi;
    if (name == "y") return axis(1) * chi;
    if (name == "z") return axis(2) * chi;
    if (name == "x+y") return (axis(0) + axis(1)) * chi;
    if (name == "x*y") return (axis(0) * axis(1)) * chi;
    if (name == "gaussian") return gaussian(Vector::Constant(dim, 0.5), 0.3, 1.0) * chi;
    if (name == "tent") return tent(Vector::Constant(dim, 0.5), 0.75);
    if (name == "zero") return constant(dim, 0.0);
    if (name == "one") return chi;
    throw InvalidInput("unknown catalog field '" + name + "'");
  }();
  const std::string label = name == "zero" || name == "one" ? name : name == "tent" ? name : name + "*chi";
  return f.named(label);
}

ScalarField resolve_field(const json& ref, Index dim) {
  if (ref.is_string()) return catalog_field(ref.get<std::string>(), dim);
  return parse_field(ref, dim);
}

double uniform01(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

ScalarField random_catalog_field(Index dim, std::mt19937_64& rng) {
  auto u = [&](double lo, double hi) { return lo + (hi - lo) * uniform01(rng); };
  Vector slope(dim);
  for (Index i = 0; i < dim; ++i) slope[i] = u(-2.0, 2.0);
  ScalarField f = linear(slope, u(-1.0, 1.0));
  std::vector<Monomial> terms;
  for (Index i = 0; i < dim; ++i) {
    for (Index j = i; j < dim; ++j) {
      std::vector<int> e(std::size_t(dim), 0);
      e[std::size_t(i)] += 1;
      e[std::size_t(j)] += 1;
      terms.push_back({u(-1.0, 1.0), e});
    }
  }
  f = f + polynomial(dim, std::move(terms));
  Vector center(dim);
  for (Index i = 0; i < dim; ++i) center[i] = u(0.0, 1.0);
  const double sigma = u(0.2, 0.5);
  f = f + gaussian(center, sigma, u(-1.0, 1.0));
  return f * unit_cutoff(dim);
}

std::mt19937_64 task_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(index), std::uint32_t(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace wsob
