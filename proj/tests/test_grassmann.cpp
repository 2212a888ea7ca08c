#include "oracles.hpp"

#include "wsob/grassmann.hpp"

#include <doctest.h>

#include <random>

using namespace wsob;
using oracle::vec;

namespace {

SubspaceD line(double a, double b) { return SubspaceD::spanned_by(vec({a, b})); }

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> n;
  Eigen::MatrixXd m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = n(rng);
  return m;
}

}  // namespace

TEST_CASE("spanned_by yields an orthonormal basis and drops dependent columns") {
  Eigen::MatrixXd m(3, 3);
  m << 1, 2, 0,
       0, 0, 1,
       0, 0, 0;
  const SubspaceD s = SubspaceD::spanned_by(m);
  CHECK(s.dim() == 2);
  CHECK(s.orthonormality_defect() <= 1e-12);
  for (Index j = 0; j < s.dim(); ++j) CHECK(std::abs(s.basis().col(j).norm() - 1.0) <= 1e-12);
  CHECK(SubspaceD::spanned_by(Eigen::MatrixXd::Zero(3, 2)).is_zero());
  CHECK(SubspaceD::full(4).is_full());
}

TEST_CASE("project examples") {
  CHECK((project(line(1, 0), vec({3, 4})) - vec({3, 0})).norm() <= 1e-15);
  CHECK((project(SubspaceD::zero(2), vec({3, 4}))).norm() == 0.0);
  CHECK((project(line(1, 1), vec({1, 0})) - vec({0.5, 0.5})).norm() <= 1e-15);
  CHECK_THROWS_AS(project(line(1, 0), vec({1, 2, 3})), std::invalid_argument);
}

TEST_CASE("project is idempotent, linear and non-expansive") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const Index d = 1 + trial % 5;
    const Index k = trial % (d + 1);
    const SubspaceD s = SubspaceD::spanned_by(random_matrix(rng, d, k));
    const Vector a = random_matrix(rng, d, 1), b = random_matrix(rng, d, 1);
    const double x = u(rng), y = u(rng);
    const Vector pa = project(s, a);
    CHECK((project(s, pa) - pa).norm() <= 1e-12);
    CHECK((project(s, Vector(x * a + y * b)) - (x * pa + y * project(s, b))).norm() <= 1e-12);
    CHECK(pa.norm() <= a.norm() + 1e-12);
  }
}

TEST_CASE("grassmann distance examples") {
  CHECK(grassmann_distance(line(1, 0), line(1, 0)).value == 0.0);
  CHECK(std::abs(grassmann_distance(line(1, 0), line(0, 1)).value - 1.0) <= 1e-15);
  const auto gap = grassmann_distance(line(1, 0), SubspaceD::full(2));
  CHECK(gap.method == DistanceMethod::dimension_gap);
  const double net = oracle::net_hausdorff(line(1, 0), SubspaceD::full(2), 1e-2);
  CHECK(std::abs(gap.value - net) <= 2e-2);
}

TEST_CASE("grassmann distance agrees with the net-sampled Hausdorff oracle") {
  for (double angle : {0.0, 0.1, 0.4, 0.9, 1.3, 1.5707963267948966}) {
    const SubspaceD v = line(1, 0), w = line(std::cos(angle), std::sin(angle));
    const double exact = grassmann_distance(v, w).value;
    CHECK(std::abs(exact - std::sin(angle)) <= 1e-12);
    CHECK(std::abs(exact - oracle::net_hausdorff(v, w, 1e-2)) <= 2e-2);
    CHECK(std::abs(exact - grassmann_distance(w, v).value) <= 1e-15);
  }
  CHECK(oracle::net_hausdorff(SubspaceD::zero(2), line(0, 1), 1e-2) == doctest::Approx(1.0));
  CHECK(grassmann_distance(SubspaceD::zero(2), line(0, 1)).value == 1.0);
}

TEST_CASE("span_union examples") {
  CHECK(span_union(line(1, 0), line(1, 0)).dim() == 1);
  CHECK(span_union(line(1, 0), line(0, 1)).is_full());
  CHECK(span_union(line(1, 0), line(1, 1)).dim() == 2);
  CHECK(span_union(SubspaceD::zero(3), SubspaceD::spanned_by(vec({0, 0, 2}))).dim() == 1);
}

TEST_CASE("orthogonal complement") {
  std::mt19937_64 rng(8);
  for (Index d = 1; d <= 4; ++d) {
    for (Index k = 0; k <= d; ++k) {
      const SubspaceD s = SubspaceD::spanned_by(random_matrix(rng, d, k));
      const SubspaceD c = orthogonal_complement(s);
      CHECK(c.dim() == d - k);
      if (k > 0 && c.dim() > 0) CHECK((s.basis().transpose() * c.basis()).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK(span_union(s, c).is_full());
    }
  }
}

TEST_CASE("single precision instantiation") {
  using SubspaceF = Subspace<float>;
  const SubspaceF s = SubspaceF::spanned_by(Eigen::Vector2f(1.0f, 1.0f));
  const Eigen::VectorXf p = project(s, Eigen::Vector2f(1.0f, 0.0f));
  CHECK(p[0] == doctest::Approx(0.5f));
  CHECK(grassmann_distance(s, SubspaceF::full(2)).value == 1.0f);
}
