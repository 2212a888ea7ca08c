#pragma once

// Independent reference computations used to cross-check the library.

#include "wsob/catalog.hpp"
#include "wsob/fields.hpp"
#include "wsob/grassmann.hpp"
#include "wsob/measure.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace oracle {

using wsob::Index;
using wsob::Vector;

inline Vector vec(std::initializer_list<double> v) {
  Vector out(Index(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline Vector fd_gradient(const wsob::ScalarField& f, const Vector& x, double h) {
  Vector g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    Vector p = x, m = x;
    p[i] += h;
    m[i] -= h;
    g[i] = (f.value(p) - f.value(m)) / (2.0 * h);
  }
  return g;
}

/// Central differences at h = 1e-3 and 1e-4: the error must shrink like h^2
/// (a factor 100, checked with a factor 20 margin) or already sit at rounding level.
struct FdCheck {
  double err_coarse;
  double err_fine;
  bool pass;
};

inline FdCheck fd_check(const wsob::ScalarField& f, const Vector& x) {
  const Vector g = f.gradient(x);
  const double e3 = (fd_gradient(f, x, 1e-3) - g).lpNorm<Eigen::Infinity>();
  const double e4 = (fd_gradient(f, x, 1e-4) - g).lpNorm<Eigen::Infinity>();
  return {e3, e4, e4 <= 0.05 * e3 + 1e-9};
}

/// Directions on the surface of the cube {-m..m}^d, i.e. a net of the sphere
/// of every l^p norm after normalization.
inline std::vector<Vector> cube_surface_net(Index d, int m) {
  std::vector<Vector> out;
  std::vector<int> idx(std::size_t(d), -m);
  while (true) {
    bool surface = false;
    Vector v(d);
    for (Index i = 0; i < d; ++i) {
      v[i] = idx[std::size_t(i)];
      surface = surface || std::abs(idx[std::size_t(i)]) == m;
    }
    if (surface) out.push_back(v);
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] > m) idx[k++] = -m;
    if (k == idx.size()) break;
  }
  return out;
}

/// max over net directions y with |y|_p = r of |f(x+y) - f(x-y)| / 2r. The
/// symmetric quotient has the same limit as r -> 0 and no curvature term.
inline double slope_oracle(const wsob::ScalarField& f, const Vector& x, const wsob::NormPlugin& norm, double r,
                           int m) {
  double best = 0.0;
  for (const Vector& dir : cube_surface_net(x.size(), m)) {
    const Vector y = dir * (r / norm.norm(dir));
    best = std::max(best, std::abs(f.value(x + y) - f.value(x - y)) / (2.0 * r));
  }
  return best;
}

/// Stage-n intervals of a fat Cantor set on [a, a + length], rebuilt by explicit
/// recursion: every interval of stage j-1 loses a centered gap of length
/// length * base^-j.
inline std::vector<std::pair<double, double>> fat_cantor_intervals(double a, double length, double base, int n) {
  std::vector<std::pair<double, double>> cur{{a, a + length}};
  for (int j = 1; j <= n; ++j) {
    const double gap = length * std::pow(base, -j);
    std::vector<std::pair<double, double>> next;
    for (auto [lo, hi] : cur) {
      const double mid = 0.5 * (lo + hi);
      next.emplace_back(lo, mid - 0.5 * gap);
      next.emplace_back(mid + 0.5 * gap, hi);
    }
    cur = std::move(next);
  }
  return cur;
}

/// Exact integral of x^2 over the intervals, together with the interval-
/// arithmetic enclosure sum_I |I| [min_I x^2, max_I x^2].
struct IntervalSum {
  double exact = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

inline IntervalSum x_squared_over(const std::vector<std::pair<double, double>>& intervals) {
  IntervalSum s;
  for (auto [lo, hi] : intervals) {
    const double w = hi - lo;
    s.exact += (hi * hi * hi - lo * lo * lo) / 3.0;
    const double a = lo * lo, b = hi * hi;
    const double mn = (lo <= 0.0 && hi >= 0.0) ? 0.0 : std::min(a, b);
    s.lower += w * mn;
    s.upper += w * std::max(a, b);
  }
  return s;
}

/// Discrete Hausdorff distance between the unit balls of two subspaces of R^2
/// sampled at spacing h: every ball is the segment or disc of points of norm
/// <= 1 in the span.
inline std::vector<Vector> sample_unit_ball(const wsob::SubspaceD& s, double h) {
  std::vector<Vector> pts;
  const Index d = s.ambient_dim();
  if (s.dim() == 0) {
    pts.push_back(Vector::Zero(d));
  } else if (s.dim() == 1) {
    for (double t = -1.0; t <= 1.0 + 1e-15; t += h) pts.push_back(t * s.basis().col(0));
  } else {
    for (double a = -1.0; a <= 1.0 + 1e-15; a += h) {
      for (double b = -1.0; b <= 1.0 + 1e-15; b += h) {
        if (a * a + b * b <= 1.0) pts.push_back(a * s.basis().col(0) + b * s.basis().col(1));
      }
    }
  }
  return pts;
}

inline double one_sided(const std::vector<Vector>& from, const std::vector<Vector>& to) {
  double worst = 0.0;
  for (const auto& p : from) {
    double best = 1e300;
    for (const auto& q : to) best = std::min(best, (p - q).norm());
    worst = std::max(worst, best);
  }
  return worst;
}

inline double net_hausdorff(const wsob::SubspaceD& v, const wsob::SubspaceD& w, double h) {
  const auto a = sample_unit_ball(v, h);
  const auto b = sample_unit_ball(w, h);
  return std::max(one_sided(a, b), one_sided(b, a));
}

/// Every catalog field valid in dimension d, plus a few seeded random ones.
inline std::vector<wsob::ScalarField> curated_fields(Index d, int random_count = 3) {
  std::vector<wsob::ScalarField> out;
  for (const auto& n : wsob::catalog_field_names()) {
    if ((n == "y" || n == "x+y" || n == "x*y") && d < 2) continue;
    if (n == "z" && d < 3) continue;
    out.push_back(wsob::catalog_field(n, d));
  }
  auto rng = wsob::task_rng(99, std::uint64_t(d));
  for (int i = 0; i < random_count; ++i) out.push_back(wsob::random_catalog_field(d, rng).named("random" + std::to_string(i)));
  return out;
}

}  // namespace oracle
