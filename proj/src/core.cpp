#include "wsob/core.hpp"

#include <algorithm>
#include <cmath>

namespace wsob {

Box::Box(Vector lo_, Vector hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size()) {
    throw InvalidInput("box corners have different dimensions");
  }
}

Box Box::everywhere(Index dim) {
  return Box(Vector::Constant(dim, -kInf), Vector::Constant(dim, kInf));
}

Box Box::cube(Index dim, double lo, double hi) {
  return Box(Vector::Constant(dim, lo), Vector::Constant(dim, hi));
}

bool Box::contains(const Vector& x, double tol) const {
  require_same_dim(x.size(), dim(), "Box::contains");
  for (Index i = 0; i < dim(); ++i) {
    if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
  }
  return true;
}

bool Box::empty() const {
  for (Index i = 0; i < dim(); ++i) {
    if (lo[i] > hi[i]) return true;
  }
  return false;
}

bool Box::bounded() const { return lo.allFinite() && hi.allFinite(); }

Box Box::expanded(double margin) const {
  return Box(lo.array() - margin, hi.array() + margin);
}

Vector Box::abs_max() const { return lo.cwiseAbs().cwiseMax(hi.cwiseAbs()); }

Box intersect(const Box& a, const Box& b) {
  require_same_dim(a.dim(), b.dim(), "intersect");
  return Box(a.lo.cwiseMax(b.lo), a.hi.cwiseMin(b.hi));
}

Box bounding_union(const Box& a, const Box& b) {
  require_same_dim(a.dim(), b.dim(), "bounding_union");
  if (a.empty()) return b;
  if (b.empty()) return a;
  return Box(a.lo.cwiseMin(b.lo), a.hi.cwiseMax(b.hi));
}

void require_same_dim(Index a, Index b, const char* what) {
  if (a != b) {
    throw InvalidInput(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                       " vs " + std::to_string(b) + ")");
  }
}

}  // namespace wsob
