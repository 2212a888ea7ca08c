#pragma once

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <string>

namespace wsob {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Malformed arguments: dimension mismatches, degenerate boxes, bad parameters.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A field or curve produced a non-finite value at a quadrature node.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A mathematical invariant failed (sandwich order, certificate consistency).
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Axis-aligned closed box. Infinite bounds are allowed and denote unbounded
/// directions.
struct Box {
  Vector lo;
  Vector hi;

  Box() = default;
  Box(Vector lo_, Vector hi_);

  static Box everywhere(Index dim);
  static Box cube(Index dim, double lo, double hi);

  Index dim() const { return lo.size(); }
  bool contains(const Vector& x, double tol = 0.0) const;
  bool empty() const;
  bool bounded() const;
  Box expanded(double margin) const;
  /// Largest |x_i| over the box, per axis.
  Vector abs_max() const;
};

Box intersect(const Box& a, const Box& b);
Box bounding_union(const Box& a, const Box& b);

void require_same_dim(Index a, Index b, const char* what);

}  // namespace wsob
