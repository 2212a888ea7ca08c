#pragma once

// Scalar fields on R^d with analytic value/gradient oracles.

#include "wsob/core.hpp"

#include <json.hpp>

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace wsob {

enum class NormKind { l1, l2, linf };

/// An l^p norm on R^d together with its dual (1/p + 1/q = 1).
struct NormPlugin {
  NormKind kind = NormKind::l2;

  static NormPlugin euclidean() { return {NormKind::l2}; }
  static NormPlugin parse(const std::string& p);  // "1", "2", "inf"

  double norm(const Vector& v) const;
  double dual_norm(const Vector& v) const;
  std::string label() const;
};

struct FieldBounds {
  double sup = kInf;        ///< bound on |f|
  double lipschitz = kInf;  ///< bound on |grad f| (Euclidean)
};

class ScalarField {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradientFn = std::function<Vector(const Vector&)>;
  using BoundsFn = std::function<FieldBounds(const Box&)>;
  /// Oracles over the columns of a d x N matrix of points.
  using BatchValueFn = std::function<Vector(const Matrix&)>;
  using BatchGradientFn = std::function<Matrix(const Matrix&)>;

  ScalarField(Index dim, ValueFn value, GradientFn gradient, BoundsFn bounds,
              std::optional<Box> support, nlohmann::json descriptor);

  Index dim() const { return dim_; }
  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  double operator()(const Vector& x) const { return value(x); }

  /// Values at the columns of `points` (d x N).
  Vector values(const Matrix& points) const;
  /// Gradients at the columns of `points`, as a d x N matrix.
  Matrix gradients(const Matrix& points) const;
  /// Attaches batch oracles; without them values/gradients loop over points.
  ScalarField with_batch(BatchValueFn values, BatchGradientFn gradients) const;

  /// Box outside of which the field vanishes, if declared.
  const std::optional<Box>& support() const { return support_; }
  bool compactly_supported() const { return support_.has_value() && support_->bounded(); }

  /// Bounds on |f| and |grad f| over `region`.
  FieldBounds bounds_on(const Box& region) const;
  /// Global Euclidean Lipschitz bound.
  double lipschitz() const;

  const nlohmann::json& descriptor() const { return descriptor_; }
  ScalarField named(std::string name) const;
  std::string label() const;

 private:
  Index dim_;
  std::shared_ptr<const ValueFn> value_;
  std::shared_ptr<const GradientFn> gradient_;
  std::shared_ptr<const BoundsFn> bounds_;
  std::shared_ptr<const BatchValueFn> batch_value_;
  std::shared_ptr<const BatchGradientFn> batch_gradient_;
  std::optional<Box> support_;
  nlohmann::json descriptor_;
  std::string name_;
};

// Catalog ---------------------------------------------------------------------

ScalarField constant(Index dim, double c);
ScalarField coordinate(Index dim, Index axis);
ScalarField linear(const Vector& slope, double offset);

struct Monomial {
  double coefficient = 0.0;
  std::vector<int> exponents;
};
ScalarField polynomial(Index dim, std::vector<Monomial> terms);

ScalarField gaussian(const Vector& center, double sigma, double amplitude);

/// Smooth tensor-product cutoff: 1 on `inner`, 0 outside `outer`, quintic
/// smoothstep ramps in the shell. Inner must lie strictly inside outer.
ScalarField bump_cutoff(const Box& inner, const Box& outer);

/// The standard cutoff used by the curated experiments: 1 on [0,1]^d,
/// vanishing outside [-1/2, 3/2]^d.
ScalarField unit_cutoff(Index dim);

/// (1 - |x-c|^2/r^2)^2 inside the ball of radius r, 0 outside. C^1.
ScalarField tent(const Vector& center, double radius);

// Combinators -----------------------------------------------------------------

enum class CombineKind { add, sub, scale, mul };

struct CombineOp {
  CombineKind kind;
  double factor = 1.0;  ///< used by scale only
};

/// For `scale`, g is ignored and the result is factor * f.
ScalarField combine(const ScalarField& f, const ScalarField& g, CombineOp op);
ScalarField scale(double factor, const ScalarField& f);

ScalarField operator+(const ScalarField& f, const ScalarField& g);
ScalarField operator-(const ScalarField& f, const ScalarField& g);
ScalarField operator*(const ScalarField& f, const ScalarField& g);
ScalarField operator*(double a, const ScalarField& f);

// Profiles --------------------------------------------------------------------

/// 6u^5 - 15u^4 + 10u^3 on [0,1], clamped outside.
double smoothstep(double u);
double smoothstep_derivative(double u);
inline constexpr double kSmoothstepMaxSlope = 1.875;

// Local Lipschitz constant ----------------------------------------------------

/// lip(f)(x) for a C^1 field: the dual norm of grad f(x). Every point of R^d
/// is an accumulation point, so no isolated-point convention applies.
double lip(const ScalarField& f, const Vector& x, NormPlugin norm = NormPlugin::euclidean());

// JSON ------------------------------------------------------------------------

nlohmann::json box_to_json(const Box& box);
Box box_from_json(const nlohmann::json& j, Index dim);
Vector vector_from_json(const nlohmann::json& j, Index dim, const std::string& where);

/// Parses a catalog field (or combinator tree) of ambient dimension `dim`.
/// Unknown types or keys raise InvalidInput.
ScalarField parse_field(const nlohmann::json& j, Index dim);

/// Rejects keys outside `allowed`.
void require_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                  const std::string& where);

}  // namespace wsob
