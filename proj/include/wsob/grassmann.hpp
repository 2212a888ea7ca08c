#pragma once

// Linear subspaces of R^d stored as explicit orthonormal bases.

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace wsob {

template <typename Scalar>
class Subspace {
 public:
  using VectorType = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using BasisType = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  static constexpr Scalar kOrthonormalTol = Scalar(1e-12);
  static constexpr Scalar kDropTol = Scalar(1e-10);

  /// The zero subspace of R^d.
  explicit Subspace(Eigen::Index ambient_dim = 0) : basis_(ambient_dim, 0) {
    if (ambient_dim < 0) throw std::invalid_argument("Subspace: negative ambient dimension");
  }

  static Subspace zero(Eigen::Index ambient_dim) { return Subspace(ambient_dim); }

  static Subspace full(Eigen::Index ambient_dim) {
    Subspace s(ambient_dim);
    s.basis_ = BasisType::Identity(ambient_dim, ambient_dim);
    return s;
  }

  /// Orthonormalizes the columns of `vectors` (two-pass modified Gram-Schmidt);
  /// columns whose residual falls below `drop_tol` are discarded.
  template <typename Derived>
  static Subspace spanned_by(const Eigen::MatrixBase<Derived>& vectors,
                             Scalar drop_tol = kDropTol) {
    const Eigen::Index d = vectors.rows();
    BasisType q(d, vectors.cols());
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
      VectorType v = vectors.col(j);
      const Scalar n0 = v.norm();
      if (!(n0 > drop_tol)) continue;
      v /= n0;
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index i = 0; i < k; ++i) v -= q.col(i).dot(v) * q.col(i);
      }
      const Scalar r = v.norm();
      if (!(r > drop_tol)) continue;
      q.col(k++) = v / r;
    }
    Subspace s(d);
    s.basis_ = q.leftCols(k);
    return s;
  }

  Eigen::Index ambient_dim() const { return basis_.rows(); }
  Eigen::Index dim() const { return basis_.cols(); }
  bool is_zero() const { return dim() == 0; }
  bool is_full() const { return dim() == ambient_dim(); }
  const BasisType& basis() const { return basis_; }

  /// Largest deviation of the Gram matrix from the identity.
  Scalar orthonormality_defect() const {
    if (dim() == 0) return Scalar(0);
    const BasisType gram = basis_.transpose() * basis_;
    return (gram - BasisType::Identity(dim(), dim())).cwiseAbs().maxCoeff();
  }

 private:
  BasisType basis_;
};

using SubspaceD = Subspace<double>;

namespace detail {
inline void check_dims(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}
}  // namespace detail

/// Orthogonal projection of v onto V: sum_i (v . b_i) b_i.
template <typename Scalar, typename Derived>
typename Subspace<Scalar>::VectorType project(const Subspace<Scalar>& space,
                                              const Eigen::MatrixBase<Derived>& v) {
  detail::check_dims(v.size(), space.ambient_dim(), "project");
  if (space.dim() == 0) return Subspace<Scalar>::VectorType::Zero(v.size());
  return space.basis() * (space.basis().transpose() * v);
}

enum class DistanceMethod {
  principal_angles,  ///< equal dimensions: sine of the largest principal angle
  dimension_gap,     ///< different dimensions: distance is exactly 1
};

template <typename Scalar>
struct GrassmannDistance {
  Scalar value;
  DistanceMethod method;
};

/// Hausdorff distance between the closed unit balls of V and W.
///
/// For x in the unit ball of V, its projection onto W lies in the unit ball of
/// W and is the nearest point there, so the one-sided distance is the operator
/// norm of (I - P_W) restricted to V. With dim V == dim W this is the sine of
/// the largest principal angle. With dim V > dim W some unit vector of V is
/// orthogonal to W, so the distance is exactly 1.
template <typename Scalar>
GrassmannDistance<Scalar> grassmann_distance(const Subspace<Scalar>& v_space,
                                             const Subspace<Scalar>& w_space) {
  using Basis = typename Subspace<Scalar>::BasisType;
  detail::check_dims(v_space.ambient_dim(), w_space.ambient_dim(), "grassmann_distance");
  if (v_space.dim() != w_space.dim()) return {Scalar(1), DistanceMethod::dimension_gap};
  if (v_space.dim() == 0) return {Scalar(0), DistanceMethod::principal_angles};
  const Basis& qv = v_space.basis();
  const Basis& qw = w_space.basis();
  const Basis residual = qv - qw * (qw.transpose() * qv);
  Eigen::JacobiSVD<Basis> svd(residual);
  Scalar s = svd.singularValues()(0);
  if (s > Scalar(1)) s = Scalar(1);
  return {s, DistanceMethod::principal_angles};
}

/// Orthonormal basis of V + W.
template <typename Scalar>
Subspace<Scalar> span_union(const Subspace<Scalar>& v_space, const Subspace<Scalar>& w_space) {
  using Basis = typename Subspace<Scalar>::BasisType;
  detail::check_dims(v_space.ambient_dim(), w_space.ambient_dim(), "span_union");
  Basis stacked(v_space.ambient_dim(), v_space.dim() + w_space.dim());
  stacked.leftCols(v_space.dim()) = v_space.basis();
  stacked.rightCols(w_space.dim()) = w_space.basis();
  return Subspace<Scalar>::spanned_by(stacked);
}

/// Orthonormal basis of the orthogonal complement of V (from a full QR of the basis).
template <typename Scalar>
Subspace<Scalar> orthogonal_complement(const Subspace<Scalar>& space) {
  using Basis = typename Subspace<Scalar>::BasisType;
  const Eigen::Index d = space.ambient_dim();
  const Eigen::Index k = space.dim();
  if (k == 0) return Subspace<Scalar>::full(d);
  Eigen::HouseholderQR<Basis> qr(space.basis());
  const Basis q = qr.householderQ() * Basis::Identity(d, d);
  return Subspace<Scalar>::spanned_by(q.rightCols(d - k));
}

}  // namespace wsob
