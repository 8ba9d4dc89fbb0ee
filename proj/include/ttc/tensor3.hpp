#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ttc/error.hpp"

namespace ttc {

using Index = Eigen::Index;

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using MatrixC = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using VectorC = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using MatrixR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using VectorR = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using Dims = std::array<Index, 3>;

inline std::string dims_string(const Dims& d) {
  return std::to_string(d[0]) + "x" + std::to_string(d[1]) + "x" + std::to_string(d[2]);
}

/// Dense complex n1 x n2 x n3 tensor.
///
/// Entries are stored with i fastest, then j, then k, so frontal slice k is
/// the contiguous column block [k*n2, (k+1)*n2) of an n1 x (n2*n3) matrix.
/// A Tensor3 has no mutating API once built; operations return new values.
template <typename Real>
class Tensor3 {
public:
  using Scalar = Complex<Real>;
  using Matrix = MatrixC<Real>;

  /// Zero tensor.
  Tensor3(Index n1, Index n2, Index n3) : Tensor3(n1, n2, n3, Matrix::Zero(std::max<Index>(n1, 0), checked_cols(n1, n2, n3))) {}

  /// Wraps an n1 x (n2*n3) matrix holding frontal slices side by side.
  Tensor3(Index n1, Index n2, Index n3, Matrix slices) : n1_(n1), n2_(n2), n3_(n3), data_(std::move(slices)) {
    checked_cols(n1, n2, n3);
    if (data_.rows() != n1 || data_.cols() != n2 * n3)
      throw DimensionError("Tensor3: storage is " + std::to_string(data_.rows()) + "x" + std::to_string(data_.cols()) +
                           ", expected " + std::to_string(n1) + "x" + std::to_string(n2 * n3));
    if (!data_.allFinite()) throw ValueError("Tensor3: entries must be finite");
  }

  /// Promotes real data laid out the same way.
  static Tensor3 from_real(Index n1, Index n2, Index n3, const MatrixR<Real>& slices) {
    return Tensor3(n1, n2, n3, slices.template cast<Scalar>());
  }

  /// Builds from n3 frontal slices of equal shape.
  static Tensor3 from_slices(const std::vector<Matrix>& slices) {
    if (slices.empty()) throw ValueError("Tensor3::from_slices: need at least one slice");
    const Index n1 = slices.front().rows(), n2 = slices.front().cols(), n3 = static_cast<Index>(slices.size());
    checked_cols(n1, n2, n3);
    Matrix data(n1, n2 * n3);
    for (Index k = 0; k < n3; ++k) {
      const auto& s = slices[static_cast<std::size_t>(k)];
      if (s.rows() != n1 || s.cols() != n2) throw DimensionError("Tensor3::from_slices: ragged slices");
      data.middleCols(k * n2, n2) = s;
    }
    return Tensor3(n1, n2, n3, std::move(data));
  }

  Index n1() const { return n1_; }
  Index n2() const { return n2_; }
  Index n3() const { return n3_; }
  Dims dims() const { return {n1_, n2_, n3_}; }
  Index size() const { return n1_ * n2_ * n3_; }
  /// max(n1, n2)
  Index n_max() const { return std::max(n1_, n2_); }
  /// min(n1, n2)
  Index n_min() const { return std::min(n1_, n2_); }

  const Scalar& operator()(Index i, Index j, Index k) const { return data_(i, k * n2_ + j); }

  /// Frontal slice k as an n1 x n2 view.
  auto slice(Index k) const { return data_.middleCols(k * n2_, n2_); }

  /// Tube (i, j, :) copied out.
  VectorC<Real> tube(Index i, Index j) const {
    VectorC<Real> t(n3_);
    for (Index k = 0; k < n3_; ++k) t(k) = (*this)(i, j, k);
    return t;
  }

  /// Storage as n1 x (n2*n3).
  const Matrix& slices() const { return data_; }

  std::span<const Scalar> data() const { return {data_.data(), static_cast<std::size_t>(data_.size())}; }

  /// Storage viewed as (n1*n2) x n3; column k is vec(slice k).
  auto tubes() const { return Eigen::Map<const Matrix>(data_.data(), n1_ * n2_, n3_); }

  bool is_real() const { return (data_.imag().array() == Real(0)).all(); }

  Tensor3 conj() const { return Tensor3(n1_, n2_, n3_, data_.conjugate()); }

  friend Tensor3 operator+(const Tensor3& a, const Tensor3& b) {
    require_same(a, b, "operator+");
    return Tensor3(a.n1_, a.n2_, a.n3_, a.data_ + b.data_);
  }
  friend Tensor3 operator-(const Tensor3& a, const Tensor3& b) {
    require_same(a, b, "operator-");
    return Tensor3(a.n1_, a.n2_, a.n3_, a.data_ - b.data_);
  }
  friend Tensor3 operator-(const Tensor3& a) { return Tensor3(a.n1_, a.n2_, a.n3_, -a.data_); }
  friend Tensor3 operator*(Scalar s, const Tensor3& a) { return Tensor3(a.n1_, a.n2_, a.n3_, s * a.data_); }
  friend Tensor3 operator*(const Tensor3& a, Scalar s) { return s * a; }

  friend bool operator==(const Tensor3& a, const Tensor3& b) {
    return a.dims() == b.dims() && a.data_ == b.data_;
  }

  static void require_same(const Tensor3& a, const Tensor3& b, const char* what) {
    if (a.dims() != b.dims())
      throw DimensionError(std::string(what) + ": dims " + dims_string(a.dims()) + " vs " + dims_string(b.dims()));
  }

private:
  static Index checked_cols(Index n1, Index n2, Index n3) {
    if (n1 < 1 || n2 < 1 || n3 < 1)
      throw DimensionError("Tensor3: all dimensions must be >= 1, got " + dims_string({n1, n2, n3}));
    return n2 * n3;
  }

  Index n1_, n2_, n3_;
  Matrix data_;
};

using Tensor3d = Tensor3<double>;

/// Nonnegative weights alpha_1..alpha_n3 with sum of squares equal to one.
template <typename Real>
class WeightVector {
public:
  explicit WeightVector(VectorR<Real> alpha) : alpha_(std::move(alpha)) {
    if (alpha_.size() < 1) throw ValueError("WeightVector: empty");
    if ((alpha_.array() < Real(0)).any() || !alpha_.allFinite())
      throw ValueError("WeightVector: weights must be finite and nonnegative");
    const Real s = alpha_.squaredNorm();
    if (std::abs(s - Real(1)) > Real(1e-12))
      throw ValueError("WeightVector: sum of squared weights is " + std::to_string(s) + ", expected 1");
  }

  static WeightVector uniform(Index n3) {
    return WeightVector(VectorR<Real>::Constant(n3, Real(1) / std::sqrt(Real(n3))));
  }

  Index size() const { return alpha_.size(); }
  Real operator[](Index k) const { return alpha_(k); }
  const VectorR<Real>& values() const { return alpha_; }

private:
  VectorR<Real> alpha_;
};

/// sum_ijk conj(a_ijk) * b_ijk
template <typename Real>
Complex<Real> inner_product(const Tensor3<Real>& a, const Tensor3<Real>& b) {
  Tensor3<Real>::require_same(a, b, "inner_product");
  return a.slices().reshaped().dot(b.slices().reshaped());
}

namespace norms {
struct Frobenius {};
struct Infinity {};
struct LInf2 {};
template <typename Real>
struct LInfW {
  WeightVector<Real> w;
};
}  // namespace norms

template <typename Real>
using NormKind = std::variant<norms::Frobenius, norms::Infinity, norms::LInf2, norms::LInfW<Real>>;

template <typename Real>
Real frobenius_norm(const Tensor3<Real>& a) {
  return a.slices().norm();
}

template <typename Real>
Real infinity_norm(const Tensor3<Real>& a) {
  return a.slices().cwiseAbs().maxCoeff();
}

namespace detail {
// Largest horizontal-slab (i fixed) and lateral-slab (j fixed) weighted energy.
template <typename Real>
Real slab_norm(const Tensor3<Real>& a, const VectorR<Real>& weight2) {
  VectorR<Real> rows = VectorR<Real>::Zero(a.n1());
  VectorR<Real> cols = VectorR<Real>::Zero(a.n2());
  for (Index k = 0; k < a.n3(); ++k) {
    const auto s = a.slice(k);
    rows += weight2(k) * s.rowwise().squaredNorm();
    cols += weight2(k) * s.colwise().squaredNorm().transpose();
  }
  return std::sqrt(std::max(rows.maxCoeff(), cols.maxCoeff()));
}
}  // namespace detail

template <typename Real>
Real linf2_norm(const Tensor3<Real>& a) {
  return detail::slab_norm(a, VectorR<Real>(VectorR<Real>::Ones(a.n3())));
}

template <typename Real>
Real linfw_norm(const Tensor3<Real>& a, const WeightVector<Real>& w) {
  if (w.size() != a.n3())
    throw DimensionError("linfw_norm: weight length " + std::to_string(w.size()) + " != n3 " +
                         std::to_string(a.n3()));
  return detail::slab_norm(a, VectorR<Real>(w.values().array().square()));
}

template <typename Real>
Real norm(const Tensor3<Real>& a, const NormKind<Real>& kind) {
  return std::visit(
      [&](const auto& k) -> Real {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, norms::Frobenius>) return frobenius_norm(a);
        else if constexpr (std::is_same_v<K, norms::Infinity>) return infinity_norm(a);
        else if constexpr (std::is_same_v<K, norms::LInf2>) return linf2_norm(a);
        else return linfw_norm(a, k.w);
      },
      kind);
}

/// n3 x (n1*n2) matrix whose row k is vec(slice k), i fastest.
template <typename Real>
MatrixC<Real> unfold_mode3(const Tensor3<Real>& a) {
  return a.tubes().transpose();
}

template <typename Real>
Tensor3<Real> fold_mode3(const MatrixC<Real>& unfolded, Index n1, Index n2) {
  if (unfolded.cols() != n1 * n2)
    throw DimensionError("fold_mode3: unfolding has " + std::to_string(unfolded.cols()) + " columns, expected " +
                         std::to_string(n1 * n2));
  const Index n3 = unfolded.rows();
  MatrixC<Real> t = unfolded.transpose();
  return Tensor3<Real>(n1, n2, n3, t.reshaped(n1, n2 * n3));
}

}  // namespace ttc
