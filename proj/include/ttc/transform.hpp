#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include <Eigen/SVD>

#include "ttc/tensor3.hpp"

namespace ttc {

enum class TransformKind { fft, dct, data, custom };

inline std::string_view to_string(TransformKind k) {
  switch (k) {
    case TransformKind::fft: return "fft";
    case TransformKind::dct: return "dct";
    case TransformKind::data: return "data";
    case TransformKind::custom: return "custom";
  }
  return "custom";
}

/// Largest entry of |Phi Phi^H - I| and |Phi^H Phi - I|.
template <typename Real>
Real unitarity_residual(const MatrixC<Real>& phi) {
  const auto id = MatrixC<Real>::Identity(phi.rows(), phi.cols());
  const Real a = (phi * phi.adjoint() - id).cwiseAbs().maxCoeff();
  const Real b = (phi.adjoint() * phi - id).cwiseAbs().maxCoeff();
  return std::max(a, b);
}

/// An n3 x n3 unitary matrix acting on mode-3 tubes.
template <typename Real>
class UnitaryTransform {
public:
  static constexpr Real kUnitarityTol = Real(1e-10);

  UnitaryTransform(MatrixC<Real> phi, TransformKind kind) : phi_(std::move(phi)), kind_(kind) {
    if (phi_.rows() < 1 || phi_.rows() != phi_.cols())
      throw DimensionError("UnitaryTransform: matrix must be square and nonempty, got " +
                           std::to_string(phi_.rows()) + "x" + std::to_string(phi_.cols()));
    if (!phi_.allFinite()) throw ValueError("UnitaryTransform: entries must be finite");
    const Real res = unitarity_residual(phi_);
    if (!(res <= kUnitarityTol))
      throw ValueError("UnitaryTransform: matrix is not unitary (residual " + std::to_string(res) + ")");
  }

  static UnitaryTransform identity(Index n3) {
    return UnitaryTransform(MatrixC<Real>::Identity(n3, n3), TransformKind::custom);
  }

  Index n3() const { return phi_.rows(); }
  const MatrixC<Real>& matrix() const { return phi_; }
  TransformKind kind() const { return kind_; }
  std::string_view label() const { return to_string(kind_); }

private:
  MatrixC<Real> phi_;
  TransformKind kind_;
};

/// DFT matrix scaled by 1/sqrt(n3): Phi(l, k) = exp(-2 pi i l k / n3) / sqrt(n3).
template <typename Real>
UnitaryTransform<Real> make_fft_unitary(Index n3) {
  if (n3 < 1) throw ValueError("make_fft_unitary: n3 must be >= 1");
  MatrixC<Real> phi(n3, n3);
  const Real scale = Real(1) / std::sqrt(Real(n3));
  for (Index l = 0; l < n3; ++l)
    for (Index k = 0; k < n3; ++k) {
      // reduce l*k mod n3 first so the angle stays small and exact for 2-point tubes
      const Real angle = Real(-2) * std::numbers::pi_v<Real> * Real((l * k) % n3) / Real(n3);
      phi(l, k) = std::polar(scale, angle);
    }
  // snap the quarter turns so that e.g. the n3=2 matrix is exactly [[1,1],[1,-1]]/sqrt(2)
  for (Index l = 0; l < n3; ++l)
    for (Index k = 0; k < n3; ++k) {
      const Index r = (4 * ((l * k) % n3)) % (4 * n3);
      if (r % n3 == 0) {
        switch (r / n3) {
          case 0: phi(l, k) = {scale, 0}; break;
          case 1: phi(l, k) = {0, -scale}; break;
          case 2: phi(l, k) = {-scale, 0}; break;
          default: phi(l, k) = {0, scale}; break;
        }
      }
    }
  return {std::move(phi), TransformKind::fft};
}

/// Orthonormal type-II DCT: Phi(l, k) = s_l cos(pi (2k+1) l / (2 n3)).
template <typename Real>
UnitaryTransform<Real> make_dct_orthonormal(Index n3) {
  if (n3 < 1) throw ValueError("make_dct_orthonormal: n3 must be >= 1");
  MatrixC<Real> phi(n3, n3);
  for (Index l = 0; l < n3; ++l) {
    const Real s = l == 0 ? std::sqrt(Real(1) / Real(n3)) : std::sqrt(Real(2) / Real(n3));
    for (Index k = 0; k < n3; ++k)
      phi(l, k) = s * std::cos(std::numbers::pi_v<Real> * Real(2 * k + 1) * Real(l) / Real(2 * n3));
  }
  return {std::move(phi), TransformKind::dct};
}

namespace detail {

// Multiplies column c by the conjugate phase of its first non-negligible entry,
// making that entry real and nonnegative. Returns the applied factor.
template <typename Real, typename Col>
Complex<Real> normalize_phase(Col&& col) {
  const Real tol = Real(1e-10) * col.cwiseAbs().maxCoeff();
  for (Index i = 0; i < col.size(); ++i) {
    if (std::abs(col(i)) > tol) {
      const Complex<Real> f = std::conj(col(i)) / std::abs(col(i));
      col *= f;
      return f;
    }
  }
  return Complex<Real>(1);
}

// Extends the orthonormal columns of `basis` (n x r) to a full n x n unitary by
// Gram-Schmidt over the standard basis vectors e_0, e_1, ... in order.
template <typename Real>
MatrixC<Real> complete_basis(const MatrixC<Real>& basis, Index n) {
  MatrixC<Real> out(n, n);
  Index filled = basis.cols();
  out.leftCols(filled) = basis;
  for (Index e = 0; e < n && filled < n; ++e) {
    VectorC<Real> v = VectorC<Real>::Unit(n, e);
    // two passes of classical Gram-Schmidt
    for (int pass = 0; pass < 2; ++pass) v -= out.leftCols(filled) * (out.leftCols(filled).adjoint() * v);
    const Real nv = v.norm();
    if (nv > Real(1e-6)) out.col(filled++) = v / nv;
  }
  return out;
}

}  // namespace detail

/// Phi = U^H where U holds the left singular vectors of unfold_mode3(z),
/// ordered by decreasing singular value, each with its first nonzero entry
/// made real nonnegative, completed with standard basis vectors when the
/// unfolding is rank deficient. z = 0 gives the identity.
template <typename Real>
UnitaryTransform<Real> make_data_driven(const Tensor3<Real>& z) {
  const Index n3 = z.n3();
  const MatrixC<Real> unfolded = unfold_mode3(z);
  Eigen::BDCSVD<MatrixC<Real>> svd(unfolded, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Index rank = 0;
  if (sv.size() > 0 && sv(0) > Real(0)) {
    const Real cutoff = Real(1e-10) * sv(0);
    while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  }
  MatrixC<Real> u = svd.matrixU().leftCols(rank);
  for (Index c = 0; c < rank; ++c) detail::normalize_phase<Real>(u.col(c));
  MatrixC<Real> full = detail::complete_basis<Real>(u, n3);
  return {full.adjoint(), TransformKind::data};
}

/// Every tube (i, j, :) multiplied by Phi.
template <typename Real>
Tensor3<Real> apply(const UnitaryTransform<Real>& t, const Tensor3<Real>& a) {
  if (t.n3() != a.n3())
    throw DimensionError("apply: transform is " + std::to_string(t.n3()) + "-point, tensor has n3 = " +
                         std::to_string(a.n3()));
  MatrixC<Real> out = a.tubes() * t.matrix().transpose();
  return Tensor3<Real>(a.n1(), a.n2(), a.n3(), out.reshaped(a.n1(), a.n2() * a.n3()));
}

/// Every tube (i, j, :) multiplied by Phi^H.
template <typename Real>
Tensor3<Real> apply_inverse(const UnitaryTransform<Real>& t, const Tensor3<Real>& a) {
  if (t.n3() != a.n3())
    throw DimensionError("apply_inverse: transform is " + std::to_string(t.n3()) + "-point, tensor has n3 = " +
                         std::to_string(a.n3()));
  MatrixC<Real> out = a.tubes() * t.matrix().conjugate();
  return Tensor3<Real>(a.n1(), a.n2(), a.n3(), out.reshaped(a.n1(), a.n2() * a.n3()));
}

/// alpha_t = |Phi(t, k)| for a 0-based column index k.
template <typename Real>
WeightVector<Real> weights_from_column(const UnitaryTransform<Real>& t, Index k) {
  if (k < 0 || k >= t.n3())
    throw ValueError("weights_from_column: column " + std::to_string(k) + " out of range [0, " +
                     std::to_string(t.n3()) + ")");
  VectorR<Real> alpha = t.matrix().col(k).cwiseAbs();
  // absorb rounding so the unit-sum invariant is met exactly enough
  alpha /= alpha.norm();
  return WeightVector<Real>(std::move(alpha));
}

}  // namespace ttc
