#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include <Eigen/SVD>

#include "ttc/tensor3.hpp"
#include "ttc/transform.hpp"

namespace ttc {

/// Relative singular value cutoff used when a rank has to be read off
/// floating point data.
inline constexpr double kDefaultRankTol = 1e-10;

namespace detail {

template <typename Real>
void require_n3(const UnitaryTransform<Real>& t, const Tensor3<Real>& a, const char* what) {
  if (t.n3() != a.n3())
    throw DimensionError(std::string(what) + ": transform is " + std::to_string(t.n3()) +
                         "-point, tensor has n3 = " + std::to_string(a.n3()));
}

template <typename Real>
Tensor3<Real> from_transformed(const UnitaryTransform<Real>& t, const std::vector<MatrixC<Real>>& slices) {
  return apply_inverse(t, Tensor3<Real>::from_slices(slices));
}

template <typename Real>
VectorR<Real> singular_values(const Eigen::Ref<const MatrixC<Real>>& m) {
  if (m.size() == 0) return {};
  Eigen::BDCSVD<MatrixC<Real>> svd(m);
  return svd.singularValues();
}

// Singular values of every transformed frontal slice.
template <typename Real>
std::vector<VectorR<Real>> slice_singular_values(const Tensor3<Real>& a, const UnitaryTransform<Real>& t) {
  const Tensor3<Real> hat = apply(t, a);
  std::vector<VectorR<Real>> out;
  out.reserve(static_cast<std::size_t>(a.n3()));
  for (Index k = 0; k < a.n3(); ++k) out.push_back(singular_values<Real>(hat.slice(k)));
  return out;
}

}  // namespace detail

/// Phi-product: slice-wise matrix products in the transformed domain.
template <typename Real>
Tensor3<Real> phi_product(const Tensor3<Real>& a, const Tensor3<Real>& b, const UnitaryTransform<Real>& t) {
  detail::require_n3(t, a, "phi_product");
  detail::require_n3(t, b, "phi_product");
  if (a.n2() != b.n1())
    throw DimensionError("phi_product: inner dimensions differ (" + dims_string(a.dims()) + " by " +
                         dims_string(b.dims()) + ")");
  const Tensor3<Real> ah = apply(t, a), bh = apply(t, b);
  std::vector<MatrixC<Real>> c(static_cast<std::size_t>(a.n3()));
  for (Index k = 0; k < a.n3(); ++k) c[static_cast<std::size_t>(k)].noalias() = ah.slice(k) * bh.slice(k);
  return detail::from_transformed(t, c);
}

template <typename Real>
Tensor3<Real> conj_transpose(const Tensor3<Real>& a, const UnitaryTransform<Real>& t) {
  detail::require_n3(t, a, "conj_transpose");
  const Tensor3<Real> ah = apply(t, a);
  std::vector<MatrixC<Real>> c(static_cast<std::size_t>(a.n3()));
  for (Index k = 0; k < a.n3(); ++k) c[static_cast<std::size_t>(k)] = ah.slice(k).adjoint();
  return detail::from_transformed(t, c);
}

/// n x n x n3 tensor whose transformed slices are all the identity.
template <typename Real>
Tensor3<Real> identity_tensor(Index n, const UnitaryTransform<Real>& t) {
  if (n < 1) throw ValueError("identity_tensor: n must be >= 1");
  std::vector<MatrixC<Real>> c(static_cast<std::size_t>(t.n3()), MatrixC<Real>::Identity(n, n));
  return detail::from_transformed(t, c);
}

/// Transformed multi-rank (r_1, ..., r_n3).
struct MultiRank {
  std::vector<Index> ranks;

  Index sum() const { return std::accumulate(ranks.begin(), ranks.end(), Index{0}); }
  /// Transformed tubal rank.
  Index max() const { return ranks.empty() ? 0 : *std::max_element(ranks.begin(), ranks.end()); }
  Index size() const { return static_cast<Index>(ranks.size()); }
  friend bool operator==(const MultiRank&, const MultiRank&) = default;
};

/// Skinny transformed tensor SVD, held in the transformed domain.
///
/// Every slice carries r = tubal rank columns; slice l has sigma_l(j) > 0 for
/// j < r_l and exact zeros after, so the columns past r_l are orthonormal
/// padding that does not belong to the slice's range.
template <typename Real>
class TSVDFactors {
public:
  TSVDFactors(Dims dims, UnitaryTransform<Real> t, std::vector<MatrixC<Real>> u_hat, std::vector<VectorR<Real>> sigma,
              std::vector<MatrixC<Real>> v_hat)
      : dims_(dims), t_(std::move(t)), u_hat_(std::move(u_hat)), sigma_(std::move(sigma)), v_hat_(std::move(v_hat)) {
    const auto n3 = static_cast<std::size_t>(dims_[2]);
    if (u_hat_.size() != n3 || sigma_.size() != n3 || v_hat_.size() != n3 || t_.n3() != dims_[2])
      throw DimensionError("TSVDFactors: expected " + std::to_string(n3) + " slices");
    rank_ = n3 ? u_hat_.front().cols() : 0;
    for (std::size_t k = 0; k < n3; ++k) {
      if (u_hat_[k].rows() != dims_[0] || v_hat_[k].rows() != dims_[1] || u_hat_[k].cols() != rank_ ||
          v_hat_[k].cols() != rank_ || sigma_[k].size() != rank_)
        throw DimensionError("TSVDFactors: inconsistent slice shapes");
    }
  }

  Dims dims() const { return dims_; }
  const UnitaryTransform<Real>& transform() const { return t_; }
  /// Transformed tubal rank, the common factor width.
  Index rank() const { return rank_; }

  MultiRank multi_rank() const {
    MultiRank m;
    for (const auto& s : sigma_) m.ranks.push_back((s.array() > Real(0)).count());
    return m;
  }

  const MatrixC<Real>& u_hat(Index k) const { return u_hat_[static_cast<std::size_t>(k)]; }
  const MatrixC<Real>& v_hat(Index k) const { return v_hat_[static_cast<std::size_t>(k)]; }
  const VectorR<Real>& sigma(Index k) const { return sigma_[static_cast<std::size_t>(k)]; }

  /// n1 x r x n3
  Tensor3<Real> u() const { return detail::from_transformed(t_, require_nonempty(u_hat_)); }
  /// n2 x r x n3
  Tensor3<Real> v() const { return detail::from_transformed(t_, require_nonempty(v_hat_)); }
  /// r x r x n3, f-diagonal in the transformed domain.
  Tensor3<Real> s() const {
    std::vector<MatrixC<Real>> c;
    for (const auto& sk : sigma_) c.push_back(sk.template cast<Complex<Real>>().asDiagonal());
    return detail::from_transformed(t_, require_nonempty(c));
  }

  /// U * S * V^H
  Tensor3<Real> reconstruct() const {
    std::vector<MatrixC<Real>> c;
    for (std::size_t k = 0; k < u_hat_.size(); ++k)
      c.push_back(u_hat_[k] * sigma_[k].template cast<Complex<Real>>().asDiagonal() * v_hat_[k].adjoint());
    return detail::from_transformed(t_, c);
  }

private:
  const std::vector<MatrixC<Real>>& require_nonempty(const std::vector<MatrixC<Real>>& c) const {
    if (rank_ == 0) throw ValueError("TSVDFactors: factors of a rank-0 tensor are empty");
    return c;
  }

  Dims dims_;
  UnitaryTransform<Real> t_;
  std::vector<MatrixC<Real>> u_hat_;
  std::vector<VectorR<Real>> sigma_;
  std::vector<MatrixC<Real>> v_hat_;
  Index rank_ = 0;
};

/// Skinny transformed tensor SVD. Singular values at or below
/// rank_tol * (largest singular value over all slices) are treated as zero.
template <typename Real>
TSVDFactors<Real> t_svd(const Tensor3<Real>& a, const UnitaryTransform<Real>& t, Real rank_tol = Real(kDefaultRankTol)) {
  detail::require_n3(t, a, "t_svd");
  const Tensor3<Real> hat = apply(t, a);
  const auto n3 = static_cast<std::size_t>(a.n3());
  std::vector<Eigen::BDCSVD<MatrixC<Real>>> svds;
  svds.reserve(n3);
  Real largest = 0;
  for (Index k = 0; k < a.n3(); ++k) {
    svds.emplace_back(hat.slice(k), Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svds.back().singularValues().size() > 0) largest = std::max(largest, svds.back().singularValues()(0));
  }
  const Real cutoff = rank_tol * largest;
  Index r = 0;
  std::vector<Index> ranks(n3, 0);
  for (std::size_t k = 0; k < n3; ++k) {
    const auto& sv = svds[k].singularValues();
    while (largest > 0 && ranks[k] < sv.size() && sv(ranks[k]) > cutoff) ++ranks[k];
    r = std::max(r, ranks[k]);
  }
  std::vector<MatrixC<Real>> u(n3), v(n3);
  std::vector<VectorR<Real>> sigma(n3);
  for (std::size_t k = 0; k < n3; ++k) {
    u[k] = svds[k].matrixU().leftCols(r);
    v[k] = svds[k].matrixV().leftCols(r);
    sigma[k] = svds[k].singularValues().head(r);
    sigma[k].tail(r - ranks[k]).setZero();
    for (Index c = 0; c < r; ++c) {
      const Complex<Real> f = detail::normalize_phase<Real>(u[k].col(c));
      v[k].col(c) *= f;
    }
  }
  return TSVDFactors<Real>(a.dims(), t, std::move(u), std::move(sigma), std::move(v));
}

/// r_i = number of singular values of transformed slice i above
/// tol * (largest singular value over all slices).
template <typename Real>
MultiRank multi_rank(const Tensor3<Real>& a, const UnitaryTransform<Real>& t, Real tol = Real(kDefaultRankTol)) {
  detail::require_n3(t, a, "multi_rank");
  if (tol < 0) throw ValueError("multi_rank: tol must be >= 0");
  const auto sv = detail::slice_singular_values(a, t);
  Real largest = 0;
  for (const auto& s : sv)
    if (s.size() > 0) largest = std::max(largest, s(0));
  MultiRank m;
  for (const auto& s : sv) m.ranks.push_back(largest > 0 ? (s.array() > tol * largest).count() : 0);
  return m;
}

/// Transformed tensor nuclear norm: sum of the nuclear norms of the transformed slices.
template <typename Real>
Real ttnn(const Tensor3<Real>& a, const UnitaryTransform<Real>& t) {
  detail::require_n3(t, a, "ttnn");
  Real total = 0;
  for (const auto& s : detail::slice_singular_values(a, t)) total += s.sum();
  return total;
}

/// Largest singular value over the transformed slices.
template <typename Real>
Real spectral_norm(const Tensor3<Real>& a, const UnitaryTransform<Real>& t) {
  detail::require_n3(t, a, "spectral_norm");
  Real best = 0;
  for (const auto& s : detail::slice_singular_values(a, t))
    if (s.size() > 0) best = std::max(best, s(0));
  return best;
}

/// argmin_Z tau * ||Z||_TTNN + 1/2 ||Z - W||_F^2: soft-thresholds the singular
/// values of every transformed slice by tau.
template <typename Real>
Tensor3<Real> svt_prox(const Tensor3<Real>& w, const UnitaryTransform<Real>& t, Real tau) {
  detail::require_n3(t, w, "svt_prox");
  if (!(tau > 0)) throw ValueError("svt_prox: tau must be > 0");
  const Tensor3<Real> hat = apply(t, w);
  std::vector<MatrixC<Real>> out(static_cast<std::size_t>(w.n3()));
  Eigen::BDCSVD<MatrixC<Real>> svd;
  for (Index k = 0; k < w.n3(); ++k) {
    auto& o = out[static_cast<std::size_t>(k)];
    svd.compute(hat.slice(k), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    Index keep = 0;
    while (keep < sv.size() && sv(keep) > tau) ++keep;
    if (keep == 0) {
      o = MatrixC<Real>::Zero(w.n1(), w.n2());
      continue;
    }
    const VectorC<Real> shrunk = (sv.head(keep).array() - tau).matrix().template cast<Complex<Real>>();
    o.noalias() = svd.matrixU().leftCols(keep) * shrunk.asDiagonal() * svd.matrixV().leftCols(keep).adjoint();
  }
  return detail::from_transformed(t, out);
}

/// Column basis: n x 1 x n3 with a one at (i, 0, k).
template <typename Real>
Tensor3<Real> column_basis(Index n, Index n3, Index i, Index k) {
  if (i < 0 || i >= n || k < 0 || k >= n3)
    throw ValueError("column_basis: index (" + std::to_string(i) + ", " + std::to_string(k) + ") out of range");
  MatrixC<Real> m = MatrixC<Real>::Zero(n, n3);
  m(i, k) = 1;
  return Tensor3<Real>(n, 1, n3, std::move(m));
}

/// Tube basis: 1 x 1 x n3 with a one at (0, 0, k).
template <typename Real>
Tensor3<Real> tube_basis(Index n3, Index k) {
  return column_basis<Real>(1, n3, 0, k);
}

/// Transformed tube basis for column k of Phi.
///
/// Its transformed tube holds 1 / conj(Phi(j, k)) where Phi(j, k) != 0 and zero
/// elsewhere, so that column_basis(i,k) * this * column_basis(j,k)^H is the unit
/// tensor E_ijk whenever column k of Phi has no zero entries. For real Phi the
/// entries are plain reciprocals.
template <typename Real>
Tensor3<Real> transformed_tube_basis(const UnitaryTransform<Real>& t, Index k) {
  if (k < 0 || k >= t.n3())
    throw ValueError("transformed_tube_basis: k = " + std::to_string(k) + " out of range");
  MatrixC<Real> hat = MatrixC<Real>::Zero(1, t.n3());
  for (Index j = 0; j < t.n3(); ++j) {
    const Complex<Real> p = t.matrix()(j, k);
    if (p != Complex<Real>(0)) hat(0, j) = Real(1) / std::conj(p);
  }
  return apply_inverse(t, Tensor3<Real>(1, 1, t.n3(), std::move(hat)));
}

namespace detail {

template <typename Real>
void require_factor_shape(const Tensor3<Real>& z, const TSVDFactors<Real>& f, const char* what) {
  if (z.dims() != f.dims())
    throw DimensionError(std::string(what) + ": tensor is " + dims_string(z.dims()) + ", factors are for " +
                         dims_string(f.dims()));
}

// Range projector of transformed slice k, restricted to the r_k columns that
// carry nonzero singular values.
template <typename Real>
MatrixC<Real> range_projector(const MatrixC<Real>& basis, const VectorR<Real>& sigma) {
  const Index rk = (sigma.array() > Real(0)).count();
  const auto b = basis.leftCols(rk);
  return b * b.adjoint();
}

}  // namespace detail

/// Orthogonal projection onto the tangent space T spanned by the factors:
/// P_T(Z) = U U^H Z + Z V V^H - U U^H Z V V^H, slice-wise in the transformed domain.
template <typename Real>
Tensor3<Real> project_T(const Tensor3<Real>& z, const TSVDFactors<Real>& f) {
  detail::require_factor_shape(z, f, "project_T");
  const Tensor3<Real> hat = apply(f.transform(), z);
  std::vector<MatrixC<Real>> out(static_cast<std::size_t>(z.n3()));
  for (Index k = 0; k < z.n3(); ++k) {
    const MatrixC<Real> pu = detail::range_projector(f.u_hat(k), f.sigma(k));
    const MatrixC<Real> pv = detail::range_projector(f.v_hat(k), f.sigma(k));
    const MatrixC<Real> zk = hat.slice(k);
    const MatrixC<Real> uz = pu * zk;
    out[static_cast<std::size_t>(k)] = uz + zk * pv - uz * pv;
  }
  return detail::from_transformed(f.transform(), out);
}

/// (I - U U^H) Z (I - V V^H)
template <typename Real>
Tensor3<Real> project_T_perp(const Tensor3<Real>& z, const TSVDFactors<Real>& f) {
  detail::require_factor_shape(z, f, "project_T_perp");
  const Tensor3<Real> hat = apply(f.transform(), z);
  std::vector<MatrixC<Real>> out(static_cast<std::size_t>(z.n3()));
  for (Index k = 0; k < z.n3(); ++k) {
    const MatrixC<Real> pu = detail::range_projector(f.u_hat(k), f.sigma(k));
    const MatrixC<Real> pv = detail::range_projector(f.v_hat(k), f.sigma(k));
    const MatrixC<Real> zk = hat.slice(k);
    const MatrixC<Real> left = zk - pu * zk;
    out[static_cast<std::size_t>(k)] = left - left * pv;
  }
  return detail::from_transformed(f.transform(), out);
}

/// Smallest mu satisfying both tensor incoherence conditions:
/// max_ik ||U^H * e_ik||_F^2 <= mu sum(r) / (n1 n3) and the V analogue with n2.
///
/// This is the raw value; the conditions are stated for mu >= 1, see
/// incoherence_mu_normalized.
template <typename Real>
Real incoherence_mu(const TSVDFactors<Real>& f) {
  const Index sum_r = f.multi_rank().sum();
  if (sum_r == 0) throw ValueError("incoherence_mu: factors have zero multi-rank");
  const auto [n1, n2, n3] = f.dims();
  // ||U^H * e_ik||_F^2 = sum_l |Phi(l,k)|^2 ||row i of U_hat_l (first r_l columns)||^2
  const MatrixR<Real> weight = f.transform().matrix().cwiseAbs2();
  auto worst = [&](Index n, auto basis_of) {
    MatrixR<Real> rows(n3, n);
    for (Index l = 0; l < n3; ++l) {
      const Index rl = (f.sigma(l).array() > Real(0)).count();
      rows.row(l) = basis_of(l).leftCols(rl).rowwise().squaredNorm().transpose();
    }
    return (weight.transpose() * rows).maxCoeff() * Real(n * n3) / Real(sum_r);
  };
  const Real mu_u = worst(n1, [&](Index l) -> const MatrixC<Real>& { return f.u_hat(l); });
  const Real mu_v = worst(n2, [&](Index l) -> const MatrixC<Real>& { return f.v_hat(l); });
  return std::max(mu_u, mu_v);
}

/// max(incoherence_mu(f), 1)
template <typename Real>
Real incoherence_mu_normalized(const TSVDFactors<Real>& f) {
  return std::max(incoherence_mu(f), Real(1));
}

/// Which end of the sorted singular value pool the cumulative energy is
/// accumulated from when reading off a truncated multi-rank.
enum class CumulativeOrder { descending, ascending };

/// Multi-rank of the truncation keeping a `varpi` fraction of the total
/// transformed singular value mass.
///
/// All transformed singular values are pooled and sorted; k is the smallest
/// count whose cumulative sum reaches varpi of the total, the cutoff is the k-th
/// value, and r_l counts slice-l singular values >= cutoff.
template <typename Real>
MultiRank truncated_multirank(const Tensor3<Real>& a, const UnitaryTransform<Real>& t, Real varpi,
                              CumulativeOrder order = CumulativeOrder::descending) {
  detail::require_n3(t, a, "truncated_multirank");
  if (!(varpi > 0 && varpi <= 1)) throw ValueError("truncated_multirank: varpi must lie in (0, 1]");
  const auto sv = detail::slice_singular_values(a, t);
  std::vector<Real> pool;
  for (const auto& s : sv) pool.insert(pool.end(), s.data(), s.data() + s.size());
  if (order == CumulativeOrder::descending) std::sort(pool.begin(), pool.end(), std::greater<>());
  else std::sort(pool.begin(), pool.end());
  const Real total = std::accumulate(pool.begin(), pool.end(), Real(0));
  MultiRank m;
  if (!(total > 0)) {
    m.ranks.assign(sv.size(), 0);
    return m;
  }
  Real running = 0;
  Real cutoff = pool.back();
  for (Real x : pool) {
    running += x;
    if (running >= varpi * total) {
      cutoff = x;
      break;
    }
  }
  for (const auto& s : sv) m.ranks.push_back((s.array() >= cutoff).count());
  return m;
}

}  // namespace ttc
