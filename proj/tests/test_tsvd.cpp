#include <gtest/gtest.h>

#include "oracle.hpp"
#include "ttc/experiment.hpp"
#include "ttc/tsvd.hpp"

using namespace ttc;

namespace {

std::vector<UnitaryTransform<double>> transforms_for(Index n3, std::mt19937_64& rng) {
  return {make_fft_unitary<double>(n3), make_dct_orthonormal<double>(n3),
          make_data_driven(oracle::random_tensor(3, 4, n3, rng)),
          UnitaryTransform<double>(oracle::random_unitary(n3, rng), TransformKind::custom)};
}

Tensor3d slice_tensor(const MatrixC<double>& m) { return Tensor3d(m.rows(), m.cols(), 1, m); }

}  // namespace

TEST(PhiProduct, IdentityIsNeutral) {
  std::mt19937_64 rng(30);
  for (const auto& t : transforms_for(4, rng)) {
    const auto a = oracle::random_tensor(3, 5, 4, rng);
    EXPECT_LE(oracle::max_abs_diff(phi_product(a, identity_tensor(5, t), t), a), 1e-12);
    EXPECT_LE(oracle::max_abs_diff(phi_product(identity_tensor(3, t), a, t), a), 1e-12);
  }
}

TEST(PhiProduct, SingleSliceIsMatrixProduct) {
  std::mt19937_64 rng(31);
  const auto a = oracle::random_tensor(3, 4, 1, rng), b = oracle::random_tensor(4, 2, 1, rng);
  const auto c = phi_product(a, b, UnitaryTransform<double>::identity(1));
  EXPECT_LE((c.slices() - a.slices() * b.slices()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(PhiProduct, MatchesBlockDiagonalOracleUnderFft) {
  std::mt19937_64 rng(32);
  const auto t = make_fft_unitary<double>(2);
  const auto a = oracle::random_tensor(2, 3, 2, rng), b = oracle::random_tensor(3, 2, 2, rng);
  EXPECT_LE(oracle::max_abs_diff(phi_product(a, b, t), oracle::product(a, b, t.matrix())), 1e-12);
}

TEST(PhiProduct, RejectsIncompatibleShapes) {
  const auto t = make_dct_orthonormal<double>(2);
  EXPECT_THROW(phi_product(Tensor3d(2, 3, 2), Tensor3d(2, 3, 2), t), DimensionError);
  EXPECT_THROW(phi_product(Tensor3d(2, 3, 3), Tensor3d(3, 3, 3), t), DimensionError);
}

TEST(PhiProduct, Associative) {
  std::mt19937_64 rng(33);
  for (const auto& t : transforms_for(3, rng)) {
    const auto a = oracle::random_tensor(2, 3, 3, rng), b = oracle::random_tensor(3, 4, 3, rng),
               c = oracle::random_tensor(4, 2, 3, rng);
    EXPECT_LE(oracle::max_abs_diff(phi_product(phi_product(a, b, t), c, t), phi_product(a, phi_product(b, c, t), t)),
              1e-10);
  }
}

TEST(PhiProduct, BlockDiagonalHomomorphism) {
  std::mt19937_64 rng(34);
  for (const auto& t : transforms_for(4, rng)) {
    const auto a = oracle::random_tensor(3, 2, 4, rng), b = oracle::random_tensor(2, 3, 4, rng);
    const oracle::MatC lhs = oracle::blockdiag(oracle::transform_slices(phi_product(a, b, t), t.matrix()));
    const oracle::MatC rhs = oracle::blockdiag(oracle::transform_slices(a, t.matrix())) *
                     oracle::blockdiag(oracle::transform_slices(b, t.matrix()));
    EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ConjTranspose, SingleRealSliceIsTranspose) {
  MatrixC<double> m(2, 2);
  m << 1, 2, 3, 4;
  const auto out = conj_transpose(slice_tensor(m), UnitaryTransform<double>::identity(1));
  EXPECT_EQ(out.slices(), m.transpose());
}

TEST(ConjTranspose, Involution) {
  std::mt19937_64 rng(35);
  for (const auto& t : transforms_for(3, rng)) {
    const auto a = oracle::random_tensor(2, 4, 3, rng);
    EXPECT_LE(oracle::max_abs_diff(conj_transpose(conj_transpose(a, t), t), a), 1e-12);
  }
}

TEST(ConjTranspose, ReversesProducts) {
  std::mt19937_64 rng(36);
  const auto t = make_dct_orthonormal<double>(4);
  const auto a = oracle::random_tensor(2, 3, 4, rng), b = oracle::random_tensor(3, 5, 4, rng);
  EXPECT_LE(oracle::max_abs_diff(conj_transpose(phi_product(a, b, t), t),
                                 phi_product(conj_transpose(b, t), conj_transpose(a, t), t)),
            1e-12);
}

TEST(IdentityTensor, UnderIdentityTransformHasOnesOnDiagonalTubes) {
  const auto e = identity_tensor(3, UnitaryTransform<double>::identity(4));
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j)
      for (Index k = 0; k < 4; ++k) EXPECT_EQ(e(i, j, k), Complex<double>(i == j ? 1 : 0));
}

TEST(IdentityTensor, TwoPointFft) {
  const auto e = identity_tensor(2, make_fft_unitary<double>(2));
  for (Index i = 0; i < 2; ++i) {
    EXPECT_NEAR(std::abs(e(i, i, 0) - std::sqrt(2.0)), 0, 1e-15);
    EXPECT_NEAR(std::abs(e(i, i, 1)), 0, 1e-15);
  }
}

TEST(TSvd, ZeroTensorHasRankZero) {
  const auto f = t_svd(Tensor3d(3, 4, 2), make_fft_unitary<double>(2));
  EXPECT_EQ(f.rank(), 0);
  EXPECT_EQ(frobenius_norm(f.reconstruct()), 0.0);
  EXPECT_THROW(f.u(), ValueError);
}

TEST(TSvd, IdentityTensorFactorsIntoIdentities) {
  const auto t = make_dct_orthonormal<double>(3);
  const auto f = t_svd(identity_tensor(4, t), t);
  EXPECT_EQ(f.rank(), 4);
  for (Index k = 0; k < 3; ++k) EXPECT_LE((f.sigma(k).array() - 1).abs().maxCoeff(), 1e-12);
}

TEST(TSvd, ReconstructsAndHasOrthonormalFactors) {
  std::mt19937_64 rng(37);
  for (const auto& t : transforms_for(4, rng)) {
    const auto a = oracle::random_tensor(8, 6, 4, rng);
    const auto f = t_svd(a, t);
    EXPECT_LE(oracle::rel_diff(f.reconstruct(), a), 1e-10);
    const auto u = f.u(), v = f.v(), s = f.s();
    EXPECT_LE(oracle::rel_diff(phi_product(phi_product(u, s, t), conj_transpose(v, t), t), a), 1e-10);
    const auto id = identity_tensor(f.rank(), t);
    EXPECT_LE(frobenius_norm(phi_product(conj_transpose(u, t), u, t) - id), 1e-8);
    EXPECT_LE(frobenius_norm(phi_product(conj_transpose(v, t), v, t) - id), 1e-8);
    for (Index k = 0; k < 4; ++k) {
      const auto& sv = f.sigma(k);
      for (Index j = 1; j < sv.size(); ++j) EXPECT_LE(sv(j), sv(j - 1));
      EXPECT_GE(sv.minCoeff(), 0.0);
    }
    // transformed S slices are diagonal
    const auto shat = apply(t, s);
    for (Index k = 0; k < 4; ++k) {
      MatrixC<double> off = shat.slice(k);
      off.diagonal().setZero();
      EXPECT_LE(off.cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(TSvd, SlicesWithLowerRankCarryExplicitZeros) {
  const auto t = make_dct_orthonormal<double>(3);
  const auto z = gen_synthetic(6, 5, 3, MultiRank{{3, 1, 0}}, t, 5);
  const auto f = t_svd(z, t);
  EXPECT_EQ(f.rank(), 3);
  EXPECT_EQ(f.multi_rank(), (MultiRank{{3, 1, 0}}));
  EXPECT_EQ(f.sigma(1).tail(2), Eigen::Vector2d::Zero());
  EXPECT_EQ(f.sigma(2), Eigen::Vector3d::Zero());
  EXPECT_LE(oracle::rel_diff(f.reconstruct(), z), 1e-10);
}

TEST(TSvd, DeterministicPhaseConvention) {
  std::mt19937_64 rng(38);
  const auto a = oracle::random_tensor(4, 3, 3, rng);
  const auto t = make_fft_unitary<double>(3);
  const auto f = t_svd(a, t);
  for (Index k = 0; k < 3; ++k)
    for (Index c = 0; c < f.rank(); ++c) {
      const auto col = f.u_hat(k).col(c);
      Index first = 0;
      while (std::abs(col(first)) < 1e-10) ++first;
      EXPECT_NEAR(col(first).imag(), 0.0, 1e-14);
      EXPECT_GT(col(first).real(), 0.0);
    }
}

TEST(MultiRank, ZeroTensor) {
  EXPECT_EQ(multi_rank(Tensor3d(3, 3, 4), make_fft_unitary<double>(4)), (MultiRank{{0, 0, 0, 0}}));
}

TEST(MultiRank, PrescribedProfile) {
  const auto t = make_dct_orthonormal<double>(3);
  EXPECT_EQ(multi_rank(gen_synthetic(5, 5, 3, MultiRank{{2, 1, 0}}, t, 9), t), (MultiRank{{2, 1, 0}}));
}

TEST(MultiRank, IdentityTensor) {
  const auto t = make_fft_unitary<double>(4);
  const auto r = multi_rank(identity_tensor(5, t), t);
  EXPECT_EQ(r, (MultiRank{{5, 5, 5, 5}}));
  EXPECT_EQ(r.max(), 5);
  EXPECT_EQ(r.sum(), 20);
}

TEST(Ttnn, Basics) {
  const auto t = make_fft_unitary<double>(3);
  EXPECT_EQ(ttnn(Tensor3d(2, 2, 3), t), 0.0);
  EXPECT_NEAR(ttnn(identity_tensor(4, t), t), 4.0 * 3.0, 1e-12);
}

TEST(Ttnn, MatchesSliceOracle) {
  std::mt19937_64 rng(39);
  for (const auto& t : transforms_for(3, rng)) {
    const auto a = oracle::random_tensor(5, 4, 3, rng);
    EXPECT_NEAR(ttnn(a, t), oracle::ttnn(a, t.matrix()), 1e-10 * oracle::ttnn(a, t.matrix()));
  }
}

TEST(SpectralNorm, Basics) {
  std::mt19937_64 rng(40);
  const auto t = make_dct_orthonormal<double>(4);
  EXPECT_EQ(spectral_norm(Tensor3d(2, 3, 4), t), 0.0);
  EXPECT_NEAR(spectral_norm(identity_tensor(3, t), t), 1.0, 1e-12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = oracle::random_tensor(3, 5, 4, rng);
    EXPECT_LE(spectral_norm(a, t), frobenius_norm(a) * (1 + 1e-12));
  }
}

TEST(NormDuality, InnerProductBoundedByTtnnTimesSpectral) {
  std::mt19937_64 rng(41);
  for (const auto& t : transforms_for(3, rng)) {
    const auto a = oracle::random_tensor(4, 3, 3, rng), b = oracle::random_tensor(4, 3, 3, rng);
    EXPECT_LE(std::abs(inner_product(a, b)), ttnn(a, t) * spectral_norm(b, t) * (1 + 1e-12));
  }
}

TEST(NormDuality, TtnnBoundedBySumOfRanksInsideSpectralUnitBall) {
  std::mt19937_64 rng(42);
  for (const auto& t : transforms_for(4, rng)) {
    for (int trial = 0; trial < 10; ++trial) {
      auto a = oracle::random_tensor(4, 5, 4, rng);
      a = a * Complex<double>(1.0 / spectral_norm(a, t));
      EXPECT_LE(spectral_norm(a, t), 1 + 1e-12);
      EXPECT_LE(ttnn(a, t), double(multi_rank(a, t).sum()) * (1 + 1e-12));
    }
  }
}

TEST(SvtProx, FullShrinkageWhenTauDominates) {
  std::mt19937_64 rng(43);
  const auto t = make_fft_unitary<double>(3);
  const auto w = oracle::random_tensor(3, 3, 3, rng);
  EXPECT_EQ(frobenius_norm(svt_prox(w, t, spectral_norm(w, t))), 0.0);
}

TEST(SvtProx, TinyTauIsNearlyIdentity) {
  std::mt19937_64 rng(44);
  const auto t = make_dct_orthonormal<double>(3);
  const auto w = oracle::random_tensor(4, 3, 3, rng);
  EXPECT_LE(oracle::max_abs_diff(svt_prox(w, t, 1e-15), w), 1e-10);
}

TEST(SvtProx, MatchesSliceOracleAndMinimizesObjective) {
  std::mt19937_64 rng(45);
  const double tau = 0.5;
  for (const auto& t : transforms_for(3, rng)) {
    const auto w = oracle::random_tensor(6, 6, 3, rng);
    const auto p = svt_prox(w, t, tau);
    EXPECT_LE(oracle::max_abs_diff(p, oracle::svt(w, t.matrix(), tau)), 1e-10);
    auto objective = [&](const Tensor3d& z) {
      const double d = frobenius_norm(z - w);
      return tau * ttnn(z, t) + 0.5 * d * d;
    };
    const double best = objective(p);
    for (int k = 0; k < 200; ++k) {
      const auto q = p + oracle::random_tensor(6, 6, 3, rng) * Complex<double>(1e-3);
      EXPECT_LE(best, objective(q));
    }
  }
}

TEST(SvtProx, Nonexpansive) {
  std::mt19937_64 rng(46);
  const auto t = make_fft_unitary<double>(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = oracle::random_tensor(3, 4, 4, rng), b = oracle::random_tensor(3, 4, 4, rng);
    EXPECT_LE(frobenius_norm(svt_prox(a, t, 0.7) - svt_prox(b, t, 0.7)), frobenius_norm(a - b) * (1 + 1e-12));
  }
}

TEST(SvtProx, RejectsNonpositiveTau) {
  EXPECT_THROW(svt_prox(Tensor3d(2, 2, 2), make_fft_unitary<double>(2), 0.0), ValueError);
}

TEST(Basis, ColumnBasisIsOneHot) {
  const auto e = column_basis<double>(3, 2, 0, 0);
  EXPECT_EQ(e.dims(), (Dims{3, 1, 2}));
  for (Index i = 0; i < 3; ++i)
    for (Index k = 0; k < 2; ++k) EXPECT_EQ(e(i, 0, k), Complex<double>(i == 0 && k == 0 ? 1 : 0));
  EXPECT_THROW(column_basis<double>(3, 2, 3, 0), ValueError);
  EXPECT_THROW(tube_basis<double>(2, 2), ValueError);
}

TEST(Basis, TransformedTubeUnderFftHasModulusSqrtN3) {
  const Index n3 = 5;
  const auto t = make_fft_unitary<double>(n3);
  for (Index k = 0; k < n3; ++k) {
    const auto hat = apply(t, transformed_tube_basis(t, k));
    for (Index j = 0; j < n3; ++j) EXPECT_NEAR(std::abs(hat(0, 0, j)), std::sqrt(double(n3)), 1e-12);
  }
}

TEST(Basis, TransformedTubeIsReciprocalForRealTransforms) {
  const auto t = make_dct_orthonormal<double>(4);
  const auto hat = apply(t, transformed_tube_basis(t, 2));
  for (Index j = 0; j < 4; ++j) EXPECT_NEAR(std::abs(hat(0, 0, j) - 1.0 / t.matrix()(j, 2)), 0, 1e-12);
}

TEST(Basis, UnitTensorDecomposition) {
  const Index n1 = 3, n2 = 2, n3 = 4;
  std::mt19937_64 rng(47);
  std::vector<UnitaryTransform<double>> ts{make_fft_unitary<double>(n3), make_dct_orthonormal<double>(n3)};
  for (const auto& t : ts)
    for (Index i = 0; i < n1; ++i)
      for (Index j = 0; j < n2; ++j)
        for (Index k = 0; k < n3; ++k) {
          const auto e = phi_product(phi_product(column_basis<double>(n1, n3, i, k), transformed_tube_basis(t, k), t),
                                     conj_transpose(column_basis<double>(n2, n3, j, k), t), t);
          MatrixC<double> unit = MatrixC<double>::Zero(n1, n2 * n3);
          unit(i, k * n2 + j) = 1;
          EXPECT_LE(oracle::max_abs_diff(e, Tensor3d(n1, n2, n3, unit)), 1e-12) << t.label() << " " << i << j << k;
        }
}

TEST(Basis, UnitTensorDecompositionHoldsWhereTransformColumnHasZeros) {
  // DCT-II with n3 = 3 has Phi(1, 1) = cos(pi/2) = 0; the tube entry there is 0,
  // and it is multiplied by that same zero, so the decomposition stays exact
  const auto t = make_dct_orthonormal<double>(3);
  ASSERT_NEAR(std::abs(t.matrix()(1, 1)), 0.0, 1e-15);
  const auto snapped = [&] {
    MatrixC<double> m = t.matrix();
    m(1, 1) = 0;
    return UnitaryTransform<double>(m, TransformKind::dct);
  }();
  EXPECT_EQ(apply(snapped, transformed_tube_basis(snapped, 1))(0, 0, 1), Complex<double>(0));
  const auto e = phi_product(phi_product(column_basis<double>(2, 3, 0, 1), transformed_tube_basis(snapped, 1), snapped),
                             conj_transpose(column_basis<double>(2, 3, 1, 1), snapped), snapped);
  MatrixC<double> unit = MatrixC<double>::Zero(2, 6);
  unit(0, 1 * 2 + 1) = 1;
  EXPECT_LE(oracle::max_abs_diff(e, Tensor3d(2, 2, 3, unit)), 1e-12);
}

TEST(Projections, SumToIdentityAndIdempotent) {
  std::mt19937_64 rng(48);
  for (const auto& t : transforms_for(3, rng)) {
    const auto x = gen_synthetic(5, 4, 3, MultiRank{{2, 1, 1}}, make_dct_orthonormal<double>(3), 3);
    const auto f = t_svd(x, t);
    const auto z = oracle::random_tensor(5, 4, 3, rng);
    const auto pt = project_T(z, f);
    EXPECT_LE(oracle::max_abs_diff(pt + project_T_perp(z, f), z), 1e-12);
    EXPECT_LE(oracle::max_abs_diff(project_T(pt, f), pt), 1e-10);
    EXPECT_LE(frobenius_norm(project_T_perp(pt, f)), 1e-10);
  }
}

TEST(Projections, MatchPhiProductFormulaForFullWidthFactors) {
  std::mt19937_64 rng(49);
  const auto t = make_fft_unitary<double>(3);
  const auto x = gen_synthetic(5, 4, 3, MultiRank{{2, 2, 2}}, t, 4);
  const auto f = t_svd(x, t);
  const auto u = f.u(), v = f.v();
  const auto uu = phi_product(u, conj_transpose(u, t), t);
  const auto vv = phi_product(v, conj_transpose(v, t), t);
  const auto z = oracle::random_tensor(5, 4, 3, rng);
  const auto uz = phi_product(uu, z, t);
  const auto expected = uz + phi_product(z, vv, t) - phi_product(uz, vv, t);
  EXPECT_LE(oracle::max_abs_diff(project_T(z, f), expected), 1e-12);
  const auto perp = phi_product(phi_product(identity_tensor(5, t) - uu, z, t), identity_tensor(4, t) - vv, t);
  EXPECT_LE(oracle::max_abs_diff(project_T_perp(z, f), perp), 1e-12);
}

TEST(Projections, TensorInTangentSpaceHasZeroComplement) {
  const auto t = make_fft_unitary<double>(4);
  const auto x = gen_synthetic(6, 6, 4, MultiRank{{2, 1, 2, 0}}, t, 8);
  EXPECT_LE(frobenius_norm(project_T_perp(x, t_svd(x, t))), 1e-10 * frobenius_norm(x));
}

TEST(Projections, RejectShapeMismatch) {
  const auto t = make_fft_unitary<double>(2);
  const auto f = t_svd(identity_tensor(2, t), t);
  EXPECT_THROW(project_T(Tensor3d(3, 2, 2), f), DimensionError);
  EXPECT_THROW(project_T_perp(Tensor3d(2, 3, 2), f), DimensionError);
}

TEST(Incoherence, MaximallyCoherentFactors) {
  // transformed slices are the leading identity columns: row 0 of every slice is a unit vector
  const Index n1 = 6, n3 = 4;
  const auto t = make_fft_unitary<double>(n3);
  MultiRank r{{2, 1, 3, 1}};
  std::vector<MatrixC<double>> slices;
  for (Index k = 0; k < n3; ++k) {
    MatrixC<double> s = MatrixC<double>::Zero(n1, n1);
    for (Index c = 0; c < r.ranks[k]; ++c) s(c, c) = double(4 - c);
    slices.push_back(s);
  }
  const auto z = apply_inverse(t, Tensor3d::from_slices(slices));
  const auto f = t_svd(z, t);
  EXPECT_NEAR(incoherence_mu(f), double(n1 * n3) / double(r.sum()), 1e-10);
}

TEST(Incoherence, MatchesDirectPhiProductEvaluation) {
  const Index n1 = 5, n2 = 4, n3 = 3;
  const auto t = make_dct_orthonormal<double>(n3);
  const auto f = t_svd(gen_synthetic(n1, n2, n3, MultiRank{{2, 1, 2}}, t, 6), t);
  const double sum_r = double(f.multi_rank().sum());
  const auto u = f.u(), v = f.v();
  double worst = 0;
  for (Index k = 0; k < n3; ++k) {
    for (Index i = 0; i < n1; ++i) {
      const double nrm = frobenius_norm(phi_product(conj_transpose(u, t), column_basis<double>(n1, n3, i, k), t));
      worst = std::max(worst, nrm * nrm * double(n1 * n3) / sum_r);
    }
    for (Index j = 0; j < n2; ++j) {
      const double nrm = frobenius_norm(phi_product(conj_transpose(v, t), column_basis<double>(n2, n3, j, k), t));
      worst = std::max(worst, nrm * nrm * double(n2 * n3) / sum_r);
    }
  }
  // slice 1 has rank 1 < tubal rank 2: its padding column must not count, so mu is at most the direct value
  EXPECT_LE(incoherence_mu(f), worst + 1e-12);
  EXPECT_GT(incoherence_mu(f), 0.0);
}

TEST(Incoherence, GaussianInstancesAreIncoherent) {
  const Index n = 40, n3 = 10;
  const auto t = make_fft_unitary<double>(n3);
  const auto profile = spread_ranks(20, 3, n3, n);
  const auto f = t_svd(gen_synthetic(n, n, n3, profile, t, 7), t);
  const double mu = incoherence_mu(f);
  EXPECT_GT(mu, 0.0);
  EXPECT_LT(mu, 0.25 * double(n * n3) / double(profile.sum()));
  EXPECT_GE(incoherence_mu_normalized(f), 1.0);
}

TEST(Incoherence, RejectsRankZero) {
  const auto t = make_fft_unitary<double>(2);
  EXPECT_THROW(incoherence_mu(t_svd(Tensor3d(2, 2, 2), t)), ValueError);
}

TEST(TruncatedMultiRank, FullMassIsExactMultiRank) {
  std::mt19937_64 rng(50);
  const auto t = make_fft_unitary<double>(4);
  const auto a = oracle::random_tensor(4, 3, 4, rng);
  EXPECT_EQ(truncated_multirank(a, t, 1.0), multi_rank(a, t, 0.0));
}

TEST(TruncatedMultiRank, DominantSingularValue) {
  const auto t = make_dct_orthonormal<double>(3);
  std::vector<MatrixC<double>> s(3, MatrixC<double>::Zero(3, 3));
  s[1](0, 0) = 100;
  s[0](0, 0) = 1;
  s[2](1, 1) = 0.5;
  const auto a = apply_inverse(t, Tensor3d::from_slices(s));
  EXPECT_EQ(truncated_multirank(a, t, 0.9), (MultiRank{{0, 1, 0}}));
}

TEST(TruncatedMultiRank, MonotoneInEnergyFraction) {
  const auto t = make_fft_unitary<double>(6);
  const auto a = gen_synthetic(10, 10, 6, MultiRank{{4, 3, 3, 2, 2, 1}}, t, 10);
  Index prev = 0;
  for (double v : {0.5, 0.7, 0.8, 0.9, 0.95, 1.0}) {
    const Index s = truncated_multirank(a, t, v).sum();
    EXPECT_GE(s, prev);
    prev = s;
  }
  EXPECT_LE(truncated_multirank(a, t, 0.7).sum(), truncated_multirank(a, t, 0.95).sum());
}

TEST(TruncatedMultiRank, AscendingVariantKeepsMoreValues) {
  const auto t = make_fft_unitary<double>(6);
  const auto a = gen_synthetic(10, 10, 6, MultiRank{{4, 3, 3, 2, 2, 1}}, t, 10);
  // accumulating from the small end reaches the threshold at a large value, so fewer survive
  EXPECT_LE(truncated_multirank(a, t, 0.9, CumulativeOrder::ascending).sum(), truncated_multirank(a, t, 0.9).sum());
}

TEST(TruncatedMultiRank, ValidatesFraction) {
  const auto t = make_fft_unitary<double>(2);
  EXPECT_THROW(truncated_multirank(Tensor3d(2, 2, 2), t, 0.0), ValueError);
  EXPECT_THROW(truncated_multirank(Tensor3d(2, 2, 2), t, 1.5), ValueError);
  EXPECT_EQ(truncated_multirank(Tensor3d(2, 2, 2), t, 0.5), (MultiRank{{0, 0}}));
}

TEST(Incoherence, TangentSpaceBoundHoldsForEveryUnitTensor) {
  const Index n = 8, n3 = 4;
  const auto t = make_fft_unitary<double>(n3);
  const auto f = t_svd(gen_synthetic(n, n, n3, MultiRank{{2, 1, 1, 2}}, t, 77), t);
  const double mu = incoherence_mu(f);
  const double bound = 2 * mu * double(f.multi_rank().sum()) / double(n * n3);
  for (Index k = 0; k < n3; ++k) {
    const auto tube = transformed_tube_basis(t, k);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        const auto e = phi_product(phi_product(column_basis<double>(n, n3, i, k), tube, t),
                                   conj_transpose(column_basis<double>(n, n3, j, k), t), t);
        const double v = frobenius_norm(project_T(e, f));
        EXPECT_LE(v * v, bound * (1 + 1e-12));
      }
  }
}
