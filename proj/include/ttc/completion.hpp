#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "ttc/tensor3.hpp"
#include "ttc/transform.hpp"
#include "ttc/tsvd.hpp"

namespace ttc {

using Triple = std::array<Index, 3>;

/// Observation index set Omega over an n1 x n2 x n3 grid.
///
/// Indices are kept as sorted linear offsets i + n1*j + n1*n2*k, the storage
/// order of Tensor3.
class SampleSet {
public:
  SampleSet(Dims dims, std::vector<Index> linear, std::uint64_t seed = 0) : dims_(dims), seed_(seed) {
    if (dims_[0] < 1 || dims_[1] < 1 || dims_[2] < 1) throw DimensionError("SampleSet: dims must be >= 1");
    const Index total = dims_[0] * dims_[1] * dims_[2];
    std::sort(linear.begin(), linear.end());
    if (std::adjacent_find(linear.begin(), linear.end()) != linear.end())
      throw ValueError("SampleSet: duplicate index");
    if (!linear.empty() && (linear.front() < 0 || linear.back() >= total))
      throw ValueError("SampleSet: index out of range for " + dims_string(dims_));
    linear_ = std::move(linear);
  }

  static SampleSet from_triples(Dims dims, const std::vector<Triple>& triples, std::uint64_t seed = 0) {
    std::vector<Index> linear;
    linear.reserve(triples.size());
    for (const auto& [i, j, k] : triples) {
      if (i < 0 || j < 0 || k < 0 || i >= dims[0] || j >= dims[1] || k >= dims[2])
        throw ValueError("SampleSet: triple (" + std::to_string(i) + "," + std::to_string(j) + "," +
                         std::to_string(k) + ") out of range for " + dims_string(dims));
      linear.push_back(i + dims[0] * (j + dims[1] * k));
    }
    return SampleSet(dims, std::move(linear), seed);
  }

  static SampleSet full(Dims dims) {
    std::vector<Index> linear(static_cast<std::size_t>(dims[0] * dims[1] * dims[2]));
    std::iota(linear.begin(), linear.end(), Index{0});
    return SampleSet(dims, std::move(linear));
  }

  Dims dims() const { return dims_; }
  Index m() const { return static_cast<Index>(linear_.size()); }
  double rho() const { return double(m()) / double(dims_[0] * dims_[1] * dims_[2]); }
  std::uint64_t seed() const { return seed_; }
  const std::vector<Index>& linear() const { return linear_; }

  std::vector<Triple> triples() const {
    std::vector<Triple> out;
    out.reserve(linear_.size());
    for (Index l : linear_) out.push_back({l % dims_[0], (l / dims_[0]) % dims_[1], l / (dims_[0] * dims_[1])});
    return out;
  }

private:
  Dims dims_;
  std::vector<Index> linear_;
  std::uint64_t seed_;
};

/// ADMM parameters: penalty beta, dual step gamma, stopping threshold on the
/// KKT residual, iteration cap.
struct SolverConfig {
  double beta = 0.05;
  double gamma = 1.618;
  double tol = 1e-3;
  int max_iter = 600;

  static constexpr double kGammaMax = 1.6180339887498949;  // (1 + sqrt 5) / 2

  void validate() const {
    if (!(beta > 0) || !std::isfinite(beta)) throw ValueError("SolverConfig: beta must be > 0");
    if (!(gamma > 0 && gamma < kGammaMax))
      throw ValueError("SolverConfig: gamma must lie in (0, (1+sqrt(5))/2), got " + std::to_string(gamma));
    if (!(tol > 0) || !std::isfinite(tol)) throw ValueError("SolverConfig: tol must be > 0");
    if (max_iter < 1) throw ValueError("SolverConfig: max_iter must be >= 1");
  }
};

struct KktResidual {
  double eta_x = 0;
  double eta_y = 0;
  double eta = 0;
};

template <typename Real>
struct SolveReport {
  Tensor3<Real> z;
  // final primal copy and multiplier, so the stopping residual can be re-derived
  Tensor3<Real> y;
  Tensor3<Real> x;
  int iterations = 0;
  std::vector<KktResidual> history;
  bool converged = false;
  double wall_seconds = 0;

  double final_eta() const { return history.empty() ? 0.0 : history.back().eta; }
};

namespace detail {
template <typename Real>
void require_sample_dims(const Tensor3<Real>& z, const SampleSet& s, const char* what) {
  if (z.dims() != s.dims())
    throw DimensionError(std::string(what) + ": tensor is " + dims_string(z.dims()) + ", sample set is for " +
                         dims_string(s.dims()));
}

// Copies observed[Omega] over base.
template <typename Real>
Tensor3<Real> overwrite_observed(const Tensor3<Real>& base, const Tensor3<Real>& observed, const SampleSet& s) {
  MatrixC<Real> out = base.slices();
  const auto& src = observed.slices();
  for (Index l : s.linear()) out.data()[l] = src.data()[l];
  return Tensor3<Real>(base.n1(), base.n2(), base.n3(), std::move(out));
}
}  // namespace detail

/// Keeps the entries in Omega, zeroes the rest.
template <typename Real>
Tensor3<Real> project_omega(const Tensor3<Real>& z, const SampleSet& s) {
  detail::require_sample_dims(z, s, "project_omega");
  return detail::overwrite_observed(Tensor3<Real>(z.n1(), z.n2(), z.n3()), z, s);
}

/// eta_x = ||Z - Prox_TTNN(X + Z)||_F / (1 + ||Z||_F + ||X||_F),
/// eta_y = ||Z - Y||_F / (1 + ||Z||_F + ||Y||_F), eta = max of the two.
template <typename Real>
KktResidual kkt_residual(const Tensor3<Real>& z, const Tensor3<Real>& y, const Tensor3<Real>& x,
                         const UnitaryTransform<Real>& t) {
  Tensor3<Real>::require_same(z, y, "kkt_residual");
  Tensor3<Real>::require_same(z, x, "kkt_residual");
  const Real nz = frobenius_norm(z);
  const Real nx = frobenius_norm(x);
  const Real ny = frobenius_norm(y);
  KktResidual r;
  r.eta_x = frobenius_norm(z - svt_prox(x + z, t, Real(1))) / (1 + nz + nx);
  r.eta_y = frobenius_norm(z - y) / (1 + nz + ny);
  r.eta = std::max(r.eta_x, r.eta_y);
  return r;
}

/// TTNN-minimizing completion of the entries of m_obs on Omega by ADMM.
///
/// Starts from Y = P_Omega(M), X = 0 and repeats
///   Z <- svt_prox(Y + X / beta, 1 / beta)
///   Y <- P_Omega^c(Z - X / beta) + P_Omega(M)
///   X <- X - gamma * beta * (Z - Y)
/// until the KKT residual drops to cfg.tol or cfg.max_iter iterations ran.
/// Entries of m_obs outside Omega are ignored.
template <typename Real>
SolveReport<Real> admm_complete(const Tensor3<Real>& m_obs, const SampleSet& s, const UnitaryTransform<Real>& t,
                                const SolverConfig& cfg) {
  cfg.validate();
  detail::require_sample_dims(m_obs, s, "admm_complete");
  detail::require_n3(t, m_obs, "admm_complete");
  const auto start = std::chrono::steady_clock::now();

  const Tensor3<Real> observed = project_omega(m_obs, s);
  const Real beta = Real(cfg.beta);
  const Complex<Real> inv_beta(Real(1) / beta);
  const Complex<Real> dual_step(Real(cfg.gamma) * beta);

  Tensor3<Real> y = observed;
  Tensor3<Real> x(m_obs.n1(), m_obs.n2(), m_obs.n3());
  Tensor3<Real> z = y;

  SolveReport<Real> report{z, y, x, 0, {}, false, 0.0};
  report.history.reserve(static_cast<std::size_t>(cfg.max_iter));
  for (int it = 0; it < cfg.max_iter; ++it) {
    z = svt_prox(y + inv_beta * x, t, Real(1) / beta);
    y = detail::overwrite_observed(z - inv_beta * x, observed, s);
    x = x - dual_step * (z - y);
    const KktResidual r = kkt_residual(z, y, x, t);
    report.history.push_back(r);
    report.iterations = it + 1;
    if (r.eta <= cfg.tol) {
      report.converged = true;
      break;
    }
  }

  if (m_obs.is_real() && t.kind() == TransformKind::fft) {
    const Real imag = z.slices().imag().norm();
    if (imag > Real(1e-8) * frobenius_norm(z))
      throw ValueError("admm_complete: real input produced a complex estimate under FFT (imaginary norm " +
                       std::to_string(imag) + ")");
    z = Tensor3<Real>::from_real(z.n1(), z.n2(), z.n3(), z.slices().real());
  }
  report.z = std::move(z);
  report.y = std::move(y);
  report.x = std::move(x);
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace ttc
