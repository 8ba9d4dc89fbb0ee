#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ttc/completion.hpp"
#include "ttc/tensor3.hpp"
#include "ttc/transform.hpp"
#include "ttc/tsvd.hpp"

namespace ttc {

/// Recovery counts as exact when the relative error is at most this.
inline constexpr double kSuccessRel = 1e-2;

/// Deterministic 64-bit seed derived from a base seed and a sequence of tags
/// (splitmix64 chaining).
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags);

/// Z = A * B under t with transformed slices A_i = randn(n1, r_i) and
/// B_i = randn(n2, r_i)^T, so transformed slice i has rank r_i almost surely.
/// Gaussians are real and placed in the transformed domain; under FFT the
/// spatial tensor is complex.
Tensor3d gen_synthetic(Index n1, Index n2, Index n3, const MultiRank& ranks, const UnitaryTransform<double>& t,
                       std::uint64_t seed);

/// Exactly m distinct entries, uniform over all size-m subsets.
SampleSet sample_uniform(Dims dims, Index m, std::uint64_t seed);

/// Every entry independently with probability rho.
SampleSet sample_bernoulli(Dims dims, double rho, std::uint64_t seed);

enum class BoundKind { multirank, tubal };

/// Sample-size curve c * sum(r) * n * log(n^2) (multirank) or
/// c * r * n^2 * log(n^2) (tubal), natural log.
struct BoundSpec {
  double constant = 1.0;
  BoundKind kind = BoundKind::multirank;
  /// sum of the multi-rank for `multirank`, tubal rank for `tubal`
  double rank = 0;
  double n = 0;
};

std::uint64_t bound_samples(const BoundSpec& spec);

/// ||est - ref||_F / ||ref||_F
double rel_error(const Tensor3d& est, const Tensor3d& ref);

/// 10 log10(n1 n2 n3 (max - min)^2 / ||est - ref||_F^2), max and min taken over
/// the real parts of ref. Returns +infinity when est == ref.
double psnr(const Tensor3d& est, const Tensor3d& ref);

/// Mean over frontal slices of the global-statistics SSIM of the real parts,
/// with c1 = (0.01 L)^2, c2 = (0.03 L)^2 and L the dynamic range of ref.
double ssim(const Tensor3d& est, const Tensor3d& ref);

/// Multi-rank profile with the given sum over n3 slices: one slice holds
/// exactly `tubal`, the remainder is spread as evenly as the cap allows.
MultiRank spread_ranks(Index sum_rank, Index tubal, Index n3, Index max_rank);

struct ExperimentRecord {
  Index n1 = 0, n2 = 0, n3 = 0;
  std::string transform;
  Index sum_rank = 0;
  Index tubal_rank = 0;
  double constant = 0;
  Index m = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double rel = 0;
  double psnr = 0;
  double ssim = 0;
  int iterations = 0;
  double eta = 0;
  double seconds = 0;
  bool success = false;
};

struct PhaseConfig {
  std::vector<Index> n_list;
  Index sum_rank = 0;
  Index tubal = 0;
  std::vector<TransformKind> transforms{TransformKind::fft};
  std::vector<double> const_list{1.0};
  int trials = 5;
  std::uint64_t seed = 0;
  SolverConfig solver{};
};

/// One completion trial on an n x n x n synthetic instance with m uniform samples.
ExperimentRecord run_trial(Index n, const MultiRank& profile, TransformKind kind, double constant, Index m, int trial,
                           std::uint64_t seed, const SolverConfig& solver);

/// For every (n, transform, constant): m = bound_samples(constant, multirank)
/// clamped to n^3, then `trials` independent solves on fresh instances.
std::vector<ExperimentRecord> run_phase_experiment(const PhaseConfig& cfg);

/// True when every record of the group succeeded.
bool all_succeeded(const std::vector<ExperimentRecord>& records);

}  // namespace ttc
