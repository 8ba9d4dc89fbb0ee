#include "ttc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace ttc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Index total_entries(const Dims& d) {
  if (d[0] < 1 || d[1] < 1 || d[2] < 1) throw DimensionError("sampling: dims must be >= 1, got " + dims_string(d));
  return d[0] * d[1] * d[2];
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t s = splitmix64(base);
  for (std::uint64_t t : tags) s = splitmix64(s ^ splitmix64(t + 0x632BE59BD9B4E019ULL));
  return s;
}

Tensor3d gen_synthetic(Index n1, Index n2, Index n3, const MultiRank& ranks, const UnitaryTransform<double>& t,
                       std::uint64_t seed) {
  if (ranks.size() != n3)
    throw DimensionError("gen_synthetic: rank profile has " + std::to_string(ranks.size()) + " entries, n3 = " +
                         std::to_string(n3));
  if (t.n3() != n3) throw DimensionError("gen_synthetic: transform size does not match n3");
  const Index cap = std::min(n1, n2);
  for (Index r : ranks.ranks)
    if (r < 0 || r > cap)
      throw ValueError("gen_synthetic: slice rank " + std::to_string(r) + " outside [0, " + std::to_string(cap) + "]");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  auto randn = [&](Index rows, Index cols) {
    MatrixR<double> m(rows, cols);
    for (Index c = 0; c < cols; ++c)
      for (Index r = 0; r < rows; ++r) m(r, c) = normal(rng);
    return m;
  };
  std::vector<MatrixC<double>> hat;
  hat.reserve(static_cast<std::size_t>(n3));
  for (Index r : ranks.ranks) {
    const MatrixR<double> a = randn(n1, r);
    const MatrixR<double> b = randn(n2, r);
    hat.push_back((a * b.transpose()).cast<Complex<double>>());
  }
  return apply_inverse(t, Tensor3d::from_slices(hat));
}

SampleSet sample_uniform(Dims dims, Index m, std::uint64_t seed) {
  const Index total = total_entries(dims);
  if (m < 0 || m > total)
    throw ValueError("sample_uniform: m = " + std::to_string(m) + " outside [0, " + std::to_string(total) + "]");
  // selection sampling: keep index l with probability (still needed) / (still available)
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Index> picked;
  picked.reserve(static_cast<std::size_t>(m));
  for (Index l = 0; l < total && static_cast<Index>(picked.size()) < m; ++l) {
    const Index need = m - static_cast<Index>(picked.size());
    if (double(total - l) * unif(rng) < double(need)) picked.push_back(l);
  }
  return SampleSet(dims, std::move(picked), seed);
}

SampleSet sample_bernoulli(Dims dims, double rho, std::uint64_t seed) {
  const Index total = total_entries(dims);
  if (!(rho >= 0 && rho <= 1)) throw ValueError("sample_bernoulli: rho must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Index> picked;
  for (Index l = 0; l < total; ++l)
    if (unif(rng) < rho) picked.push_back(l);
  return SampleSet(dims, std::move(picked), seed);
}

std::uint64_t bound_samples(const BoundSpec& spec) {
  if (!(spec.constant > 0)) throw ValueError("bound_samples: constant must be > 0");
  if (spec.rank < 0 || spec.n < 1) throw ValueError("bound_samples: need rank >= 0 and n >= 1");
  const double log_term = std::log(spec.n * spec.n);
  const double size = spec.kind == BoundKind::multirank ? spec.n : spec.n * spec.n;
  return static_cast<std::uint64_t>(std::ceil(spec.constant * spec.rank * size * log_term));
}

double rel_error(const Tensor3d& est, const Tensor3d& ref) {
  Tensor3d::require_same(est, ref, "rel_error");
  const double denom = frobenius_norm(ref);
  if (!(denom > 0)) throw ValueError("rel_error: reference tensor is zero");
  return frobenius_norm(est - ref) / denom;
}

double psnr(const Tensor3d& est, const Tensor3d& ref) {
  Tensor3d::require_same(est, ref, "psnr");
  const auto re = ref.slices().real();
  const double range = re.maxCoeff() - re.minCoeff();
  if (!(range > 0)) throw ValueError("psnr: reference tensor is constant");
  const double err2 = (est.slices() - ref.slices()).squaredNorm();
  if (err2 == 0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(double(ref.size()) * range * range / err2);
}

double ssim(const Tensor3d& est, const Tensor3d& ref) {
  Tensor3d::require_same(est, ref, "ssim");
  const auto re = ref.slices().real();
  double range = re.maxCoeff() - re.minCoeff();
  if (!(range > 0)) range = 1.0;
  const double c1 = (0.01 * range) * (0.01 * range);
  const double c2 = (0.03 * range) * (0.03 * range);
  double total = 0;
  for (Index k = 0; k < ref.n3(); ++k) {
    const Eigen::MatrixXd xs = ref.slice(k).real(), ys = est.slice(k).real();
    const Eigen::ArrayXd x = xs.reshaped(), y = ys.reshaped();
    const double n = double(x.size());
    const double mx = x.mean(), my = y.mean();
    const double vx = (x - mx).square().sum() / n;
    const double vy = (y - my).square().sum() / n;
    const double cxy = ((x - mx) * (y - my)).sum() / n;
    total += ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
  }
  return total / double(ref.n3());
}

MultiRank spread_ranks(Index sum_rank, Index tubal, Index n3, Index max_rank) {
  if (n3 < 1) throw ValueError("spread_ranks: n3 must be >= 1");
  MultiRank m;
  m.ranks.assign(static_cast<std::size_t>(n3), 0);
  if (sum_rank == 0) return m;
  if (sum_rank < 0 || tubal < 1 || tubal > sum_rank || tubal > max_rank || sum_rank > tubal * n3 ||
      (n3 == 1 && sum_rank != tubal))
    throw ValueError("spread_ranks: no profile of " + std::to_string(n3) + " slices sums to " +
                     std::to_string(sum_rank) + " with tubal rank " + std::to_string(tubal) + " (slice cap " +
                     std::to_string(max_rank) + ")");
  m.ranks[0] = tubal;
  if (n3 > 1) {
    const Index rest = sum_rank - tubal;
    const Index base = rest / (n3 - 1), extra = rest % (n3 - 1);
    for (Index k = 1; k < n3; ++k) m.ranks[static_cast<std::size_t>(k)] = base + (k - 1 < extra ? 1 : 0);
  }
  return m;
}

ExperimentRecord run_trial(Index n, const MultiRank& profile, TransformKind kind, double constant, Index m, int trial,
                           std::uint64_t seed, const SolverConfig& solver) {
  const Dims dims{n, n, n};
  const Index total = n * n * n;
  m = std::clamp<Index>(m, 0, total);

  Tensor3d truth(n, n, n);
  auto solve_transform = UnitaryTransform<double>::identity(n);
  switch (kind) {
    case TransformKind::fft:
      solve_transform = make_fft_unitary<double>(n);
      truth = gen_synthetic(n, n, n, profile, solve_transform, derive_seed(seed, {1}));
      break;
    case TransformKind::dct:
      solve_transform = make_dct_orthonormal<double>(n);
      truth = gen_synthetic(n, n, n, profile, solve_transform, derive_seed(seed, {1}));
      break;
    case TransformKind::data:
      // instance drawn under DCT; the solver uses the data-driven transform of the ground truth
      truth = gen_synthetic(n, n, n, profile, make_dct_orthonormal<double>(n), derive_seed(seed, {1}));
      solve_transform = make_data_driven(truth);
      break;
    case TransformKind::custom:
      throw ValueError("run_trial: phase experiments support fft, dct and data transforms");
  }
  const SampleSet omega = sample_uniform(dims, m, derive_seed(seed, {2}));
  const auto report = admm_complete(project_omega(truth, omega), omega, solve_transform, solver);

  ExperimentRecord rec;
  rec.n1 = rec.n2 = rec.n3 = n;
  rec.transform = std::string(to_string(kind));
  rec.sum_rank = profile.sum();
  rec.tubal_rank = profile.max();
  rec.constant = constant;
  rec.m = m;
  rec.trial = trial;
  rec.seed = seed;
  rec.rel = rel_error(report.z, truth);
  rec.psnr = psnr(report.z, truth);
  rec.ssim = ssim(report.z, truth);
  rec.iterations = report.iterations;
  rec.eta = report.final_eta();
  rec.seconds = report.wall_seconds;
  rec.success = rec.rel <= kSuccessRel;
  return rec;
}

std::vector<ExperimentRecord> run_phase_experiment(const PhaseConfig& cfg) {
  if (cfg.trials < 1) throw ValueError("run_phase_experiment: trials must be >= 1");
  if (cfg.n_list.empty() || cfg.transforms.empty() || cfg.const_list.empty())
    throw ValueError("run_phase_experiment: n list, transforms and constants must be nonempty");
  if (cfg.sum_rank < 1) throw ValueError("run_phase_experiment: sum of ranks must be >= 1");
  cfg.solver.validate();
  std::vector<ExperimentRecord> out;
  for (Index n : cfg.n_list) {
    if (n < 1) throw ValueError("run_phase_experiment: n must be >= 1");
    const MultiRank profile = spread_ranks(cfg.sum_rank, cfg.tubal, n, n);
    for (std::size_t ti = 0; ti < cfg.transforms.size(); ++ti) {
      for (std::size_t ci = 0; ci < cfg.const_list.size(); ++ci) {
        const double c = cfg.const_list[ci];
        const auto bound = bound_samples({c, BoundKind::multirank, double(cfg.sum_rank), double(n)});
        const Index m = static_cast<Index>(std::min<std::uint64_t>(bound, std::uint64_t(n * n * n)));
        for (int trial = 0; trial < cfg.trials; ++trial) {
          const std::uint64_t seed =
              derive_seed(cfg.seed, {std::uint64_t(n), std::uint64_t(cfg.transforms[ti]), ci, std::uint64_t(trial)});
          out.push_back(run_trial(n, profile, cfg.transforms[ti], c, m, trial, seed, cfg.solver));
        }
      }
    }
  }
  return out;
}

bool all_succeeded(const std::vector<ExperimentRecord>& records) {
  return std::all_of(records.begin(), records.end(), [](const ExperimentRecord& r) { return r.success; });
}

}  // namespace ttc
