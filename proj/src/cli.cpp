#include "ttc/cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ttc/completion.hpp"
#include "ttc/experiment.hpp"
#include "ttc/io.hpp"
#include "ttc/tsvd.hpp"

namespace ttc::cli {

namespace {

Dims to_dims(const std::vector<Index>& v) {
  if (v.size() != 3) throw ValueError("--dims needs three values n1,n2,n3");
  return {v[0], v[1], v[2]};
}

std::optional<TransformKind> parse_kind(const std::string& name) {
  if (name == "fft") return TransformKind::fft;
  if (name == "dct") return TransformKind::dct;
  if (name == "data") return TransformKind::data;
  return std::nullopt;
}

// fft | dct | file:PATH; `data` is resolved by the caller.
UnitaryTransform<double> fixed_transform(const std::string& spec, Index n3) {
  if (spec == "fft") return make_fft_unitary<double>(n3);
  if (spec == "dct") return make_dct_orthonormal<double>(n3);
  if (spec.rfind("file:", 0) == 0) {
    auto t = io::read_transform(spec.substr(5));
    if (t.n3() != n3)
      throw DimensionError("transform file is " + std::to_string(t.n3()) + "-point, tensor has n3 = " +
                           std::to_string(n3));
    return t;
  }
  throw ValueError("unknown transform '" + spec + "' (expected fft, dct, data or file:PATH)");
}

void add_transform_option(CLI::App* cmd, std::string& spec) {
  cmd->add_option("--transform", spec, "fft, dct, data or file:PATH")->capture_default_str();
}

void add_solver_options(CLI::App* cmd, SolverConfig& cfg) {
  cmd->add_option("--beta", cfg.beta, "ADMM penalty")->capture_default_str();
  cmd->add_option("--gamma", cfg.gamma, "dual step length in (0, (1+sqrt 5)/2)")->capture_default_str();
  cmd->add_option("--tol", cfg.tol, "stop when the KKT residual drops to this")->capture_default_str();
  cmd->add_option("--max-iter", cfg.max_iter, "iteration cap")->capture_default_str();
}

std::string join(const std::vector<Index>& v) {
  std::ostringstream s;
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
  return s.str();
}

struct GenArgs {
  std::vector<Index> dims;
  std::vector<Index> ranks;
  Index sum_rank = -1;
  Index tubal = -1;
  std::string transform = "fft";
  std::uint64_t seed = 0;
  std::string out;
};

int run_gen(const GenArgs& a, std::ostream& out) {
  const Dims d = to_dims(a.dims);
  MultiRank profile;
  if (!a.ranks.empty()) profile.ranks = a.ranks;
  else if (a.sum_rank >= 0 && a.tubal >= 0) profile = spread_ranks(a.sum_rank, a.tubal, d[2], std::min(d[0], d[1]));
  else throw ValueError("gen: give --ranks or both --sum-rank and --tubal");
  if (a.transform == "data") throw ValueError("gen: the data transform is derived from a tensor; use fft, dct or file:PATH");
  const auto t = fixed_transform(a.transform, d[2]);
  const Tensor3d z = gen_synthetic(d[0], d[1], d[2], profile, t, a.seed);
  io::write_tensor(a.out, z);
  out << "wrote " << dims_string(d) << " multi_rank=" << join(profile.ranks) << " to " << a.out << '\n';
  return kOk;
}

struct SampleArgs {
  std::vector<Index> dims;
  Index m = -1;
  double rho = -1;
  std::uint64_t seed = 0;
  std::string out;
};

int run_sample(const SampleArgs& a, std::ostream& out) {
  const Dims d = to_dims(a.dims);
  const SampleSet s = a.m >= 0 ? sample_uniform(d, a.m, a.seed) : sample_bernoulli(d, a.rho, a.seed);
  if (a.out.empty()) io::write_mask(out, s);
  else io::write_mask(std::filesystem::path(a.out), s);
  return kOk;
}

struct CompleteArgs {
  std::string input, mask, output, truth, data_from;
  std::string transform = "fft";
  SolverConfig cfg;
  std::uint64_t seed = 0;
};

int run_complete(const CompleteArgs& a, std::ostream& out) {
  a.cfg.validate();
  const Tensor3d obs = io::read_tensor(a.input);
  const SampleSet omega = io::read_mask(a.mask, obs.dims());
  std::optional<Tensor3d> truth;
  if (!a.truth.empty()) {
    truth = io::read_tensor(a.truth);
    Tensor3d::require_same(*truth, obs, "complete --truth");
  }

  auto solve = [&](const UnitaryTransform<double>& t) { return admm_complete(obs, omega, t, a.cfg); };
  std::optional<SolveReport<double>> report;
  if (a.transform == "data") {
    Tensor3d source = obs;
    if (!a.data_from.empty()) {
      source = io::read_tensor(a.data_from);
      Tensor3d::require_same(source, obs, "complete --data-from");
    } else if (omega.m() < obs.size()) {
      // pre-completion under DCT supplies the estimate the transform is built from
      source = solve(make_dct_orthonormal<double>(obs.n3())).z;
    }
    report = solve(make_data_driven(source));
  } else {
    report = solve(fixed_transform(a.transform, obs.n3()));
  }

  io::write_tensor(a.output, report->z);
  out << std::setprecision(17);
  out << "iterations=" << report->iterations << '\n'
      << "eta=" << report->final_eta() << '\n'
      << "converged=" << (report->converged ? 1 : 0) << '\n'
      << "seconds=" << report->wall_seconds << '\n';
  if (truth) out << "rel=" << rel_error(report->z, *truth) << '\n';
  return kOk;
}

struct TsvdArgs {
  std::string input;
  std::string transform = "fft";
  double tol = kDefaultRankTol;
  std::optional<double> trunc;
  bool ascending = false;
};

int run_tsvd(const TsvdArgs& a, std::ostream& out) {
  const Tensor3d z = io::read_tensor(a.input);
  const auto t = a.transform == "data" ? make_data_driven(z) : fixed_transform(a.transform, z.n3());
  const auto f = t_svd(z, t, a.tol);
  const MultiRank r = f.multi_rank();
  out << std::setprecision(17);
  out << "transform=" << t.label() << '\n'
      << "multi_rank=" << join(r.ranks) << '\n'
      << "sum_rank=" << r.sum() << '\n'
      << "tubal_rank=" << r.max() << '\n'
      << "ttnn=" << ttnn(z, t) << '\n'
      << "spectral_norm=" << spectral_norm(z, t) << '\n';
  if (r.sum() > 0) {
    const double mu = incoherence_mu(f);
    out << "mu_raw=" << mu << '\n' << "mu=" << std::max(mu, 1.0) << '\n';
  }
  if (a.trunc) {
    const auto order = a.ascending ? CumulativeOrder::ascending : CumulativeOrder::descending;
    const MultiRank tr = truncated_multirank(z, t, *a.trunc, order);
    out << "trunc_multi_rank=" << join(tr.ranks) << '\n'
        << "trunc_sum_rank=" << tr.sum() << '\n'
        << "trunc_tubal_rank=" << tr.max() << '\n';
  }
  return kOk;
}

struct PhaseArgs {
  std::vector<Index> n_list;
  Index sum_rank = 0;
  Index tubal = 0;
  std::vector<double> consts{1.0};
  std::vector<std::string> transforms{"fft"};
  int trials = 5;
  std::uint64_t seed = 0;
  SolverConfig cfg;
  std::string out;
};

int run_phase(const PhaseArgs& a, std::ostream& out) {
  PhaseConfig pc;
  pc.n_list = a.n_list;
  pc.sum_rank = a.sum_rank;
  pc.tubal = a.tubal;
  pc.const_list = a.consts;
  pc.trials = a.trials;
  pc.seed = a.seed;
  pc.solver = a.cfg;
  pc.transforms.clear();
  for (const auto& name : a.transforms) {
    const auto k = parse_kind(name);
    if (!k) throw ValueError("phase: unknown transform '" + name + "' (expected fft, dct or data)");
    pc.transforms.push_back(*k);
  }
  const auto records = run_phase_experiment(pc);
  if (a.out.empty()) {
    io::write_records_csv(out, records);
  } else {
    std::ofstream f(a.out, std::ios::trunc);
    if (!f) throw IoError("cannot open '" + a.out + "' for writing");
    io::write_records_csv(f, records);
  }
  return kOk;
}

struct MetricsArgs {
  std::string est, ref;
};

int run_metrics(const MetricsArgs& a, std::ostream& out) {
  const Tensor3d est = io::read_tensor(a.est);
  const Tensor3d ref = io::read_tensor(a.ref);
  out << std::setprecision(17);
  out << "rel=" << rel_error(est, ref) << '\n' << "psnr=" << psnr(est, ref) << '\n' << "ssim=" << ssim(est, ref) << '\n';
  return kOk;
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Third-order tensor completion under transformed tensor SVDs", "ttc"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "synthesize a tensor with a prescribed transformed multi-rank");
  g->add_option("--dims", gen.dims, "n1,n2,n3")->required()->delimiter(',')->expected(3);
  g->add_option("--ranks", gen.ranks, "per-slice ranks r1,...,rn3")->delimiter(',');
  g->add_option("--sum-rank", gen.sum_rank, "sum of the multi-rank (with --tubal)");
  g->add_option("--tubal", gen.tubal, "tubal rank (with --sum-rank)");
  add_transform_option(g, gen.transform);
  g->add_option("--seed", gen.seed)->capture_default_str();
  g->add_option("--out", gen.out, "output TT3D file")->required();

  SampleArgs smp;
  auto* s = app.add_subcommand("sample", "draw an observation mask");
  s->add_option("--dims", smp.dims, "n1,n2,n3")->required()->delimiter(',')->expected(3);
  auto* sm = s->add_option("--m", smp.m, "exact number of observed entries (uniform)");
  auto* sr = s->add_option("--rho", smp.rho, "inclusion probability (Bernoulli)");
  sm->excludes(sr);
  s->add_option("--seed", smp.seed)->capture_default_str();
  s->add_option("--out", smp.out, "mask CSV path (default: stdout)");

  CompleteArgs cmp;
  auto* c = app.add_subcommand("complete", "recover a tensor from observed entries by ADMM");
  c->add_option("--input", cmp.input, "observations, TT3D")->required();
  c->add_option("--mask", cmp.mask, "observed index set, mask CSV")->required();
  c->add_option("--out", cmp.output, "recovered tensor, TT3D")->required();
  add_transform_option(c, cmp.transform);
  add_solver_options(c, cmp.cfg);
  c->add_option("--seed", cmp.seed)->capture_default_str();
  c->add_option("--data-from", cmp.data_from, "reference tensor for --transform data");
  c->add_option("--truth", cmp.truth, "ground truth; prints the relative error");

  TsvdArgs tsv;
  auto* t = app.add_subcommand("tsvd", "report multi-rank, tubal rank, TTNN and incoherence");
  t->add_option("--input", tsv.input, "TT3D file")->required();
  add_transform_option(t, tsv.transform);
  t->add_option("--tol", tsv.tol, "relative singular value cutoff")->capture_default_str();
  t->add_option("--trunc", tsv.trunc, "energy fraction in (0,1] for the truncated multi-rank");
  t->add_flag("--ascending", tsv.ascending, "accumulate the truncation energy from the smallest values");

  PhaseArgs ph;
  auto* p = app.add_subcommand("phase", "recovery experiment over n and sample-size constants, CSV out");
  p->add_option("--n-list", ph.n_list, "tensor sizes n (n x n x n)")->required()->delimiter(',');
  p->add_option("--sum-rank", ph.sum_rank, "sum of the transformed multi-rank")->required();
  p->add_option("--tubal", ph.tubal, "transformed tubal rank")->required();
  p->add_option("--const", ph.consts, "bound constants")->delimiter(',')->capture_default_str();
  p->add_option("--transforms", ph.transforms, "fft,dct,data")->delimiter(',')->capture_default_str();
  p->add_option("--trials", ph.trials)->capture_default_str();
  p->add_option("--seed", ph.seed)->capture_default_str();
  add_solver_options(p, ph.cfg);
  p->add_option("--out", ph.out, "CSV path (default: stdout)");

  MetricsArgs met;
  auto* mt = app.add_subcommand("metrics", "relative error, PSNR and SSIM of an estimate");
  mt->add_option("--est", met.est, "estimate, TT3D")->required();
  mt->add_option("--ref", met.ref, "reference, TT3D")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*g) return run_gen(gen, out);
    if (*s) {
      if (smp.m < 0 && smp.rho < 0) throw ValueError("sample: give --m or --rho");
      return run_sample(smp, out);
    }
    if (*c) return run_complete(cmp, out);
    if (*t) return run_tsvd(tsv, out);
    if (*p) return run_phase(ph, out);
    if (*mt) return run_metrics(met, out);
  } catch (const ValueError& e) {
    err << "error: " << e.what() << '\n';
    return kValue;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << '\n';
    return kDimension;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kFormat;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}

}  // namespace ttc::cli
