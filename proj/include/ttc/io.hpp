#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "ttc/completion.hpp"
#include "ttc/experiment.hpp"
#include "ttc/tensor3.hpp"
#include "ttc/transform.hpp"

namespace ttc::io {

// TT3D binary tensor file:
//   bytes 0..3   magic "TT3D"
//   u32 LE       version (1)
//   u32 LE       dtype (0 = float64 real, 1 = float64 complex pairs re, im)
//   u64 LE x3    n1, n2, n3
//   payload      entries with i fastest, then j, then k
inline constexpr char kMagic[4] = {'T', 'T', '3', 'D'};
inline constexpr std::uint32_t kVersion = 1;

enum class DType : std::uint32_t { real64 = 0, complex128 = 1 };

/// Serializes z; the real dtype is chosen when every imaginary part is zero.
void write_tensor(std::ostream& out, const Tensor3d& z);
Tensor3d read_tensor(std::istream& in);

/// Writes to a sibling temporary file and renames it over `path`, so `path`
/// never holds a partial tensor.
void write_tensor(const std::filesystem::path& path, const Tensor3d& z);
Tensor3d read_tensor(const std::filesystem::path& path);

/// Mask CSV: header "i,j,k" then one 0-based observed triple per line.
void write_mask(std::ostream& out, const SampleSet& s);
void write_mask(const std::filesystem::path& path, const SampleSet& s);
SampleSet read_mask(std::istream& in, Dims dims);
SampleSet read_mask(const std::filesystem::path& path, Dims dims);

/// A custom transform is stored as an n x n x 1 TT3D tensor holding Phi.
UnitaryTransform<double> read_transform(const std::filesystem::path& path);
void write_transform(const std::filesystem::path& path, const UnitaryTransform<double>& t);

/// Results CSV with the fixed header
/// n1,n2,n3,transform,sum_rank,tubal_rank,const,m,trial,seed,rel,psnr,ssim,iters,eta,seconds,success
void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records);

inline constexpr const char* kRecordsHeader =
    "n1,n2,n3,transform,sum_rank,tubal_rank,const,m,trial,seed,rel,psnr,ssim,iters,eta,seconds,success";

}  // namespace ttc::io
