#include "ttc/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace ttc::io {

namespace {

static_assert(std::endian::native == std::endian::little, "TT3D I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in, const char* what) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T)))
    throw FormatError(std::string("TT3D: truncated header (") + what + ")");
  return v;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

}  // namespace

void write_tensor(std::ostream& out, const Tensor3d& z) {
  const bool real = z.is_real();
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(real ? DType::real64 : DType::complex128));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(z.n1()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(z.n2()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(z.n3()));
  if (real) {
    const Eigen::VectorXd re = z.slices().real().reshaped();
    out.write(reinterpret_cast<const char*>(re.data()), static_cast<std::streamsize>(re.size() * sizeof(double)));
  } else {
    const auto d = z.data();
    out.write(reinterpret_cast<const char*>(d.data()), static_cast<std::streamsize>(d.size_bytes()));
  }
  if (!out) throw IoError("TT3D: write failed");
}

Tensor3d read_tensor(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4)) throw FormatError("TT3D: truncated header (magic)");
  if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("TT3D: bad magic");
  const auto version = get<std::uint32_t>(in, "version");
  if (version != kVersion) throw FormatError("TT3D: unsupported version " + std::to_string(version));
  const auto dtype = get<std::uint32_t>(in, "dtype");
  if (dtype > 1) throw FormatError("TT3D: unknown dtype " + std::to_string(dtype));
  const auto n1 = get<std::uint64_t>(in, "n1");
  const auto n2 = get<std::uint64_t>(in, "n2");
  const auto n3 = get<std::uint64_t>(in, "n3");
  constexpr std::uint64_t kMaxDim = std::uint64_t{1} << 31;
  if (n1 == 0 || n2 == 0 || n3 == 0 || n1 > kMaxDim || n2 > kMaxDim || n3 > kMaxDim ||
      n1 * n2 > kMaxDim * 4 || n1 * n2 * n3 > (std::uint64_t{1} << 36))
    throw FormatError("TT3D: invalid dimensions " + std::to_string(n1) + "x" + std::to_string(n2) + "x" +
                      std::to_string(n3));
  const auto count = static_cast<Index>(n1 * n2 * n3);
  const auto i1 = static_cast<Index>(n1), i2 = static_cast<Index>(n2), i3 = static_cast<Index>(n3);
  MatrixC<double> data(i1, i2 * i3);
  if (dtype == static_cast<std::uint32_t>(DType::real64)) {
    Eigen::VectorXd re(count);
    if (!in.read(reinterpret_cast<char*>(re.data()), static_cast<std::streamsize>(count * sizeof(double))))
      throw FormatError("TT3D: truncated payload");
    data = re.reshaped(i1, i2 * i3).cast<Complex<double>>();
  } else {
    if (!in.read(reinterpret_cast<char*>(data.data()),
                 static_cast<std::streamsize>(count * sizeof(Complex<double>))))
      throw FormatError("TT3D: truncated payload");
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("TT3D: trailing bytes after payload");
  try {
    return Tensor3d(i1, i2, i3, std::move(data));
  } catch (const ValueError& e) {
    throw FormatError(std::string("TT3D: ") + e.what());
  }
}

void write_tensor(const std::filesystem::path& path, const Tensor3d& z) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    write_tensor(out, z);
    out.close();
    if (!out) {
      std::filesystem::remove(tmp);
      throw IoError("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot move output into '" + path.string() + "': " + ec.message());
  }
}

Tensor3d read_tensor(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  return read_tensor(in);
}

void write_mask(std::ostream& out, const SampleSet& s) {
  out << "i,j,k\n";
  for (const auto& [i, j, k] : s.triples()) out << i << ',' << j << ',' << k << '\n';
  if (!out) throw IoError("mask: write failed");
}

void write_mask(const std::filesystem::path& path, const SampleSet& s) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_mask(out, s);
}

SampleSet read_mask(std::istream& in, Dims dims) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("mask: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "i,j,k") throw FormatError("mask: expected header 'i,j,k', got '" + line + "'");
  std::vector<Triple> triples;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    Triple t{};
    char c1 = 0, c2 = 0;
    if (!(row >> t[0] >> c1 >> t[1] >> c2 >> t[2]) || c1 != ',' || c2 != ',' || !(row >> std::ws).eof())
      throw FormatError("mask: malformed line " + std::to_string(lineno) + ": '" + line + "'");
    triples.push_back(t);
  }
  try {
    return SampleSet::from_triples(dims, triples);
  } catch (const ValueError& e) {
    throw FormatError(std::string("mask: ") + e.what());
  }
}

SampleSet read_mask(const std::filesystem::path& path, Dims dims) {
  auto in = open_in(path);
  return read_mask(in, dims);
}

UnitaryTransform<double> read_transform(const std::filesystem::path& path) {
  const Tensor3d t = read_tensor(path);
  if (t.n3() != 1 || t.n1() != t.n2())
    throw FormatError("transform file must hold an n x n x 1 tensor, got " + dims_string(t.dims()));
  return UnitaryTransform<double>(t.slices(), TransformKind::custom);
}

void write_transform(const std::filesystem::path& path, const UnitaryTransform<double>& t) {
  write_tensor(path, Tensor3d(t.n3(), t.n3(), 1, t.matrix()));
}

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records) {
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << kRecordsHeader << '\n';
  out << std::setprecision(17);
  for (const auto& r : records) {
    out << r.n1 << ',' << r.n2 << ',' << r.n3 << ',' << r.transform << ',' << r.sum_rank << ',' << r.tubal_rank
        << ',' << r.constant << ',' << r.m << ',' << r.trial << ',' << r.seed << ',' << r.rel << ',' << r.psnr << ','
        << r.ssim << ',' << r.iterations << ',' << r.eta << ',' << r.seconds << ',' << (r.success ? 1 : 0) << '\n';
  }
  out.flags(flags);
  out.precision(prec);
}

}  // namespace ttc::io
