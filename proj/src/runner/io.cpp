#include <openssl/evp.h>

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "bdf/errors.hpp"
#include "bdf/runner.hpp"

namespace bdf::runner {

namespace {

constexpr char kMagic[4] = {'B', 'D', 'F', '1'};

template <class U>
void put_le(std::string& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  explicit Reader(std::string bytes) : bytes_(std::move(bytes)) {}

  template <class U>
  U get() {
    if (pos_ + sizeof(U) > bytes_.size()) throw FormatError("checkpoint truncated");
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i)
      v |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += sizeof(U);
    return v;
  }
  double f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
  std::string raw(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw FormatError("checkpoint truncated");
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  std::string bytes_;
  std::size_t pos_ = 0;
};

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const OperatorKernel& state,
                      const PhysicalParams& params) {
  const auto& spec = state.grid()->spec();
  const auto dim = static_cast<std::uint64_t>(state.dim());
  std::string out;
  out.reserve(64 + dim * dim * 16);
  out.append(kMagic, 4);
  put_f64(out, spec.cutoff);
  put_le(out, static_cast<std::uint32_t>(spec.points_per_axis));
  put_le(out, static_cast<std::uint8_t>(spec.offset ? 1 : 0));
  put_f64(out, params.fermi_velocity);
  put_le(out, dim);
  const auto& m = state.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      put_f64(out, m(i, j).real());
      put_f64(out, m(i, j).imag());
    }
  write_atomic(path, out);
}

Checkpoint read_checkpoint(const std::filesystem::path& path,
                           const std::optional<GridSpec>& expected) {
  Reader in(read_all(path));
  if (in.raw(4) != std::string(kMagic, 4)) throw FormatError("bad checkpoint magic");
  GridSpec spec;
  spec.cutoff = in.f64();
  spec.points_per_axis = static_cast<int>(in.get<std::uint32_t>());
  spec.offset = in.get<std::uint8_t>() != 0;
  PhysicalParams params;
  params.cutoff = spec.cutoff;
  params.fermi_velocity = in.f64();
  const auto dim = in.get<std::uint64_t>();
  try {
    spec.validate();
    params.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint header invalid: ") + e.what());
  }
  if (expected && !(*expected == spec))
    throw FormatError("checkpoint grid does not match the expected grid (dimension mismatch)");
  auto grid = build_grid(spec);
  if (dim != 2 * grid->size()) throw FormatError("checkpoint dimension does not match its grid");
  if (in.remaining() != dim * dim * 16)
    throw FormatError(in.remaining() < dim * dim * 16 ? "checkpoint truncated"
                                                      : "checkpoint has trailing bytes");
  const auto n = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double re = in.f64();
      const double im = in.f64();
      m(i, j) = {re, im};
    }
  // Not flagged Hermitian: the file may hold any operator.
  return {spec, params, OperatorKernel(std::move(grid), std::move(m), false)};
}

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return hex.str();
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_all(path)); }

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace bdf::runner
