#include "rotbound/checkpoint.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace rotbound {

namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(bytes.data(), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), sizeof(T))) throw FormatError("checkpoint is truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

void write_checkpoint(std::ostream& out, const WaveField& f) {
  out.write(kCheckpointMagic, 4);
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(f.grid().n));
  put_le<double>(out, f.grid().extent);
  for (const cplx& v : f.values()) {
    put_le<double>(out, v.real());
    put_le<double>(out, v.imag());
  }
  if (!out) throw Error("failed writing checkpoint");
}

WaveField read_checkpoint(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4)) throw FormatError("checkpoint is truncated");
  if (std::memcmp(magic, kCheckpointMagic, 4) != 0) throw FormatError("bad checkpoint magic");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto n = get_le<std::uint32_t>(in);
  const auto extent = get_le<double>(in);
  Grid grid;
  try {
    grid = make_grid(static_cast<int>(n), extent);
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("checkpoint grid is invalid: ") + e.what());
  }
  std::vector<cplx> values(grid.size());
  for (auto& v : values) {
    const double re = get_le<double>(in);
    const double im = get_le<double>(in);
    v = {re, im};
  }
  return WaveField(grid, std::move(values));
}

void save_checkpoint(const std::filesystem::path& path, const WaveField& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_checkpoint(out, f);
}

WaveField load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_checkpoint(in);
}

}  // namespace rotbound
