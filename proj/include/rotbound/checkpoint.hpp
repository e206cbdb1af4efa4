#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "rotbound/field.hpp"

namespace rotbound {

// Binary field checkpoint ("NLSB"), all integers and doubles little-endian:
//   magic "NLSB" | version u32 = 1 | n u32 | extent f64 | n^2 x (re f64, im f64)
inline constexpr char kCheckpointMagic[4] = {'N', 'L', 'S', 'B'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, const WaveField& f);
/// Throws FormatError on bad magic, unknown version, invalid grid or truncation.
WaveField read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const WaveField& f);
WaveField load_checkpoint(const std::filesystem::path& path);

}  // namespace rotbound
