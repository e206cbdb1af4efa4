#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rotbound/dynamics.hpp"
#include "rotbound/functionals.hpp"
#include "rotbound/grid.hpp"
#include "rotbound/minimize.hpp"

namespace rotbound {

struct GridSpec {
  int n = 128;
  double extent = 8.0;
};

struct DynamicsSpec {
  double T = 10.0;
  double dt = 1e-3;
  double epsilon = 1e-2;
  int record_stride = 100;
};

struct RunConfig {
  PhysicsParams physics;
  GridSpec grid;
  double m = 1.0;
  std::optional<double> l;
  std::optional<double> Omega;
  std::vector<double> l_grid;
  ScanMode scan_mode = ScanMode::kWarm;
  SolveOptions solver;
  DynamicsSpec dynamics;
  std::string output_dir = "out";
  /// Optional NLSB checkpoint used as initial field / orbit reference.
  std::string input;
  std::uint64_t rng_seed = 42;
};

/// `key = value` lines, `#` starts a comment. Unknown or repeated keys and
/// malformed values raise ParseError with the line number; the result is validated.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Sets one key (same grammar as a config line). Throws ParseError with line 0 on failure.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value, std::size_t line = 0);

/// Physics admissibility, solver options, and a grid large enough that the seed
/// envelopes leave less than 1e-10 of their mass beyond 0.9 * extent.
void validate(const RunConfig& cfg);

/// "start:stop:step", stop included when reached within step * 1e-9.
std::vector<double> parse_range(std::string_view text);

/// "n1/n2, n1/n2, ..." mode pairs.
std::vector<SeedPair> parse_seed_pairs(std::string_view text);

Grid make_grid(const RunConfig& cfg);
EvolveOptions evolve_options(const RunConfig& cfg);

}  // namespace rotbound
