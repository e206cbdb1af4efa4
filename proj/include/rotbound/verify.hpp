#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rotbound/functionals.hpp"
#include "rotbound/minimize.hpp"

namespace rotbound {

struct VerifyOptions {
  int n = 128;
  double extent = 8.0;
  PhysicsParams physics;
  double m = 1.0;
  SolveOptions solver = [] {
    SolveOptions s;
    s.keep_history = false;
    return s;
  }();
  double T = 10.0;
  double dt = 1e-3;
  int record_stride = 100;
  double epsilon = 1e-2;
  /// Grid for the closed-form Gaussian oracles.
  int oracle_n = 256;
  std::uint64_t rng_seed = 42;
  /// Called once per finished check, in id order.
  std::function<void(const struct CheckResult&)> on_result;
};

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs acceptance checks 1 to 12 at desk scale. Expensive solves (the l
/// scan, the mass-only ground states, the reference minimizers) are shared
/// between checks. Solver failures are reported as failed checks, never thrown.
std::vector<CheckResult> run_acceptance(const VerifyOptions& opts);

/// One "[PASS] 4 symmetry ... (12.3 s)" style line.
std::string format_check(const CheckResult& r);

}  // namespace rotbound
