#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rotbound {

// Process exit codes used by the command-line front end.
enum class ExitCode : int {
  kOk = 0,
  kConfig = 2,
  kInfeasible = 3,
  kNotConverged = 4,
  kVerificationFailed = 5,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept { return ExitCode::kConfig; }
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  GridMismatch() : Error("fields live on different grids") {}
};

class NumericalError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kNotConverged; }
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class MassSplitNegative : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kInfeasible; }
};

class ConstraintInfeasible : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kInfeasible; }
};

class NoFeasibleSeed : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kInfeasible; }
};

class NewtonDiverged : public Error {
 public:
  NewtonDiverged(const std::string& what, double last_a, double last_b,
                 double mass_residual, double angmom_residual)
      : Error(what),
        last_a(last_a),
        last_b(last_b),
        mass_residual(mass_residual),
        angmom_residual(angmom_residual) {}
  ExitCode exit_code() const noexcept override { return ExitCode::kNotConverged; }

  double last_a;
  double last_b;
  double mass_residual;
  double angmom_residual;
};

class BlowUp : public Error {
 public:
  BlowUp(double time)
      : Error("non-finite values detected at t = " + std::to_string(time)), time(time) {}
  ExitCode exit_code() const noexcept override { return ExitCode::kNotConverged; }

  double time;
};

}  // namespace rotbound
