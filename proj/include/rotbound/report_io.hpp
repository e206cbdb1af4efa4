#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "rotbound/dynamics.hpp"
#include "rotbound/minimize.hpp"

namespace rotbound {

/// Doubles are written with 17 significant digits so that outputs round-trip
/// and are byte-identical for identical inputs.
std::string format_number(double x);

/// iter,energy,mass_err,angmom_err,gradnorm
void write_history_csv(std::ostream& out, const std::vector<IterationRecord>& history);
/// l,e,converged,omega,Omega
void write_curve_csv(std::ostream& out, const EnergyCurve& curve);
/// t,mass_drift,energy_drift,angmom_drift,orbit_distance (empty column without a reference)
void write_trace_csv(std::ostream& out, const EvolveTrace& trace);

/// Flat JSON object (keys in insertion order); non-finite numbers become null.
class ReportWriter {
 public:
  ReportWriter& add(const std::string& key, double value);
  ReportWriter& add(const std::string& key, int value);
  ReportWriter& add(const std::string& key, bool value);
  ReportWriter& add(const std::string& key, const std::string& value);
  ReportWriter& add(const std::string& key, const char* value) { return add(key, std::string(value)); }
  ReportWriter& add(const std::string& key, const std::vector<double>& values);
  /// Keys of a minimization report (energy, multipliers, residuals, flags, iterations).
  ReportWriter& add_minimize(const MinimizeReport& rep, const std::string& prefix = "");
  void write(std::ostream& out) const;

 private:
  nlohmann::ordered_json doc_ = nlohmann::ordered_json::object();
};

/// Writes `content` into dir/name, creating dir. Throws InvalidArgument on IO failure.
void write_text_file(const std::filesystem::path& dir, const std::string& name, const std::string& content);

}  // namespace rotbound
