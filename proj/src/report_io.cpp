#include "rotbound/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace rotbound {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_history_csv(std::ostream& out, const std::vector<IterationRecord>& history) {
  out << "iter,energy,mass_err,angmom_err,gradnorm\n";
  for (const auto& h : history) {
    out << h.iter << ',' << format_number(h.energy) << ',' << format_number(h.mass_err) << ','
        << format_number(h.angmom_err) << ',' << format_number(h.grad_norm) << '\n';
  }
}

void write_curve_csv(std::ostream& out, const EnergyCurve& curve) {
  out << "l,e,converged,omega,Omega\n";
  for (std::size_t i = 0; i < curve.l_values.size(); ++i) {
    const auto& r = curve.reports[i];
    out << format_number(curve.l_values[i]) << ',' << format_number(curve.e_values[i]) << ','
        << (r.converged ? "true" : "false") << ',' << format_number(r.multipliers.omega) << ','
        << format_number(r.multipliers.Omega) << '\n';
  }
}

void write_trace_csv(std::ostream& out, const EvolveTrace& trace) {
  out << "t,mass_drift,energy_drift,angmom_drift,orbit_distance\n";
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    out << format_number(trace.times[i]) << ',' << format_number(trace.mass_drift[i]) << ','
        << format_number(trace.energy_drift[i]) << ',' << format_number(trace.angmom_drift[i]) << ',';
    if (i < trace.orbit_distance.size()) out << format_number(trace.orbit_distance[i]);
    out << '\n';
  }
}

ReportWriter& ReportWriter::add(const std::string& key, double value) {
  // JSON has no nan/inf.
  if (std::isfinite(value)) {
    doc_[key] = value;
  } else {
    doc_[key] = nullptr;
  }
  return *this;
}

ReportWriter& ReportWriter::add(const std::string& key, int value) {
  doc_[key] = value;
  return *this;
}

ReportWriter& ReportWriter::add(const std::string& key, bool value) {
  doc_[key] = value;
  return *this;
}

ReportWriter& ReportWriter::add(const std::string& key, const std::string& value) {
  doc_[key] = value;
  return *this;
}

ReportWriter& ReportWriter::add(const std::string& key, const std::vector<double>& values) {
  auto arr = nlohmann::ordered_json::array();
  for (double v : values) arr.push_back(std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json());
  doc_[key] = std::move(arr);
  return *this;
}

ReportWriter& ReportWriter::add_minimize(const MinimizeReport& rep, const std::string& prefix) {
  add(prefix + "energy", rep.energy_value);
  add(prefix + "omega", rep.multipliers.omega);
  add(prefix + "Omega", rep.multipliers.Omega);
  add(prefix + "multipliers_degenerate", rep.multipliers.degenerate);
  add(prefix + "residual", rep.residual);
  add(prefix + "identity_gap", rep.identity_gap);
  add(prefix + "grad_norm", rep.grad_norm);
  add(prefix + "residual_ratio", rep.residual_ratio);
  add(prefix + "angular_momentum", rep.angular_momentum);
  add(prefix + "mass", mass(rep.field));
  add(prefix + "iterations", rep.iterations);
  add(prefix + "converged", rep.converged);
  add(prefix + "stalled", rep.stalled);
  add(prefix + "seed_used", rep.seed_used);
  return *this;
}

void ReportWriter::write(std::ostream& out) const { out << doc_.dump(2) << '\n'; }

void write_text_file(const std::filesystem::path& dir, const std::string& name, const std::string& content) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InvalidArgument("cannot create output directory " + dir.string() + ": " + ec.message());
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw InvalidArgument("cannot write " + path.string());
}

}  // namespace rotbound
