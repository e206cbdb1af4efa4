#include "rotbound/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "rotbound/constraint_set.hpp"

namespace rotbound {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double to_double(std::string_view v, std::string_view key, std::size_t line) {
  const std::string text(trim(v));
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (text.empty() || used != text.size()) {
    throw ParseError(line, "'" + std::string(key) + "' expects a number, got '" + text + "'");
  }
  return out;
}

long long to_integer(std::string_view v, std::string_view key, std::size_t line) {
  const auto text = trim(v);
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(line, "'" + std::string(key) + "' expects an integer, got '" + std::string(text) + "'");
  }
  return out;
}

bool to_bool(std::string_view v, std::string_view key, std::size_t line) {
  const auto text = trim(v);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ParseError(line, "'" + std::string(key) + "' expects true or false");
}

int to_int(std::string_view v, std::string_view key, std::size_t line) {
  const long long x = to_integer(v, key, line);
  if (x < -2147483647LL || x > 2147483647LL) throw ParseError(line, "'" + std::string(key) + "' out of range");
  return static_cast<int>(x);
}

}  // namespace

std::vector<double> parse_range(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const auto colon = text.find(':', pos);
    parts.push_back(trim(text.substr(pos, colon == std::string_view::npos ? text.npos : colon - pos)));
    if (colon == std::string_view::npos) break;
    pos = colon + 1;
  }
  if (parts.size() == 1) return {to_double(parts[0], "l_grid", 0)};
  if (parts.size() != 3) throw ParseError(0, "range must read start:stop:step");
  const double start = to_double(parts[0], "l_grid", 0);
  const double stop = to_double(parts[1], "l_grid", 0);
  const double step = to_double(parts[2], "l_grid", 0);
  if (!(step > 0.0) || !(stop >= start) || !std::isfinite(stop - start)) {
    throw ParseError(0, "range needs step > 0 and stop >= start");
  }
  const double count = std::floor((stop - start) / step + 1e-9);
  if (count > 1e6) throw ParseError(0, "range has too many points");
  std::vector<double> out;
  for (long i = 0; i <= static_cast<long>(count); ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

std::vector<SeedPair> parse_seed_pairs(std::string_view text) {
  std::vector<SeedPair> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto item = trim(text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos));
    if (!item.empty()) {
      const auto slash = item.find('/');
      if (slash == std::string_view::npos) throw ParseError(0, "seed pairs read n1/n2");
      out.push_back({to_int(item.substr(0, slash), "seeds", 0), to_int(item.substr(slash + 1), "seeds", 0)});
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value, std::size_t line) {
  auto num = [&] { return to_double(value, key, line); };
  auto whole = [&] { return to_int(value, key, line); };
  try {
    if (key == "n") cfg.grid.n = whole();
    else if (key == "extent") cfg.grid.extent = num();
    else if (key == "k") cfg.physics.k = num();
    else if (key == "lambda") cfg.physics.lambda = num();
    else if (key == "sigma") cfg.physics.sigma = num();
    else if (key == "m") cfg.m = num();
    else if (key == "l") cfg.l = num();
    else if (key == "Omega") cfg.Omega = num();
    else if (key == "l_grid") cfg.l_grid = parse_range(value);
    else if (key == "scan_mode") {
      const auto v = trim(value);
      if (v == "warm") cfg.scan_mode = ScanMode::kWarm;
      else if (v == "cold") cfg.scan_mode = ScanMode::kCold;
      else throw ParseError(line, "scan_mode is warm or cold");
    }
    else if (key == "step") cfg.solver.step = num();
    else if (key == "max_step") cfg.solver.max_step = num();
    else if (key == "max_iters") cfg.solver.max_iters = whole();
    else if (key == "tol_grad") cfg.solver.tol_grad = num();
    else if (key == "tol_energy") cfg.solver.tol_energy = num();
    else if (key == "stall_window") cfg.solver.stall_window = whole();
    else if (key == "n_max") cfg.solver.n_max = whole();
    else if (key == "seeds") cfg.solver.seeds = parse_seed_pairs(value);
    else if (key == "seed_admixture") cfg.solver.seed_admixture = num();
    else if (key == "admixture_modes") cfg.solver.admixture_modes = whole();
    else if (key == "preconditioner_shift") cfg.solver.preconditioner_shift = num();
    else if (key == "conjugate") cfg.solver.conjugate = to_bool(value, key, line);
    else if (key == "T") cfg.dynamics.T = num();
    else if (key == "dt") cfg.dynamics.dt = num();
    else if (key == "epsilon") cfg.dynamics.epsilon = num();
    else if (key == "record_stride") cfg.dynamics.record_stride = whole();
    else if (key == "output_dir") cfg.output_dir = std::string(trim(value));
    else if (key == "input") cfg.input = std::string(trim(value));
    else if (key == "rng_seed") {
      const long long s = to_integer(value, key, line);
      if (s < 0) throw ParseError(line, "rng_seed must be non-negative");
      cfg.rng_seed = static_cast<std::uint64_t>(s);
      cfg.solver.rng_seed = cfg.rng_seed;
    }
    else throw ParseError(line, "unknown key '" + std::string(key) + "'");
  } catch (const ParseError& e) {
    if (e.line() == line) throw;
    // Helpers without line context report line 0.
    std::string what = e.what();
    what = what.substr(what.find(": ") + 2);
    throw ParseError(line, what);
  }
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.npos : eol - pos);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
      const auto key = trim(line.substr(0, eq));
      const auto value = trim(line.substr(eq + 1));
      if (key.empty()) throw ParseError(line_no, "missing key");
      if (value.empty()) throw ParseError(line_no, "missing value for '" + std::string(key) + "'");
      if (!seen.insert(std::string(key)).second) {
        throw ParseError(line_no, "key '" + std::string(key) + "' given twice");
      }
      apply_setting(cfg, key, value, line_no);
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void validate(const RunConfig& cfg) {
  validate(cfg.physics);
  validate(cfg.solver);
  if (cfg.grid.n % 2 != 0 || cfg.grid.n < 16) throw ValidationError("n must be even and at least 16");
  if (!(cfg.grid.extent > 0.0)) throw ValidationError("extent must be positive");
  if (!(cfg.m > 0.0)) throw ValidationError("m must be positive");
  if (cfg.l && !std::isfinite(*cfg.l)) throw ValidationError("l must be finite");
  if (cfg.Omega && !std::isfinite(*cfg.Omega)) throw ValidationError("Omega must be finite");
  if (!(cfg.dynamics.T > 0.0)) throw ValidationError("T must be positive");
  if (!(cfg.dynamics.dt > 0.0) || cfg.dynamics.dt > 1e-2) throw ValidationError("dt must lie in (0, 1e-2]");
  if (!(cfg.dynamics.epsilon >= 0.0)) throw ValidationError("epsilon must be non-negative");
  if (cfg.dynamics.record_stride < 1) throw ValidationError("record_stride must be at least 1");

  int widest = cfg.solver.admixture_modes;
  for (const auto& s : cfg.solver.seeds) widest = std::max({widest, std::abs(s.n1), std::abs(s.n2)});
  if (cfg.l) widest = std::max(widest, static_cast<int>(std::ceil(std::abs(*cfg.l) / cfg.m)));
  const Grid grid = make_grid(cfg.grid.n, cfg.grid.extent);
  for (int n : {0, widest}) {
    const WaveField env = mode_component(grid, n, 1.0);
    if (mass_outside_radius(env, 0.9 * cfg.grid.extent) >= 1e-10) {
      throw ValidationError("extent too small: seed mode " + std::to_string(n) +
                            " leaves more than 1e-10 of its mass beyond 0.9 * extent");
    }
  }
}

Grid make_grid(const RunConfig& cfg) { return make_grid(cfg.grid.n, cfg.grid.extent); }

EvolveOptions evolve_options(const RunConfig& cfg) {
  return EvolveOptions{cfg.dynamics.T, cfg.dynamics.dt, cfg.dynamics.record_stride};
}

}  // namespace rotbound
