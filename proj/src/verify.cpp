#include "rotbound/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "rotbound/constraint_set.hpp"
#include "rotbound/dynamics.hpp"
#include "rotbound/modes.hpp"

namespace rotbound {

namespace {

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

// Shared solves, computed on first use.
class Context {
 public:
  explicit Context(const VerifyOptions& opts) : o(opts), grid(make_grid(opts.n, opts.extent)) {}

  const VerifyOptions& o;
  Grid grid;

  const MinimizeReport& doubly(double l) {
    auto it = doubly_.find(l);
    if (it == doubly_.end()) {
      it = doubly_.emplace(l, minimize_doubly(o.physics, grid, Constraints{o.m, l}, o.solver)).first;
    }
    return it->second;
  }

  const EnergyCurve& scan() {
    if (!scan_) {
      std::vector<double> ls;
      for (int i = -8; i <= 8; ++i) ls.push_back(0.25 * i);
      scan_ = scan_l(o.physics, grid, o.m, ls, o.solver, ScanMode::kWarm);
    }
    return *scan_;
  }

  // l >= 0 half of the scan with the midpoints added (spacing 0.125).
  const EnergyCurve& refined() {
    if (!refined_) {
      std::vector<double> mids;
      for (int i = 0; i < 8; ++i) mids.push_back(0.125 + 0.25 * i);
      const EnergyCurve extra = scan_l(o.physics, grid, o.m, mids, o.solver, ScanMode::kWarm);
      const EnergyCurve coarse = half_scan();
      EnergyCurve out;
      out.m = o.m;
      std::vector<std::pair<double, const MinimizeReport*>> pts;
      for (std::size_t i = 0; i < coarse.l_values.size(); ++i) pts.emplace_back(coarse.l_values[i], &coarse.reports[i]);
      for (std::size_t i = 0; i < extra.l_values.size(); ++i) pts.emplace_back(extra.l_values[i], &extra.reports[i]);
      std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      for (const auto& [l, rep] : pts) {
        out.l_values.push_back(l);
        out.e_values.push_back(rep->energy_value);
        out.reports.push_back(*rep);
      }
      refined_ = std::move(out);
    }
    return *refined_;
  }

  EnergyCurve half_scan() {
    const EnergyCurve& full = scan();
    EnergyCurve out;
    out.m = full.m;
    for (std::size_t i = 0; i < full.l_values.size(); ++i) {
      if (full.l_values[i] < 0.0) continue;
      out.l_values.push_back(full.l_values[i]);
      out.e_values.push_back(full.e_values[i]);
      out.reports.push_back(full.reports[i]);
    }
    return out;
  }

  const MinimizeReport& mass_only(double Omega) {
    auto it = mass_only_.find(Omega);
    if (it == mass_only_.end()) {
      it = mass_only_.emplace(Omega, minimize_mass_only(o.physics, grid, o.m, Omega, o.solver)).first;
    }
    return it->second;
  }

  // Unperturbed evolution of the l minimizer with the orbit distance recorded.
  const EvolveTrace& rest_trace(double l, double dt) {
    const auto key = std::make_pair(l, dt);
    auto it = traces_.find(key);
    if (it == traces_.end()) {
      const OrbitReference ref = reference(l);
      const int stride = std::max(1, static_cast<int>(std::lround(o.record_stride * o.dt / dt)));
      it = traces_.emplace(key, evolve(ref.phi, o.physics, EvolveOptions{o.T, dt, stride}, &ref)).first;
    }
    return it->second;
  }

  OrbitReference reference(double l) {
    const MinimizeReport& rep = doubly(l);
    return OrbitReference{rep.field, rep.multipliers, Constraints{o.m, l}};
  }

 private:
  std::map<double, MinimizeReport> doubly_;
  std::optional<EnergyCurve> scan_;
  std::optional<EnergyCurve> refined_;
  std::map<double, MinimizeReport> mass_only_;
  std::map<std::pair<double, double>, EvolveTrace> traces_;
};

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "FAILED " << what << "; ";
    }
  }
};

bool on_constraint_set(const MinimizeReport& r, double m, double l, double* mass_err, double* l_err) {
  *mass_err = std::abs(mass(r.field) - m) / m;
  *l_err = std::abs(angular_momentum(r.field) - l) / std::max(1.0, std::abs(l));
  return *mass_err < 1e-10 && *l_err < 1e-8;
}

void check_constraints(Context& ctx, Outcome& out) {
  const double m = ctx.o.m;
  double worst_m = 0.0;
  double worst_l = 0.0;
  double slowest = 0.0;
  int runs = 0;
  auto visit = [&](const MinimizeReport& r, double l) {
    double em = 0.0;
    double el = 0.0;
    const bool ok = on_constraint_set(r, m, l, &em, &el);
    out.require(r.converged, "l = " + std::to_string(l) + " did not converge");
    out.require(ok, "l = " + std::to_string(l) + " off the constraint set");
    out.require(r.seconds <= 300.0, "l = " + std::to_string(l) + " took " + sci(r.seconds) + " s");
    worst_m = std::max(worst_m, em);
    worst_l = std::max(worst_l, el);
    slowest = std::max(slowest, r.seconds);
    ++runs;
  };
  for (double l : {0.0, 0.5, 1.0, 2.0}) visit(ctx.doubly(l), l);
  const EnergyCurve& curve = ctx.scan();
  for (std::size_t i = 0; i < curve.l_values.size(); ++i) visit(curve.reports[i], curve.l_values[i]);
  out.detail << runs << " solves: max |M-m|/m " << sci(worst_m) << ", max |L-l|/max(1,|l|) " << sci(worst_l)
             << ", slowest " << sci(slowest) << " s";
}

void check_stationarity(Context& ctx, Outcome& out, bool identity) {
  for (double l : {0.0, 0.5, 1.0, 2.0}) {
    const MinimizeReport& r = ctx.doubly(l);
    const double v = identity ? r.identity_gap : r.residual;
    out.require(r.converged && v < (identity ? 1e-5 : 1e-4), "l = " + std::to_string(l));
    out.detail << "l=" << l << ": " << sci(v) << (identity ? "" : " (omega " + sci(r.multipliers.omega) +
                                                                      ", Omega " + sci(r.multipliers.Omega) + ")")
               << "  ";
  }
}

void check_symmetry(Context& ctx, Outcome& out) {
  const EnergyCurve& c = ctx.scan();
  const std::size_t n = c.l_values.size();
  double worst_pair = 0.0;
  double worst_reflect_e = 0.0;
  double worst_reflect_c = 0.0;
  for (std::size_t i = 0; i < n / 2; ++i) {
    const double e1 = c.e_values[i];
    const double e2 = c.e_values[n - 1 - i];
    const double d = std::abs(e1 - e2) / std::max(1.0, std::abs(e2));
    worst_pair = std::max(worst_pair, d);
    out.require(d < 2e-6, "pair l = +-" + std::to_string(c.l_values[n - 1 - i]));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const WaveField& f = c.reports[i].field;
    const WaveField t = reflect_x1(f);
    const double l = c.l_values[i];
    const double de = std::abs(energy(t, ctx.o.physics) - energy(f, ctx.o.physics)) /
                      std::max(1.0, std::abs(energy(f, ctx.o.physics)));
    const double dc = std::max(std::abs(mass(t) - ctx.o.m) / ctx.o.m,
                               std::abs(angular_momentum(t) + l) / std::max(1.0, std::abs(l)));
    worst_reflect_e = std::max(worst_reflect_e, de);
    worst_reflect_c = std::max(worst_reflect_c, dc);
    out.require(de < 1e-12 && dc < 1e-8, "reflection of l = " + std::to_string(l));
  }
  out.detail << "max pair gap " << sci(worst_pair) << ", reflection energy change " << sci(worst_reflect_e)
             << ", reflected constraint error " << sci(worst_reflect_c);
}

void check_radial(Context& ctx, Outcome& out) {
  const MinimizeReport& r = ctx.doubly(0.0);
  const MinimizeReport& g = ctx.mass_only(0.0);
  const double frac = to_modes(r.field, 16).fraction_outside(0);
  const double frac_g = to_modes(g.field, 16).fraction_outside(0);
  const double d = std::abs(r.energy_value - g.energy_value) / std::abs(g.energy_value);
  out.require(r.converged && g.converged, "convergence");
  out.require(frac < 1e-6, "mode fraction outside n=0 of the l=0 minimizer");
  out.require(d < 1e-6, "e(m,0) vs e_0(m)");
  out.detail << "fraction outside n=0: " << sci(frac) << " (mass-only " << sci(frac_g) << "), |e(m,0)-e_0|/e_0 "
             << sci(d) << " (e = " << r.energy_value << ")";
}

void check_legendre(Context& ctx, Outcome& out) {
  const EnergyCurve coarse = ctx.half_scan();
  const EnergyCurve& fine = ctx.refined();
  for (double Om : {0.0, 0.5, 1.0}) {
    const MinimizeReport& g = ctx.mass_only(Om);
    out.require(g.converged, "mass-only Omega = " + sci(Om));
    const LegendreReport a = legendre_check(coarse, g.energy_value, Om);
    const LegendreReport b = legendre_check(fine, g.energy_value, Om);
    out.require(a.inequality_violations == 0 && b.inequality_violations == 0, "violations at Omega = " + sci(Om));
    out.require(a.gap < Om * 0.25 / 2.0 + 1e-4, "gap at Omega = " + sci(Om));
    out.require(b.gap <= a.gap + 1e-6, "refined gap at Omega = " + sci(Om));
    out.detail << "Omega=" << Om << ": gap " << sci(a.gap) << " -> " << sci(b.gap) << ", argmin l " << a.argmin_l
               << ", violations " << a.inequality_violations << "/" << b.inequality_violations << "  ";
  }
}

void check_connection(Context& ctx, Outcome& out) {
  for (double Om : {0.0, 0.5, 1.0}) {
    const MinimizeReport& g = ctx.mass_only(Om);
    const double l_om = g.angular_momentum;
    const MinimizeReport& d = ctx.doubly(l_om);
    const double e_omega = g.energy_value;
    const double gap = std::abs(d.energy_value - e_omega - Om * l_om) / std::max(1.0, std::abs(d.energy_value));
    out.require(Om * l_om >= -1e-8, "sign at Omega = " + sci(Om));
    out.require(g.converged && d.converged, "convergence at Omega = " + sci(Om));
    out.require(gap < 1e-4, "connection at Omega = " + sci(Om));
    out.detail << "Omega=" << Om << ": l_Omega " << sci(l_om) << ", mismatch " << sci(gap) << "  ";
  }
}

void check_mass_split(Context& ctx, Outcome& out) {
  std::mt19937_64 rng(ctx.o.rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> mode(-3, 3);
  double worst_lin = 0.0;
  double worst_field = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    int n1 = mode(rng);
    int n2 = mode(rng);
    while (n2 == n1) n2 = mode(rng);
    if (n1 > n2) std::swap(n1, n2);
    const double m = 0.5 + 1.5 * unit(rng);
    const double l = m * (n1 + (n2 - n1) * (0.02 + 0.96 * unit(rng)));
    const Constraints c{m, l};
    const MassSplit s = mass_split(c, n1, n2);
    const double lin = std::max(std::abs(s.m1 + s.m2 - m) / m, std::abs(n1 * s.m1 + n2 * s.m2 - l) / std::max(1.0, std::abs(l)));
    const WaveField f = two_mode_seed(ctx.grid, c, n1, n2);
    const double fe = std::max(std::abs(mass(f) - m) / m, std::abs(angular_momentum(f) - l) / std::max(1.0, std::abs(l)));
    worst_lin = std::max(worst_lin, lin);
    worst_field = std::max(worst_field, fe);
  }
  out.require(worst_lin < 1e-12, "closed-form split");
  out.require(worst_field < 1e-8, "synthesized field");
  int raised = 0;
  const std::vector<std::pair<Constraints, std::pair<int, int>>> bad = {
      {{1.0, 2.5}, {0, 2}}, {{1.0, -0.5}, {0, 1}}, {{1.0, 1.0}, {1, 2}}, {{2.0, -3.0}, {-1, 1}}};
  for (const auto& [c, nn] : bad) {
    try {
      (void)mass_split(c, nn.first, nn.second);
    } catch (const MassSplitNegative&) {
      ++raised;
    }
  }
  out.require(raised == static_cast<int>(bad.size()), "infeasible cases");
  out.detail << "100 splits: linear residual " << sci(worst_lin) << ", field constraint error " << sci(worst_field)
             << ", infeasible cases raised " << raised << "/" << bad.size();
}

void check_conservation(Context& ctx, Outcome& out) {
  double dm = 0.0;
  double de = 0.0;
  double dl = 0.0;
  for (double l : {0.0, 1.0}) {
    const EvolveTrace& t = ctx.rest_trace(l, ctx.o.dt);
    dm = std::max(dm, max_of(t.mass_drift));
    de = std::max(de, max_of(t.energy_drift));
    dl = std::max(dl, max_of(t.angmom_drift));
  }
  out.require(dm < 1e-12, "mass drift");
  out.require(de < 1e-6, "energy drift");
  out.require(dl < 1e-5, "angular momentum drift");
  const double e_full = max_of(ctx.rest_trace(1.0, ctx.o.dt).energy_drift);
  const double e_half = max_of(ctx.rest_trace(1.0, 0.5 * ctx.o.dt).energy_drift);
  const double ratio = e_full / e_half;
  out.require(ratio >= 3.0 && ratio <= 5.0, "dt-halving energy drift ratio");
  out.detail << "drifts (l=0,1): mass " << sci(dm) << ", energy " << sci(de) << ", L " << sci(dl)
             << "; l=1 energy drift " << sci(e_full) << " -> " << sci(e_half) << " when dt is halved, ratio "
             << sci(ratio);
}

void check_stability(Context& ctx, Outcome& out) {
  const double eps = ctx.o.epsilon;
  for (double l : {0.0, 1.0}) {
    const double bound = (l == 0.0 ? 5.0 : 10.0) * eps;
    const StabilityReport s = stability_experiment(ctx.reference(l), eps, ctx.o.physics,
                                                   EvolveOptions{ctx.o.T, ctx.o.dt, ctx.o.record_stride},
                                                   ctx.o.rng_seed + static_cast<std::uint64_t>(l));
    const double rest = max_of(ctx.rest_trace(l, ctx.o.dt).orbit_distance);
    out.require(s.sup_distance < bound, "perturbed l = " + sci(l));
    out.require(rest < 1e-4, "unperturbed l = " + sci(l));
    out.detail << "l=" << l << ": sup distance " << sci(s.sup_distance) << " (start " << sci(s.initial_distance)
               << ", bound " << sci(bound) << "), unperturbed " << sci(rest) << "  ";
  }
}

WaveField smooth_random(const Grid& grid, std::mt19937_64& rng, double width) {
  std::uniform_int_distribution<std::uint64_t> draw;
  PhysicsParams p;
  WaveField f = random_perturbation(grid, p, 1.0, draw(rng), 3.0, width);
  f *= 1.0 / std::sqrt(mass(f));
  return f;
}

void check_gradient(Context& ctx, Outcome& out) {
  std::mt19937_64 rng(ctx.o.rng_seed + 7);
  const double h = 1e-5;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const WaveField f = smooth_random(ctx.grid, rng, 1.2);
    const WaveField d = smooth_random(ctx.grid, rng, 1.0);
    WaveField fp = f;
    fp.axpy(h, d);
    WaveField fm = f;
    fm.axpy(-h, d);
    const double fd = energy_difference(fm, fp, ctx.o.physics) / (2.0 * h);
    const double an = 2.0 * inner_product(d, euler_lagrange_apply(f, ctx.o.physics)).real();
    worst = std::max(worst, std::abs(fd - an) / std::max(std::abs(an), 1e-300));
  }
  out.require(worst < 1e-6, "directional derivatives");
  out.detail << "20 pairs: max relative difference " << sci(worst);
}

void check_oracles(Context& ctx, Outcome& out) {
  const Grid g = make_grid(ctx.o.oracle_n, ctx.o.extent);
  WaveField f(g);
  auto v = f.values();
  for (int a = 0; a < g.n; ++a) {
    for (int b = 0; b < g.n; ++b) {
      const double x1 = g.coord(a);
      const double x2 = g.coord(b);
      v[g.index(a, b)] = std::exp(-0.5 * (x1 * x1 + x2 * x2));
    }
  }
  const double pi = std::numbers::pi;
  PhysicsParams lin;
  lin.lambda = 0.0;
  lin.k = 4.0;
  PhysicsParams cubic = lin;
  cubic.lambda = 1.0;
  cubic.sigma = 1.0;
  const double dm = std::abs(mass(f) - pi);
  const double de = std::abs(energy(f, lin) - 2.5 * pi);
  const double dn = std::abs(energy(f, cubic) - energy(f, lin) - 0.25 * pi);
  out.require(dm < 1e-6, "mass");
  out.require(de < 1e-6, "energy");
  out.require(dn < 1e-6, "nonlinear term");
  out.detail << "n=" << g.n << ": mass " << sci(dm) << ", energy " << sci(de) << ", nonlinear " << sci(dn);
}

}  // namespace

std::vector<CheckResult> run_acceptance(const VerifyOptions& opts) {
  Context ctx(opts);
  using Body = void (*)(Context&, Outcome&);
  const std::vector<std::pair<std::string, Body>> checks = {
      {"constraint fidelity", check_constraints},
      {"stationarity residual", [](Context& c, Outcome& o) { check_stationarity(c, o, false); }},
      {"multiplier identity", [](Context& c, Outcome& o) { check_stationarity(c, o, true); }},
      {"symmetry in l", check_symmetry},
      {"radial minimizer at l = 0", check_radial},
      {"Legendre relation", check_legendre},
      {"achieved momentum", check_connection},
      {"two-mode construction", check_mass_split},
      {"conservation", check_conservation},
      {"orbital stability", check_stability},
      {"gradient", check_gradient},
      {"Gaussian oracles", check_oracles},
  };
  std::vector<CheckResult> results;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto started = std::chrono::steady_clock::now();
    Outcome out;
    try {
      checks[i].second(ctx, out);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << "error: " << e.what();
    }
    CheckResult r;
    r.id = static_cast<int>(i) + 1;
    r.name = checks[i].first;
    r.pass = out.pass;
    r.detail = out.detail.str();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (opts.on_result) opts.on_result(r);
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_check(const CheckResult& r) {
  char head[96];
  std::snprintf(head, sizeof head, "[%s] %2d %-26s (%6.1f s) ", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.seconds);
  return head + r.detail;
}

}  // namespace rotbound
