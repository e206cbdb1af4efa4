#include "rotbound/minimize.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "rotbound/fft.hpp"
#include "rotbound/spectral.hpp"

namespace rotbound {

void validate(const SolveOptions& opts) {
  if (!(opts.step > 0.0) || !(opts.max_step >= opts.step)) throw ValidationError("step must be positive");
  if (opts.max_iters < 1) throw ValidationError("max_iters must be at least 1");
  if (!(opts.tol_grad > 0.0)) throw ValidationError("tol_grad must be positive");
  if (!(opts.tol_energy > 0.0)) throw ValidationError("tol_energy must be positive");
  if (opts.stall_window < 1) throw ValidationError("stall_window must be at least 1");
  if (opts.n_max < 1) throw ValidationError("n_max must be at least 1");
  if (opts.race_iters < 0) throw ValidationError("race_iters must be non-negative");
  if (!(opts.seed_admixture >= 0.0 && opts.seed_admixture < 1.0)) {
    throw ValidationError("seed_admixture must lie in [0, 1)");
  }
  if (opts.admixture_modes < 0) throw ValidationError("admixture_modes must be non-negative");
  if (!(opts.preconditioner_shift > 0.0)) throw ValidationError("preconditioner_shift must be positive");
}

namespace {

// P = D^{1/2} K D^{1/2} with D = 1/(alpha + V + max(lambda |f|^{2 sigma}, 0)) and
// K = 1/(alpha + |k|^2/2): an approximate inverse of the shifted Hessian.
class Preconditioner {
 public:
  Preconditioner(const WaveField& f, const PhysicsParams& p, double alpha) : n_(f.grid().n) {
    const auto table = potential_table(f.grid(), p);
    const auto fv = f.values();
    half_.resize(fv.size());
    for (std::size_t k = 0; k < fv.size(); ++k) {
      double w = alpha + (*table)[k];
      if (p.lambda > 0.0) w += p.lambda * std::pow(std::norm(fv[k]), p.sigma);
      half_[k] = 1.0 / std::sqrt(w);
    }
    const auto kk = wavenumbers(f.grid(), false);
    kinetic_.resize(fv.size());
    for (int a = 0; a < n_; ++a) {
      for (int b = 0; b < n_; ++b) {
        kinetic_[static_cast<std::size_t>(a) * n_ + b] = 1.0 / (alpha + 0.5 * (kk[a] * kk[a] + kk[b] * kk[b]));
      }
    }
  }

  WaveField apply(const WaveField& g) const {
    WaveField out = g;
    auto v = out.values();
    for (std::size_t k = 0; k < v.size(); ++k) v[k] *= half_[k];
    const Fft2d& fft = Fft2d::for_size(n_);
    fft.forward(v);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] *= kinetic_[k];
    fft.backward(v);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] *= half_[k];
    return out;
  }

 private:
  int n_;
  std::vector<double> half_;
  std::vector<double> kinetic_;
};

// Minimal-norm solution of the symmetric system G c = b (G is 1x1 or 2x2).
Eigen::VectorXd solve_small(const Eigen::MatrixXd& gram, const Eigen::VectorXd& rhs) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const auto& vals = eig.eigenvalues();
  const double top = vals.cwiseAbs().maxCoeff();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(rhs.size());
  for (Eigen::Index j = 0; j < vals.size(); ++j) {
    if (std::abs(vals(j)) > 1e-10 * top) {
      const Eigen::VectorXd u = eig.eigenvectors().col(j);
      c += u * (u.dot(rhs) / vals(j));
    }
  }
  return c;
}

struct Problem {
  PhysicsParams p;
  Constraints c;
  bool doubly = true;
  double Omega = 0.0;
};

struct RunResult {
  WaveField field;
  double objective = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  bool stalled = false;
  std::vector<IterationRecord> history;
};

WaveField apply_retraction(const Problem& pb, const WaveField& x) {
  if (pb.doubly) return retract(x, pb.c);
  const double mx = mass(x);
  if (!(mx > 0.0) || !std::isfinite(mx)) throw NumericalError("mass rescale of a zero or non-finite field");
  return std::sqrt(pb.c.m / mx) * x;
}

double objective(const Problem& pb, const WaveField& f) {
  return pb.doubly ? energy(f, pb.p) : rotating_energy(f, pb.p, pb.Omega);
}

// Objective change from f to g; lf is L_z f.
double objective_change(const Problem& pb, const WaveField& f, const WaveField& g, double l_f) {
  double d = energy_difference(f, g, pb.p);
  if (!pb.doubly && pb.Omega != 0.0) d -= pb.Omega * (angular_momentum(g) - l_f);
  return d;
}

// Components of the constraint gradients: {f, L_z f} or {f}.
std::vector<const WaveField*> constraint_fields(const Problem& pb, const WaveField& f, const WaveField& lf) {
  if (pb.doubly) return {&f, &lf};
  return {&f};
}

// L2-orthogonal removal of the constraint directions from g.
WaveField l2_project(const Problem& pb, const WaveField& g, const WaveField& f, const WaveField& lf) {
  if (pb.doubly) return tangent_project(g, f, lf);
  WaveField out = g;
  out.axpy(-inner_product(f, g).real() / mass(f), f);
  return out;
}

// Preconditioned projected nonlinear CG; resumable so that several starts can be raced.
class Descent {
 public:
  Descent(const Problem& pb, const WaveField& start, const SolveOptions& opts)
      : pb_(pb), opts_(opts), tau_(opts.step) {
    res_.field = apply_retraction(pb_, start);
    res_.objective = objective(pb_, res_.field);
  }

  bool done() const noexcept { return done_; }
  double current_objective() const noexcept { return res_.objective; }
  const RunResult& result() const noexcept { return res_; }
  RunResult take() { return std::move(res_); }

  void advance(int budget) {
    for (int s = 0; s < budget && !done_; ++s) iterate();
  }

 private:
  void iterate() {
    WaveField& f = res_.field;
    const WaveField lf = apply_Lz(f);
    const double l_f = inner_product(f, lf).real();
    WaveField g = euler_lagrange_apply(f, pb_.p);
    if (!pb_.doubly && pb_.Omega != 0.0) g.axpy(-pb_.Omega, lf);
    WaveField r = l2_project(pb_, g, f, lf);
    const double gn = l2_norm(r);
    res_.grad_norm = gn;
    res_.iterations = it_;
    if (opts_.keep_history) {
      res_.history.push_back({it_, res_.objective, std::abs(mass(f) - pb_.c.m) / pb_.c.m,
                              pb_.doubly ? std::abs(l_f - pb_.c.l) : 0.0, gn});
    }
    if (!std::isfinite(gn)) throw NumericalError("non-finite gradient during minimization");
    if (gn < opts_.tol_grad) {
      res_.converged = true;
      done_ = true;
      return;
    }
    if (stall_pending_) {
      res_.stalled = true;
      done_ = true;
      return;
    }
    if (it_ >= opts_.max_iters) {
      done_ = true;
      return;
    }

    const Preconditioner prec(f, pb_.p, opts_.preconditioner_shift);
    const auto cons = constraint_fields(pb_, f, lf);
    const WaveField pg = prec.apply(g);
    std::vector<WaveField> pc;
    for (const WaveField* u : cons) pc.push_back(prec.apply(*u));
    const auto k = static_cast<Eigen::Index>(cons.size());
    Eigen::MatrixXd gram(k, k);
    Eigen::VectorXd rhs(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      rhs(i) = inner_product(*cons[i], pg).real();
      for (Eigen::Index j = 0; j < k; ++j) gram(i, j) = inner_product(*cons[i], pc[j]).real();
    }
    gram = 0.5 * (gram + gram.transpose()).eval();
    const Eigen::VectorXd coef = solve_small(gram, rhs);
    WaveField d = pg;
    for (Eigen::Index j = 0; j < k; ++j) d.axpy(-coef(j), pc[j]);

    WaveField dir = d;
    if (opts_.conjugate && have_prev_) {
      // Polak-Ribiere with restart whenever the result is not a descent direction.
      const double denom = inner_product(r_prev_, d_prev_).real();
      const double beta = denom > 0.0 ? std::max(0.0, inner_product(r - r_prev_, d).real() / denom) : 0.0;
      if (beta > 0.0) {
        WaveField cand = d;
        cand.axpy(beta, dir_prev_);
        cand = l2_project(pb_, cand, f, lf);
        if (inner_product(r, cand).real() > 0.0) dir = std::move(cand);
      }
    }

    bool accepted = false;
    double change = 0.0;
    WaveField next;
    for (int bt = 0; bt <= 30; ++bt) {
      WaveField trial = f;
      trial.axpy(-tau_, dir);
      try {
        next = apply_retraction(pb_, trial);
        change = objective_change(pb_, f, next, l_f);
        if (std::isfinite(change) && change <= 0.0) {
          accepted = true;
          break;
        }
      } catch (const ConstraintInfeasible&) {
      } catch (const NewtonDiverged&) {
      }
      tau_ *= 0.5;
    }
    if (!accepted) {
      res_.stalled = true;
      done_ = true;
      return;
    }
    quiet_ = -change < opts_.tol_energy * std::max(1.0, std::abs(res_.objective)) ? quiet_ + 1 : 0;
    stall_pending_ = quiet_ >= opts_.stall_window;
    f = std::move(next);
    res_.objective = objective(pb_, f);
    tau_ = std::min(tau_ * 1.3, opts_.max_step);
    r_prev_ = std::move(r);
    d_prev_ = std::move(d);
    dir_prev_ = std::move(dir);
    have_prev_ = true;
    ++it_;
  }

  Problem pb_;
  SolveOptions opts_;
  RunResult res_;
  double tau_;
  int it_ = 0;
  int quiet_ = 0;
  bool stall_pending_ = false;
  bool done_ = false;
  WaveField r_prev_;
  WaveField d_prev_;    // preconditioned gradient at the previous iterate
  WaveField dir_prev_;  // previous search direction
  bool have_prev_ = false;
};

MinimizeReport finish_report(const Problem& pb, RunResult run, std::string label) {
  MinimizeReport rep;
  rep.energy_value = run.objective;
  rep.angular_momentum = angular_momentum(run.field);
  if (pb.doubly) {
    rep.multipliers = multipliers_estimate(run.field, pb.p);
    rep.identity_gap = identity_check(run.field, pb.p, pb.c, rep.multipliers);
  } else {
    WaveField g = euler_lagrange_apply(run.field, pb.p);
    g.axpy(-pb.Omega, apply_Lz(run.field));
    rep.multipliers = Multipliers{inner_product(run.field, g).real() / mass(run.field), pb.Omega, false};
    rep.identity_gap =
        identity_check(run.field, pb.p, Constraints{pb.c.m, rep.angular_momentum}, rep.multipliers);
  }
  rep.residual = stationary_residual(run.field, pb.p, rep.multipliers);
  rep.grad_norm = run.grad_norm;
  rep.residual_ratio = run.grad_norm > 0.0 ? rep.residual / run.grad_norm : 0.0;
  rep.history = std::move(run.history);
  rep.iterations = run.iterations;
  rep.converged = run.converged;
  rep.stalled = run.stalled;
  rep.seed_used = std::move(label);
  rep.field = std::move(run.field);
  return rep;
}

std::string pair_label(SeedPair pair) {
  std::ostringstream s;
  s << "(" << pair.n1 << "," << pair.n2 << ")";
  return s.str();
}

// Every start gets opts.race_iters iterations; the lowest objective is then run to
// completion, falling back to the next start only if it does not converge.
MinimizeReport run_starts(const Problem& pb, std::vector<std::pair<std::string, WaveField>> starts,
                          const SolveOptions& opts) {
  std::vector<std::pair<std::string, Descent>> runs;
  std::string failures;
  for (auto& [label, start] : starts) {
    try {
      runs.emplace_back(label, Descent(pb, start, opts));
      runs.back().second.advance(opts.race_iters);
    } catch (const ConstraintInfeasible& e) {
      if (!runs.empty() && runs.back().first == label) runs.pop_back();
      failures += " " + label + ": " + e.what() + ";";
    } catch (const NewtonDiverged& e) {
      if (!runs.empty() && runs.back().first == label) runs.pop_back();
      failures += " " + label + ": " + e.what() + ";";
    }
  }
  if (runs.empty()) throw NoFeasibleSeed("no start could be placed on the constraint set;" + failures);

  std::vector<std::size_t> order(runs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return runs[a].second.current_objective() < runs[b].second.current_objective();
  });
  std::size_t chosen = order.front();
  for (std::size_t idx : order) {
    Descent& run = runs[idx].second;
    run.advance(std::numeric_limits<int>::max());
    if (run.result().converged) {
      chosen = idx;
      break;
    }
    if (run.current_objective() < runs[chosen].second.current_objective()) chosen = idx;
  }
  return finish_report(pb, runs[chosen].second.take(), runs[chosen].first);
}

}  // namespace

std::optional<WaveField> seed_field(const Grid& grid, const Constraints& c, SeedPair pair,
                                    const SolveOptions& opts, std::uint64_t stream) {
  if (!(c.m > 0.0)) throw InvalidArgument("target mass must be positive");
  const double l = std::abs(c.l);
  const double eta = opts.seed_admixture;
  const double tiny = 1e-13 * c.m;

  std::vector<std::pair<int, double>> parts;
  if (pair.n1 == pair.n2) {
    if (std::abs(l - c.m * pair.n1) > 1e-12 * std::max(1.0, l)) return std::nullopt;
    parts.emplace_back(pair.n1, c.m);
  } else {
    const double dn = static_cast<double>(pair.n2) - pair.n1;
    const double m1 = (c.m * pair.n2 - l) / dn;
    const double m2 = (l - c.m * pair.n1) / dn;
    if (m1 < -tiny || m2 < -tiny) return std::nullopt;
    if (m1 > tiny) parts.emplace_back(pair.n1, (1.0 - eta) * m1);
    if (m2 > tiny) parts.emplace_back(pair.n2, (1.0 - eta) * m2);
  }

  WaveField f(grid);
  for (const auto& [n, mu] : parts) f += mode_component(grid, n, mu);
  // Single-mode seeds stay pure: the flow keeps them inside their mode class.
  if (eta > 0.0 && pair.n1 != pair.n2) {
    std::mt19937_64 rng(opts.rng_seed + 0x9e3779b97f4a7c15ULL * (stream + 1));
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    const int kmax = opts.admixture_modes;
    const double each = eta * c.m / (2 * kmax + 1);
    for (int n = -kmax; n <= kmax; ++n) {
      f.axpy(std::polar(1.0, phase(rng)), mode_component(grid, n, each));
    }
  }
  try {
    f = retract(f, Constraints{c.m, l});
  } catch (const ConstraintInfeasible&) {
    return std::nullopt;
  }
  if (c.l < 0.0) f = reflect_x1(f);
  return f;
}

MinimizeReport minimize_doubly(const PhysicsParams& p, const Grid& grid, const Constraints& c,
                               const SolveOptions& opts, const std::optional<WaveField>& initial) {
  const auto started = std::chrono::steady_clock::now();
  validate(p);
  validate(opts);
  if (!(c.m > 0.0) || !std::isfinite(c.l)) throw InvalidArgument("constraints need m > 0 and finite l");
  const Problem pb{p, c, true, 0.0};
  std::vector<std::pair<std::string, WaveField>> starts;
  if (initial) {
    require_same_grid(*initial, WaveField(grid));
    starts.emplace_back("initial", *initial);
  }
  std::vector<SeedPair> pairs = opts.seeds;
  // At l = n m the minimizer can be a pure mode-n state, which mixed seeds only
  // reach asymptotically (M and L have parallel gradients there).
  const double ratio = std::abs(c.l) / c.m;
  const double n_int = std::round(ratio);
  if (std::abs(ratio - n_int) <= 1e-12 * std::max(1.0, ratio) && n_int <= 64.0) {
    const int n = static_cast<int>(n_int);
    const bool listed = std::any_of(pairs.begin(), pairs.end(), [n](SeedPair q) { return q.n1 == n && q.n2 == n; });
    if (!listed) pairs.push_back({n, n});
  }
  for (std::size_t s = 0; s < pairs.size(); ++s) {
    if (auto f = seed_field(grid, c, pairs[s], opts, s)) starts.emplace_back(pair_label(pairs[s]), std::move(*f));
  }
  if (starts.empty()) {
    std::ostringstream msg;
    msg << "no seed pair can carry (m, l) = (" << c.m << ", " << c.l << ")";
    throw NoFeasibleSeed(msg.str());
  }
  MinimizeReport rep = run_starts(pb, std::move(starts), opts);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return rep;
}

MinimizeReport minimize_mass_only(const PhysicsParams& p, const Grid& grid, double m, double Omega,
                                  const SolveOptions& opts, const std::optional<WaveField>& initial) {
  const auto started = std::chrono::steady_clock::now();
  validate(p);
  validate(opts);
  if (!(m > 0.0) || !std::isfinite(Omega)) throw InvalidArgument("mass-only problem needs m > 0 and finite Omega");
  const Problem pb{p, Constraints{m, 0.0}, false, Omega};
  std::vector<std::pair<std::string, WaveField>> starts;
  if (initial) {
    require_same_grid(*initial, WaveField(grid));
    starts.emplace_back("initial", *initial);
  }
  // Seeds at the midpoint momentum of each pair; the momentum is free here.
  for (std::size_t s = 0; s < opts.seeds.size(); ++s) {
    const SeedPair pair = opts.seeds[s];
    const Constraints mid{m, 0.5 * m * (pair.n1 + pair.n2)};
    if (auto f = seed_field(grid, mid, pair, opts, s)) starts.emplace_back(pair_label(pair), std::move(*f));
  }
  if (starts.empty()) throw NoFeasibleSeed("no seed for the mass-only problem");
  MinimizeReport rep = run_starts(pb, std::move(starts), opts);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return rep;
}

EnergyCurve scan_l(const PhysicsParams& p, const Grid& grid, double m, const std::vector<double>& l_grid,
                   const SolveOptions& opts, ScanMode mode) {
  EnergyCurve curve;
  curve.m = m;
  std::optional<WaveField> previous;
  for (double l : l_grid) {
    if (!std::isfinite(l)) throw InvalidArgument("l grid contains a non-finite value");
    MinimizeReport rep = minimize_doubly(p, grid, Constraints{m, l}, opts,
                                         mode == ScanMode::kWarm ? previous : std::nullopt);
    previous = rep.field;
    curve.l_values.push_back(l);
    curve.e_values.push_back(rep.energy_value);
    curve.reports.push_back(std::move(rep));
  }
  return curve;
}

LegendreReport legendre_check(const EnergyCurve& curve, double e_omega, double Omega) {
  if (curve.l_values.empty() || curve.l_values.size() != curve.e_values.size()) {
    throw InvalidArgument("legendre check on an empty curve");
  }
  const double slack = 1e-6 * std::max(1.0, std::abs(e_omega));
  LegendreReport rep;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < curve.l_values.size(); ++i) {
    const double l = curve.l_values[i];
    const double v = curve.e_values[i] - Omega * l;
    if (v < e_omega - slack) ++rep.inequality_violations;
    if (l >= 0.0 && v < best) {
      best = v;
      rep.argmin_l = l;
    }
  }
  if (!std::isfinite(best)) throw InvalidArgument("legendre check needs grid points with l >= 0");
  rep.gap = std::abs(e_omega - best);
  return rep;
}

}  // namespace rotbound
