#include "rotbound/modes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rotbound/fft.hpp"

namespace rotbound {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Band-limited interpolant of a grid field, evaluated at arbitrary points.
class TrigInterpolant {
 public:
  explicit TrigInterpolant(const WaveField& f) : grid_(f.grid()), spectrum_(f) {
    Fft2d::for_size(grid_.n).forward(spectrum_.values());
    const double inv = 1.0 / (static_cast<double>(grid_.n) * grid_.n);
    for (auto& v : spectrum_.values()) v *= inv;
    ex_.resize(static_cast<std::size_t>(grid_.n));
    ey_.resize(static_cast<std::size_t>(grid_.n));
  }

  cplx operator()(double x1, double x2) {
    fill_phases(x1, ex_);
    fill_phases(x2, ey_);
    const int n = grid_.n;
    cplx acc = 0.0;
    for (int a = 0; a < n; ++a) {
      const cplx* row = &spectrum_.at(a, 0);
      cplx inner = 0.0;
      for (int b = 0; b < n; ++b) inner += row[b] * ey_[static_cast<std::size_t>(b)];
      acc += ex_[static_cast<std::size_t>(a)] * inner;
    }
    return acc;
  }

 private:
  void fill_phases(double x, std::vector<cplx>& out) const {
    const int n = grid_.n;
    const double t = (x - grid_.coord(0)) / grid_.spacing();  // fractional index
    for (int j = 0; j < n; ++j) {
      const int signed_j = j < n / 2 ? j : j - n;
      out[static_cast<std::size_t>(j)] = std::polar(1.0, kTwoPi * signed_j * t / n);
    }
    // Split the Nyquist term evenly between +n/2 and -n/2.
    out[static_cast<std::size_t>(n / 2)] = std::cos(std::numbers::pi * t);
  }

  Grid grid_;
  WaveField spectrum_;
  std::vector<cplx> ex_;
  std::vector<cplx> ey_;
};

std::vector<double> barycentric_weights(const std::vector<double>& nodes,
                                        const std::vector<double>& gl_weights) {
  // Closed form for Gauss-Legendre nodes: w_j = (-1)^j sqrt((1 - t_j^2) W_j).
  std::vector<double> w(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double s = std::sqrt((1.0 - nodes[j] * nodes[j]) * gl_weights[j]);
    w[j] = (j % 2 == 0) ? s : -s;
  }
  return w;
}

}  // namespace

void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(static_cast<std::size_t>(count), 0.0);
  weights.assign(static_cast<std::size_t>(count), 0.0);
  for (int i = 0; i < (count + 1) / 2; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = t;
      for (int k = 2; k <= count; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (count == 1) p0 = 1.0;
      dp = count * (t * p1 - p0) / (t * t - 1.0);
      const double step = p1 / dp;
      t -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - t * t) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(count - 1 - i);
    nodes[lo] = -t;
    nodes[hi] = t;
    weights[lo] = w;
    weights[hi] = w;
  }
}

double AngularModes::mode_mass(int n) const {
  const auto c = mode(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) acc += radial_weights[i] * std::norm(c[i]);
  return kTwoPi * acc;
}

double AngularModes::total_mass() const {
  double acc = 0.0;
  for (int n = -n_max; n <= n_max; ++n) acc += mode_mass(n);
  return acc;
}

double AngularModes::fraction_outside(int n) const {
  const double total = total_mass();
  if (total <= 0.0) return 0.0;
  double outside = 0.0;
  for (int k = -n_max; k <= n_max; ++k) {
    if (k != n) outside += mode_mass(k);
  }
  return outside / total;
}

AngularModes to_modes(const WaveField& f, int n_max) {
  const Grid& g = f.grid();
  if (n_max < 0 || n_max > g.n / 4) {
    throw InvalidArgument("n_max must lie in [0, n/4] for this grid");
  }
  AngularModes out;
  out.n_max = n_max;
  out.r_max = g.extent;
  out.angular_points = std::max(4 * n_max, g.n / 2);

  const int rings = g.n / 2;
  std::vector<double> t;
  std::vector<double> w;
  gauss_legendre(rings, t, w);
  out.radii.resize(t.size());
  out.radial_weights.resize(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = 0.5 * g.extent * (t[i] + 1.0);
    out.radii[i] = r;
    out.radial_weights[i] = 0.5 * g.extent * w[i] * r;
  }

  const int na = out.angular_points;
  out.coeffs.assign(static_cast<std::size_t>(2 * n_max + 1),
                    std::vector<cplx>(static_cast<std::size_t>(rings)));
  TrigInterpolant interp(f);
  std::vector<cplx> ring(static_cast<std::size_t>(na));
  for (int i = 0; i < rings; ++i) {
    const double r = out.radii[static_cast<std::size_t>(i)];
    for (int j = 0; j < na; ++j) {
      const double phi = kTwoPi * j / na;
      ring[static_cast<std::size_t>(j)] = interp(r * std::cos(phi), r * std::sin(phi));
    }
    for (int n = -n_max; n <= n_max; ++n) {
      cplx acc = 0.0;
      for (int j = 0; j < na; ++j) {
        acc += ring[static_cast<std::size_t>(j)] * std::polar(1.0, -kTwoPi * n * j / na);
      }
      out.mode(n)[static_cast<std::size_t>(i)] = acc / static_cast<double>(na);
    }
  }
  return out;
}

WaveField from_modes(const AngularModes& modes, const Grid& grid) {
  const std::size_t rings = modes.radii.size();
  // Barycentric weights in the reference variable t in [-1, 1].
  std::vector<double> t(rings);
  for (std::size_t i = 0; i < rings; ++i) t[i] = 2.0 * modes.radii[i] / modes.r_max - 1.0;
  std::vector<double> ref_nodes;
  std::vector<double> ref_weights;
  gauss_legendre(static_cast<int>(rings), ref_nodes, ref_weights);
  const auto bw = barycentric_weights(ref_nodes, ref_weights);

  WaveField out(grid);
  std::vector<double> lagrange(rings);
  const double r_max2 = modes.r_max * modes.r_max;
  for (int a = 0; a < grid.n; ++a) {
    const double x1 = grid.coord(a);
    for (int b = 0; b < grid.n; ++b) {
      const double x2 = grid.coord(b);
      const double r2 = x1 * x1 + x2 * x2;
      if (r2 > r_max2) continue;
      const double r = std::sqrt(r2);
      const double tr = 2.0 * r / modes.r_max - 1.0;
      std::size_t hit = rings;
      double denom = 0.0;
      for (std::size_t i = 0; i < rings; ++i) {
        const double diff = tr - t[i];
        if (diff == 0.0) {
          hit = i;
          break;
        }
        lagrange[i] = bw[i] / diff;
        denom += lagrange[i];
      }
      if (hit < rings) {
        std::fill(lagrange.begin(), lagrange.end(), 0.0);
        lagrange[hit] = 1.0;
      } else {
        for (auto& l : lagrange) l /= denom;
      }
      const double phi = std::atan2(x2, x1);
      cplx acc = 0.0;
      for (int n = -modes.n_max; n <= modes.n_max; ++n) {
        const auto c = modes.mode(n);
        cplx cr = 0.0;
        for (std::size_t i = 0; i < rings; ++i) cr += lagrange[i] * c[i];
        acc += cr * std::polar(1.0, n * phi);
      }
      out.at(a, b) = acc;
    }
  }
  return out;
}

}  // namespace rotbound
