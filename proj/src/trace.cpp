#include "specnet/trace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "specnet/error.hpp"

namespace specnet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Complex phase_factor(double theta) {
  return Complex(std::cos(kTwoPi * theta), std::sin(kTwoPi * theta));
}

struct Frame {
  std::vector<Complex> roots;
  int ia = -1, ib = -1;

  Complex vi() const { return roots[ia]; }
  Complex vj() const { return roots[ib]; }
  double pair_gap() const { return std::abs(vi() - vj()); }
  bool pair_is_min_gap() const {
    double best = std::numeric_limits<double>::infinity();
    int a = -1, b = -1;
    for (size_t x = 0; x < roots.size(); ++x)
      for (size_t y = x + 1; y < roots.size(); ++y) {
        const double g = std::abs(roots[x] - roots[y]);
        if (g < best) {
          best = g;
          a = static_cast<int>(x);
          b = static_cast<int>(y);
        }
      }
    return (a == std::min(ia, ib) && b == std::max(ia, ib));
  }
};

// Roots at z continued from `prev`; false when the pair match is ambiguous.
bool eval_frame(const SpectralData& data, Complex z, const Frame& prev,
                Frame& out) {
  thread_local std::vector<Complex> coeffs;
  data.sigma_coeffs_into(z, coeffs);
  out.roots = prev.roots;
  if (!aberth_refine_inplace(coeffs, out.roots)) {
    try {
      out.roots = poly_roots_from(Poly(coeffs), prev.roots);
    } catch (const Error&) {
      return false;
    }
  }
  auto match = [&](Complex v, int& slot) {
    double d0 = std::numeric_limits<double>::infinity(), d1 = d0;
    slot = -1;
    for (size_t k = 0; k < out.roots.size(); ++k) {
      const double d = std::abs(out.roots[k] - v);
      if (d < d0) {
        d1 = d0;
        d0 = d;
        slot = static_cast<int>(k);
      } else if (d < d1) {
        d1 = d;
      }
    }
    return d0 < 0.45 * d1 || d1 == std::numeric_limits<double>::infinity();
  };
  int ia, ib;
  if (!match(prev.vi(), ia)) return false;
  if (!match(prev.vj(), ib)) return false;
  if (ia == ib) return false;
  out.ia = ia;
  out.ib = ib;
  return true;
}

// max movement under greedy nearest assignment between two root sets
double root_movement(const std::vector<Complex>& a,
                     const std::vector<Complex>& b) {
  const size_t k = a.size();
  struct Cand {
    double d;
    int i, j;
  };
  std::vector<Cand> cands;
  cands.reserve(k * k);
  for (size_t i = 0; i < k; ++i)
    for (size_t j = 0; j < k; ++j)
      cands.push_back({std::abs(a[i] - b[j]), int(i), int(j)});
  std::sort(cands.begin(), cands.end(),
            [](const Cand& x, const Cand& y) { return x.d < y.d; });
  std::vector<bool> ua(k, false), ub(k, false);
  size_t placed = 0;
  double worst = 0.0;
  for (const auto& c : cands) {
    if (ua[c.i] || ub[c.j]) continue;
    ua[c.i] = true;
    ub[c.j] = true;
    worst = std::max(worst, c.d);
    if (++placed == k) break;
  }
  return worst;
}

double min_root_gap(const std::vector<Complex>& r) {
  double g = std::numeric_limits<double>::infinity();
  for (size_t x = 0; x < r.size(); ++x)
    for (size_t y = x + 1; y < r.size(); ++y)
      g = std::min(g, std::abs(r[x] - r[y]));
  return g;
}

}  // namespace

Complex Wall::tangent_at(size_t n, double theta) const {
  const Complex d = sheet_values[n].first - sheet_values[n].second;
  const Complex t = phase_factor(theta) / d;
  return t / std::abs(t);
}

Complex Wall::position_on(size_t seg, double t) const {
  return points[seg] + t * (points[seg + 1] - points[seg]);
}

std::pair<Complex, Complex> Wall::values_on(size_t seg, double t) const {
  const auto& a = sheet_values[seg];
  const auto& b = sheet_values[seg + 1];
  return {a.first + t * (b.first - a.first),
          a.second + t * (b.second - a.second)};
}

double Wall::mass_on(size_t seg, double t) const {
  return mass_profile[seg] + t * (mass_profile[seg + 1] - mass_profile[seg]);
}

std::array<WallSeed, 3> seed_rays(const SpectralData& data,
                                  const TurningPoint& tp,
                                  const TraceConfig& cfg) {
  if (!tp.simple)
    throw Error(ErrorCode::DegenerateBranch,
                "seed_rays requires a simple turning point");
  const double r0 = cfg.seed_radius;
  const Complex c = tp.local_coefficient;
  const double base =
      (2.0 / 3.0) * (kTwoPi * cfg.theta - std::arg(2.0 * c / 3.0));
  const double inherited =
      (2.0 * std::abs(c) / 3.0) * std::pow(r0, 1.5);

  std::array<WallSeed, 3> seeds;
  for (int k = 0; k < 3; ++k) {
    const double phi = base + (2.0 / 3.0) * kTwoPi * double(k);
    const Complex dir(std::cos(phi), std::sin(phi));
    const Complex pos = tp.position + r0 * dir;
    const SheetSet sheets = eval_sheets(data, pos, cfg.curve);

    int bi = 0, bj = 1;
    double bg = std::numeric_limits<double>::infinity();
    for (int a = 0; a < data.K; ++a)
      for (int b = a + 1; b < data.K; ++b) {
        const double g = std::abs(sheets.values[a] - sheets.values[b]);
        if (g < bg) {
          bg = g;
          bi = a;
          bj = b;
        }
      }
    Complex vi = sheets.values[bi], vj = sheets.values[bj];
    const Complex integrand = (vi - vj) * dir / phase_factor(cfg.theta);
    if (integrand.real() < 0.0) std::swap(vi, vj);

    seeds[k].position = pos;
    seeds[k].pair_values = {vi, vj};
    seeds[k].inherited_mass = inherited;
    seeds[k].source = {SourceKind::TurningPointRay, tp.id, k, -1};
  }
  return seeds;
}

Wall trace_wall(const SpectralData& data, const WallSeed& seed,
                const TraceConfig& cfg,
                const std::vector<TurningPoint>& turning_points) {
  Wall wall;
  wall.inherited_mass = seed.inherited_mass;
  wall.source = seed.source;

  const Complex rot = phase_factor(cfg.theta);
  const double cutoff_span = cfg.mass_cutoff - seed.inherited_mass;

  Frame frame;
  {
    const SheetSet sheets = eval_sheets(data, seed.position, cfg.curve);
    frame.roots = sheets.values;
    SheetTracker probe(data, seed.position, sheets.values, cfg.curve);
    frame.ia = probe.match_value(seed.pair_values.first,
                                 cfg.curve.sheet_match_tol * 100.0);
    frame.ib = probe.match_value(seed.pair_values.second,
                                 cfg.curve.sheet_match_tol * 100.0);
    if (frame.ia == frame.ib)
      throw Error(ErrorCode::MatchFailure, "seed pair values coincide");
  }

  Complex z = seed.position;
  double s = 0.0;
  auto record = [&](Complex pos, double mass) {
    wall.points.push_back(pos);
    wall.sheet_values.push_back({frame.vi(), frame.vj()});
    wall.mass_profile.push_back(mass);
  };
  record(z, seed.inherited_mass);

  if (cutoff_span <= 0.0) {
    wall.termination = {TerminationKind::MassCutoff, -1};
    return wall;
  }

  bool escaped = seed.source.kind != SourceKind::TurningPointRay;
  double h = cfg.step_init;

  auto deriv = [&](Complex at, const Frame& base, Complex& out) {
    Frame f;
    if (!eval_frame(data, at, base, f)) return false;
    const Complex d = f.vi() - f.vj();
    if (std::abs(d) < 1e-300) return false;
    out = rot / d;
    return true;
  };

  // Cash-Karp 4(5) tableau
  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 3.0 / 10.0, a42 = -9.0 / 10.0, a43 = 6.0 / 5.0;
  static constexpr double a51 = -11.0 / 54.0, a52 = 5.0 / 2.0,
                          a53 = -70.0 / 27.0, a54 = 35.0 / 27.0;
  static constexpr double a61 = 1631.0 / 55296.0, a62 = 175.0 / 512.0,
                          a63 = 575.0 / 13824.0, a64 = 44275.0 / 110592.0,
                          a65 = 253.0 / 4096.0;
  static constexpr double b1 = 37.0 / 378.0, b3 = 250.0 / 621.0,
                          b4 = 125.0 / 594.0, b6 = 512.0 / 1771.0;
  static constexpr double e1 = b1 - 2825.0 / 27648.0, e3 = b3 - 18575.0 / 48384.0,
                          e4 = b4 - 13525.0 / 55296.0, e5 = -277.0 / 14336.0,
                          e6 = b6 - 1.0 / 4.0;

  for (int step = 0;; ++step) {
    if (step >= cfg.max_steps) {
      wall.termination = {TerminationKind::StepFailure, -1};
      return wall;
    }
    const double remaining = cutoff_span - s;
    if (remaining <= cfg.step_min) {
      wall.termination = {TerminationKind::MassCutoff, -1};
      return wall;
    }
    h = std::min(h, remaining);

    Complex k1, k2, k3, k4, k5, k6;
    bool ok = deriv(z, frame, k1) &&
              deriv(z + h * (a21 * k1), frame, k2) &&
              deriv(z + h * (a31 * k1 + a32 * k2), frame, k3) &&
              deriv(z + h * (a41 * k1 + a42 * k2 + a43 * k3), frame, k4) &&
              deriv(z + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), frame,
                    k5) &&
              deriv(z + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 +
                             a65 * k5),
                    frame, k6);

    Frame next;
    Complex z_next;
    double err = std::numeric_limits<double>::infinity();
    if (ok) {
      z_next = z + h * (b1 * k1 + b3 * k3 + b4 * k4 + b6 * k6);
      err = std::abs(h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6));
      ok = eval_frame(data, z_next, frame, next);
    }

    const double tol = cfg.ode_tol * (1.0 + std::abs(z));
    bool accept = ok && err <= tol;

    if (accept) {
      // sheet-swap guard near the branch locus
      const double movement = root_movement(frame.roots, next.roots);
      if (min_root_gap(next.roots) < 10.0 * movement) accept = false;
    }
    if (accept) {
      // the trapezoid mass over the chord must reproduce the exact unit-rate
      // increment h, so that mass_along agrees with the arc parameter
      const Complex chord = z_next - z;
      const Complex trap =
          0.5 * ((frame.vi() - frame.vj()) + (next.vi() - next.vj())) * chord /
          rot;
      if (std::abs(trap.real() - h) > cfg.quad_tol * h + 1e-13) accept = false;
      if (std::abs(trap.imag()) >
          cfg.pres_tol * std::abs(chord) * frame.pair_gap())
        accept = false;
    }

    if (!accept) {
      h *= 0.5;
      if (h < cfg.step_min) {
        wall.termination = {TerminationKind::StepFailure, -1};
        return wall;
      }
      continue;
    }

    z = z_next;
    frame = next;
    s += h;
    record(z, seed.inherited_mass + s);

    if (err > 0.0) {
      const double grow = 0.9 * std::pow(tol / err, 0.2);
      h = std::clamp(h * std::clamp(grow, 0.2, 5.0), cfg.step_min,
                     cfg.step_max);
    } else {
      h = std::min(h * 5.0, cfg.step_max);
    }

    // domain / puncture / capture events
    if (std::abs(z) > data.domain_radius) {
      wall.termination = data.punctures.at_infinity
                             ? Termination{TerminationKind::
                                               EnteredPunctureNeighborhood, -1}
                             : Termination{TerminationKind::LeftDomain, -1};
      return wall;
    }
    for (size_t pi = 0; pi < data.punctures.finite.size(); ++pi) {
      if (std::abs(z - data.punctures.finite[pi]) < cfg.puncture_radius) {
        wall.termination = {TerminationKind::EnteredPunctureNeighborhood,
                            static_cast<int>(pi)};
        return wall;
      }
    }
    for (const auto& tp : turning_points) {
      const double dist = std::abs(z - tp.position);
      const bool is_source = seed.source.kind == SourceKind::TurningPointRay &&
                             seed.source.turning_point == tp.id;
      if (is_source && !escaped) {
        if (dist > 1.2 * cfg.capture_radius()) escaped = true;
        continue;
      }
      if (dist < cfg.capture_radius() && frame.pair_is_min_gap()) {
        // analytic tail from the capture point into the turning point
        const double tail = (2.0 * std::abs(tp.local_coefficient) / 3.0) *
                            std::pow(dist, 1.5);
        wall.points.push_back(tp.position);
        wall.sheet_values.push_back({frame.vi(), frame.vj()});
        wall.mass_profile.push_back(seed.inherited_mass + s + tail);
        wall.termination = {TerminationKind::HitTurningPoint, tp.id};
        return wall;
      }
    }
  }
}

double mass_along(const Wall& wall, size_t point_index, double theta,
                  double pres_tol) {
  if (point_index >= wall.size())
    throw Error(ErrorCode::ValidationError, "point index outside wall");
  const Complex conj_rot = Complex(1.0) / phase_factor(theta);
  Complex acc(0);
  for (size_t n = 0; n + 1 <= point_index; ++n) {
    const Complex ga = wall.sheet_values[n].first - wall.sheet_values[n].second;
    const Complex gb =
        wall.sheet_values[n + 1].first - wall.sheet_values[n + 1].second;
    acc += conj_rot * 0.5 * (ga + gb) * (wall.points[n + 1] - wall.points[n]);
  }
  if (std::abs(acc.imag()) > pres_tol * (std::abs(acc.real()) + 1.0))
    throw Error(ErrorCode::PrestokesViolation,
                "imaginary part of the mass integral exceeds tolerance");
  return wall.inherited_mass + acc.real();
}

}  // namespace specnet
