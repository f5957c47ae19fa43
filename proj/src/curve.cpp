#include "specnet/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "specnet/error.hpp"

namespace specnet {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------- rational

RationalFunction::RationalFunction(Poly num, Poly den)
    : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero())
    throw Error(ErrorCode::ValidationError,
                "rational function denominator is identically zero");
}

std::vector<Complex> RationalFunction::poles() const {
  if (den_.degree() < 1) return {};
  return poly_roots(den_);
}

double PunctureSet::distance_to_finite(Complex z) const {
  double d = kInf;
  for (const auto& p : finite) d = std::min(d, std::abs(z - p));
  return d;
}

std::vector<Complex> SpectralData::sigma_coeffs(Complex z) const {
  std::vector<Complex> c;
  sigma_coeffs_into(z, c);
  return c;
}

void SpectralData::sigma_coeffs_into(Complex z, std::vector<Complex>& out) const {
  out.resize(static_cast<size_t>(K) + 1);
  out[K] = Complex(1);
  for (int i = 1; i <= K; ++i) out[K - i] = -coefficients[i - 1].eval(z);
}

Complex SpectralData::sigma(Complex z, Complex zeta) const {
  const auto c = sigma_coeffs(z);
  Complex acc(0);
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * zeta + *it;
  return acc;
}

std::vector<Poly> SpectralData::cleared_sigma_coeffs() const {
  Poly common({Complex(1)});
  for (const auto& phi : coefficients) common *= phi.denominator();
  std::vector<Poly> a(static_cast<size_t>(K) + 1);
  a[K] = common;
  for (int i = 1; i <= K; ++i) {
    Poly prod({Complex(-1)});
    prod *= coefficients[i - 1].numerator();
    for (int j = 1; j <= K; ++j)
      if (j != i) prod *= coefficients[j - 1].denominator();
    a[K - i] = std::move(prod);
  }
  return a;
}

void SpectralData::validate() const {
  if (K < 1) throw Error(ErrorCode::ValidationError, "K must be >= 1");
  if (static_cast<int>(coefficients.size()) != K)
    throw Error(ErrorCode::ValidationError,
                "expected K coefficient functions");
  if (punctures.empty())
    throw Error(ErrorCode::ValidationError, "puncture set must be nonempty");
  if (domain_radius <= 0)
    throw Error(ErrorCode::ValidationError, "domainRadius must be positive");
  for (int i = 0; i < K; ++i) {
    for (const auto& pole : coefficients[i].poles()) {
      if (punctures.distance_to_finite(pole) > 1e-6 * (1.0 + std::abs(pole)))
        throw Error(ErrorCode::ValidationError,
                    "finite pole of phi_" + std::to_string(i + 1) +
                        " is not listed in punctures (SpectralData invariant)");
    }
  }
}

// ------------------------------------------------------------------ sheets

SheetSet eval_sheets(const SpectralData& data, Complex z,
                     const CurveConfig& cfg) {
  Poly p(data.sigma_coeffs(z));
  auto roots = poly_roots(p);
  std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  for (const auto& r : roots) {
    const double denom = 1.0 + std::pow(std::abs(r), data.K);
    if (std::abs(data.sigma(z, r)) > cfg.residual_tol * denom * 10.0)
      throw Error(ErrorCode::RootFailure,
                  "sheet residual above tolerance at z=(" +
                      std::to_string(z.real()) + "," + std::to_string(z.imag()) +
                      ")");
  }
  return SheetSet{z, std::move(roots)};
}

SheetTracker::SheetTracker(const SpectralData& data, Complex z,
                           std::vector<Complex> values, const CurveConfig& cfg)
    : data_(&data), cfg_(cfg), z_(z), values_(std::move(values)) {}

SheetTracker::SheetTracker(const SpectralData& data, const SheetSet& start,
                           const CurveConfig& cfg)
    : SheetTracker(data, start.basepoint, start.values, cfg) {}

int SheetTracker::match_value(Complex v, double tol) const {
  int best = -1;
  double d0 = kInf, d1 = kInf;
  for (size_t i = 0; i < values_.size(); ++i) {
    const double d = std::abs(values_[i] - v);
    if (d < d0) {
      d1 = d0;
      d0 = d;
      best = static_cast<int>(i);
    } else if (d < d1) {
      d1 = d;
    }
  }
  const double scale = 1.0 + std::abs(v);
  if (best < 0 || d0 > tol * scale || (d1 < 2.0 * d0 && d1 < tol * scale))
    throw Error(ErrorCode::MatchFailure, "ambiguous sheet value match");
  return best;
}

void SheetTracker::advance(Complex target) { step(target, 0); }

void SheetTracker::step(Complex target, int depth) {
  if (target == z_) return;
  Poly p(data_->sigma_coeffs(target));
  std::vector<Complex> roots;
  bool ok = true;
  try {
    roots = poly_roots_from(p, values_);
  } catch (const Error&) {
    ok = false;
  }

  std::vector<int> assign(values_.size(), -1);
  double max_move = 0.0, min_gap = kInf;
  if (ok) {
    const size_t k = values_.size();
    // Globally greedy nearest pairing; bijective by construction.
    struct Cand {
      double d;
      int i, j;
    };
    std::vector<Cand> cands;
    cands.reserve(k * k);
    for (size_t i = 0; i < k; ++i)
      for (size_t j = 0; j < k; ++j)
        cands.push_back({std::abs(values_[i] - roots[j]), int(i), int(j)});
    std::sort(cands.begin(), cands.end(),
              [](const Cand& a, const Cand& b) { return a.d < b.d; });
    std::vector<bool> used_new(k, false);
    size_t placed = 0;
    for (const auto& c : cands) {
      if (assign[c.i] >= 0 || used_new[c.j]) continue;
      assign[c.i] = c.j;
      used_new[c.j] = true;
      max_move = std::max(max_move, c.d);
      if (++placed == k) break;
    }
    for (size_t a = 0; a < k; ++a)
      for (size_t b = a + 1; b < k; ++b)
        min_gap = std::min(min_gap, std::abs(roots[a] - roots[b]));
    if (k == 1) min_gap = kInf;
  }

  if (ok && min_gap > 3.0 * max_move) {
    for (size_t i = 0; i < values_.size(); ++i) values_[i] = roots[assign[i]];
    z_ = target;
    return;
  }

  const double seg = std::abs(target - z_);
  if (depth >= cfg_.continuation_max_depth || seg < cfg_.continuation_min_step)
    throw Error(ErrorCode::AmbiguousContinuation,
                "bisection bottomed out; path too close to the branch locus");
  const Complex mid = z_ + (target - z_) * 0.5;
  step(mid, depth + 1);
  step(target, depth + 1);
}

std::pair<SheetSet, std::vector<int>> continue_sheets(
    const SpectralData& data, const std::vector<Complex>& path,
    const SheetSet& start, const CurveConfig& cfg) {
  if (path.empty())
    throw Error(ErrorCode::ValidationError, "continuation path is empty");
  SheetTracker tracker(data, path.front(), start.values, cfg);
  for (size_t i = 1; i < path.size(); ++i) tracker.advance(path[i]);

  SheetSet end;
  end.basepoint = path.back();
  end.values = tracker.values();
  std::sort(end.values.begin(), end.values.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  std::vector<int> perm(start.values.size());
  std::vector<bool> taken(end.values.size(), false);
  for (size_t i = 0; i < tracker.values().size(); ++i) {
    int best = -1;
    double bd = kInf;
    for (size_t j = 0; j < end.values.size(); ++j) {
      if (taken[j]) continue;
      const double d = std::abs(end.values[j] - tracker.values()[i]);
      if (d < bd) {
        bd = d;
        best = static_cast<int>(j);
      }
    }
    taken[best] = true;
    perm[i] = best;
  }
  return {std::move(end), std::move(perm)};
}

// ----------------------------------------------------------- branch points

Poly discriminant_poly(const SpectralData& data) {
  if (data.K < 2) return Poly({Complex(1)});
  const auto a = data.cleared_sigma_coeffs();
  std::vector<Poly> b(static_cast<size_t>(data.K));
  for (int i = 0; i < data.K; ++i) b[i] = a[i + 1] * Complex(double(i + 1));
  return resultant_in_main_variable(a, b);
}

namespace {

struct Cluster {
  Complex center;
  int count = 0;
};

std::vector<Cluster> cluster_points(std::vector<Complex> pts, double tol_abs) {
  std::vector<Cluster> out;
  std::sort(pts.begin(), pts.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  std::vector<bool> used(pts.size(), false);
  for (size_t i = 0; i < pts.size(); ++i) {
    if (used[i]) continue;
    Complex sum = pts[i];
    int n = 1;
    used[i] = true;
    bool grew = true;
    while (grew) {
      grew = false;
      const Complex mean = sum / double(n);
      for (size_t j = 0; j < pts.size(); ++j) {
        if (used[j]) continue;
        if (std::abs(pts[j] - mean) < tol_abs) {
          sum += pts[j];
          ++n;
          used[j] = true;
          grew = true;
        }
      }
    }
    out.push_back({sum / double(n), n});
  }
  return out;
}

}  // namespace

std::vector<TurningPoint> branch_points(const SpectralData& data,
                                        const CurveConfig& cfg) {
  const Poly disc = discriminant_poly(data);
  if (disc.degree() < 1) return {};
  auto roots = poly_roots(disc);

  double scale = 1.0;
  for (const auto& r : roots) scale = std::max(scale, std::abs(r));
  auto clusters = cluster_points(std::move(roots), cfg.cluster_tol * scale * 100.0);

  std::vector<Cluster> kept;
  for (const auto& c : clusters) {
    if (data.punctures.distance_to_finite(c.center) <
        cfg.puncture_filter_tol * (1.0 + std::abs(c.center)))
      continue;
    kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end(), [](const Cluster& a, const Cluster& b) {
    if (a.center.real() != b.center.real())
      return a.center.real() < b.center.real();
    return a.center.imag() < b.center.imag();
  });

  std::vector<TurningPoint> out;
  for (size_t idx = 0; idx < kept.size(); ++idx) {
    TurningPoint tp;
    tp.id = static_cast<int>(idx);
    tp.position = kept[idx].center;
    tp.multiplicity = kept[idx].count;
    tp.simple = kept[idx].count == 1;
    if (!tp.simple) {
      if (cfg.strict)
        throw Error(ErrorCode::DegenerateBranch,
                    "non-simple branch point found (strong GMN assumes simple "
                    "branch points)");
      out.push_back(tp);
      continue;
    }

    double nearest = kInf;
    for (size_t j = 0; j < kept.size(); ++j)
      if (j != idx)
        nearest = std::min(nearest, std::abs(kept[j].center - tp.position));
    for (const auto& p : data.punctures.finite)
      nearest = std::min(nearest, std::abs(p - tp.position));
    if (!std::isfinite(nearest)) nearest = data.domain_radius;
    const double probe_r = cfg.probe_r_factor * nearest;
    tp.probe_radius = probe_r;

    // Least-squares fit of c from (zeta_i - zeta_j)^2 = c^2 (z - z0) sampled
    // on the probe circle; squaring removes the square-root sign ambiguity.
    const int samples = 16;
    Complex c2_acc(0);
    for (int s = 0; s < samples; ++s) {
      const double ang = 2.0 * std::numbers::pi * s / samples;
      const Complex dz = probe_r * Complex(std::cos(ang), std::sin(ang));
      const SheetSet sheets = eval_sheets(data, tp.position + dz, cfg);
      int bi = 0, bj = 1;
      double bg = kInf;
      for (int a = 0; a < data.K; ++a)
        for (int b = a + 1; b < data.K; ++b) {
          const double g = std::abs(sheets.values[a] - sheets.values[b]);
          if (g < bg) {
            bg = g;
            bi = a;
            bj = b;
          }
        }
      const Complex d = sheets.values[bi] - sheets.values[bj];
      c2_acc += d * d / dz;
      if (s == 0) {
        tp.probe_anchor = tp.position + dz;
        tp.pair_values = {sheets.values[bi], sheets.values[bj]};
        tp.type_pair = {bi, bj};
      }
    }
    tp.local_coefficient = std::sqrt(c2_acc / double(samples));
    if (std::abs(tp.local_coefficient) <= 0.0)
      throw Error(ErrorCode::DegenerateBranch,
                  "vanishing local coefficient at a simple branch point");
    out.push_back(tp);
  }
  return out;
}

// -------------------------------------------------------------- GMN check

namespace {

// Valuation (root multiplicity) and the deflated leading value of p at z0.
std::pair<int, Complex> poly_valuation_at(const Poly& p, Complex z0) {
  if (p.is_zero()) return {std::numeric_limits<int>::max(), Complex(0)};
  double scale = 0.0;
  for (const auto& c : p.coeffs()) scale = std::max(scale, std::abs(c));
  std::vector<Complex> c = p.coeffs();
  int val = 0;
  while (true) {
    const size_t n = c.size() - 1;
    if (n == 0) {
      if (std::abs(c[0]) > 1e-9 * std::max(scale, 1.0)) return {val, c[0]};
      return {val, Complex(0)};
    }
    // synthetic division by (z - z0): quotient + remainder in one pass
    std::vector<Complex> quot(n);
    quot[n - 1] = c[n];
    for (size_t k = n - 1; k >= 1; --k) quot[k - 1] = c[k] + z0 * quot[k];
    const Complex rem = c[0] + z0 * quot[0];
    if (std::abs(rem) > 1e-9 * std::max(scale, 1.0)) return {val, rem};
    c = std::move(quot);
    ++val;
    if (val > 64) return {val, Complex(0)};
  }
}

struct BranchGroup {
  double exponent;     // growth exponent at infinity, valuation at finite p
  int count;
  bool coeffs_distinct;
  bool identically_zero = false;
};

struct PolygonPoint {
  int i;
  double v;
  Complex lead;
};

// Lower Newton polygon of sum_i B_i zeta^i at a puncture; returns branch
// groups (exponent = root valuation in the local variable).
std::vector<BranchGroup> newton_branch_groups(
    const std::vector<PolygonPoint>& pts, int zero_branches) {
  std::vector<BranchGroup> groups;
  if (zero_branches > 0)
    groups.push_back({kInf, zero_branches, true, true});
  if (pts.size() < 2) return groups;

  // monotone lower hull (points already sorted by i)
  std::vector<PolygonPoint> hull;
  for (const auto& p : pts) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull[hull.size() - 1];
      const double cross =
          (double(b.i) - a.i) * (p.v - a.v) - (b.v - a.v) * (double(p.i) - a.i);
      if (cross <= 1e-12 * (1.0 + std::abs(p.v) + std::abs(a.v)))
        hull.pop_back();
      else
        break;
    }
    hull.push_back(p);
  }

  for (size_t e = 0; e + 1 < hull.size(); ++e) {
    const auto& a = hull[e];
    const auto& b = hull[e + 1];
    const int extent = b.i - a.i;
    const double mu = (a.v - b.v) / double(extent);
    // Edge polynomial in the leading coefficient c.
    std::vector<Complex> ec(static_cast<size_t>(extent) + 1, Complex(0));
    for (const auto& p : pts) {
      if (p.i < a.i || p.i > b.i) continue;
      const double line_v = a.v + (b.v - a.v) * double(p.i - a.i) / extent;
      if (std::abs(p.v - line_v) < 1e-9 * (1.0 + std::abs(line_v)))
        ec[p.i - a.i] = p.lead;
    }
    bool distinct = true;
    if (extent >= 2) {
      Poly edge_poly(ec);
      auto roots = poly_roots(edge_poly);
      double scale = 0.0;
      for (const auto& r : roots) scale = std::max(scale, std::abs(r));
      for (size_t x = 0; x < roots.size() && distinct; ++x)
        for (size_t y = x + 1; y < roots.size(); ++y)
          if (std::abs(roots[x] - roots[y]) < 1e-8 * (1.0 + scale)) {
            distinct = false;
            break;
          }
    }
    groups.push_back({mu, extent, distinct, false});
  }
  return groups;
}

GmnPunctureReport check_puncture(const SpectralData& data, Complex p,
                                 bool at_infinity) {
  GmnPunctureReport rep;
  rep.puncture = p;
  rep.at_infinity = at_infinity;

  // B_i = coefficient of zeta^i: B_K = 1, B_{K-i} = -phi_i.
  std::vector<PolygonPoint> pts;
  for (int i = 0; i <= data.K; ++i) {
    double v;
    Complex lead;
    if (i == data.K) {
      v = 0.0;
      lead = Complex(1);
    } else {
      const auto& phi = data.coefficients[data.K - i - 1];
      if (phi.is_zero()) continue;
      if (at_infinity) {
        const int deg = phi.numerator().degree() - phi.denominator().degree();
        v = double(-deg);  // valuation in w = 1/z
        lead = -phi.numerator().leading() / phi.denominator().leading();
      } else {
        const auto [vn, ln] = poly_valuation_at(phi.numerator(), p);
        const auto [vd, ld] = poly_valuation_at(phi.denominator(), p);
        v = double(vn - vd);
        lead = -ln / ld;
      }
    }
    pts.push_back({i, v, lead});
  }
  // Low coefficients that vanish identically correspond to zeta == 0 sheets.
  const int zero_branches = pts.empty() ? data.K : pts.front().i;

  if (pts.size() < 2 && zero_branches == 0) {
    rep.ok = false;
    rep.note = "degenerate symbol at puncture";
    return rep;
  }

  auto groups = newton_branch_groups(pts, zero_branches);
  // Convert w-valuations into z-growth exponents at infinity.
  if (at_infinity)
    for (auto& g : groups)
      if (!g.identically_zero) g.exponent = -g.exponent;
      else g.exponent = -kInf;  // zero branch grows like z^{-inf}

  rep.ok = true;
  for (size_t a = 0; a < groups.size(); ++a) {
    // pairs within one group
    if (groups[a].count >= 2 && !groups[a].identically_zero) {
      GmnPairOrder po;
      po.exponent = groups[a].exponent;
      po.pole_order = at_infinity ? 2.0 * groups[a].exponent + 4.0
                                  : -2.0 * groups[a].exponent;
      po.resolved = groups[a].coeffs_distinct;
      const int npairs = groups[a].count * (groups[a].count - 1) / 2;
      for (int r = 0; r < npairs; ++r) rep.pairs.push_back(po);
      if (!po.resolved) {
        rep.ok = false;
        rep.note = "tied leading Puiseux coefficients; pair order unresolved";
      } else if (po.pole_order < 2.0 - 1e-9) {
        rep.ok = false;
      }
    }
    // pairs across groups
    for (size_t b = a + 1; b < groups.size(); ++b) {
      double mu;
      if (at_infinity)
        mu = std::max(groups[a].exponent, groups[b].exponent);
      else
        mu = std::min(groups[a].exponent, groups[b].exponent);
      GmnPairOrder po;
      po.exponent = mu;
      po.pole_order = at_infinity ? 2.0 * mu + 4.0 : -2.0 * mu;
      po.resolved = true;
      const int npairs = groups[a].count * groups[b].count;
      for (int r = 0; r < npairs; ++r) rep.pairs.push_back(po);
      if (po.pole_order < 2.0 - 1e-9) rep.ok = false;
    }
  }
  if (!rep.ok && rep.note.empty())
    rep.note = "a sheet-pair quadratic differential has pole order < 2";
  return rep;
}

}  // namespace

GmnReport gmn_check(const SpectralData& data, const CurveConfig& cfg) {
  GmnReport rep;
  CurveConfig relaxed = cfg;
  relaxed.strict = false;
  const auto tps = branch_points(data, relaxed);
  rep.has_branch_point = !tps.empty();
  rep.branch_points_simple = true;
  for (const auto& tp : tps)
    if (!tp.simple) rep.branch_points_simple = false;

  if (!rep.has_branch_point)
    rep.explanations.push_back("no branch point exists");
  if (!rep.branch_points_simple)
    rep.explanations.push_back("a non-simple branch point exists");

  bool punctures_ok = true;
  for (const auto& p : data.punctures.finite) {
    rep.per_puncture.push_back(check_puncture(data, p, false));
    if (!rep.per_puncture.back().ok) punctures_ok = false;
  }
  if (data.punctures.at_infinity) {
    rep.per_puncture.push_back(check_puncture(data, Complex(0), true));
    if (!rep.per_puncture.back().ok) punctures_ok = false;
  }
  for (const auto& pr : rep.per_puncture)
    if (!pr.ok)
      rep.explanations.push_back(
          (pr.at_infinity ? std::string("puncture at infinity: ")
                          : std::string("finite puncture: ")) +
          (pr.note.empty() ? "pole order below 2" : pr.note));

  rep.verdict =
      rep.has_branch_point && rep.branch_points_simple && punctures_ok;
  return rep;
}

std::vector<Complex> circle_path(Complex center, double radius, int segments,
                                 double start_angle) {
  std::vector<Complex> path;
  path.reserve(segments + 1);
  for (int i = 0; i <= segments; ++i) {
    const double ang =
        start_angle + 2.0 * std::numbers::pi * double(i) / segments;
    path.push_back(center + radius * Complex(std::cos(ang), std::sin(ang)));
  }
  path.back() = path.front();
  return path;
}

}  // namespace specnet
