#include "specnet/trace.hpp"

#include <cmath>
#include <numbers>

#include "common.hpp"
#include "doctest.h"
#include "specnet/error.hpp"
#include "specnet/geometry.hpp"

using namespace specnet;
using namespace specnet::testing;

namespace {

TraceConfig airy_cfg(double theta, double cutoff = 6.0) {
  TraceConfig cfg;
  cfg.theta = theta;
  cfg.mass_cutoff = cutoff;
  return cfg;
}

double angle_mod(double a) {
  const double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a < 0) a += two_pi;
  if (two_pi - a < 1e-9) a = 0.0;
  return a;
}

// wall point nearest to radius r from origin
Complex point_at_radius(const Wall& w, double r) {
  Complex best = w.points.front();
  double bd = std::numeric_limits<double>::infinity();
  for (const auto& p : w.points) {
    const double d = std::abs(std::abs(p) - r);
    if (d < bd) {
      bd = d;
      best = p;
    }
  }
  return best;
}

double mass_at_radius(const Wall& w, double r) {
  for (size_t n = 0; n + 1 < w.size(); ++n) {
    const double ra = std::abs(w.points[n]);
    const double rb = std::abs(w.points[n + 1]);
    if ((ra - r) * (rb - r) <= 0.0 && ra != rb) {
      const double t = (r - ra) / (rb - ra);
      return w.mass_on(n, t);
    }
  }
  return w.final_mass();
}

}  // namespace

TEST_CASE("airy seed rays at theta=0 and theta=1/2") {
  auto d = make_airy();
  auto tps = branch_points(d);
  REQUIRE(tps.size() == 1);

  SUBCASE("theta=0: angles 0, 2pi/3, 4pi/3") {
    auto seeds = seed_rays(d, tps[0], airy_cfg(0.0));
    std::vector<double> angles;
    for (const auto& s : seeds) angles.push_back(angle_mod(std::arg(s.position)));
    std::sort(angles.begin(), angles.end());
    CHECK(angles[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(angles[1] == doctest::Approx(2.0 * std::numbers::pi / 3).epsilon(1e-9));
    CHECK(angles[2] == doctest::Approx(4.0 * std::numbers::pi / 3).epsilon(1e-9));
  }
  SUBCASE("theta=1/2: ray set rotates by (2/3)(2 pi theta)") {
    // phi_n = (4 pi theta / 3) + (2 pi / 3) n; at theta = 1/2 the rotation is
    // a full 2 pi / 3, so the ray set coincides with the theta = 0 one (the
    // unoriented foliation is periodic in theta with period 1/2).
    auto seeds = seed_rays(d, tps[0], airy_cfg(0.5));
    std::vector<double> angles;
    for (const auto& s : seeds) angles.push_back(angle_mod(std::arg(s.position)));
    std::sort(angles.begin(), angles.end());
    const double two_pi = 2.0 * std::numbers::pi;
    CHECK(angles[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(angles[1] == doctest::Approx(two_pi / 3).epsilon(1e-9));
    CHECK(angles[2] == doctest::Approx(2.0 * two_pi / 3).epsilon(1e-9));
  }
  SUBCASE("theta=1/4: angles pi/3, pi, 5pi/3") {
    auto seeds = seed_rays(d, tps[0], airy_cfg(0.25));
    std::vector<double> angles;
    for (const auto& s : seeds) angles.push_back(angle_mod(std::arg(s.position)));
    std::sort(angles.begin(), angles.end());
    CHECK(angles[0] == doctest::Approx(std::numbers::pi / 3).epsilon(1e-9));
    CHECK(angles[1] == doctest::Approx(std::numbers::pi).epsilon(1e-9));
    CHECK(angles[2] == doctest::Approx(5.0 * std::numbers::pi / 3).epsilon(1e-9));
  }
  SUBCASE("ray angles always differ pairwise by 2pi/3") {
    for (double theta : {0.12, 0.34, 0.77}) {
      auto seeds = seed_rays(d, tps[0], airy_cfg(theta));
      std::vector<double> angles;
      for (const auto& s : seeds)
        angles.push_back(angle_mod(std::arg(s.position)));
      std::sort(angles.begin(), angles.end());
      CHECK(angles[1] - angles[0] ==
            doctest::Approx(2.0 * std::numbers::pi / 3).epsilon(1e-9));
      CHECK(angles[2] - angles[1] ==
            doctest::Approx(2.0 * std::numbers::pi / 3).epsilon(1e-9));
    }
  }
}

TEST_CASE("airy ray along the positive axis") {
  auto d = make_airy();
  auto tps = branch_points(d);
  auto cfg = airy_cfg(0.0);
  auto seeds = seed_rays(d, tps[0], cfg);
  // pick the ray at angle 0
  const WallSeed* seed = nullptr;
  for (const auto& s : seeds)
    if (std::abs(angle_mod(std::arg(s.position))) < 1e-6 ||
        angle_mod(std::arg(s.position)) > 2.0 * std::numbers::pi - 1e-6)
      seed = &s;
  REQUIRE(seed != nullptr);
  Wall w = trace_wall(d, *seed, cfg, tps);
  CHECK(w.termination.kind == TerminationKind::MassCutoff);

  SUBCASE("stays on the real axis") {
    for (const auto& p : w.points) CHECK(std::abs(p.imag()) < 1e-8);
  }
  SUBCASE("position at mass m is (3m/4)^{2/3}") {
    for (double m : {0.5, 1.0, 2.0, 4.0}) {
      // find the point with massProfile ~ m
      for (size_t n = 0; n + 1 < w.size(); ++n) {
        if (w.mass_profile[n] <= m && m <= w.mass_profile[n + 1]) {
          const double t =
              (m - w.mass_profile[n]) / (w.mass_profile[n + 1] - w.mass_profile[n]);
          const Complex z = w.position_on(n, t);
          CHECK(std::abs(z - std::pow(3.0 * m / 4.0, 2.0 / 3.0)) < 1e-6);
          break;
        }
      }
    }
  }
  SUBCASE("mass at radius r equals (4/3) r^{3/2}") {
    for (double r : {0.5, 1.0, 2.0}) {
      CHECK(mass_at_radius(w, r) ==
            doctest::Approx((4.0 / 3.0) * std::pow(r, 1.5)).epsilon(1e-6));
    }
  }
  SUBCASE("mass_along agrees with the arc parameter within 1e-6 relative") {
    for (size_t n = 0; n + 1 < w.size(); n += std::max<size_t>(1, w.size() / 40)) {
      const double q = mass_along(w, n, 0.0);
      CHECK(std::abs(q - w.mass_profile[n]) <= 1e-6 * (1.0 + w.mass_profile[n]));
    }
    CHECK(mass_along(w, 0, 0.0) == doctest::Approx(w.inherited_mass));
  }
  SUBCASE("mass profile strictly increasing") {
    for (size_t n = 0; n + 1 < w.size(); ++n)
      CHECK(w.mass_profile[n] < w.mass_profile[n + 1]);
  }
  SUBCASE("per-segment preStokes residual") {
    for (size_t n = 0; n + 1 < w.size(); ++n) {
      const Complex dz = w.points[n + 1] - w.points[n];
      const Complex g = w.sheet_values[n].first - w.sheet_values[n].second;
      CHECK(std::abs((g * dz).imag()) <= 1e-6 * std::abs(dz) * std::abs(g) +
                                             1e-14);
    }
  }
}

TEST_CASE("saddle trajectory hits the opposite turning point with mass pi") {
  auto d = make_saddle();
  auto tps = branch_points(d);
  REQUIRE(tps.size() == 2);
  TraceConfig cfg = airy_cfg(0.25, 6.0);
  // rays from the turning point at -1; one runs to +1
  const TurningPoint& left = tps[0];
  auto seeds = seed_rays(d, left, cfg);
  bool found = false;
  for (const auto& s : seeds) {
    Wall w = trace_wall(d, s, cfg, tps);
    if (w.termination.kind == TerminationKind::HitTurningPoint &&
        w.termination.index == tps[1].id) {
      found = true;
      CHECK(w.final_mass() == doctest::Approx(std::numbers::pi).epsilon(1e-4 / 3));
    }
  }
  CHECK(found);
}

TEST_CASE("theta continuity: Hausdorff distance shrinks as delta halves") {
  auto d = make_airy();
  auto tps = branch_points(d);
  auto trace_ray0 = [&](double theta) {
    TraceConfig cfg = airy_cfg(theta, 2.0);
    auto seeds = seed_rays(d, tps[0], cfg);
    // ray index 0 deforms continuously with theta
    return trace_wall(d, seeds[0], cfg, tps);
  };
  Wall base = trace_ray0(0.1);
  std::vector<std::vector<Complex>> base_lines = {base.points};
  double prev = std::numeric_limits<double>::infinity();
  for (double delta = 1e-2; delta >= 1e-5; delta *= 0.5) {
    Wall moved = trace_ray0(0.1 + delta);
    const double h = directed_hausdorff(moved.points, base_lines, 0.05);
    CHECK(h < prev * 1.0001);
    prev = h;
  }
}
