#include "specnet/curve.hpp"

#include <cmath>
#include <random>

#include "common.hpp"
#include "doctest.h"
#include "specnet/error.hpp"

using namespace specnet;
using namespace specnet::testing;

TEST_CASE("eval_sheets closed forms") {
  SUBCASE("airy at z=1 gives -1, +1") {
    auto d = make_airy();
    auto s = eval_sheets(d, Complex(1));
    REQUIRE(s.values.size() == 2);
    CHECK(std::abs(s.values[0] - Complex(-1)) < 1e-10);
    CHECK(std::abs(s.values[1] - Complex(1)) < 1e-10);
  }
  SUBCASE("degree one identity case phi_1 = 1/z") {
    SpectralData d;
    d.K = 1;
    d.coefficients = {RationalFunction(Poly({Complex(1)}),
                                       Poly({Complex(0), Complex(1)}))};
    d.punctures.finite = {Complex(0)};
    d.punctures.at_infinity = true;
    auto s = eval_sheets(d, Complex(2));
    REQUIRE(s.values.size() == 1);
    CHECK(std::abs(s.values[0] - Complex(0.5)) < 1e-12);
  }
  SUBCASE("cubic at z=0 factors as zeta(zeta^2-3)") {
    auto d = make_bnr();
    auto s = eval_sheets(d, Complex(0));
    REQUIRE(s.values.size() == 3);
    const double r3 = std::sqrt(3.0);
    CHECK(std::abs(s.values[0] - Complex(-r3)) < 1e-10);
    CHECK(std::abs(s.values[1] - Complex(0)) < 1e-10);
    CHECK(std::abs(s.values[2] - Complex(r3)) < 1e-10);
  }
}

TEST_CASE("200 random points satisfy the scaled residual bound") {
  auto airy = make_airy();
  auto bnr = make_bnr();
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int t = 0; t < 200; ++t) {
    const Complex z(u(rng), u(rng));
    const SpectralData& d = (t % 2 == 0) ? airy : bnr;
    if (std::abs(z) < 1e-2) continue;
    auto s = eval_sheets(d, z);
    for (auto v : s.values) {
      CHECK(std::abs(d.sigma(z, v)) <
            1e-9 * (1.0 + std::pow(std::abs(v), d.K)));
    }
  }
}

TEST_CASE("continuation monodromy around branch points") {
  auto d = make_airy();
  auto start = eval_sheets(d, Complex(1));

  SUBCASE("loop around 0 is the transposition") {
    auto loop = circle_path(Complex(0), 1.0, 96);
    auto [end, perm] = continue_sheets(d, loop, start);
    CHECK(perm[0] == 1);
    CHECK(perm[1] == 0);
  }
  SUBCASE("loop traversed twice is the identity") {
    auto loop = circle_path(Complex(0), 1.0, 96);
    auto twice = loop;
    twice.insert(twice.end(), loop.begin() + 1, loop.end());
    auto [end, perm] = continue_sheets(d, twice, start);
    CHECK(perm[0] == 0);
    CHECK(perm[1] == 1);
  }
  SUBCASE("small loop enclosing no branch point is the identity") {
    auto start5 = eval_sheets(d, Complex(5.1));
    auto loop = circle_path(Complex(5), 0.1, 64, std::atan2(0.0, 1.0));
    // start the loop at 5.1 exactly
    loop.front() = Complex(5.1);
    loop.back() = Complex(5.1);
    auto [end, perm] = continue_sheets(d, loop, start5);
    CHECK(perm[0] == 0);
    CHECK(perm[1] == 1);
  }
}

TEST_CASE("continuation is path-reversal inverse") {
  auto d = make_bnr();
  std::vector<Complex> path = {Complex(3, 0.5), Complex(2.5, 1.5),
                               Complex(0.5, 2.0), Complex(-1.0, 1.0),
                               Complex(-2.5, 0.5)};
  auto start = eval_sheets(d, path.front());
  auto there = path;
  auto back = path;
  std::reverse(back.begin(), back.end());
  auto [mid, perm1] = continue_sheets(d, there, start);
  SheetSet mid_in_continued_order = mid;
  // feed the continued (unsorted per start labels) values back
  std::vector<Complex> cont(start.values.size());
  for (size_t i = 0; i < perm1.size(); ++i) cont[i] = mid.values[perm1[i]];
  SheetSet handoff{path.back(), cont};
  auto [end, perm2] = continue_sheets(d, back, handoff);
  // total permutation must bring label i back to canonical slot i
  for (size_t i = 0; i < perm2.size(); ++i) {
    CHECK(std::abs(end.values[perm2[i]] - start.values[i]) < 1e-8);
  }
}

TEST_CASE("branch points of the model curves") {
  SUBCASE("airy: single simple point at 0 with |c| = 2") {
    auto d = make_airy();
    auto tps = branch_points(d);
    REQUIRE(tps.size() == 1);
    CHECK(std::abs(tps[0].position) < 1e-8);
    CHECK(tps[0].simple);
    CHECK(std::abs(std::abs(tps[0].local_coefficient) - 2.0) < 1e-6);
  }
  SUBCASE("saddle curve: simple points at +-1") {
    auto d = make_saddle();
    auto tps = branch_points(d);
    REQUIRE(tps.size() == 2);
    CHECK(std::abs(tps[0].position - Complex(-1)) < 1e-8);
    CHECK(std::abs(tps[1].position - Complex(1)) < 1e-8);
    CHECK(tps[0].simple);
    CHECK(tps[1].simple);
    CHECK(std::abs(std::abs(tps[1].local_coefficient) - 2.0 * std::sqrt(2.0)) <
          1e-5);
  }
  SUBCASE("cubic: simple points at +-2") {
    auto d = make_bnr();
    auto tps = branch_points(d);
    REQUIRE(tps.size() == 2);
    CHECK(std::abs(tps[0].position - Complex(-2)) < 1e-8);
    CHECK(std::abs(tps[1].position - Complex(2)) < 1e-8);
  }
  SUBCASE("root count with multiplicity equals discriminant degree") {
    for (const auto& d : {make_airy(), make_saddle(), make_bnr()}) {
      auto disc = discriminant_poly(d);
      CurveConfig cfg;
      cfg.strict = false;
      auto tps = branch_points(d, cfg);
      int count = 0;
      for (const auto& tp : tps) count += tp.multiplicity;
      // no punctures coincide with roots for these curves
      CHECK(count == disc.degree());
    }
  }
}

TEST_CASE("gmn_check verdicts") {
  SUBCASE("airy is strongly GMN with pole order 5 at infinity") {
    auto rep = gmn_check(make_airy());
    CHECK(rep.verdict);
    REQUIRE(rep.per_puncture.size() == 1);
    REQUIRE(rep.per_puncture[0].pairs.size() == 1);
    CHECK(rep.per_puncture[0].pairs[0].pole_order == doctest::Approx(5.0));
  }
  SUBCASE("constant discriminant fails: no branch point") {
    SpectralData d;
    d.K = 2;
    d.coefficients = {RationalFunction::zero(),
                      RationalFunction::polynomial(Poly({Complex(1)}))};
    d.punctures.at_infinity = true;
    auto rep = gmn_check(d);
    CHECK_FALSE(rep.has_branch_point);
    CHECK_FALSE(rep.verdict);
  }
  SUBCASE("cubic is strongly GMN") {
    auto rep = gmn_check(make_bnr());
    CHECK(rep.verdict);
    REQUIRE(rep.per_puncture.size() == 1);
    for (const auto& pair : rep.per_puncture[0].pairs) {
      CHECK(pair.pole_order == doctest::Approx(14.0 / 3.0));
      CHECK(pair.pole_order >= 2.0);
    }
  }
  SUBCASE("saddle curve is strongly GMN") {
    CHECK(gmn_check(make_saddle()).verdict);
  }
}
