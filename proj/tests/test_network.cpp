#include "specnet/network.hpp"

#include <cmath>
#include <numbers>

#include "common.hpp"
#include "doctest.h"
#include "specnet/error.hpp"

using namespace specnet;
using namespace specnet::testing;

namespace {

NetworkConfig test_cfg() {
  NetworkConfig cfg;
  cfg.trace.max_steps = 400000;
  return cfg;
}

}  // namespace

TEST_CASE("airy initial graph: 3 walls, no collisions, 3 open trees") {
  auto state = initial_graph(make_airy(3.0), 0.1, 10.0, test_cfg());
  CHECK(state.status == BuildStatus::Ok);
  CHECK(state.walls.size() == 3);
  CHECK(state.collisions.empty());
  CHECK(state.open_trees.size() == 3);
  CHECK(state.closed_trees.empty());
  for (const auto& tree : state.trees) {
    CHECK(tree.mass == 0.0);
    CHECK(tree.factor_sign == 1);
  }
  // spin signs carry the (+1, -1, +1) convention
  int plus = 0, minus = 0;
  for (const auto& tree : state.trees)
    (tree.spin_sign > 0 ? plus : minus) += 1;
  CHECK(plus == 2);
  CHECK(minus == 1);
}

TEST_CASE("saddle curve at theta=1/4 is obstructed at start") {
  auto state = initial_graph(make_saddle(), 0.25, 6.0, test_cfg());
  CHECK(state.status == BuildStatus::ObstructedAtStart);
  auto rep = detect_obstructions(state);
  REQUIRE(rep.closed_trees.size() == 1);
  CHECK(rep.closed_trees[0].mass ==
        doctest::Approx(std::numbers::pi).epsilon(1e-4 / 3));
}

TEST_CASE("bnr cubic at theta=0.07 has pending ordered collisions") {
  auto state = initial_graph(make_bnr(), 0.07, 10.0, test_cfg());
  CHECK(state.status == BuildStatus::Ok);
  CHECK(state.walls.size() == 6);
  auto pending = state.pending_scatterable();
  CHECK(pending.size() >= 1);
  // collision masses match the sum of participant masses
  for (int id : pending) {
    const Collision& c = state.collisions[id];
    double sum = 0.0;
    for (const auto& part : c.participants) sum += part.mass_at;
    CHECK(c.mass == doctest::Approx(sum).epsilon(1e-12));
    CHECK(c.participants.size() == 2);
    // the chain shares the middle slot
    CHECK(c.participants[0].slots.second == c.participants[1].slots.first);
  }
}

TEST_CASE("scatter factor rules on synthetic collisions") {
  NetworkState state;
  state.e_max = 10.0;
  auto add_tree = [&](int factor, int spin) {
    StokesTree t;
    t.id = static_cast<int>(state.trees.size());
    t.root_edge = t.id;
    t.factor_sign = factor;
    t.spin_sign = spin;
    state.trees.push_back(t);
    state.walls.emplace_back();
  };

  SUBCASE("two participants of unit factor give one child with factor -1") {
    add_tree(1, 1);
    add_tree(1, 1);
    Collision col;
    col.id = 0;
    col.point = Complex(0);
    col.roots_at_point = {Complex(-1), Complex(0), Complex(1)};
    CollisionParticipant p0, p1;
    p0.tree = 0;
    p0.slots = {0, 1};
    p0.mass_at = 0.25;
    p1.tree = 1;
    p1.slots = {1, 2};
    p1.mass_at = 0.5;
    col.participants = {p0, p1};
    col.mass = 0.75;
    state.collisions.push_back(col);

    auto seeds = scatter(state, 0);
    REQUIRE(seeds.size() == 1);
    CHECK(seeds[0].factor_sign == -1);
    CHECK(seeds[0].spin_sign == -1);
    CHECK(seeds[0].inherited_mass == doctest::Approx(0.75));
    CHECK(seeds[0].pair_values.first == Complex(-1));
    CHECK(seeds[0].pair_values.second == Complex(1));
    CHECK(state.collisions[0].scattered);
    CHECK_THROWS_AS(scatter(state, 0), Error);  // already scattered
  }

  SUBCASE("three participants emit the consecutive sub-chains") {
    add_tree(1, 1);
    add_tree(1, 1);
    add_tree(1, 1);
    Collision col;
    col.id = 0;
    col.point = Complex(0);
    col.roots_at_point = {Complex(-2), Complex(-1), Complex(1), Complex(2)};
    CollisionParticipant p0, p1, p2;
    p0.tree = 0;
    p0.slots = {0, 1};
    p0.mass_at = 0.1;
    p1.tree = 1;
    p1.slots = {1, 2};
    p1.mass_at = 0.2;
    p2.tree = 2;
    p2.slots = {2, 3};
    p2.mass_at = 0.3;
    col.participants = {p0, p1, p2};
    col.mass = 0.6;
    state.collisions.push_back(col);

    auto seeds = scatter(state, 0);
    REQUIRE(seeds.size() == 3);
    // sub-chains (0,1), (0,1,2), (1,2) in emission order i<j
    CHECK(seeds[0].pair_values == std::make_pair(Complex(-2), Complex(1)));
    CHECK(seeds[0].factor_sign == -1);
    CHECK(seeds[1].pair_values == std::make_pair(Complex(-2), Complex(2)));
    CHECK(seeds[1].factor_sign == +1);
    CHECK(seeds[2].pair_values == std::make_pair(Complex(-1), Complex(2)));
    CHECK(seeds[2].factor_sign == -1);
    CHECK(seeds[1].inherited_mass == doctest::Approx(0.6));
  }

  SUBCASE("cyclic collisions are not scatterable") {
    add_tree(1, 1);
    add_tree(1, 1);
    add_tree(1, 1);
    Collision col;
    col.id = 0;
    col.cyclic = true;
    state.collisions.push_back(col);
    CHECK_THROWS_AS(scatter(state, 0), Error);
    try {
      scatter(state, 0);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::CyclicCollision);
    }
  }
}

TEST_CASE("build_network on the model curves") {
  SUBCASE("airy terminates with 3 walls and no scattering") {
    auto state = build_network(make_airy(3.0), 0.1, 10.0, test_cfg());
    CHECK(state.walls.size() == 3);
    CHECK(state.processed_collisions == 0);
    CHECK(detect_obstructions(state).empty());
  }
  SUBCASE("E_max = 0 returns the initial graph unchanged") {
    auto initial = initial_graph(make_bnr(), 0.07, 0.0, test_cfg());
    auto built = build_network(make_bnr(), 0.07, 0.0, test_cfg());
    CHECK(built.walls.size() == initial.walls.size());
    CHECK(built.collisions.size() == initial.collisions.size());
    CHECK(built.processed_collisions == 0);
  }
  SUBCASE("bnr run scatters and the new walls satisfy the composite residual") {
    auto state = build_network(make_bnr(), 0.07, 10.0, test_cfg());
    CHECK(state.status == BuildStatus::Ok);
    CHECK(state.processed_collisions >= 1);
    int scattered_walls = 0;
    for (const auto& w : state.walls) {
      if (w.source.kind != SourceKind::ScatteredAt) continue;
      ++scattered_walls;
      for (size_t n = 0; n + 1 < w.size(); ++n) {
        const Complex dz = w.points[n + 1] - w.points[n];
        const Complex g =
            w.sheet_values[n].first - w.sheet_values[n].second;
        CHECK(std::abs((g * dz).imag()) <=
              1e-6 * std::abs(dz) * std::abs(g) + 1e-14);
      }
    }
    CHECK(scattered_walls >= 1);

    // mass additivity at every scattered collision
    for (const auto& w : state.walls) {
      if (w.source.kind != SourceKind::ScatteredAt) continue;
      const Collision& c = state.collisions[w.source.collision];
      double sum = 0.0;
      for (const auto& part : c.participants) sum += part.mass_at;
      CHECK(std::abs(w.inherited_mass - sum) <= 1e-6 * (1.0 + sum));
    }

    // filtration watermark holds and completeness-modulo-cutoff re-scan
    std::vector<int> all_ids;
    for (const auto& w : state.walls) all_ids.push_back(w.id);
    auto rescan = find_collisions(state, all_ids);
    for (const auto& c : rescan.collisions) {
      CHECK_FALSE((c.scatterable() && c.mass < state.e_max));
    }
  }
}

TEST_CASE("obstruction detection and theta perturbation") {
  SUBCASE("saddle at 0.25, clean at 0.28") {
    auto obstructed = build_network(make_saddle(), 0.25, 6.0, test_cfg());
    auto rep = detect_obstructions(obstructed);
    REQUIRE(rep.closed_trees.size() == 1);
    CHECK(rep.closed_trees[0].mass ==
          doctest::Approx(std::numbers::pi).epsilon(1e-4 / 3));
    CHECK(rep.suggested_theta_step >= 1e-4);

    auto clean = build_network(make_saddle(), 0.28, 6.0, test_cfg());
    CHECK(detect_obstructions(clean).empty());
    CHECK(clean.status == BuildStatus::Ok);
  }
  SUBCASE("airy is unobstructed on a theta grid") {
    for (int k = 0; k < 6; ++k) {
      auto state = build_network(make_airy(), 0.05 * k, 5.0, test_cfg());
      CHECK(detect_obstructions(state).empty());
    }
  }
  SUBCASE("scan-theta escapes the saddle angle") {
    auto res = find_unobstructed_theta(make_saddle(), 0.25, 0.05, 6.0,
                                       test_cfg());
    CHECK(res.theta != doctest::Approx(0.25));
    CHECK(std::abs(res.theta - 0.25) <= 0.05 + 1e-12);
    auto verify = build_network(make_saddle(), res.theta, 6.0, test_cfg());
    CHECK(detect_obstructions(verify).empty());
  }
  SUBCASE("airy scan returns theta0 unchanged") {
    auto res = find_unobstructed_theta(make_airy(), 0.3, 0.05, 5.0, test_cfg());
    CHECK(res.theta == doctest::Approx(0.3));
    CHECK(res.probes.size() == 1);
  }
  SUBCASE("epsilon = 0 at an obstructed angle reports NOT_FOUND") {
    CHECK_THROWS_AS(
        find_unobstructed_theta(make_saddle(), 0.25, 0.0, 6.0, test_cfg()),
        Error);
  }
}

TEST_CASE("closed tree counting (Gromov compactness desk check)") {
  CHECK(count_closed_trees(make_saddle(), 0.25, 4.0, test_cfg()) == 1);
  CHECK(count_closed_trees(make_saddle(), 0.25, 1.0, test_cfg()) == 0);
  CHECK(count_closed_trees(make_airy(5.0), 0.1, 100.0, test_cfg()) == 0);
}
