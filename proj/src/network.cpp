#include "specnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <queue>
#include <set>

#include "specnet/error.hpp"
#include "specnet/geometry.hpp"
#include "specnet/parallel.hpp"

namespace specnet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Complex phase_factor(double theta) {
  return Complex(std::cos(kTwoPi * theta), std::sin(kTwoPi * theta));
}

double angle_from(double base, double ang) {
  double d = std::fmod(ang - base, kTwoPi);
  if (d < 0) d += kTwoPi;
  return d;
}

double ray_length_in_disk(Complex base, Complex dir, double radius) {
  // positive t with |base + t dir| = radius (dir unit)
  const double b = base.real() * dir.real() + base.imag() * dir.imag();
  const double c = std::norm(base) - radius * radius;
  const double disc = b * b - c;
  if (disc <= 0.0) return 0.0;
  return -b + std::sqrt(disc);
}

double choose_cut_angle(const std::vector<TurningPoint>& tps,
                        const SpectralData& data, double clearance) {
  const double base = kTwoPi * 0.3819660112501051;
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double ang = base + 0.105 * attempt;
    const Complex dir(std::cos(ang), std::sin(ang));
    bool ok = true;
    for (const auto& tp : tps) {
      const double len = ray_length_in_disk(tp.position, dir,
                                            data.domain_radius * 1.01);
      const Complex end = tp.position + len * dir;
      for (const auto& other : tps) {
        if (other.id == tp.id) continue;
        if (point_segment_distance(other.position, tp.position, end) <
            clearance) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
      for (const auto& p : data.punctures.finite) {
        if (point_segment_distance(p, tp.position, end) < clearance) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
    }
    if (ok) return std::fmod(ang, kTwoPi);
  }
  throw Error(ErrorCode::ValidationError,
              "could not route disjoint branch cuts clear of special points");
}

void classify_tree(NetworkState& state, int id) {
  const Wall& w = state.walls[id];
  switch (w.termination.kind) {
    case TerminationKind::HitTurningPoint:
      state.trees[id].closed = true;
      state.closed_trees.push_back(id);
      break;
    case TerminationKind::EnteredPunctureNeighborhood:
    case TerminationKind::LeftDomain:
      state.open_trees.push_back(id);
      break;
    default:
      break;  // truncated by cutoff or step failure: unclassified
  }
}

std::vector<Wall> trace_all(const NetworkState& state,
                            const std::vector<WallSeed>& seeds) {
  std::vector<Wall> traced(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  parallel_for(static_cast<int>(seeds.size()), [&](int i) {
    try {
      traced[i] = trace_wall(state.data, seeds[i], state.cfg.trace,
                             state.turning_points);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return traced;
}

int add_wall(NetworkState& state, const WallSeed& seed, Wall wall) {
  const int id = static_cast<int>(state.walls.size());
  wall.id = id;
  StokesTree tree;
  tree.id = id;
  tree.root_edge = id;
  tree.parents = seed.parent_trees;
  tree.source_collision =
      seed.source.kind == SourceKind::ScatteredAt ? seed.source.collision : -1;
  tree.leaf_turning_point = seed.source.kind == SourceKind::TurningPointRay
                                ? seed.source.turning_point
                                : -1;
  tree.mass = seed.inherited_mass;
  if (seed.source.kind == SourceKind::TurningPointRay) tree.mass = 0.0;
  tree.factor_sign = seed.factor_sign;
  tree.spin_sign = seed.spin_sign;
  state.walls.push_back(std::move(wall));
  state.trees.push_back(std::move(tree));
  classify_tree(state, id);
  return id;
}

}  // namespace

std::vector<int> StokesTree::edge_set(
    const std::vector<StokesTree>& trees) const {
  std::vector<int> out;
  for (int p : parents) {
    const auto sub = trees[p].edge_set(trees);
    out.insert(out.end(), sub.begin(), sub.end());
  }
  out.push_back(root_edge);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<int> NetworkState::pending_scatterable() const {
  std::vector<int> ids;
  for (const auto& c : collisions)
    if (!c.scattered && c.scatterable() && c.mass < e_max)
      ids.push_back(c.id);
  std::sort(ids.begin(), ids.end(), [&](int a, int b) {
    if (collisions[a].mass != collisions[b].mass)
      return collisions[a].mass < collisions[b].mass;
    return a < b;
  });
  return ids;
}

NetworkState initial_graph(const SpectralData& data, double theta, double e_max,
                           const NetworkConfig& cfg) {
  data.validate();
  const GmnReport gmn = gmn_check(data, cfg.trace.curve);
  if (!gmn.verdict && !cfg.force) {
    std::string msg = "input is not strongly GMN:";
    for (const auto& e : gmn.explanations) msg += " " + e + ";";
    throw Error(ErrorCode::ValidationError, msg);
  }

  NetworkState state;
  state.data = data;
  state.theta = theta;
  state.e_max = e_max;
  state.cfg = cfg;
  state.cfg.trace.theta = theta;
  state.cfg.trace.mass_cutoff = e_max;
  state.turning_points = branch_points(data, cfg.trace.curve);

  std::vector<const TurningPoint*> seedable;
  for (const auto& tp : state.turning_points) {
    if (std::abs(tp.position) > data.domain_radius) {
      state.obstruction_flags.push_back(
          "turning point outside the domain disk was not seeded");
      continue;
    }
    seedable.push_back(&tp);
  }

  const double cut_clear =
      std::max(2.0 * state.cfg.trace.capture_radius(),
               1e-3 * data.domain_radius);
  const double cut_angle =
      choose_cut_angle(state.turning_points, data, cut_clear);
  const Complex cut_dir(std::cos(cut_angle), std::sin(cut_angle));

  // Seed the three rays per turning point; spin signs (+1, -1, +1) in the
  // counterclockwise order starting from the cut direction.
  std::vector<WallSeed> seeds;
  for (const TurningPoint* tp : seedable) {
    auto rays = seed_rays(data, *tp, state.cfg.trace);
    std::array<int, 3> order = {0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return angle_from(cut_angle, std::arg(rays[a].position - tp->position)) <
             angle_from(cut_angle, std::arg(rays[b].position - tp->position));
    });
    static constexpr int kSpin[3] = {+1, -1, +1};
    for (int k = 0; k < 3; ++k) {
      WallSeed s = rays[order[k]];
      s.spin_sign = kSpin[k];
      s.factor_sign = 1;
      seeds.push_back(std::move(s));
    }

    CutRay cut;
    cut.turning_point = tp->id;
    cut.base = tp->position;
    cut.dir = cut_dir;
    cut.length = ray_length_in_disk(tp->position, cut_dir,
                                    data.domain_radius * 1.01);
    cut.anchor = tp->position + state.cfg.trace.seed_radius * cut_dir;

    // Anchor pair: the first-ccw wall's ordered pair continued clockwise
    // around the seed ring back to the cut.
    const WallSeed& first = seeds[seeds.size() - 3];
    const double phi_first =
        std::arg(first.position - tp->position);
    const double span = angle_from(cut_angle, phi_first);
    const SheetSet start_sheets =
        eval_sheets(data, first.position, state.cfg.trace.curve);
    SheetTracker tracker(data, first.position, start_sheets.values,
                         state.cfg.trace.curve);
    const int ia = tracker.match_value(first.pair_values.first,
                                       cfg.trace.curve.sheet_match_tol * 100);
    const int ib = tracker.match_value(first.pair_values.second,
                                       cfg.trace.curve.sheet_match_tol * 100);
    const int steps = std::max(8, static_cast<int>(span / 0.05));
    for (int s = 1; s <= steps; ++s) {
      const double ang = phi_first - span * double(s) / steps;
      tracker.advance(tp->position + state.cfg.trace.seed_radius *
                                         Complex(std::cos(ang), std::sin(ang)));
    }
    cut.anchor_pair = {tracker.values()[ia], tracker.values()[ib]};
    state.cuts.push_back(cut);
  }

  // Trace every seed (pure per seed; order-independent output).
  std::vector<Wall> traced = trace_all(state, seeds);
  std::vector<int> new_ids;
  for (size_t i = 0; i < seeds.size(); ++i)
    new_ids.push_back(add_wall(state, seeds[i], std::move(traced[i])));

  for (int id : new_ids)
    if (state.walls[id].termination.kind == TerminationKind::HitTurningPoint)
      state.status = BuildStatus::ObstructedAtStart;

  auto scan = find_collisions(state, new_ids);
  for (auto& c : scan.collisions) state.collisions.push_back(std::move(c));
  for (auto& l : scan.log) state.discard_log.push_back(std::move(l));
  for (auto& f : scan.flags) state.obstruction_flags.push_back(std::move(f));
  return state;
}

CollisionScan find_collisions(const NetworkState& state,
                              const std::vector<int>& new_wall_ids) {
  CollisionScan out;
  const double merge_tol = state.cfg.merge_tol(state.data.domain_radius);
  const double start_excl =
      std::max(4.0 * merge_tol, 2.0 * state.cfg.trace.seed_radius);
  const Complex rot = phase_factor(state.theta);

  std::set<int> new_set(new_wall_ids.begin(), new_wall_ids.end());

  // grid cell: median segment length (sampled), floored to avoid blowup
  std::vector<double> lens;
  for (const auto& w : state.walls)
    for (size_t n = 0; n + 1 < w.size(); n += 16)
      lens.push_back(std::abs(w.points[n + 1] - w.points[n]));
  double cell = 0.01 * state.data.domain_radius;
  if (!lens.empty()) {
    std::nth_element(lens.begin(), lens.begin() + lens.size() / 2, lens.end());
    cell = std::max(lens[lens.size() / 2],
                    1e-3 * state.data.domain_radius);
  }

  SegmentGrid grid(cell);
  for (const auto& w : state.walls)
    for (size_t n = 0; n + 1 < w.size(); ++n)
      grid.insert(w.points[n], w.points[n + 1], w.id, static_cast<int>(n));

  struct RawHit {
    Complex point;
    int wall_a, wall_b;
    size_t seg_a, seg_b;
    double ta, tb;
  };
  std::vector<RawHit> hits;
  std::set<std::pair<int, int>> seen_pairs_here;

  for (int wid : new_wall_ids) {
    const Wall& w = state.walls[wid];
    for (size_t n = 0; n + 1 < w.size(); ++n) {
      for (int cand : grid.candidates(w.points[n], w.points[n + 1])) {
        const auto& seg = grid.segments()[cand];
        if (seg.owner == wid) continue;
        if (new_set.count(seg.owner) && seg.owner < wid) continue;  // once
        auto hit = segment_intersection(w.points[n], w.points[n + 1], seg.a,
                                        seg.b);
        if (!hit) continue;
        const Wall& other = state.walls[seg.owner];
        if (std::abs(hit->point - w.points.front()) < start_excl) continue;
        if (std::abs(hit->point - other.points.front()) < start_excl) continue;
        hits.push_back({hit->point, wid, seg.owner, n,
                        static_cast<size_t>(seg.index), hit->t, hit->u});
      }
    }
  }

  // cluster hits within merge_tol
  std::vector<int> cluster_of(hits.size(), -1);
  int nclusters = 0;
  for (size_t i = 0; i < hits.size(); ++i) {
    if (cluster_of[i] >= 0) continue;
    cluster_of[i] = nclusters;
    for (size_t j = i + 1; j < hits.size(); ++j)
      if (cluster_of[j] < 0 &&
          std::abs(hits[j].point - hits[i].point) < merge_tol)
        cluster_of[j] = nclusters;
    ++nclusters;
  }

  int next_id = static_cast<int>(state.collisions.size());
  for (int c = 0; c < nclusters; ++c) {
    Complex center(0);
    int count = 0;
    std::map<int, std::pair<size_t, double>> members;  // wall -> (seg, t)
    for (size_t i = 0; i < hits.size(); ++i) {
      if (cluster_of[i] != c) continue;
      center += hits[i].point;
      ++count;
      members.emplace(hits[i].wall_a,
                      std::make_pair(hits[i].seg_a, hits[i].ta));
      members.emplace(hits[i].wall_b,
                      std::make_pair(hits[i].seg_b, hits[i].tb));
    }
    center /= double(count);

    bool duplicate = false;
    for (const auto& existing : state.collisions)
      if (std::abs(existing.point - center) < merge_tol) duplicate = true;
    if (duplicate) continue;

    Collision col;
    col.point = center;
    SheetSet sheets;
    try {
      sheets = eval_sheets(state.data, center, state.cfg.trace.curve);
    } catch (const Error&) {
      out.log.push_back("collision discarded: sheet evaluation failed");
      continue;
    }
    col.roots_at_point = sheets.values;

    bool bad = false;
    for (const auto& [wid, st] : members) {
      const Wall& w = state.walls[wid];
      CollisionParticipant part;
      part.tree = wid;
      part.wall = wid;
      part.segment = st.first;
      part.t = st.second;
      part.mass_at = w.mass_on(st.first, st.second);
      const auto [vi, vj] = w.values_on(st.first, st.second);
      int a = -1, b = -1;
      double da = 1e300, db = 1e300;
      for (size_t k = 0; k < sheets.values.size(); ++k) {
        const double d1 = std::abs(sheets.values[k] - vi);
        const double d2 = std::abs(sheets.values[k] - vj);
        if (d1 < da) {
          da = d1;
          a = static_cast<int>(k);
        }
        if (d2 < db) {
          db = d2;
          b = static_cast<int>(k);
        }
      }
      if (a == b || a < 0 || b < 0) {
        bad = true;
        break;
      }
      part.slots = {a, b};
      const Complex d = sheets.values[a] - sheets.values[b];
      part.tangent = rot / d;
      part.tangent /= std::abs(part.tangent);
      col.participants.push_back(part);
    }
    if (bad || col.participants.size() < 2) {
      out.log.push_back("collision discarded: ambiguous sheet matching");
      continue;
    }

    // chain ordering: participant k's second slot must equal k+1's first
    const size_t l = col.participants.size();
    std::vector<int> order;
    {
      std::vector<int> start_candidates;
      for (size_t i = 0; i < l; ++i) {
        bool has_pred = false;
        for (size_t j = 0; j < l; ++j)
          if (j != i && col.participants[j].slots.second ==
                            col.participants[i].slots.first)
            has_pred = true;
        if (!has_pred) start_candidates.push_back(static_cast<int>(i));
      }
      bool cyclic = start_candidates.empty();
      if (cyclic) start_candidates.push_back(0);
      if (start_candidates.size() != 1) {
        out.log.push_back("crossing discarded: types do not chain");
        continue;
      }
      std::vector<bool> used(l, false);
      int cur = start_candidates[0];
      order.push_back(cur);
      used[cur] = true;
      bool broken = false;
      for (size_t step = 1; step < l; ++step) {
        int next = -1;
        for (size_t j = 0; j < l; ++j) {
          if (used[j]) continue;
          if (col.participants[j].slots.first ==
              col.participants[cur].slots.second) {
            if (next >= 0) {
              next = -2;
              break;
            }
            next = static_cast<int>(j);
          }
        }
        if (next < 0) {
          broken = true;
          break;
        }
        order.push_back(next);
        used[next] = true;
        cur = next;
      }
      if (broken) {
        out.log.push_back("crossing discarded: types do not chain");
        continue;
      }
      col.cyclic = cyclic && col.participants[order.back()].slots.second ==
                                 col.participants[order.front()].slots.first;
      if (cyclic && !col.cyclic) {
        out.log.push_back("crossing discarded: types do not chain");
        continue;
      }
    }
    {
      std::vector<CollisionParticipant> ordered;
      for (int idx : order) ordered.push_back(col.participants[idx]);
      col.participants = std::move(ordered);
    }

    // cyclic-order (chirality) verification: incoming germs must appear in
    // counterclockwise order, led by the outgoing composite germ
    {
      double base;
      if (!col.cyclic) {
        const Complex va =
            col.roots_at_point[col.participants.front().slots.first];
        const Complex vb =
            col.roots_at_point[col.participants.back().slots.second];
        const Complex w_dir = rot / (va - vb);
        base = std::arg(w_dir);
      } else {
        base = std::arg(-col.participants[0].tangent) - 1e-12;
      }
      double prev = -1.0;
      bool ok = true;
      for (const auto& part : col.participants) {
        const double rel = angle_from(base, std::arg(-part.tangent));
        if (rel <= prev) {
          ok = false;
          break;
        }
        prev = rel;
      }
      if (!ok) {
        out.log.push_back(
            "crossing discarded: cyclic order does not match the type chain");
        continue;
      }
    }

    col.mass = 0.0;
    for (const auto& part : col.participants) col.mass += part.mass_at;

    for (const auto& tp : state.turning_points) {
      if (std::abs(col.point - tp.position) <
          state.cfg.trace.capture_radius()) {
        col.near_turning_point = true;
        out.flags.push_back(
            "ordered collision within the capture radius of a turning point; "
            "perturb theta");
      }
    }

    col.id = next_id++;
    out.collisions.push_back(std::move(col));
  }

  // sampled overlap scan: long near-parallel runs of chaining types
  for (int wid : new_wall_ids) {
    const Wall& w = state.walls[wid];
    std::map<int, int> run, best_run;
    const size_t stride = std::max<size_t>(1, w.size() / 4000);
    for (size_t n = 0; n < w.size(); n += stride) {
      std::set<int> close_owners;
      for (int cand : grid.candidates_near(w.points[n], state.cfg.overlap_tol)) {
        const auto& seg = grid.segments()[cand];
        if (seg.owner == wid) continue;
        if (point_segment_distance(w.points[n], seg.a, seg.b) <
            state.cfg.overlap_tol)
          close_owners.insert(seg.owner);
      }
      for (auto& [owner, r] : run)
        if (!close_owners.count(owner)) r = 0;
      for (int owner : close_owners) {
        run[owner] += 1;
        best_run[owner] = std::max(best_run[owner], run[owner]);
      }
    }
    for (const auto& [owner, r] : best_run) {
      if (r <= state.cfg.overlap_count) continue;
      // shared-sheet test at a representative point
      const Wall& other = state.walls[owner];
      const auto& va = w.sheet_values[w.size() / 2];
      const auto& vb = other.sheet_values[other.size() / 2];
      const double tol = state.cfg.trace.curve.sheet_match_tol * 100;
      int shared = 0;
      for (Complex x : {va.first, va.second})
        for (Complex y : {vb.first, vb.second})
          if (std::abs(x - y) < tol * (1.0 + std::abs(x))) ++shared;
      if (shared == 1)
        out.flags.push_back(
            "non-discrete overlap between chaining preStokes curves");
    }
  }
  return out;
}

std::vector<WallSeed> scatter(NetworkState& state, int collision_id) {
  Collision& col = state.collisions.at(collision_id);
  if (col.cyclic)
    throw Error(ErrorCode::CyclicCollision,
                "cyclic collisions are obstructions, not scatterable");
  if (col.scattered)
    throw Error(ErrorCode::ValidationError, "collision already scattered");
  if (col.near_turning_point)
    throw Error(ErrorCode::ValidationError,
                "collision too close to a turning point; perturb theta");

  std::vector<WallSeed> seeds;
  const size_t l = col.participants.size();
  for (size_t i = 0; i < l; ++i) {
    for (size_t j = i + 1; j < l; ++j) {
      const int s = static_cast<int>(j - i + 1);
      WallSeed seed;
      seed.position = col.point;
      seed.pair_values = {
          col.roots_at_point[col.participants[i].slots.first],
          col.roots_at_point[col.participants[j].slots.second]};
      seed.inherited_mass = 0.0;
      int factor = (s % 2 == 0) ? -1 : +1;  // (-1)^{s+1}
      int spin = (s % 2 == 0) ? -1 : +1;
      for (size_t k = i; k <= j; ++k) {
        const auto& part = col.participants[k];
        seed.inherited_mass += part.mass_at;
        factor *= state.trees[part.tree].factor_sign;
        spin *= state.trees[part.tree].spin_sign;
        seed.parent_trees.push_back(part.tree);
      }
      seed.factor_sign = factor;
      seed.spin_sign = spin;
      seed.source = {SourceKind::ScatteredAt, -1, -1, collision_id};
      seeds.push_back(std::move(seed));
    }
  }
  col.scattered = true;
  return seeds;
}

NetworkState build_network(const SpectralData& data, double theta, double e_max,
                           const NetworkConfig& cfg) {
  NetworkState state = initial_graph(data, theta, e_max, cfg);
  if (state.status == BuildStatus::ObstructedAtStart &&
      !cfg.continue_obstructed)
    return state;

  using Entry = std::pair<double, int>;  // (mass, collision id)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  for (int id : state.pending_scatterable())
    queue.push({state.collisions[id].mass, id});

  while (!queue.empty()) {
    const auto [mass, cid] = queue.top();
    queue.pop();
    const Collision& col = state.collisions[cid];
    if (col.scattered || !col.scatterable() || col.mass >= e_max) continue;
    if (state.processed_collisions >= state.cfg.max_collisions) {
      state.status = BuildStatus::Nontermination;
      break;
    }
    if (mass < state.watermark - 1e-9)
      state.obstruction_flags.push_back(
          "filtration monotonicity violated at collision " +
          std::to_string(cid));
    state.watermark = std::max(state.watermark, mass);
    ++state.processed_collisions;

    auto seeds = scatter(state, cid);
    std::vector<Wall> traced = trace_all(state, seeds);
    std::vector<int> new_ids;
    for (size_t i = 0; i < seeds.size(); ++i)
      new_ids.push_back(add_wall(state, seeds[i], std::move(traced[i])));

    auto scan = find_collisions(state, new_ids);
    for (auto& c : scan.collisions) {
      const int id = c.id;
      const bool push = !c.cyclic && !c.near_turning_point && c.mass < e_max;
      const double m = c.mass;
      state.collisions.push_back(std::move(c));
      if (push) queue.push({m, id});
    }
    for (auto& l : scan.log) state.discard_log.push_back(std::move(l));
    for (auto& f : scan.flags) state.obstruction_flags.push_back(std::move(f));
  }
  return state;
}

ObstructionReport detect_obstructions(const NetworkState& state) {
  ObstructionReport rep;
  for (int id : state.closed_trees) {
    const Wall& w = state.walls[id];
    ClosedTreeRecord rec;
    rec.tree = id;
    rec.mass = w.final_mass();
    rec.tp_from = state.trees[id].leaf_turning_point;
    rec.tp_to = w.termination.index;
    bool dup = false;
    for (const auto& prev : rep.closed_trees) {
      const bool same_ends =
          (std::min(prev.tp_from, prev.tp_to) == std::min(rec.tp_from,
                                                          rec.tp_to)) &&
          (std::max(prev.tp_from, prev.tp_to) == std::max(rec.tp_from,
                                                          rec.tp_to));
      if (same_ends && std::abs(prev.mass - rec.mass) <
                           1e-6 * (1.0 + std::abs(rec.mass)))
        dup = true;
    }
    if (!dup) rep.closed_trees.push_back(rec);
  }
  for (const auto& c : state.collisions)
    if (c.cyclic && c.mass < state.e_max)
      rep.cyclic_collisions.push_back({c.id, c.mass});
  rep.suggested_theta_step =
      std::max(1e-4, 10.0 * state.cfg.theta_resolution);
  return rep;
}

ThetaScanResult find_unobstructed_theta(const SpectralData& data, double theta0,
                                        double epsilon, double e_max,
                                        const NetworkConfig& cfg) {
  NetworkConfig probe_cfg = cfg;
  probe_cfg.continue_obstructed = true;

  std::vector<double> offsets = {0.0};
  for (int level = 1; offsets.size() < size_t(cfg.max_probes) && epsilon > 0;
       ++level) {
    const int denom = 1 << level;
    for (int k = 1; k < denom; k += 2) {
      const double off = epsilon * double(k) / double(denom);
      offsets.push_back(+off);  // Moving Lemma: prefer increasing theta
      offsets.push_back(-off);
    }
    if (level > 20) break;
  }

  ThetaScanResult result;
  for (double off : offsets) {
    if (static_cast<int>(result.probes.size()) >= cfg.max_probes) break;
    const double theta = theta0 + off;
    bool obstructed = true;
    try {
      NetworkState state = build_network(data, theta, e_max, probe_cfg);
      const ObstructionReport rep = detect_obstructions(state);
      obstructed = !rep.empty() ||
                   state.status == BuildStatus::Nontermination;
    } catch (const Error&) {
      obstructed = true;
    }
    result.probes.push_back({theta, obstructed});
    if (!obstructed) {
      const double margin = std::min(cfg.theta_margin, epsilon > 0
                                                           ? epsilon / 4.0
                                                           : cfg.theta_margin);
      bool clear = true;
      for (const auto& probe : result.probes)
        if (probe.obstructed && std::abs(probe.theta - theta) < margin)
          clear = false;
      if (clear) {
        result.theta = theta;
        return result;
      }
    }
  }
  throw Error(ErrorCode::NotFound,
              "no unobstructed angle found within the probe budget (" +
                  std::to_string(result.probes.size()) + " probes)");
}

int count_closed_trees(const SpectralData& data, double theta, double M,
                       const NetworkConfig& cfg) {
  NetworkConfig count_cfg = cfg;
  count_cfg.continue_obstructed = true;
  NetworkState state = build_network(data, theta, M, count_cfg);
  if (state.status == BuildStatus::Nontermination)
    throw Error(ErrorCode::Nontermination,
                "collision budget exhausted while enumerating closed trees");
  const ObstructionReport rep = detect_obstructions(state);
  int count = 0;
  for (const auto& rec : rep.closed_trees)
    if (rec.mass < M) ++count;
  return count;
}

}  // namespace specnet
