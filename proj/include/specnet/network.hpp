#pragma once

#include <optional>
#include <string>
#include <vector>

#include "specnet/trace.hpp"

namespace specnet {

struct NetworkConfig {
  TraceConfig trace;
  double merge_tol_factor = 1e-5;  // mergeTol = factor * domainRadius
  int max_collisions = 10000;
  bool force = false;               // skip the strong-GMN gate
  bool continue_obstructed = false; // keep building past a start obstruction
  double overlap_tol = 1e-4;
  int overlap_count = 12;
  double theta_resolution = 1e-5;
  int max_probes = 64;
  double theta_margin = 1e-3;

  double merge_tol(double domain_radius) const {
    return merge_tol_factor * domain_radius;
  }
};

// Rooted tree over walls. The root edge is the tree's own wall; parent trees
// contribute their full subtrees through the source collision.
struct StokesTree {
  int id = -1;         // equals the root wall id
  int root_edge = -1;  // wall id
  std::vector<int> parents;   // participant tree ids (chain order)
  int source_collision = -1;  // -1 for initial trees
  int leaf_turning_point = -1;
  double mass = 0.0;  // m(T): sum over non-root edges
  bool closed = false;
  int factor_sign = 1;  // alpha: canonical data keeps these in {+1, -1}
  int spin_sign = 1;    // detour sign folded out of alpha (spin convention)

  // All wall ids in the subtree, root edge last.
  std::vector<int> edge_set(const std::vector<StokesTree>& trees) const;
};

struct CollisionParticipant {
  int tree = -1;
  int wall = -1;
  size_t segment = 0;
  double t = 0.0;
  double mass_at = 0.0;            // m(T_i, p)
  std::pair<int, int> slots;       // matched root indices at p
  Complex tangent;                 // outgoing flow direction at p
};

struct Collision {
  int id = -1;
  Complex point;
  std::vector<CollisionParticipant> participants;  // chain order
  std::vector<Complex> roots_at_point;
  bool cyclic = false;
  double mass = 0.0;
  bool scattered = false;
  bool near_turning_point = false;

  bool scatterable() const { return !cyclic && !near_turning_point; }
};

// One branch cut per turning point: a straight ray in the shared direction,
// with an anchored ordered sheet pair fixing the sign convention.
struct CutRay {
  int turning_point = -1;
  Complex base;
  Complex dir;  // unit, shared across all cuts
  double length = 0.0;
  Complex anchor;  // base + r_anchor * dir
  std::pair<Complex, Complex> anchor_pair;
};

enum class BuildStatus { Ok, ObstructedAtStart, Nontermination };

struct ClosedTreeRecord {
  int tree = -1;
  double mass = 0.0;
  int tp_from = -1;  // source turning point (-1 for scattered roots)
  int tp_to = -1;    // turning point hit by the root edge
};

struct ObstructionReport {
  std::vector<ClosedTreeRecord> closed_trees;  // deduplicated saddles
  std::vector<std::pair<int, double>> cyclic_collisions;  // (id, mass)
  double suggested_theta_step = 1e-4;

  bool empty() const {
    return closed_trees.empty() && cyclic_collisions.empty();
  }
};

struct NetworkState {
  SpectralData data;
  double theta = 0.0;
  double e_max = 0.0;
  NetworkConfig cfg;
  std::vector<TurningPoint> turning_points;
  std::vector<CutRay> cuts;
  std::vector<Wall> walls;        // id == index
  std::vector<StokesTree> trees;  // id == index == wall id
  std::vector<Collision> collisions;
  BuildStatus status = BuildStatus::Ok;
  double watermark = 0.0;  // largest processed collision mass
  int processed_collisions = 0;
  std::vector<int> open_trees;
  std::vector<int> closed_trees;
  std::vector<std::string> obstruction_flags;  // near-tp / overlap findings
  std::vector<std::string> discard_log;        // non-chaining crossings

  const Wall& wall(int id) const { return walls.at(id); }
  std::vector<int> pending_scatterable() const;  // unscattered, mass < e_max
};

// Seeds and traces the three initial rays per turning point, assigns spin
// signs, routes branch cuts, and fills the initial collision set. Status is
// ObstructedAtStart when an initial wall terminates at a turning point.
NetworkState initial_graph(const SpectralData& data, double theta,
                           double e_max, const NetworkConfig& cfg);

struct CollisionScan {
  std::vector<Collision> collisions;
  std::vector<std::string> log;    // discarded non-chaining crossings
  std::vector<std::string> flags;  // overlap / near-turning-point findings
};

// Segment-segment intersections of the listed walls against every existing
// root edge; returns newly discovered collisions (already deduplicated and
// chain-ordered). Appends nothing to the state.
CollisionScan find_collisions(const NetworkState& state,
                              const std::vector<int>& new_wall_ids);

// Scattering seeds for every consecutive sub-chain of the ordered collision:
// composite type, inherited mass, factor (-1)^{s+1} prod(alpha). Marks the
// collision scattered. Throws Error{CyclicCollision} on cyclic input.
std::vector<WallSeed> scatter(NetworkState& state, int collision_id);

// The inductive construction: repeatedly scatter the minimum-mass pending
// collision below e_max, trace the new walls, and rescan for collisions.
NetworkState build_network(const SpectralData& data, double theta,
                           double e_max, const NetworkConfig& cfg);

ObstructionReport detect_obstructions(const NetworkState& state);

struct ThetaProbe {
  double theta;
  bool obstructed;
};

struct ThetaScanResult {
  double theta;
  std::vector<ThetaProbe> probes;
};

// Geometric scan over theta0 +- epsilon for an unobstructed angle with a
// safety margin to every obstructed probe. Throws Error{NotFound} when the
// probe budget is exhausted.
ThetaScanResult find_unobstructed_theta(const SpectralData& data,
                                        double theta0, double epsilon,
                                        double e_max, const NetworkConfig& cfg);

// Number of distinct closed Stokes trees of mass < M (cyclic collisions are
// left unscattered; the build continues through obstructions).
int count_closed_trees(const SpectralData& data, double theta, double M,
                       const NetworkConfig& cfg);

}  // namespace specnet
