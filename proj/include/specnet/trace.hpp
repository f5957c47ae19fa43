#pragma once

#include <array>
#include <utility>
#include <vector>

#include "specnet/curve.hpp"
#include "specnet/spectral_data.hpp"

namespace specnet {

struct TraceConfig {
  double theta = 0.0;           // phase in [0, 1)
  double mass_cutoff = 6.0;     // E
  double seed_radius = 1e-3;    // r0
  double puncture_radius = 0.05;
  double step_init = 1e-4;
  double step_min = 1e-13;
  double step_max = 0.05;
  double pres_tol = 1e-6;
  double ode_tol = 1e-10;
  double quad_tol = 1e-7;  // per-step trapezoid-vs-mass relative bound
  int max_steps = 400000;
  CurveConfig curve;

  double capture_radius() const { return 3.0 * seed_radius; }
};

enum class TerminationKind {
  MassCutoff,
  EnteredPunctureNeighborhood,
  LeftDomain,
  HitTurningPoint,
  StepFailure,
};

struct Termination {
  TerminationKind kind = TerminationKind::StepFailure;
  int index = -1;  // puncture index (-1 = infinity) or turning point id
};

enum class SourceKind { TurningPointRay, ScatteredAt };

struct WallSource {
  SourceKind kind = SourceKind::TurningPointRay;
  int turning_point = -1;
  int ray = -1;        // 0..2 for initial rays
  int collision = -1;  // for scattered walls
};

struct WallSeed {
  Complex position;
  std::pair<Complex, Complex> pair_values;  // ordered: mass integrand positive
  double inherited_mass = 0.0;
  WallSource source;
  // wall-crossing data carried to the tree built on this wall
  int factor_sign = 1;
  int spin_sign = 1;
  std::vector<int> parent_trees;
};

// A traced preStokes curve. massProfile[n] is the cumulative tree mass at
// points[n] (inherited source mass plus the arc parameter).
struct Wall {
  int id = -1;
  std::vector<Complex> points;
  std::vector<std::pair<Complex, Complex>> sheet_values;
  std::vector<double> mass_profile;
  double inherited_mass = 0.0;
  WallSource source;
  Termination termination;

  size_t size() const { return points.size(); }
  double final_mass() const {
    return mass_profile.empty() ? inherited_mass : mass_profile.back();
  }
  // Outgoing unit tangent of the preStokes flow at point n.
  Complex tangent_at(size_t n, double theta) const;
  // Linear interpolation of position / pair values / mass at (segment, t).
  Complex position_on(size_t seg, double t) const;
  std::pair<Complex, Complex> values_on(size_t seg, double t) const;
  double mass_on(size_t seg, double t) const;
};

// Three wall seeds at z0 + r0 e^{i phi_k},
// phi_k = (2/3) (2 pi theta - arg(2c/3) + 2 pi k). Each seed carries the
// colliding pair ordered so the mass integrand is positive, and inherits the
// analytic turning-point-to-seed mass (2|c|/3) r0^{3/2}.
std::array<WallSeed, 3> seed_rays(const SpectralData& data,
                                  const TurningPoint& tp,
                                  const TraceConfig& cfg);

// Integrates dz/ds = e^{2 pi i theta} / (zeta_i - zeta_j) with embedded
// Cash-Karp 4(5); mass grows at unit rate. Termination events are recorded,
// never thrown.
Wall trace_wall(const SpectralData& data, const WallSeed& seed,
                const TraceConfig& cfg,
                const std::vector<TurningPoint>& turning_points);

// Trapezoid quadrature of e^{-2 pi i theta}(zeta_i - zeta_j) dz up to
// point_index, plus the inherited mass. Throws Error{PrestokesViolation}
// when the imaginary part exceeds pres_tol * (real + 1).
double mass_along(const Wall& wall, size_t point_index, double theta,
                  double pres_tol = 1e-6);

}  // namespace specnet
