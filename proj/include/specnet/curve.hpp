#pragma once

#include <vector>

#include "specnet/spectral_data.hpp"

namespace specnet {

struct CurveConfig {
  double residual_tol = 1e-10;     // scaled root residual bound
  double sheet_match_tol = 1e-7;   // value matching between sheet objects
  double clearance_tol = 1e-6;     // paths must keep this distance to specials
  double probe_r_factor = 1e-3;    // probeR = factor * nearest-special distance
  double puncture_filter_tol = 1e-6;
  double cluster_tol = 1e-7;       // discriminant root clustering (relative)
  bool strict = true;              // DEGENERATE_BRANCH on non-simple points
  int continuation_max_depth = 48;
  double continuation_min_step = 1e-13;
};

// Roots of sigma(z, .) ordered by (Re, Im); residuals checked against
// residual_tol. Throws Error{RootFailure}.
SheetSet eval_sheets(const SpectralData& data, Complex z,
                     const CurveConfig& cfg = {});

// Stateful sheet continuation along arbitrary polylines. Steps are bisected
// until the minimal inter-root gap exceeds 3x the maximal root movement.
class SheetTracker {
 public:
  SheetTracker(const SpectralData& data, Complex z,
               std::vector<Complex> values, const CurveConfig& cfg);
  SheetTracker(const SpectralData& data, const SheetSet& start,
               const CurveConfig& cfg);

  const std::vector<Complex>& values() const { return values_; }
  Complex position() const { return z_; }

  // Throws Error{AmbiguousContinuation} when bisection bottoms out.
  void advance(Complex target);

  // Swap the labels of two slots (branch-cut bookkeeping).
  void swap_labels(int a, int b) { std::swap(values_[a], values_[b]); }

  // Slot whose value is nearest to v; throws Error{MatchFailure} when the
  // match is ambiguous at tolerance tol.
  int match_value(Complex v, double tol) const;

 private:
  void step(Complex target, int depth);

  const SpectralData* data_;
  CurveConfig cfg_;
  Complex z_;
  std::vector<Complex> values_;
};

// Continuation along a polyline. Returns the canonical SheetSet at the final
// point plus the permutation mapping start labels to end labels.
std::pair<SheetSet, std::vector<int>> continue_sheets(
    const SpectralData& data, const std::vector<Complex>& path,
    const SheetSet& start, const CurveConfig& cfg = {});

// Discriminant of sigma in zeta after clearing denominators, as a polynomial
// in z. Exposed for the root-count invariant.
Poly discriminant_poly(const SpectralData& data);

// Turning points: roots of the discriminant, filtered against punctures,
// classified by multiplicity, with fitted local coefficients.
std::vector<TurningPoint> branch_points(const SpectralData& data,
                                        const CurveConfig& cfg = {});

// Strong-GMN sufficient conditions: simple branch points, at least one branch
// point, and pole order >= 2 of every associated quadratic differential at
// every puncture (Newton-polygon leading exponents).
GmnReport gmn_check(const SpectralData& data, const CurveConfig& cfg = {});

// Circle polyline helper (closed: first point repeated at the end).
std::vector<Complex> circle_path(Complex center, double radius, int segments,
                                 double start_angle = 0.0);

}  // namespace specnet
