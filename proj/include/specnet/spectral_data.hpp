#pragma once

#include <complex>
#include <string>
#include <vector>

#include "specnet/complexpoly.hpp"

namespace specnet {

// Quotient of two polynomials, denominator not identically zero.
class RationalFunction {
 public:
  RationalFunction() : num_(), den_({Complex(1)}) {}
  RationalFunction(Poly num, Poly den);

  static RationalFunction zero() { return RationalFunction(); }
  static RationalFunction polynomial(Poly p) {
    return RationalFunction(std::move(p), Poly({Complex(1)}));
  }

  const Poly& numerator() const { return num_; }
  const Poly& denominator() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }

  Complex eval(Complex z) const { return num_.eval(z) / den_.eval(z); }

  // Finite poles, with multiplicity collapsed into clusters.
  std::vector<Complex> poles() const;

 private:
  Poly num_;
  Poly den_;
};

struct PunctureSet {
  std::vector<Complex> finite;
  bool at_infinity = false;

  bool empty() const { return finite.empty() && !at_infinity; }
  double distance_to_finite(Complex z) const;
};

// The input datum: K coefficient differentials phi_1..phi_K on the sphere,
// a puncture set containing every coefficient pole, and the radius of the
// working disk (everything outside counts as the neighborhood of infinity).
struct SpectralData {
  int K = 0;
  std::vector<RationalFunction> coefficients;  // phi_1 .. phi_K
  PunctureSet punctures;
  double domain_radius = 10.0;

  // Coefficients of sigma(z, zeta) in zeta, ascending:
  // [-phi_K(z), ..., -phi_1(z), 1].
  std::vector<Complex> sigma_coeffs(Complex z) const;
  void sigma_coeffs_into(Complex z, std::vector<Complex>& out) const;
  Complex sigma(Complex z, Complex zeta) const;

  // sigma with denominators cleared: entry i is the z-polynomial coefficient
  // of zeta^i. Shares a common factor prod(den_j) across entries.
  std::vector<Poly> cleared_sigma_coeffs() const;

  // Throws Error{ValidationError} when an invariant fails (K >= 1, punctures
  // nonempty, every coefficient pole listed as a puncture).
  void validate() const;
};

struct SheetSet {
  Complex basepoint;
  std::vector<Complex> values;  // ordered labeling of the K roots
};

struct TurningPoint {
  int id = 0;
  Complex position;
  int multiplicity = 1;
  bool simple = true;
  // Leading coefficient of the colliding sheet difference:
  // lambda_i - lambda_j ~ c (z - z0)^{1/2}.
  Complex local_coefficient;
  // Sheet matching anchor: the two colliding sheet values sampled at
  // probe_anchor (cross-object sheet identification goes through values,
  // never through global labels).
  Complex probe_anchor;
  std::pair<Complex, Complex> pair_values;
  std::pair<int, int> type_pair;  // labels in the canonical SheetSet at anchor
  double probe_radius = 0.0;
};

struct GmnPairOrder {
  double exponent;    // leading growth/vanishing exponent of lambda_i-lambda_j
  double pole_order;  // pole order of the associated quadratic differential
  bool resolved;      // false when leading Puiseux coefficients tie
};

struct GmnPunctureReport {
  Complex puncture;
  bool at_infinity = false;
  std::vector<GmnPairOrder> pairs;
  bool ok = false;
  std::string note;
};

struct GmnReport {
  bool branch_points_simple = false;
  bool has_branch_point = false;
  std::vector<GmnPunctureReport> per_puncture;
  bool verdict = false;
  std::vector<std::string> explanations;
};

}  // namespace specnet
