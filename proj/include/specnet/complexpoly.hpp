#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

namespace specnet {

using Complex = std::complex<double>;

// Dense univariate polynomial over C, coefficients stored ascending by degree.
// The zero polynomial has an empty coefficient vector.
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<Complex> coeffs) : c_(std::move(coeffs)) { trim(); }
  Poly(std::initializer_list<Complex> coeffs) : c_(coeffs) { trim(); }

  static Poly constant(Complex a) { return Poly({a}); }
  // The monomial z^n.
  static Poly monomial(int n, Complex a = 1.0);

  const std::vector<Complex>& coeffs() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  Complex leading() const { return c_.empty() ? Complex(0) : c_.back(); }
  Complex operator[](int k) const {
    return (k < 0 || k >= static_cast<int>(c_.size())) ? Complex(0) : c_[k];
  }

  Complex eval(Complex z) const;
  Poly derivative() const;

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Poly& o);
  Poly& operator*=(Complex s);

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, const Poly& b) { return a *= b; }
  friend Poly operator*(Poly a, Complex s) { return a *= s; }

  // Drops trailing coefficients with magnitude <= eps * max|c_k|.
  void trim(double eps = 0.0);

 private:
  std::vector<Complex> c_;
};

struct RootOptions {
  int max_iter = 200;
  double tol = 1e-13;  // scaled residual target per root
};

// All complex roots (with multiplicity, as clusters). Aberth-Ehrlich
// simultaneous iteration; falls back to companion-matrix eigenvalues.
// Throws Error{RootFailure} when neither converges.
std::vector<Complex> poly_roots(const Poly& p, const RootOptions& opts = {});

// Warm-started variant: `guesses` must hold degree(p) approximate roots.
std::vector<Complex> poly_roots_from(const Poly& p,
                                     const std::vector<Complex>& guesses,
                                     const RootOptions& opts = {});

// Allocation-free warm iteration for hot loops: refines `roots` in place for
// the ascending-coefficient polynomial `coeffs` (leading entry nonzero).
// Returns false when the iteration fails to converge.
bool aberth_refine_inplace(const std::vector<Complex>& coeffs,
                           std::vector<Complex>& roots, int max_iter = 40,
                           double tol = 5e-13);

// Resultant in the main variable of two polynomials whose coefficients are
// themselves polynomials in z: A(z, w) = sum a_i(z) w^i. Computed as the
// Sylvester determinant sampled at roots of unity and interpolated back.
Poly resultant_in_main_variable(const std::vector<Poly>& a,
                                const std::vector<Poly>& b);

}  // namespace specnet
