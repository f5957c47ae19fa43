#include "specnet/complexpoly.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "specnet/error.hpp"

namespace specnet {

Poly Poly::monomial(int n, Complex a) {
  std::vector<Complex> c(static_cast<size_t>(n) + 1, Complex(0));
  c.back() = a;
  return Poly(std::move(c));
}

Complex Poly::eval(Complex z) const {
  Complex acc(0);
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Poly Poly::derivative() const {
  if (c_.size() <= 1) return Poly();
  std::vector<Complex> d(c_.size() - 1);
  for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * double(k);
  return Poly(std::move(d));
}

Poly& Poly::operator+=(const Poly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Complex(0));
  for (size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
  trim();
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Complex(0));
  for (size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
  trim();
  return *this;
}

Poly& Poly::operator*=(const Poly& o) {
  if (c_.empty() || o.c_.empty()) {
    c_.clear();
    return *this;
  }
  std::vector<Complex> out(c_.size() + o.c_.size() - 1, Complex(0));
  for (size_t i = 0; i < c_.size(); ++i)
    for (size_t j = 0; j < o.c_.size(); ++j) out[i + j] += c_[i] * o.c_[j];
  c_ = std::move(out);
  trim();
  return *this;
}

Poly& Poly::operator*=(Complex s) {
  for (auto& x : c_) x *= s;
  trim();
  return *this;
}

void Poly::trim(double eps) {
  double scale = 0.0;
  for (const auto& x : c_) scale = std::max(scale, std::abs(x));
  const double cut = eps * scale;
  while (!c_.empty() && std::abs(c_.back()) <= cut) c_.pop_back();
  if (eps > 0.0)
    for (auto& x : c_)
      if (std::abs(x) <= cut) x = Complex(0);
}

namespace {

double scaled_residual(const Poly& p, Complex z) {
  // |p(z)| relative to the magnitude of its largest monomial at z; keeps the
  // criterion meaningful for huge |z| and huge coefficients alike.
  Complex acc(0);
  double mag = 0.0;
  double zp = 1.0;
  const auto& c = p.coeffs();
  for (size_t k = 0; k < c.size(); ++k) {
    mag = std::max(mag, std::abs(c[k]) * zp);
    zp *= std::abs(z);
  }
  acc = p.eval(z);
  return std::abs(acc) / std::max(mag, 1e-300);
}

bool aberth_iterate(const Poly& p, std::vector<Complex>& z,
                    const RootOptions& opts) {
  const Poly dp = p.derivative();
  const int n = static_cast<int>(z.size());
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) worst = std::max(worst, scaled_residual(p, z[i]));
    if (worst < opts.tol) return true;
    double moved = 0.0;
    for (int i = 0; i < n; ++i) {
      Complex pv = p.eval(z[i]);
      Complex dv = dp.eval(z[i]);
      if (std::abs(dv) < 1e-300) dv = Complex(1e-300, 0);
      Complex newton = pv / dv;
      Complex sum(0);
      for (int j = 0; j < n; ++j)
        if (j != i) {
          Complex d = z[i] - z[j];
          if (std::abs(d) < 1e-300) d = Complex(1e-300, 0);
          sum += Complex(1) / d;
        }
      Complex denom = Complex(1) - newton * sum;
      Complex step = (std::abs(denom) < 1e-300) ? newton : newton / denom;
      z[i] -= step;
      moved = std::max(moved, std::abs(step));
    }
    if (moved == 0.0) break;
  }
  double worst = 0.0;
  for (int i = 0; i < n; ++i) worst = std::max(worst, scaled_residual(p, z[i]));
  // Multiple roots plateau above the simple-root target; accept a looser
  // residual there (the cluster midpoints are still accurate).
  return worst < std::sqrt(opts.tol);
}

std::vector<Complex> companion_roots(const Poly& p) {
  const int n = p.degree();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  const Complex lead = p.leading();
  for (int i = 0; i < n; ++i) m(i, n - 1) = -p[i] / lead;
  for (int i = 1; i < n; ++i) m(i, i - 1) = Complex(1);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, false);
  std::vector<Complex> roots(n);
  for (int i = 0; i < n; ++i) roots[i] = solver.eigenvalues()(i);
  return roots;
}

void polish_newton(const Poly& p, std::vector<Complex>& z) {
  const Poly dp = p.derivative();
  for (auto& r : z) {
    for (int it = 0; it < 8; ++it) {
      Complex dv = dp.eval(r);
      if (std::abs(dv) < 1e-300) break;
      Complex step = p.eval(r) / dv;
      r -= step;
      if (std::abs(step) < 1e-15 * (1.0 + std::abs(r))) break;
    }
  }
}

}  // namespace

std::vector<Complex> poly_roots(const Poly& p, const RootOptions& opts) {
  const int n = p.degree();
  if (n < 0) throw Error(ErrorCode::RootFailure, "zero polynomial has no roots");
  if (n == 0) return {};
  if (n == 1) return {-p[0] / p[1]};

  // Cauchy bound sets the initial circle.
  double bound = 0.0;
  for (int k = 0; k < n; ++k)
    bound = std::max(bound, std::abs(p[k] / p.leading()));
  const double radius = 1.0 + bound;
  std::vector<Complex> z(n);
  for (int i = 0; i < n; ++i) {
    double ang =
        2.0 * std::numbers::pi * (i + 0.25) / n + 0.4;  // detuned start
    z[i] = radius * Complex(std::cos(ang), std::sin(ang));
  }
  if (aberth_iterate(p, z, opts)) return z;

  z = companion_roots(p);
  polish_newton(p, z);
  double worst = 0.0;
  for (const auto& r : z) worst = std::max(worst, scaled_residual(p, r));
  if (worst < std::sqrt(opts.tol)) return z;
  throw Error(ErrorCode::RootFailure,
              "root finder did not converge (degree " + std::to_string(n) + ")");
}

std::vector<Complex> poly_roots_from(const Poly& p,
                                     const std::vector<Complex>& guesses,
                                     const RootOptions& opts) {
  if (static_cast<int>(guesses.size()) != p.degree())
    return poly_roots(p, opts);
  std::vector<Complex> z = guesses;
  if (aberth_iterate(p, z, opts)) return z;
  return poly_roots(p, opts);
}

bool aberth_refine_inplace(const std::vector<Complex>& coeffs,
                           std::vector<Complex>& roots, int max_iter,
                           double tol) {
  const int n = static_cast<int>(coeffs.size()) - 1;
  if (n < 1 || static_cast<int>(roots.size()) != n) return false;
  for (int iter = 0; iter < max_iter; ++iter) {
    bool all_ok = true;
    for (int i = 0; i < n; ++i) {
      // combined Horner for p, p' and the residual scale
      Complex p = coeffs[n], dp(0);
      double scale = std::abs(coeffs[n]);
      const Complex zi = roots[i];
      const double azi = std::abs(zi);
      for (int k = n - 1; k >= 0; --k) {
        dp = dp * zi + p;
        p = p * zi + coeffs[k];
        scale = scale * azi + std::abs(coeffs[k]);
      }
      if (std::abs(p) <= tol * std::max(scale, 1e-300)) continue;
      all_ok = false;
      if (std::abs(dp) < 1e-300) dp = Complex(1e-300, 0);
      const Complex newton = p / dp;
      Complex sum(0);
      for (int j = 0; j < n; ++j)
        if (j != i) {
          Complex d = zi - roots[j];
          if (std::abs(d) < 1e-300) d = Complex(1e-300, 0);
          sum += Complex(1) / d;
        }
      const Complex denom = Complex(1) - newton * sum;
      roots[i] -= (std::abs(denom) < 1e-300) ? newton : newton / denom;
    }
    if (all_ok) return true;
  }
  return false;
}

Poly resultant_in_main_variable(const std::vector<Poly>& a,
                                const std::vector<Poly>& b) {
  const int m = static_cast<int>(a.size()) - 1;
  const int n = static_cast<int>(b.size()) - 1;
  if (m < 1 || n < 1)
    throw Error(ErrorCode::RootFailure, "resultant needs positive degrees");

  int da = 0, db = 0;
  for (const auto& q : a) da = std::max(da, std::max(0, q.degree()));
  for (const auto& q : b) db = std::max(db, std::max(0, q.degree()));
  const int deg_bound = n * da + m * db;
  const int samples = deg_bound + 1;

  const int dim = m + n;
  std::vector<Complex> values(samples);
  Eigen::MatrixXcd syl(dim, dim);
  for (int s = 0; s < samples; ++s) {
    const double ang = 2.0 * std::numbers::pi * s / samples;
    const Complex z(std::cos(ang), std::sin(ang));
    syl.setZero();
    for (int row = 0; row < n; ++row)
      for (int k = 0; k <= m; ++k) syl(row, row + k) = a[m - k].eval(z);
    for (int row = 0; row < m; ++row)
      for (int k = 0; k <= n; ++k) syl(n + row, row + k) = b[n - k].eval(z);
    values[s] = Eigen::PartialPivLU<Eigen::MatrixXcd>(syl).determinant();
  }

  // Inverse DFT on the unit circle recovers the coefficients exactly
  // (up to roundoff) since deg < samples.
  std::vector<Complex> coeffs(samples, Complex(0));
  for (int k = 0; k < samples; ++k) {
    Complex acc(0);
    for (int s = 0; s < samples; ++s) {
      const double ang = -2.0 * std::numbers::pi * k * s / samples;
      acc += values[s] * Complex(std::cos(ang), std::sin(ang));
    }
    coeffs[k] = acc / double(samples);
  }
  Poly out(std::move(coeffs));
  out.trim(1e-10);
  return out;
}

}  // namespace specnet
