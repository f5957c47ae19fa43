#pragma once

#include "specnet/spectral_data.hpp"

namespace specnet::testing {

// sigma = zeta^2 - z (Airy)
inline SpectralData make_airy(double radius = 10.0) {
  SpectralData d;
  d.K = 2;
  d.coefficients = {RationalFunction::zero(),
                    RationalFunction::polynomial(Poly({Complex(0), Complex(1)}))};
  d.punctures.at_infinity = true;
  d.domain_radius = radius;
  return d;
}

// sigma = zeta^2 - (z^2 - 1): two turning points, saddle of mass pi
inline SpectralData make_saddle(double radius = 10.0) {
  SpectralData d;
  d.K = 2;
  d.coefficients = {
      RationalFunction::zero(),
      RationalFunction::polynomial(Poly({Complex(-1), Complex(0), Complex(1)}))};
  d.punctures.at_infinity = true;
  d.domain_radius = radius;
  return d;
}

// sigma = zeta^3 - 3 zeta - z (Berk-Nevins-Roberts cubic)
inline SpectralData make_bnr(double radius = 10.0) {
  SpectralData d;
  d.K = 3;
  d.coefficients = {RationalFunction::zero(),
                    RationalFunction::polynomial(Poly({Complex(3)})),
                    RationalFunction::polynomial(Poly({Complex(0), Complex(1)}))};
  d.punctures.at_infinity = true;
  d.domain_radius = radius;
  return d;
}

// sigma = zeta^2 - z*zeta - 1: K=2 with nonzero phi_1
inline SpectralData make_shifted_quadratic(double radius = 10.0) {
  SpectralData d;
  d.K = 2;
  d.coefficients = {RationalFunction::polynomial(Poly({Complex(0), Complex(1)})),
                    RationalFunction::polynomial(Poly({Complex(1)}))};
  d.punctures.at_infinity = true;
  d.domain_radius = radius;
  return d;
}

}  // namespace specnet::testing
