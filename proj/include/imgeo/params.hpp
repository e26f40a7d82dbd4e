#pragma once

// Scalar constants of imaginary geometry, weight dictionaries and regime
// classifiers. Everything here is a pure function of value types.

#include <cmath>
#include <string>

#include "imgeo/error.hpp"
#include "imgeo/geometry.hpp"

namespace imgeo {

/// Tolerance used for identity checks and for boundary cases such as
/// rho == kappa/2 - 2, where the arithmetic is exact in theory but not in
/// floating point.
inline constexpr double kIdentityTol = 1e-12;

struct Constants {
  double kappa = 0.0;
  double kappa_prime = 0.0;
  double lambda = 0.0;
  double lambda_prime = 0.0;
  double chi = 0.0;
};

/// lambda = pi/sqrt(k), lambda' = pi*sqrt(k)/4, chi = 2/sqrt(k) - sqrt(k)/2,
/// kappa' = 16/k.  Requires 0 < kappa < 4.
inline Constants derive_constants(double kappa) {
  if (!(kappa > 0.0 && kappa < 4.0)) {
    throw DomainError("kappa must lie in (0,4), got " + std::to_string(kappa));
  }
  const double s = std::sqrt(kappa);
  Constants c;
  c.kappa = kappa;
  c.kappa_prime = 16.0 / kappa;
  c.lambda = kPi / s;
  c.lambda_prime = kPi * s / 4.0;
  c.chi = 2.0 / s - s / 2.0;
  return c;
}

/// Constants for the dual parameter kappa' = 16/kappa > 4.
inline Constants derive_constants_dual(double kappa_prime) {
  if (!(kappa_prime > 4.0)) {
    throw DomainError("kappa' must exceed 4, got " + std::to_string(kappa_prime));
  }
  return derive_constants(16.0 / kappa_prime);
}

/// theta_c = 2 lambda'/chi = pi kappa / (4 - kappa).
inline double critical_angle(double kappa) {
  if (!(kappa > 0.0 && kappa < 4.0)) {
    throw DomainError("critical angle needs kappa in (0,4), got " + std::to_string(kappa));
  }
  return kPi * kappa / (4.0 - kappa);
}

/// Largest kappa at which n rays from one point, evenly spaced, avoid each
/// other: the solution of theta_c(kappa) = 2 pi / n, i.e. 8/(n+2).
inline double critical_kappa_for_n(int n) {
  if (n < 1) throw DomainError("n must be a positive integer, got " + std::to_string(n));
  return 8.0 / (n + 2.0);
}

struct ImaginaryParams {
  Constants constants;
  double alpha = 0.0;
  double beta = 0.0;
  double theta = 0.0;

  /// Flow lines from the singularity have angles in [0, 2 pi (1 + alpha/chi)).
  double angle_range() const noexcept { return kTwoPi * (1.0 + alpha / constants.chi); }
  bool admissible() const noexcept { return alpha > -constants.chi; }
};

enum class RhoKind { flow, counterflow_from_origin, counterflow_from_infinity };

/// Weight of the SLE variant coupled with h - alpha arg - beta log|.|:
///   flow:                      2 - kappa + 2 pi alpha / lambda
///   counterflow from origin:   2 - kappa' - 2 pi alpha / lambda'
///   counterflow from infinity: kappa' - 6 + 2 pi alpha / lambda'
inline double rho_from_alpha(const ImaginaryParams& p, RhoKind kind) {
  const Constants& c = p.constants;
  double rho = 0.0;
  switch (kind) {
    case RhoKind::flow:
      rho = 2.0 - c.kappa + kTwoPi * p.alpha / c.lambda;
      break;
    case RhoKind::counterflow_from_origin:
      rho = 2.0 - c.kappa_prime - kTwoPi * p.alpha / c.lambda_prime;
      break;
    case RhoKind::counterflow_from_infinity:
      rho = c.kappa_prime - 6.0 + kTwoPi * p.alpha / c.lambda_prime;
      break;
  }
  if (!(rho > -2.0 + kIdentityTol)) {
    throw DomainError("inadmissible weight rho = " + std::to_string(rho) + " (need rho > -2)");
  }
  return rho;
}

/// Almost-sure maximal multiplicity of a point on whole-plane or radial
/// SLE_kappa^mu(rho): ceil(kappa / (2 (2 + rho))).
inline int max_self_hits(double kappa, double rho) {
  if (!(rho > -2.0)) throw DomainError("max_self_hits needs rho > -2");
  if (!(kappa > 0.0 && kappa < 4.0)) throw DomainError("max_self_hits needs kappa in (0,4)");
  const double x = kappa / (2.0 * (2.0 + rho));
  return static_cast<int>(std::ceil(x - kIdentityTol));
}

enum class Regime { simple, self_intersecting };

/// Simple iff the theta-process Bessel dimension 1 + 2(rho+2)/kappa is >= 2,
/// i.e. rho >= kappa/2 - 2.
inline Regime regime(double kappa, double rho) {
  if (!(rho > -2.0)) throw DomainError("regime needs rho > -2");
  return rho >= kappa / 2.0 - 2.0 - kIdentityTol ? Regime::simple : Regime::self_intersecting;
}

inline double bessel_dimension(double kappa, double rho) { return 1.0 + 2.0 * (rho + 2.0) / kappa; }

inline const char* to_string(Regime r) { return r == Regime::simple ? "simple" : "self_intersecting"; }

}  // namespace imgeo
