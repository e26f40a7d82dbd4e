#pragma once

// Loewner driving processes (chordal, radial, whole-plane SLE_kappa(rho))
// and trace reconstruction by composing exact single-step slit maps.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "imgeo/error.hpp"
#include "imgeo/geometry.hpp"
#include "imgeo/params.hpp"
#include "imgeo/rng.hpp"

namespace imgeo {

enum class DriverKind { chordal, radial, whole_plane };

inline const char* to_string(DriverKind k) {
  switch (k) {
    case DriverKind::chordal: return "chordal";
    case DriverKind::radial: return "radial";
    case DriverKind::whole_plane: return "whole_plane";
  }
  return "?";
}

struct ForcePoint {
  double rho = 0.0;
  double x = 0.0;     // chordal: initial position on the real line
  bool right = true;  // side of the driving point (meaningful for x == 0)
};

struct DriverSpec {
  DriverKind kind = DriverKind::radial;
  double kappa = 2.0;
  std::vector<ForcePoint> weights;
  double mu = 0.0;
  double dt = 1e-4;
  double t0 = 0.0;       // first recorded time
  double horizon = 1.0;  // last recorded time
  double burn_in = 0.0;  // whole-plane only
  double theta0 = kPi;   // initial arg W - arg O for radial/whole-plane
  std::uint64_t seed = 0;
  double eps_collision = 1e-6;
  double eps_angle = 1e-6;
};

struct Driver {
  DriverKind kind = DriverKind::radial;
  double kappa = 0.0;
  double rho = 0.0;
  double mu = 0.0;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<Point> W;  // chordal: real part only
  std::vector<Point> O;  // radial/whole-plane force point
  std::vector<double> theta;
  std::vector<std::vector<double>> V;  // chordal force-point tracks, one vector per point
  std::optional<double> threshold_time;
  long collisions = 0;

  std::size_t size() const noexcept { return times.size(); }
};

/// Coupling between the log-singularity coefficient beta and the radial
/// drift mu: the Girsanov shift of the Brownian motion driving theta is beta
/// per unit time, so the theta drift gains sqrt(kappa) beta = kappa mu.
inline double mu_from_beta(double kappa, double beta) { return beta / std::sqrt(kappa); }

namespace detail {

inline void check_common(const DriverSpec& s) {
  if (!(s.kappa > 0)) throw SpecError("kappa must be positive");
  if (!(s.dt > 0)) throw SpecError("dt must be positive");
  if (!(s.horizon > s.t0)) throw SpecError("horizon must exceed the start time");
  if (s.burn_in < 0) throw SpecError("burn_in must be non-negative");
}

// Probability that a Bessel process of dimension d < 2 started at r0 and
// observed at r1 after time dt touched 0 in between. The killed and
// reflected transition densities differ only in the Bessel-I order.
inline double bessel_bridge_hit(double d, double r0, double r1, double dt) {
  if (d >= 2.0) return 0.0;
  const double nu = 1.0 - d / 2.0;
  const double z = r0 * r1 / dt;
  const double s = 2.0 / kPi * std::sin(nu * kPi);
  if (z <= 0) return 1.0;
  if (z > 50.0) return std::min(1.0, s * kPi * std::exp(-2.0 * z));
  const double iv = std::cyl_bessel_i(nu, z);
  const double kv = std::cyl_bessel_k(nu, z);
  return s * kv / (iv + s * kv);
}

inline Driver drive_chordal_single(const DriverSpec& s, CounterRng& rng) {
  const ForcePoint fp = s.weights.front();
  const double d = bessel_dimension(s.kappa, fp.rho);
  const double sk = std::sqrt(s.kappa);
  const double side = (fp.x > 0 || (fp.x == 0 && fp.right)) ? 1.0 : -1.0;
  Driver out;
  out.kind = DriverKind::chordal;
  out.kappa = s.kappa;
  out.rho = fp.rho;
  out.dt = s.dt;
  out.V.resize(1);
  // R = side*(V - W)/sqrt(kappa) is Bessel(d); Y = R^2 by reflected Euler
  double W = 0.0, V = fp.x, R = side * (V - W) / sk, Y = R * R;
  const long steps = static_cast<long>(std::llround((s.horizon - s.t0) / s.dt));
  out.times.reserve(steps + 1);
  auto record = [&](double t) {
    out.times.push_back(t);
    out.W.emplace_back(W, 0.0);
    out.V[0].push_back(V);
  };
  record(s.t0);
  for (long k = 1; k <= steps; ++k) {
    const double dB = rng.normal() * std::sqrt(s.dt);
    double Yn = Y + d * s.dt + 2.0 * std::sqrt(Y) * dB;
    bool hit = Yn < 0;
    Yn = std::abs(Yn);
    const double Rn = std::sqrt(Yn);
    if (!hit && R > 0) hit = rng.uniform() < bessel_bridge_hit(d, R, Rn, s.dt);
    if (!hit && Rn * sk < s.eps_collision) hit = true;
    if (hit && k > 1) ++out.collisions;
    const double Xmid = std::max(0.5 * sk * (R + Rn), s.eps_collision);
    V += side * 2.0 * s.dt / Xmid;
    W = V - side * sk * Rn;
    R = Rn;
    Y = Yn;
    record(s.t0 + k * s.dt);
  }
  return out;
}

}  // namespace detail

/// Chordal SLE_kappa(rho) driving function. A single force point is run
/// through its Bessel reduction; several force points use Euler-Maruyama
/// with drift distances floored at max(eps_collision, sqrt(kappa dt)).
inline Driver drive_chordal(const DriverSpec& s) {
  if (s.kind != DriverKind::chordal) throw SpecError("drive_chordal needs a chordal spec");
  detail::check_common(s);
  // partial sums of weights sitting at the driving point must exceed -2
  for (int side = 0; side < 2; ++side) {
    double sum = 0.0;
    for (const auto& f : s.weights)
      if (f.x == 0 && f.right == (side == 1)) sum += f.rho;
    if (sum <= -2.0) throw SpecError("weights at the starting point reach the continuation threshold");
  }
  CounterRng rng(s.seed);
  if (s.weights.empty()) {
    Driver out;
    out.kind = DriverKind::chordal;
    out.kappa = s.kappa;
    out.dt = s.dt;
    const long steps = static_cast<long>(std::llround((s.horizon - s.t0) / s.dt));
    double W = 0.0;
    out.times.push_back(s.t0);
    out.W.emplace_back(0.0, 0.0);
    for (long k = 1; k <= steps; ++k) {
      W += std::sqrt(s.kappa * s.dt) * rng.normal();
      out.times.push_back(s.t0 + k * s.dt);
      out.W.emplace_back(W, 0.0);
    }
    return out;
  }
  if (s.weights.size() == 1) return detail::drive_chordal_single(s, rng);

  Driver out;
  out.kind = DriverKind::chordal;
  out.kappa = s.kappa;
  out.dt = s.dt;
  const std::size_t m = s.weights.size();
  out.V.resize(m);
  std::vector<double> V(m), side(m);
  for (std::size_t i = 0; i < m; ++i) {
    V[i] = s.weights[i].x;
    side[i] = (s.weights[i].x > 0 || (s.weights[i].x == 0 && s.weights[i].right)) ? 1.0 : -1.0;
  }
  const double floor_d = std::max(s.eps_collision, std::sqrt(s.kappa * s.dt));
  double W = 0.0;
  const long steps = static_cast<long>(std::llround((s.horizon - s.t0) / s.dt));
  auto record = [&](double t) {
    out.times.push_back(t);
    out.W.emplace_back(W, 0.0);
    for (std::size_t i = 0; i < m; ++i) out.V[i].push_back(V[i]);
  };
  record(s.t0);
  for (long k = 1; k <= steps; ++k) {
    double drift = 0.0;
    std::vector<double> dv(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double gap = std::max(side[i] * (V[i] - W), floor_d);
      drift += -side[i] * s.weights[i].rho / gap;
      dv[i] = side[i] * 2.0 / gap * s.dt;
    }
    W += drift * s.dt + std::sqrt(s.kappa * s.dt) * rng.normal();
    for (std::size_t i = 0; i < m; ++i) V[i] += dv[i];
    // a force point overtaken by W collides; check the same-side partial sum
    for (std::size_t i = 0; i < m; ++i) {
      if (side[i] * (V[i] - W) >= s.eps_collision) continue;
      ++out.collisions;
      V[i] = W;
      double sum = 0.0;
      for (std::size_t j = 0; j < m; ++j)
        if (side[j] == side[i] && side[j] * (V[j] - W) <= s.eps_collision) sum += s.weights[j].rho;
      if (sum <= -2.0 && !out.threshold_time) out.threshold_time = s.t0 + k * s.dt;
    }
    record(s.t0 + k * s.dt);
    if (out.threshold_time) break;
  }
  return out;
}

namespace detail {

// One Euler step of the theta equation with reflection at 0 and 2 pi. The
// cotangent is evaluated no closer than one diffusion length to the walls so
// a single step cannot overshoot.
inline double theta_step(double th, double rho, double kappa, double mu, double dt, double eps, double noise,
                         double& darg_o) {
  const double floor = std::max(eps, std::sqrt(kappa * dt));
  const double x = std::clamp(th, floor, kTwoPi - floor);
  const double cot = 1.0 / std::tan(0.5 * x);
  darg_o = -cot * dt;
  double next = th + (0.5 * (rho + 2.0) * cot + kappa * mu) * dt + std::sqrt(kappa * dt) * noise;
  if (next < 0) next = -next;
  if (next > kTwoPi) next = 2.0 * kTwoPi - next;
  return std::clamp(next, 0.0, kTwoPi);
}

inline Driver run_radial(const DriverSpec& s, double rho, double warmup) {
  if (s.theta0 < 0 || s.theta0 > kTwoPi) throw SpecError("theta0 must lie in [0, 2 pi]");
  if (!(rho > -2.0)) throw SpecError("radial weight must exceed -2");
  Driver out;
  out.kind = s.kind;
  out.kappa = s.kappa;
  out.rho = rho;
  out.mu = s.mu;
  out.dt = s.dt;
  CounterRng rng(s.seed);
  double th = s.theta0, arg_o = -s.theta0;  // W_0 = 1 before any warm-up
  const long warm = static_cast<long>(std::llround(warmup / s.dt));
  const long steps = static_cast<long>(std::llround((s.horizon - s.t0) / s.dt));
  out.times.reserve(steps + 1);
  out.W.reserve(steps + 1);
  out.O.reserve(steps + 1);
  out.theta.reserve(steps + 1);
  auto advance = [&](long k) {
    double darg = 0.0;
    const double next = theta_step(th, rho, s.kappa, s.mu, s.dt, s.eps_angle, rng.normal(), darg);
    if (std::abs(next - th) > kPi / 4) throw StabilityError("theta step exceeds pi/4; dt too coarse", k);
    th = next;
    arg_o = std::remainder(arg_o + darg, kTwoPi);
  };
  for (long k = 0; k < warm; ++k) advance(k - warm);
  auto record = [&](double t) {
    const Point O = std::polar(1.0, arg_o);
    Point W = O * std::polar(1.0, th);
    W /= std::abs(W);
    out.times.push_back(t);
    out.W.push_back(W);
    out.O.push_back(O);
    out.theta.push_back(th);
  };
  record(s.t0);
  for (long k = 1; k <= steps; ++k) {
    advance(k);
    record(s.t0 + k * s.dt);
  }
  return out;
}

}  // namespace detail

/// Streams theta alone: `count` samples spaced `stride` apart after
/// `burn_in`, without storing the path.
inline std::vector<double> sample_theta(double kappa, double rho, double mu, double dt, double burn_in, double stride,
                                        long count, std::uint64_t seed, double theta0 = kPi, double eps_angle = 1e-6) {
  if (!(dt > 0) || !(stride >= dt)) throw SpecError("need 0 < dt <= stride");
  if (!(rho > -2.0)) throw SpecError("radial weight must exceed -2");
  CounterRng rng(seed);
  double th = theta0, darg = 0.0;
  const long warm = static_cast<long>(std::llround(burn_in / dt));
  const long every = static_cast<long>(std::llround(stride / dt));
  auto advance = [&](long k) {
    const double next = detail::theta_step(th, rho, kappa, mu, dt, eps_angle, rng.normal(), darg);
    if (std::abs(next - th) > kPi / 4) throw StabilityError("theta step exceeds pi/4; dt too coarse", k);
    th = next;
  };
  for (long k = 0; k < warm; ++k) advance(k);
  std::vector<double> out;
  out.reserve(count);
  for (long i = 0; i < count; ++i) {
    for (long k = 0; k < every; ++k) advance(warm + i * every + k);
    out.push_back(th);
  }
  return out;
}

/// Radial SLE_kappa^mu(rho) driving pair via the theta equation; arg O moves
/// with drift -cot(theta/2) and W = O e^{i theta}.
inline Driver drive_radial(const DriverSpec& s) {
  if (s.kind != DriverKind::radial) throw SpecError("drive_radial needs a radial spec");
  detail::check_common(s);
  if (s.weights.size() > 1) throw SpecError("radial driver takes a single weight");
  const double rho = s.weights.empty() ? 0.0 : s.weights.front().rho;
  return detail::run_radial(s, rho, 0.0);
}

/// Whole-plane driver: the radial theta dynamics run for burn_in before the
/// recorded window [t0, horizon], standing in for the stationary solution.
inline Driver drive_wholeplane(const DriverSpec& s) {
  if (s.kind != DriverKind::whole_plane) throw SpecError("drive_wholeplane needs a whole-plane spec");
  detail::check_common(s);
  if (!(s.burn_in > 0)) throw SpecError("whole-plane driver needs burn_in > 0");
  if (s.weights.size() > 1) throw SpecError("whole-plane driver takes a single weight");
  const double rho = s.weights.empty() ? 0.0 : s.weights.front().rho;
  return detail::run_radial(s, rho, s.burn_in);
}

inline Driver drive(const DriverSpec& s) {
  switch (s.kind) {
    case DriverKind::chordal: return drive_chordal(s);
    case DriverKind::radial: return drive_radial(s);
    case DriverKind::whole_plane: return drive_wholeplane(s);
  }
  throw SpecError("unknown driver kind");
}

// ---------------------------------------------------------------------------
// Slit maps

/// Inverse of the radial Loewner flow over time dt with constant driver W:
/// with W = 1 the flow preserves e^{-t} g/(1+g)^2, so z solves
/// z/(1+z)^2 = e^{-dt} w/(1+w)^2 with |z| < 1. Optionally returns dz/dw.
inline Point radial_inverse_step(Point W, Point w, double dt, Point* deriv = nullptr) {
  const Point u = w / W;
  const double e = std::exp(-dt);
  Point z;
  if (std::abs(u) < 1e-300) {
    z = 0.0;
  } else {
    // c z^2 + (2c - 1) z + c = 0, c = e u/(1+u)^2; divide through by c
    const Point q = (1.0 + u) * (1.0 + u) / (e * u);  // 1/c
    const Point b = 2.0 - q;
    const Point disc = std::sqrt(b * b - 4.0);
    Point z1 = 0.5 * (-b + disc), z2 = 0.5 * (-b - disc);
    // roots multiply to 1; take the smaller and recompute it stably
    Point big = std::abs(z1) >= std::abs(z2) ? z1 : z2;
    z = 1.0 / big;
  }
  if (deriv) {
    const Point num = e * (1.0 - u) * (1.0 + z) * (1.0 + z) * (1.0 + z);
    const Point den = (1.0 + u) * (1.0 + u) * (1.0 + u) * (1.0 - z);
    *deriv = std::abs(den) > 0 ? num / den : Point(e, 0.0);
  }
  return W * z;
}

/// Chordal inverse step: f(w) = W + sqrt((w - W)^2 - 4 dt) in the upper half-plane.
inline Point chordal_inverse_step(double W, Point w, double dt) {
  Point r = std::sqrt((w - W) * (w - W) - 4.0 * dt);
  if (r.imag() < 0 || (r.imag() == 0 && (w - W).real() * r.real() < 0)) r = -r;
  return W + r;
}

/// Boundary point at angle phi (relative to W) after one forward radial
/// step: cos(phi'/2) = e^{-dt/2} cos(phi/2), same sign as phi.
inline double radial_boundary_step(double phi, double dt) {
  const double c = std::exp(-0.5 * dt) * std::cos(0.5 * phi);
  const double next = 2.0 * std::acos(std::clamp(c, -1.0, 1.0));
  return phi >= 0 ? next : -next;
}

struct Trace {
  DriverKind kind = DriverKind::radial;
  std::vector<double> times;
  std::vector<Point> points;
  std::vector<long> steps;  // driver index of each point
  bool capacity_parameterized = true;
};

/// Tip at driver step k by backward composition of the per-step inverse
/// maps. Whole-plane tips use the inversion z -> 1/z, under
/// which the hull grows as radial Loewner with the conjugate driver; the
/// hull at the first recorded time is taken to be the disk of radius e^{t0}.
inline Point loewner_tip(const Driver& d, long k) {
  if (k < 0 || k >= static_cast<long>(d.size())) throw RangeError("tip index outside the driver");
  const double dt = d.dt;
  Point z;
  if (d.kind == DriverKind::chordal) {
    z = Point(d.W[k].real(), 0.0);
    for (long j = k; j >= 1; --j) {
      z = chordal_inverse_step(d.W[j].real(), z, dt);
      if (!std::isfinite(z.real()) || std::abs(z) > 1e12) throw StabilityError("chordal trace blew up", j);
    }
    return z;
  }
  const bool whole = d.kind == DriverKind::whole_plane;
  z = whole ? std::conj(d.W[k]) : d.W[k];
  for (long j = k; j >= 1; --j) {
    z = radial_inverse_step(whole ? std::conj(d.W[j]) : d.W[j], z, dt);
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) > 1e12)
      throw StabilityError("radial trace blew up", j);
  }
  if (whole) {
    if (std::abs(z) < 1e-12) throw StabilityError("whole-plane tip left the representable range", k);
    z = std::exp(d.times.front()) / z;
  }
  return z;
}

/// Tips at every `resolution`-th driver step.
inline Trace loewner_trace(const Driver& d, long resolution = 1) {
  if (resolution < 1) throw OptionError("trace resolution must be >= 1");
  if (d.size() < 2) throw InputError("driver has fewer than two samples");
  Trace tr;
  tr.kind = d.kind;
  const long n = static_cast<long>(d.size());
  for (long k = 0; k < n; k += resolution) {
    tr.times.push_back(d.times[k]);
    tr.points.push_back(loewner_tip(d, k));
    tr.steps.push_back(k);
  }
  return tr;
}

/// Derivative at 0 of the composed inverse map g_{t_k}^{-1} (radial kind).
inline Point inverse_map_derivative_at_zero(const Driver& d, long k) {
  Point z = 0.0, der = 1.0;
  for (long j = k; j >= 1; --j) {
    Point dd;
    z = radial_inverse_step(d.W[j], z, d.dt, &dd);
    der *= dd;
  }
  return der;
}

// ---------------------------------------------------------------------------
// Winding and twisting

/// Unwrapped arg of each trace point about 0.
inline std::vector<double> unwrapped_arg(const std::vector<Point>& pts) {
  std::vector<double> a(pts.size());
  if (pts.empty()) return a;
  a[0] = std::arg(pts[0]);
  for (std::size_t k = 1; k < pts.size(); ++k) a[k] = a[k - 1] + wrap_angle(std::arg(pts[k]) - std::arg(pts[k - 1]));
  return a;
}

struct BetaEstimateOptions {
  double r_inner = 0.0;  // 0: modulus of the first trace point
  double r_outer = 0.0;  // 0: largest modulus reached
  double log_step = 0.25;
};

/// 2 pi (chi + alpha) times the least-squares slope of N_{j,k} against
/// log(r_k / r_j), over all pairs j < k of exit radii spaced log_step
/// apart. N_{j,k} is the net winding between the first exits of r_j and r_k
/// in whole turns, rounded down; the fitted intercept absorbs the rounding.
inline double winding_beta_estimate(const Trace& tr, const Constants& c, double alpha, const BetaEstimateOptions& o = {}) {
  if (tr.points.size() < 3) throw RangeError("trace too short for a winding estimate");
  double rmax = 0.0;
  for (const Point& p : tr.points) rmax = std::max(rmax, std::abs(p));
  const double r0 = o.r_inner > 0 ? o.r_inner : std::abs(tr.points.front());
  const double r1 = o.r_outer > 0 ? std::min(o.r_outer, rmax) : rmax;
  if (!(r0 > 0) || std::log(r1 / r0) < 3.0) throw RangeError("radial range below e^3");
  const std::vector<double> arg = unwrapped_arg(tr.points);

  std::vector<double> lr, at;  // exit log-radii and the unwrapped arg there
  std::size_t idx = 0;
  for (double l = std::log(r0); l <= std::log(r1) + 1e-12; l += o.log_step) {
    while (idx < tr.points.size() && std::abs(tr.points[idx]) < std::exp(l)) ++idx;
    if (idx >= tr.points.size()) break;
    lr.push_back(l);
    at.push_back(arg[idx]);
  }
  if (lr.size() < 3) throw RangeError("too few exit radii for a slope");
  std::vector<double> xs, ys;
  for (std::size_t j = 0; j < lr.size(); ++j)
    for (std::size_t k = j + 1; k < lr.size(); ++k) {
      xs.push_back(lr[k] - lr[j]);
      ys.push_back(std::floor((at[k] - at[j]) / kTwoPi));
    }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return kTwoPi * (c.chi + alpha) * (sxy / sxx);
}

struct Twisting {
  double twisting = 0.0;  // arg (g^{-1})'(0) on the branch anchored to the outer boundary
  int winding = 0;        // net turns of the trace about 0, rounded down
  double tau = 0.0;
};

/// Twisting at the first time the radial trace reaches |z| <= epsilon.
///
/// (g_t^{-1})'(0) > 0, so the time-continuous branch of its arg is always 0;
/// the twisting is the branch fixed by the outer circle instead. A point on
/// the unaffected part of the circle is pushed around by g_t, and its
/// unwrapped rotation R measures the offset between the two branches:
/// twisting = 2 pi round(R / 2 pi).
inline Twisting twisting(const Driver& d, const Trace& tr, double epsilon) {
  if (d.kind != DriverKind::radial) throw SpecError("twisting needs a radial driver");
  std::size_t hit = tr.points.size();
  for (std::size_t k = 0; k < tr.points.size(); ++k)
    if (std::abs(tr.points[k]) <= epsilon) {
      hit = k;
      break;
    }
  if (hit == tr.points.size()) throw RangeError("trace never reaches the epsilon circle");
  const long steps = tr.steps[hit];
  double psi = std::arg(-d.W.front());
  const double psi0 = psi;
  for (long j = 1; j <= steps; ++j) {
    const double aw = std::arg(d.W[j]);
    const double phi = wrap_angle(psi - aw);
    psi += radial_boundary_step(phi, d.dt) - phi;
  }
  const double R = psi - psi0;
  std::vector<Point> upto(tr.points.begin(), tr.points.begin() + static_cast<long>(hit) + 1);
  const std::vector<double> arg = unwrapped_arg(upto);
  Twisting out;
  out.twisting = kTwoPi * std::round(R / kTwoPi);
  out.winding = static_cast<int>(std::floor((arg.back() - arg.front()) / kTwoPi));
  out.tau = tr.times[hit];
  return out;
}

// ---------------------------------------------------------------------------
// Export

inline void write_driver_csv(std::ostream& os, const Driver& d) {
  os << "t,re_w,im_w,re_o,im_o,theta\n";
  os.precision(17);
  for (std::size_t k = 0; k < d.size(); ++k) {
    const Point O = k < d.O.size() ? d.O[k] : Point(d.V.empty() ? 0.0 : d.V[0][k], 0.0);
    const double th = k < d.theta.size() ? d.theta[k] : 0.0;
    os << d.times[k] << ',' << d.W[k].real() << ',' << d.W[k].imag() << ',' << O.real() << ',' << O.imag() << ','
       << th << '\n';
  }
}

inline void write_trace_csv(std::ostream& os, const Trace& t) {
  os << "t,x,y\n";
  os.precision(17);
  for (std::size_t k = 0; k < t.points.size(); ++k)
    os << t.times[k] << ',' << t.points[k].real() << ',' << t.points[k].imag() << '\n';
}

}  // namespace imgeo
