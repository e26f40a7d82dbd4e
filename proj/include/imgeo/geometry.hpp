#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace imgeo {

using Point = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double cross(Point a, Point b) noexcept { return a.real() * b.imag() - a.imag() * b.real(); }
inline double dot(Point a, Point b) noexcept { return a.real() * b.real() + a.imag() * b.imag(); }

/// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) noexcept {
  a = std::remainder(a, kTwoPi);
  if (a <= -kPi) a += kTwoPi;
  return a;
}

struct Rect {
  double x0 = -1.0, y0 = -1.0, x1 = 1.0, y1 = 1.0;

  bool contains(Point p) const noexcept {
    return p.real() >= x0 && p.real() <= x1 && p.imag() >= y0 && p.imag() <= y1;
  }
  double width() const noexcept { return x1 - x0; }
  double height() const noexcept { return y1 - y0; }
  double area() const noexcept { return width() * height(); }
  Point center() const noexcept { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }

  /// Concentric rectangle scaled by `f` about the center.
  Rect scaled(double f) const noexcept {
    const Point c = center();
    const double hw = 0.5 * width() * f, hh = 0.5 * height() * f;
    return {c.real() - hw, c.imag() - hh, c.real() + hw, c.imag() + hh};
  }

  /// Counterclockwise perimeter coordinate in [0,1) of the boundary point
  /// nearest to p, starting at the lower-left corner: bottom [0,.25),
  /// right [.25,.5), top [.5,.75), left [.75,1).
  double perimeter_coord(Point p) const noexcept {
    const double dx0 = std::abs(p.real() - x0), dx1 = std::abs(p.real() - x1);
    const double dy0 = std::abs(p.imag() - y0), dy1 = std::abs(p.imag() - y1);
    const double m = std::min(std::min(dx0, dx1), std::min(dy0, dy1));
    const double u = std::clamp((p.real() - x0) / width(), 0.0, 1.0);
    const double v = std::clamp((p.imag() - y0) / height(), 0.0, 1.0);
    if (m == dy0) return 0.25 * u;
    if (m == dx1) return 0.25 + 0.25 * v;
    if (m == dy1) return 0.5 + 0.25 * (1.0 - u);
    return std::fmod(0.75 + 0.25 * (1.0 - v), 1.0);
  }
};

}  // namespace imgeo
