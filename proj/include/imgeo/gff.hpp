#pragma once

// Discrete Gaussian free field on a triangulated square grid.
//
// The field is the projection of the GFF onto functions that are linear on
// each triangle, where every grid cell is split along its lower-left to
// upper-right diagonal. With the Dirichlet inner product (1/2pi) int grad f .
// grad g the P1 stiffness matrix of this triangulation is the 5-point graph
// Laplacian L (4 on the diagonal), independent of the mesh width, so the
// vertex covariance is 2pi L^{-1}.

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "imgeo/error.hpp"
#include "imgeo/geometry.hpp"
#include "imgeo/rng.hpp"

namespace imgeo {

struct Singularity {
  Point center;
  double alpha = 0.0;
  double beta = 0.0;
};

struct FieldGrid {
  int n = 0;
  double spacing = 0.0;
  Rect window;
  std::vector<double> values;  // row-major: values[j*n + i] at (x0 + i s, y0 + j s)
  std::optional<Singularity> singularity;
  std::uint64_t seed = 0;
  // values with the singular term removed; empty when there is no singularity
  std::vector<double> regular;

  double& at(int i, int j) { return values[static_cast<std::size_t>(j) * n + i]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * n + i]; }
  Point vertex(int i, int j) const { return {window.x0 + i * spacing, window.y0 + j * spacing}; }
  bool on_boundary(int i, int j) const { return i == 0 || j == 0 || i == n - 1 || j == n - 1; }
};

/// Empty grid centered at the origin with the given vertex count and spacing.
inline FieldGrid make_grid(int n, double spacing) {
  if (n < 3) throw DomainError("grid needs n >= 3, got " + std::to_string(n));
  if (!(spacing > 0.0)) throw DomainError("grid spacing must be positive");
  FieldGrid g;
  g.n = n;
  g.spacing = spacing;
  const double half = 0.5 * (n - 1) * spacing;
  g.window = {-half, -half, half, half};
  g.values.assign(static_cast<std::size_t>(n) * n, 0.0);
  return g;
}

inline double default_spacing(int n) { return 2.0 / (n - 1); }

namespace detail {

// In-place 2D DST-I (FFTW RODFT00) on an m x m row-major array. Applying it
// twice multiplies by (2(m+1))^2.
inline void dst2(std::vector<double>& a, int m) {
  fftw_plan plan = fftw_plan_r2r_2d(m, m, a.data(), a.data(), FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
}

inline double laplacian_eigenvalue(int a, int b, int m) {
  const double h = kPi / (m + 1);
  return 4.0 - 2.0 * std::cos(h * (a + 1)) - 2.0 * std::cos(h * (b + 1));
}

}  // namespace detail

/// Zero-boundary DGFF by spectral synthesis in the Dirichlet sine basis.
inline FieldGrid sample_zero_boundary(int n, double spacing, std::uint64_t seed) {
  FieldGrid g = make_grid(n, spacing);
  g.seed = seed;
  const int m = n - 2;
  std::vector<double> c(static_cast<std::size_t>(m) * m);
  CounterRng rng(seed);
  for (int b = 0; b < m; ++b)
    for (int a = 0; a < m; ++a)
      c[static_cast<std::size_t>(b) * m + a] = std::sqrt(kTwoPi / detail::laplacian_eigenvalue(a, b, m)) * rng.normal();
  detail::dst2(c, m);
  const double scale = 1.0 / (2.0 * (m + 1));
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) g.at(i + 1, j + 1) = c[static_cast<std::size_t>(j) * m + i] * scale;
  return g;
}

/// Exact covariance 2pi L^{-1}(p, q) between interior vertices p=(i,j) and
/// q=(k,l) of an n-vertex zero-boundary grid, by the eigen-expansion.
inline double green_spectral(int n, int i, int j, int k, int l) {
  const int m = n - 2;
  const double h = kPi / (m + 1);
  double s = 0.0;
  for (int b = 1; b <= m; ++b)
    for (int a = 1; a <= m; ++a) {
      const double phi_p = std::sin(h * a * i) * std::sin(h * b * j);
      const double phi_q = std::sin(h * a * k) * std::sin(h * b * l);
      s += phi_p * phi_q / detail::laplacian_eigenvalue(a - 1, b - 1, m);
    }
  return kTwoPi * s * 4.0 / ((m + 1.0) * (m + 1.0));
}

// ---------------------------------------------------------------------------
// Boundary data

struct BoundaryArc {
  double start = 0.0;  // perimeter coordinate in [0,1), counterclockwise from lower-left
  double end = 1.0;    // half-open [start, end); wraps through 0 when end <= start
  double value = 0.0;

  bool contains(double u) const noexcept {
    if (start < end) return u >= start && u < end;
    return u >= start || u < end;
  }
};

struct BoundarySpec {
  std::vector<BoundaryArc> arcs;

  static BoundarySpec constant(double c) { return {{{0.0, 1.0, c}}}; }
  /// `left` on the half of the boundary with x < center, `right` elsewhere.
  static BoundarySpec left_right(double left, double right) {
    return {{{0.625, 0.125, left}, {0.125, 0.625, right}}};
  }
  /// `south` on the lower half of the boundary, `north` on the upper half.
  static BoundarySpec south_north(double south, double north) {
    return {{{0.875, 0.375, south}, {0.375, 0.875, north}}};
  }

  /// Value at perimeter coordinate u; throws SpecError if no arc covers u.
  double value_at(double u) const {
    for (const auto& arc : arcs)
      if (arc.contains(u)) return arc.value;
    throw SpecError("boundary spec does not cover perimeter coordinate " + std::to_string(u));
  }
};

/// Adds the discrete-harmonic extension of `spec` (via a fast sine-transform
/// Poisson solve). Boundary vertices receive exactly the spec values.
inline FieldGrid add_harmonic_boundary(FieldGrid grid, const BoundarySpec& spec) {
  const int n = grid.n, m = n - 2;
  std::vector<double> bd(static_cast<std::size_t>(n) * n, 0.0);
  bool nonzero = false;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (!grid.on_boundary(i, j)) continue;
      const double v = spec.value_at(grid.window.perimeter_coord(grid.vertex(i, j)));
      bd[static_cast<std::size_t>(j) * n + i] = v;
      nonzero = nonzero || v != 0.0;
    }
  if (!nonzero) return grid;

  // L u = r on the interior, r collecting boundary neighbours
  std::vector<double> r(static_cast<std::size_t>(m) * m, 0.0);
  auto B = [&](int i, int j) { return bd[static_cast<std::size_t>(j) * n + i]; };
  for (int j = 1; j <= m; ++j)
    for (int i = 1; i <= m; ++i) {
      double s = 0.0;
      if (i == 1) s += B(0, j);
      if (i == m) s += B(n - 1, j);
      if (j == 1) s += B(i, 0);
      if (j == m) s += B(i, n - 1);
      r[static_cast<std::size_t>(j - 1) * m + (i - 1)] = s;
    }
  detail::dst2(r, m);
  for (int b = 0; b < m; ++b)
    for (int a = 0; a < m; ++a) r[static_cast<std::size_t>(b) * m + a] /= detail::laplacian_eigenvalue(a, b, m);
  detail::dst2(r, m);
  const double scale = 1.0 / (4.0 * (m + 1.0) * (m + 1.0));

  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double ext = grid.on_boundary(i, j) ? B(i, j) : r[static_cast<std::size_t>(j - 1) * m + (i - 1)] * scale;
      grid.at(i, j) += ext;
      if (!grid.regular.empty()) grid.regular[static_cast<std::size_t>(j) * n + i] += ext;
    }
  return grid;
}

// ---------------------------------------------------------------------------
// Conical singularity

/// alpha * arg(p - z0) + beta * log|p - z0| with arg in (-pi, pi].
inline double singular_term(const Singularity& s, Point p) {
  const Point d = p - s.center;
  double term = 0.0;
  if (s.alpha != 0.0) term += s.alpha * std::arg(d);
  if (s.beta != 0.0) term += s.beta * std::log(std::abs(d));
  return term;
}

/// Correction to add to the principal-branch field difference h(q) - h(p)
/// when the segment p -> q crosses the cut (-inf, 0) + z0, so that the
/// -alpha arg term varies continuously along the segment.
inline double branch_jump(const Singularity& s, Point p, Point q) {
  const Point a = p - s.center, b = q - s.center;
  const double jump = std::arg(b) - std::arg(a);
  // crossing the negative axis flips the principal arg by about 2 pi
  if (jump > kPi) return s.alpha * kTwoPi;
  if (jump < -kPi) return -s.alpha * kTwoPi;
  return 0.0;
}

inline FieldGrid add_singularity(FieldGrid grid, Point z0, double alpha, double beta) {
  if (!grid.window.contains(z0) || z0.real() <= grid.window.x0 || z0.real() >= grid.window.x1 ||
      z0.imag() <= grid.window.y0 || z0.imag() >= grid.window.y1)
    throw DomainError("singularity center must lie strictly inside the window");
  if (grid.singularity) throw DomainError("grid already carries a singularity");
  const double fi = (z0.real() - grid.window.x0) / grid.spacing;
  const double fj = (z0.imag() - grid.window.y0) / grid.spacing;
  if (std::abs(fi - std::round(fi)) < 1e-9 && std::abs(fj - std::round(fj)) < 1e-9)
    throw DomainError("degenerate singularity: center coincides with a grid vertex");
  if (alpha == 0.0 && beta == 0.0) return grid;

  const Singularity s{z0, alpha, beta};
  grid.regular = grid.values;
  for (int j = 0; j < grid.n; ++j)
    for (int i = 0; i < grid.n; ++i) grid.at(i, j) -= singular_term(s, grid.vertex(i, j));
  grid.singularity = s;
  return grid;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {

inline double interpolate(const std::vector<double>& v, int n, const Rect& w, double spacing, Point p) {
  const double fx = (p.real() - w.x0) / spacing, fy = (p.imag() - w.y0) / spacing;
  int i = std::clamp(static_cast<int>(std::floor(fx)), 0, n - 2);
  int j = std::clamp(static_cast<int>(std::floor(fy)), 0, n - 2);
  const double u = fx - i, t = fy - j;
  const std::size_t k = static_cast<std::size_t>(j) * n + i;
  const double v00 = v[k], v10 = v[k + 1], v01 = v[k + n], v11 = v[k + n + 1];
  if (u >= t) return v00 + u * (v10 - v00) + t * (v11 - v10);
  return v00 + t * (v01 - v00) + u * (v11 - v01);
}

}  // namespace detail

/// Piecewise-linear value at p.
inline double eval(const FieldGrid& g, Point p) {
  if (!g.window.contains(p)) throw RangeError("evaluation point outside the window");
  return detail::interpolate(g.values, g.n, g.window, g.spacing, p);
}

/// Interpolant of the regular part (field plus the singular term). Equals
/// eval() when there is no singularity.
inline double eval_regular(const FieldGrid& g, Point p) {
  if (!g.window.contains(p)) throw RangeError("evaluation point outside the window");
  return detail::interpolate(g.regular.empty() ? g.values : g.regular, g.n, g.window, g.spacing, p);
}

// ---------------------------------------------------------------------------
// Whole-plane surrogate

/// Zero-boundary field on a box `margin` times larger (same spacing),
/// restricted to the central n-vertex window [-1,1]^2.
inline FieldGrid whole_plane_approx(int n, int margin, std::uint64_t seed) {
  if (margin < 2) throw DomainError("whole-plane margin must be >= 2");
  if (n < 3) throw DomainError("grid needs n >= 3");
  const double s = default_spacing(n);
  const int big = margin * (n - 1) + 1;
  const FieldGrid outer = sample_zero_boundary(big, s, seed);
  FieldGrid g = make_grid(n, s);
  g.seed = seed;
  const int off = (big - n) / 2;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g.at(i, j) = outer.at(i + off, j + off);
  return g;
}

// ---------------------------------------------------------------------------
// Serialization: 8-byte magic, u32 version, u32 n, f64 spacing, f64 x0, f64 y0,
// u64 seed, u8 has_singularity, f64 cx, cy, alpha, beta, then n*n f64 values,
// row-major, little-endian.

inline constexpr char kGridMagic[8] = {'I', 'M', 'G', 'E', 'O', 'G', 'R', 'D'};
inline constexpr std::uint32_t kGridVersion = 1;

static_assert(std::endian::native == std::endian::little, "grid format assumes a little-endian host");

inline void write_grid(const FieldGrid& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path + " for writing");
  auto put = [&](const auto& v) { out.write(reinterpret_cast<const char*>(&v), sizeof(v)); };
  out.write(kGridMagic, 8);
  put(kGridVersion);
  put(static_cast<std::uint32_t>(g.n));
  put(g.spacing);
  put(g.window.x0);
  put(g.window.y0);
  put(g.seed);
  const Singularity s = g.singularity.value_or(Singularity{});
  put(static_cast<std::uint8_t>(g.singularity ? 1 : 0));
  put(s.center.real());
  put(s.center.imag());
  put(s.alpha);
  put(s.beta);
  out.write(reinterpret_cast<const char*>(g.values.data()), static_cast<std::streamsize>(g.values.size() * sizeof(double)));
  if (!out) throw InputError("short write to " + path);
}

inline FieldGrid read_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  auto get = [&](auto& v) { in.read(reinterpret_cast<char*>(&v), sizeof(v)); };
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kGridMagic, 8) != 0) throw InputError(path + ": not a grid file");
  std::uint32_t version = 0, n = 0;
  get(version);
  if (version != kGridVersion) throw InputError(path + ": unsupported grid version");
  get(n);
  double spacing = 0, x0 = 0, y0 = 0, cx = 0, cy = 0, alpha = 0, beta = 0;
  std::uint64_t seed = 0;
  std::uint8_t has_sing = 0;
  get(spacing);
  get(x0);
  get(y0);
  get(seed);
  get(has_sing);
  get(cx);
  get(cy);
  get(alpha);
  get(beta);
  FieldGrid g = make_grid(static_cast<int>(n), spacing);
  g.window = {x0, y0, x0 + (n - 1) * spacing, y0 + (n - 1) * spacing};
  g.seed = seed;
  in.read(reinterpret_cast<char*>(g.values.data()), static_cast<std::streamsize>(g.values.size() * sizeof(double)));
  if (!in) throw InputError(path + ": truncated payload");
  if (has_sing) {
    const Singularity s{{cx, cy}, alpha, beta};
    g.singularity = s;
    g.regular = g.values;
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.n; ++i) g.regular[static_cast<std::size_t>(j) * g.n + i] += singular_term(s, g.vertex(i, j));
  }
  return g;
}

inline nlohmann::json grid_sidecar(const FieldGrid& g) {
  nlohmann::json j = {{"format", "imgeo-grid"},
                      {"version", kGridVersion},
                      {"n", g.n},
                      {"spacing", g.spacing},
                      {"window", {g.window.x0, g.window.y0, g.window.x1, g.window.y1}},
                      {"seed", g.seed},
                      {"byte_order", "little"},
                      {"layout", "row-major float64, row j holds y = y0 + j*spacing"}};
  if (g.singularity)
    j["singularity"] = {{"center", {g.singularity->center.real(), g.singularity->center.imag()}},
                        {"alpha", g.singularity->alpha},
                        {"beta", g.singularity->beta}};
  else
    j["singularity"] = nullptr;
  return j;
}

}  // namespace imgeo
