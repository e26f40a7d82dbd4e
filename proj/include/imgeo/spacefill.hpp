#pragma once

// Space-filling SLE_{kappa'}(rho1; rho2) ordering from the angle +-pi/2
// flow-line trees of a field on the square window.
//
// Frame: a sits on the south half of the boundary, b on the north half. L
// lines (angle pi/2) head north and R lines (angle -pi/2) head south, so the
// curve sweeps from the east midpoint to the west midpoint.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "imgeo/error.hpp"
#include "imgeo/flow.hpp"
#include "imgeo/geometry.hpp"
#include "imgeo/gff.hpp"
#include "imgeo/ks.hpp"
#include "imgeo/params.hpp"
#include "imgeo/rng.hpp"

namespace imgeo {

struct SpaceFillConfig {
  double kappa_prime = 6.0;
  double rho1 = 0.0;
  double rho2 = 0.0;
  double a = 0.0;
  double b = 0.0;
  int mesh = 16;
};

namespace detail {
inline void check_rho_range(double kp, double r1, double r2) {
  if (!(kp > 4.0)) throw DomainError("kappa' must exceed 4");
  const double hi = kp / 2.0 - 2.0;
  for (double r : {r1, r2})
    if (!(r > -2.0 && r < hi)) throw DomainError("rho must lie in (-2, kappa'/2 - 2), got " + std::to_string(r));
}
}  // namespace detail

/// a = lambda'(rho1 - kappa'/4 + 2), b = -lambda'(rho2 - kappa'/4 + 2).
inline std::pair<double, double> weights_to_boundary(double kappa_prime, double rho1, double rho2) {
  detail::check_rho_range(kappa_prime, rho1, rho2);
  const double lp = derive_constants_dual(kappa_prime).lambda_prime;
  const double shift = kappa_prime / 4.0 - 2.0;
  return {lp * (rho1 - shift), -lp * (rho2 - shift)};
}

inline std::pair<double, double> boundary_to_weights(double kappa_prime, double a, double b) {
  const Constants c = derive_constants_dual(kappa_prime);
  if (!(std::abs(a) < c.lambda && std::abs(b) < c.lambda)) throw DomainError("|a|, |b| must stay below lambda");
  const double shift = kappa_prime / 4.0 - 2.0;
  return {a / c.lambda_prime + shift, -b / c.lambda_prime + shift};
}

/// Weights of the time-reversal, in reversed order: (rho2~, rho1~) with
/// rho~ = kappa'/2 - 4 - rho.
inline std::pair<double, double> reversal_weights(double kappa_prime, double rho1, double rho2) {
  detail::check_rho_range(kappa_prime, rho1, rho2);
  const double m = kappa_prime / 2.0 - 4.0;
  return {m - rho2, m - rho1};
}

inline SpaceFillConfig make_spacefill_config(double kappa_prime, double rho1, double rho2, int mesh) {
  if (mesh < 1) throw OptionError("mesh must be >= 1");
  SpaceFillConfig cfg;
  cfg.kappa_prime = kappa_prime;
  cfg.rho1 = rho1;
  cfg.rho2 = rho2;
  std::tie(cfg.a, cfg.b) = weights_to_boundary(kappa_prime, rho1, rho2);
  cfg.mesh = mesh;
  return cfg;
}

inline BoundarySpec spacefill_boundary(const SpaceFillConfig& cfg) { return BoundarySpec::south_north(cfg.a, cfg.b); }

/// Cell centres of a mesh x mesh partition of `w`, row-major from the lower left.
inline std::vector<Point> mesh_points(const Rect& w, int mesh) {
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(mesh) * mesh);
  const double hx = w.width() / mesh, hy = w.height() / mesh;
  for (int j = 0; j < mesh; ++j)
    for (int i = 0; i < mesh; ++i) pts.emplace_back(w.x0 + (i + 0.5) * hx, w.y0 + (j + 0.5) * hy);
  return pts;
}

enum class OrderRule : std::uint8_t { none, left_tree, right_tree, left_exit, right_exit };

struct SpaceFillOrder {
  std::vector<Point> points;
  std::vector<int> order;  // order[k] = index of the k-th visited point
  std::vector<int> rank;   // inverse permutation
  std::vector<double> pocket_areas;
  int mesh = 0;
  // pairwise evidence, row-major N x N: +1 row before column, -1 after, 0 none
  std::vector<std::int8_t> relation;
  std::vector<OrderRule> rule;
  long pairs_decided = 0;
  long pairs_undecided = 0;
  long lr_both = 0;      // pairs where both trees produced a merge-side verdict
  long lr_agree = 0;
  long violations = 0;   // decided pairs contradicted by the final order

  std::size_t size() const noexcept { return points.size(); }
  int before(int i, int j) const { return relation[static_cast<std::size_t>(i) * points.size() + j]; }
  double visit_time(int i) const { return points.size() > 1 ? static_cast<double>(rank[i]) / (points.size() - 1) : 0.0; }
};

struct SpaceFillOptions {
  FlowOptions flow;  // step 0: a tenth of the grid spacing
  double violation_budget = 0.01;
};

namespace detail {

// The merge chain of a line: (line id, index at which the path enters it).
using Chain = std::vector<std::pair<int, int>>;

inline std::vector<Chain> merge_chains(const Forest& f) {
  std::vector<Chain> chains(f.lines.size());
  for (std::size_t i = 0; i < f.lines.size(); ++i) {
    Chain& ch = chains[i];
    int cur = static_cast<int>(i), entry = 0;
    while (true) {
      ch.emplace_back(cur, entry);
      const FlowLine& l = f.lines[cur];
      if (l.status != FlowStatus::merged || l.merge_target < 0) break;
      entry = l.merge_index;
      cur = l.merge_target;
      if (ch.size() > f.lines.size()) throw Error("merge chain does not terminate");
    }
  }
  return chains;
}

// Clockwise angle from direction t to direction x, in [0, 2 pi).
inline double cw_angle(Point t, Point x) {
  double a = std::arg(t) - std::arg(x);
  a = std::fmod(a, kTwoPi);
  if (a < 0) a += kTwoPi;
  return a;
}

// +1 when `approach` meets the path through `line.points[e]` from its right
// side, -1 from its left, 0 when undecidable.
inline int approach_side(const FlowLine& line, int e, Point approach) {
  const auto& P = line.points;
  if (e <= 0 || e >= static_cast<int>(P.size())) return 0;
  const Point m = P[e];
  const Point back = P[e - 1] - m;
  const Point fwd = e + 1 < static_cast<int>(P.size()) ? P[e + 1] - m : m - P[e - 1];
  const Point u = approach - m;
  if (std::abs(u) == 0.0 || std::abs(back) == 0.0 || std::abs(fwd) == 0.0) return 0;
  const double cb = cw_angle(fwd, back), cu = cw_angle(fwd, u);
  if (std::abs(cu - cb) < 1e-9 || cu < 1e-9) return 0;
  return cu < cb ? 1 : -1;
}

// Which side the path of chain A joins the path of chain B on, as seen from
// B: +1 right, -1 left. Returns {side, who} with who = +1 when A merges into
// B and -1 when B merges into A; {0, 0} without a usable merge.
inline std::pair<int, int> merge_side(const Forest& f, const Chain& A, const Chain& B, std::vector<int>& stamp,
                                      std::vector<int>& entry, int token) {
  for (const auto& [line, e] : B) {
    stamp[line] = token;
    entry[line] = e;
  }
  for (std::size_t k = 0; k < A.size(); ++k) {
    const int line = A[k].first;
    if (stamp[line] != token) continue;
    const int ea = A[k].second, eb = entry[line];
    if (ea == eb) return {0, 0};
    const FlowLine& C = f.lines[line];
    if (ea > eb) {
      // A joins C at ea, coming from the line before it in A's chain
      if (k == 0) return {0, 0};
      const FlowLine& prev = f.lines[A[k - 1].first];
      if (prev.own_length < 2) return {0, 0};
      return {approach_side(C, ea, prev.points[prev.own_length - 2]), 1};
    }
    // B joins C at eb: locate the predecessor of `line` in B's chain
    for (std::size_t q = 1; q < B.size(); ++q)
      if (B[q].first == line) {
        const FlowLine& prev = f.lines[B[q - 1].first];
        if (prev.own_length < 2) return {0, 0};
        return {approach_side(C, eb, prev.points[prev.own_length - 2]), -1};
      }
    return {0, 0};
  }
  return {0, 0};
}

inline std::optional<double> exit_coord(const Forest& f, const Chain& ch, const Rect& w) {
  const FlowLine& root = f.lines[ch.back().first];
  if (root.status != FlowStatus::exited_window || root.points.empty()) return std::nullopt;
  return w.perimeter_coord(root.points.back());
}

}  // namespace detail

/// Orders `points` (interior of the grid window) by the merge-side rule in
/// the L tree, then by L exit position, then the R tree and its exits. The pairwise relation is completed to a total order by
/// Copeland score (wins, ties by index).
inline SpaceFillOrder order_points(const FieldGrid& grid, const Constants& c, const SpaceFillConfig& cfg,
                                   const std::vector<Point>& points, const SpaceFillOptions& opt = {}) {
  if (std::abs(c.kappa * cfg.kappa_prime - 16.0) > 1e-9) throw SpecError("constants do not match kappa'");
  const int N = static_cast<int>(points.size());
  SpaceFillOrder out;
  out.points = points;
  out.mesh = cfg.mesh;
  out.relation.assign(static_cast<std::size_t>(N) * N, 0);
  out.rule.assign(static_cast<std::size_t>(N) * N, OrderRule::none);
  out.pocket_areas.assign(N, grid.window.area() / std::max(N, 1));
  if (N == 0) return out;

  // same-angle lines must not cross before merging; coarse steps let them
  FlowOptions fo = opt.flow;
  if (fo.step == 0) fo.step = grid.spacing / 10;
  // L lines terminate on the north arc, R lines on the south arc
  const BoundarySpec arcs = BoundarySpec::south_north(0.0, 1.0);
  FlowOptions foL = fo, foR = fo;
  if (!foL.absorbing) foL.absorbing = [arcs](double u) { return arcs.value_at(u) == 1.0; };
  if (!foR.absorbing) foR.absorbing = [arcs](double u) { return arcs.value_at(u) == 0.0; };
  const Forest L = build_forest(grid, c, points, kPi / 2, foL);
  const Forest R = build_forest(grid, c, points, -kPi / 2, foR);
  const auto chL = detail::merge_chains(L), chR = detail::merge_chains(R);
  std::vector<int> stampL(N, -1), entryL(N), stampR(N, -1), entryR(N);

  // smaller key = earlier; L lines exit north (ccw from the east midpoint),
  // R lines exit south (clockwise from it)
  const double start = 0.375;
  std::vector<std::optional<double>> keyL(N), keyR(N);
  for (int i = 0; i < N; ++i) {
    if (auto u = detail::exit_coord(L, chL[i], grid.window)) keyL[i] = std::fmod(*u - start + 1.0, 1.0);
    if (auto u = detail::exit_coord(R, chR[i], grid.window)) keyR[i] = std::fmod(start - *u + 1.0, 1.0);
  }

  int token = 0;
  for (int w = 0; w < N; ++w)
    for (int z = w + 1; z < N; ++z) {
      ++token;
      // L: w before z iff w joins z's path from the right (or z joins w's from the left)
      const auto [sl, wl] = detail::merge_side(L, chL[w], chL[z], stampL, entryL, token);
      const int vl = sl * wl;  // +1: w before z
      const auto [sr, wr] = detail::merge_side(R, chR[w], chR[z], stampR, entryR, token);
      const int vr = -sr * wr;
      int verdict = 0;
      OrderRule rule = OrderRule::none;
      // lines of different L trees never meet, so whole trees are ordered
      // by where they leave through the north arc
      if (vl != 0) {
        verdict = vl;
        rule = OrderRule::left_tree;
      } else if (keyL[w] && keyL[z] && std::abs(*keyL[w] - *keyL[z]) > 1e-12) {
        verdict = *keyL[w] < *keyL[z] ? 1 : -1;
        rule = OrderRule::left_exit;
      } else if (vr != 0) {
        verdict = vr;
        rule = OrderRule::right_tree;
      } else if (keyR[w] && keyR[z] && std::abs(*keyR[w] - *keyR[z]) > 1e-12) {
        verdict = *keyR[w] < *keyR[z] ? 1 : -1;
        rule = OrderRule::right_exit;
      }
      if (vl != 0 && vr != 0) {
        ++out.lr_both;
        if (vl == vr) ++out.lr_agree;
      }
      const std::size_t wz = static_cast<std::size_t>(w) * N + z, zw = static_cast<std::size_t>(z) * N + w;
      out.relation[wz] = static_cast<std::int8_t>(verdict);
      out.relation[zw] = static_cast<std::int8_t>(-verdict);
      out.rule[wz] = out.rule[zw] = rule;
      if (verdict != 0)
        ++out.pairs_decided;
      else
        ++out.pairs_undecided;
    }

  std::vector<long> wins(N, 0);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      if (out.relation[static_cast<std::size_t>(i) * N + j] > 0) ++wins[i];
  out.order.resize(N);
  std::iota(out.order.begin(), out.order.end(), 0);
  std::stable_sort(out.order.begin(), out.order.end(), [&](int x, int y) { return wins[x] > wins[y]; });
  out.rank.resize(N);
  for (int k = 0; k < N; ++k) out.rank[out.order[k]] = k;
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      const int r = out.relation[static_cast<std::size_t>(i) * N + j];
      if (r != 0 && (r > 0) != (out.rank[i] < out.rank[j])) ++out.violations;
    }
  if (out.pairs_decided > 0 &&
      static_cast<double>(out.violations) > opt.violation_budget * static_cast<double>(out.pairs_decided))
    throw OrderingError("pairwise order has " + std::to_string(out.violations) + " inconsistencies among " +
                        std::to_string(out.pairs_decided) + " decided pairs");
  return out;
}

inline SpaceFillOrder order_points(const FieldGrid& grid, const Constants& c, const SpaceFillConfig& cfg,
                                   const SpaceFillOptions& opt = {}) {
  return order_points(grid, c, cfg, mesh_points(grid.window, cfg.mesh), opt);
}

/// Fraction of pairs among the first `count` points ordered the same way by both orders.
inline double pair_agreement(const SpaceFillOrder& a, const SpaceFillOrder& b, int count) {
  long agree = 0, total = 0;
  for (int i = 0; i < count; ++i)
    for (int j = i + 1; j < count; ++j) {
      ++total;
      if ((a.rank[i] < a.rank[j]) == (b.rank[i] < b.rank[j])) ++agree;
    }
  return total ? static_cast<double>(agree) / total : 1.0;
}

struct OrderAxioms {
  long triples = 0;
  long antisymmetry_failures = 0;
  long transitivity_failures = 0;
  long totality_failures = 0;
};

/// Checks the order relation induced by `rank` over all triples (or `samples`
/// random triples when positive), and whether `order` is a bijection.
inline OrderAxioms check_order_axioms(const SpaceFillOrder& o, long samples = 0, std::uint64_t seed = 0) {
  OrderAxioms ax;
  const int N = static_cast<int>(o.size());
  std::vector<int> seen(N, 0);
  for (int v : o.order)
    if (v >= 0 && v < N) ++seen[v];
  for (int i = 0; i < N; ++i)
    if (seen[i] != 1) ++ax.totality_failures;
  auto lt = [&](int i, int j) { return o.rank[i] < o.rank[j]; };
  auto check = [&](int i, int j, int k) {
    ++ax.triples;
    if (i != j && lt(i, j) == lt(j, i)) ++ax.antisymmetry_failures;
    if (lt(i, j) && lt(j, k) && !lt(i, k)) ++ax.transitivity_failures;
  };
  if (samples <= 0) {
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k)
          if (i != j && j != k && i != k) check(i, j, k);
  } else if (N >= 3) {
    CounterRng rng(seed);
    for (long s = 0; s < samples; ++s) {
      int i = static_cast<int>(rng.uniform() * N), j = static_cast<int>(rng.uniform() * N),
          k = static_cast<int>(rng.uniform() * N);
      if (i == j || j == k || i == k) continue;
      check(i, j, k);
    }
  }
  return ax;
}

// ---------------------------------------------------------------------------
// Curve

struct Curve {
  std::vector<Point> vertices;  // cell centres in visit order
  std::vector<double> times;    // cumulative area when leaving each cell
  double total_time() const { return times.empty() ? 0.0 : times.back(); }
};

inline Curve space_filling_curve(const SpaceFillOrder& o) {
  Curve c;
  double t = 0.0;
  for (int idx : o.order) {
    t += o.pocket_areas[idx];
    c.vertices.push_back(o.points[idx]);
    c.times.push_back(t);
  }
  return c;
}

/// Cells (on a mesh x mesh layout) whose visit rank differs from every
/// 4-neighbour by more than `gap` ranks: isolated late or early islands.
inline int island_count(const SpaceFillOrder& o, int gap) {
  const int m = o.mesh;
  if (static_cast<std::size_t>(m) * m != o.size()) throw InputError("island count needs a full mesh layout");
  int islands = 0;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      const int r = o.rank[j * m + i];
      bool isolated = true;
      const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
      for (int d = 0; d < 4; ++d) {
        const int a = i + di[d], b = j + dj[d];
        if (a < 0 || b < 0 || a >= m || b >= m) continue;
        if (std::abs(o.rank[b * m + a] - r) <= gap) isolated = false;
      }
      if (isolated) ++islands;
    }
  return islands;
}

// ---------------------------------------------------------------------------
// Reversal

/// Index of the point nearest to -p (the window is centred at the origin).
inline int rotated_index(const SpaceFillOrder& o, int i) {
  const Point q = -o.points[i];
  int best = 0;
  double bd = 1e300;
  for (std::size_t k = 0; k < o.size(); ++k) {
    const double d = std::abs(o.points[k] - q);
    if (d < bd) {
      bd = d;
      best = static_cast<int>(k);
    }
  }
  return best;
}

/// Normalised visit times t_F(p) and 1 - t_R(-p) over the probe indices.
/// Rotating by pi maps the reversed picture onto the forward one.
inline std::pair<std::vector<double>, std::vector<double>> reversal_samples(const SpaceFillOrder& F,
                                                                            const SpaceFillOrder& R,
                                                                            const std::vector<int>& probes) {
  if (F.size() != R.size() || F.mesh != R.mesh) throw InputError("forward and reversed orders use different meshes");
  std::pair<std::vector<double>, std::vector<double>> s;
  for (int p : probes) {
    if (p < 0 || p >= static_cast<int>(F.size())) throw InputError("probe index out of range");
    s.first.push_back(F.visit_time(p));
    // 1 - t computed on integer ranks so tied times stay bit-identical
    const double last = static_cast<double>(R.size() - 1);
    s.second.push_back(R.size() > 1 ? (last - R.rank[rotated_index(R, p)]) / last : 0.0);
  }
  return s;
}

/// Two-sample KS comparison of forward visit times against reflected
/// reversed visit times over the probe set.
inline KsResult reversal_symmetry_stat(const SpaceFillOrder& F, const SpaceFillOrder& R, const std::vector<int>& probes) {
  auto [a, b] = reversal_samples(F, R, probes);
  return ks_two_sample(std::move(a), std::move(b));
}

/// Probe cells at the centres of the four quadrants of a mesh layout.
inline std::vector<int> quadrant_probes(int mesh) {
  std::vector<int> p;
  const int q1 = mesh / 4, q3 = (3 * mesh) / 4;
  for (int j : {q1, q3})
    for (int i : {q1, q3}) p.push_back(j * mesh + i);
  return p;
}

// ---------------------------------------------------------------------------
// Export

inline void write_curve_csv(std::ostream& os, const SpaceFillOrder& o) {
  const Curve c = space_filling_curve(o);
  os << "visit,x,y,time\n";
  os.precision(17);
  for (std::size_t k = 0; k < c.vertices.size(); ++k)
    os << k << ',' << c.vertices[k].real() << ',' << c.vertices[k].imag() << ',' << c.times[k] << '\n';
}

/// Hue-ramp colour for t in [0,1].
inline void time_color(double t, unsigned char rgb[3]) {
  t = std::clamp(t, 0.0, 1.0);
  const double h = 300.0 * t / 60.0;  // blue -> red through green, violet at the end
  const double x = 1.0 - std::abs(std::fmod(h, 2.0) - 1.0);
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(h)) {
    case 0: r = 1; g = x; break;
    case 1: r = x; g = 1; break;
    case 2: g = 1; b = x; break;
    case 3: g = x; b = 1; break;
    default: r = x; b = 1; break;
  }
  rgb[0] = static_cast<unsigned char>(std::lround(255 * r));
  rgb[1] = static_cast<unsigned char>(std::lround(255 * g));
  rgb[2] = static_cast<unsigned char>(std::lround(255 * b));
}

/// P6 image, one `scale` x `scale` block per cell, north at the top.
inline void write_order_ppm(std::ostream& os, const SpaceFillOrder& o, int scale = 8) {
  const int m = o.mesh;
  if (static_cast<std::size_t>(m) * m != o.size()) throw InputError("image export needs a full mesh layout");
  const int W = m * scale;
  os << "P6\n" << W << ' ' << W << "\n255\n";
  for (int y = W - 1; y >= 0; --y)
    for (int x = 0; x < W; ++x) {
      unsigned char rgb[3];
      time_color(o.visit_time((y / scale) * m + x / scale), rgb);
      os.write(reinterpret_cast<const char*>(rgb), 3);
    }
}

}  // namespace imgeo
