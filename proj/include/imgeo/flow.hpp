#pragma once

// Flow lines of e^{i(h/chi + theta)} on a discrete field: RK4 tracing at a
// fixed chord length, merging by snap-at-tolerance, forests, and pairwise
// interaction bookkeeping.

#include <algorithm>
#include <cmath>
#include <functional>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <unordered_map>
#include <utility>
#include <vector>

#include "imgeo/error.hpp"
#include "imgeo/geometry.hpp"
#include "imgeo/gff.hpp"
#include "imgeo/params.hpp"

namespace imgeo {

enum class FlowStatus { running, merged, exited_window, max_steps };

inline const char* to_string(FlowStatus s) {
  switch (s) {
    case FlowStatus::running: return "running";
    case FlowStatus::merged: return "merged";
    case FlowStatus::exited_window: return "exited_window";
    case FlowStatus::max_steps: return "max_steps";
  }
  return "?";
}

struct FlowLine {
  int id = 0;
  Point start;
  double theta = 0.0;
  double step = 0.0;
  double heading0 = 0.0;  // geometric direction of the first step, in (-pi, pi]
  std::vector<Point> points;
  std::vector<double> turning;  // unwrapped heading at each point minus heading at the start
  FlowStatus status = FlowStatus::running;
  int merge_target = -1;
  int merge_index = -1;  // index into the target's points where the snap landed
  int own_length = 0;    // points traced by this line itself (before the copied arc)

  /// Unit tangent at index k (forward difference, backward at the end).
  Point tangent(int k) const {
    const int m = static_cast<int>(points.size());
    if (m < 2) return std::polar(1.0, heading0);
    const int a = std::clamp(k, 0, m - 2);
    const Point d = points[a + 1] - points[a];
    const double r = std::abs(d);
    return r > 0 ? d / r : std::polar(1.0, heading0 + turning[a]);
  }
};

struct FlowOptions {
  double step = 0.0;       // 0: a quarter of the grid spacing
  long max_steps = 50000;
  double merge_tol = 0.0;  // 0: 1.5 * step
  bool merge = true;
  double merge_max_turn = kPi / 4;  // largest heading mismatch accepted at a merge
  std::optional<Rect> window;  // clip region; defaults to the grid window
  // Perimeter coordinates (of the clip region) through which a line may
  // leave. Elsewhere a line reaching the edge slides along it, like a flow
  // line bouncing off boundary arcs it cannot terminate on. Empty: anywhere.
  std::function<bool(double)> absorbing;
};

namespace detail {

// Heading field along one trajectory. With a singularity the -alpha arg
// term is continued through the cut using the branch of the previous point.
struct HeadingField {
  const FieldGrid& g;
  double inv_chi;
  double theta;
  Rect clip;

  // returns false outside the clip region
  bool heading(Point p, double arg_ref, double& out, double* arg_out = nullptr) const {
    if (!clip.contains(p) || !g.window.contains(p)) return false;
    if (!g.singularity) {
      out = detail::interpolate(g.values, g.n, g.window, g.spacing, p) * inv_chi + theta;
      return true;
    }
    const Singularity& s = *g.singularity;
    const Point d = p - s.center;
    const double a = arg_ref + wrap_angle(std::arg(d) - arg_ref);
    double h = detail::interpolate(g.regular, g.n, g.window, g.spacing, p) - s.alpha * a;
    if (s.beta != 0.0) h -= s.beta * std::log(std::abs(d));
    out = h * inv_chi + theta;
    if (arg_out) *arg_out = a;
    return true;
  }
};

struct SpatialHash {
  double cell;
  std::unordered_map<std::uint64_t, std::vector<std::pair<int, int>>> buckets;

  explicit SpatialHash(double c) : cell(c) {}

  static std::uint64_t key(std::int64_t i, std::int64_t j) {
    return (static_cast<std::uint64_t>(i) << 32) ^ static_cast<std::uint64_t>(j & 0xffffffff);
  }
  std::pair<std::int64_t, std::int64_t> index(Point p) const {
    return {static_cast<std::int64_t>(std::floor(p.real() / cell)), static_cast<std::int64_t>(std::floor(p.imag() / cell))};
  }
  void insert(Point p, int line, int idx) {
    auto [i, j] = index(p);
    buckets[key(i, j)].emplace_back(line, idx);
  }
  template <class F>
  void visit(Point p, F&& f) const {
    auto [i, j] = index(p);
    for (std::int64_t a = i - 1; a <= i + 1; ++a)
      for (std::int64_t b = j - 1; b <= j + 1; ++b) {
        auto it = buckets.find(key(a, b));
        if (it == buckets.end()) continue;
        for (const auto& e : it->second) f(e.first, e.second);
      }
  }
};

inline bool segment_intersection(Point p, Point p2, Point q, Point q2, double& s, double& t) {
  const Point r = p2 - p, u = q2 - q;
  const double den = cross(r, u);
  if (std::abs(den) < 1e-300) return false;
  s = cross(q - p, u) / den;
  t = cross(q - p, r) / den;
  return s >= 0 && s < 1 && t >= 0 && t < 1;
}

inline bool same_angle(double a, double b) { return std::abs(wrap_angle(a - b)) < 1e-9; }

}  // namespace detail

struct MergeEdge {
  int child = 0;
  int parent = 0;
  Point point;
};

/// Lines with merge state. `components` is a union-find over line ids.
struct Forest {
  std::vector<FlowLine> lines;
  std::vector<MergeEdge> merge_edges;
  std::vector<int> parent_of;  // union-find parent array

  int find(int x) {
    while (parent_of[x] != x) x = parent_of[x] = parent_of[parent_of[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_of[a] = b;
    return true;
  }
  int component_count() {
    int c = 0;
    for (int i = 0; i < static_cast<int>(parent_of.size()); ++i) c += find(i) == i;
    return c;
  }
};

struct MergeEvent {
  int target = -1;
  int index = -1;
  Point point;
};

/// Shared merge state for sequential tracing: a spatial hash of the points
/// each line traced itself.
class MergeIndex {
 public:
  explicit MergeIndex(double tol, double max_turn = kPi / 4) : tol_(tol), max_turn_(max_turn), hash_(tol) {}

  double tol() const noexcept { return tol_; }

  void add(const FlowLine& line) {
    lines_.push_back(&line);
    const int slot = static_cast<int>(lines_.size()) - 1;
    for (int k = 0; k < line.own_length; ++k) hash_.insert(line.points[k], slot, k);
  }

  /// Nearest same-angle point within tol whose local heading differs from
  /// `heading` by less than the turn limit. Same-angle is the D = 0 condition: with
  /// theta_b - theta_a = 0 the minimal |D| over k is zero.
  std::optional<MergeEvent> query(Point tip, Point heading, double theta) const {
    std::optional<MergeEvent> best;
    double best_d = tol_;
    hash_.visit(tip, [&](int slot, int idx) {
      const FlowLine& t = *lines_[slot];
      if (!detail::same_angle(t.theta, theta)) return;
      const double d = std::abs(t.points[idx] - tip);
      if (d > best_d || (best && d == best_d)) return;
      if (std::abs(std::arg(heading / t.tangent(idx))) >= max_turn_) return;
      best_d = d;
      best = MergeEvent{t.id, idx, t.points[idx]};
    });
    return best;
  }

  /// First earlier same-angle segment crossed by the step p -> q, reported
  /// as a merge onto the far end of that segment. Near-singular heading
  /// fields can turn lines across each other faster than the tolerance test
  /// notices; this keeps same-angle lines from crossing.
  std::optional<MergeEvent> crossing(Point p, Point q, double theta) const {
    std::optional<MergeEvent> best;
    double best_s = 2.0;
    auto check = [&](int slot, int idx) {
      const FlowLine& t = *lines_[slot];
      if (!detail::same_angle(t.theta, theta)) return;
      for (int k : {idx - 1, idx}) {
        if (k < 0 || k + 1 >= t.own_length) continue;
        double s = 0, u = 0;
        if (!detail::segment_intersection(p, q, t.points[k], t.points[k + 1], s, u)) continue;
        if (s < best_s) {
          best_s = s;
          best = MergeEvent{t.id, k + 1, t.points[k + 1]};
        }
      }
    };
    hash_.visit(p, check);
    hash_.visit(q, check);
    return best;
  }

  const FlowLine* line(int id) const {
    for (const FlowLine* l : lines_)
      if (l->id == id) return l;
    return nullptr;
  }

 private:
  double tol_;
  double max_turn_;
  detail::SpatialHash hash_;
  std::vector<const FlowLine*> lines_;
};

namespace detail {

inline void append_target_arc(FlowLine& line, const FlowLine& target, int index, const FieldGrid& g, double inv_chi,
                              double& arg_ref) {
  // turning continues through the copied arc using the same continuous heading
  const double base_turn = line.turning.back();
  double prev_h = 0.0;
  HeadingField hf{g, inv_chi, line.theta, g.window};
  hf.heading(line.points.back(), arg_ref, prev_h, &arg_ref);
  for (std::size_t k = static_cast<std::size_t>(index) + 1; k < target.points.size(); ++k) {
    const Point q = target.points[k];
    double h = 0.0;
    line.points.push_back(q);
    if (hf.heading(q, arg_ref, h, &arg_ref)) {
      line.turning.push_back(line.turning.back() + (h - prev_h));
      prev_h = h;
    } else {
      line.turning.push_back(base_turn + (target.turning[k] - target.turning[index]));
    }
  }
}

}  // namespace detail

/// RK4 integration of the heading field at fixed chord length `step`.
/// With `merges` the line snaps onto earlier lines and copies their arc.
inline FlowLine trace_flow_line(const FieldGrid& grid, const Constants& c, Point z0, double theta,
                                const FlowOptions& opts = {}, const MergeIndex* merges = nullptr, int id = 0) {
  const double step = opts.step > 0 ? opts.step : (opts.step == 0 ? grid.spacing / 4 : -1.0);
  if (!(step > 0)) throw OptionError("flow step must be positive");
  if (grid.singularity && std::abs(z0 - grid.singularity->center) < 1e-12)
    throw DomainError("flow line cannot start at the singularity center");
  const Rect clip = opts.window.value_or(grid.window);
  if (!grid.window.contains(z0) || !clip.contains(z0)) throw RangeError("flow start outside the window");

  const double inv_chi = 1.0 / c.chi;
  detail::HeadingField hf{grid, inv_chi, theta, clip};

  FlowLine line;
  line.id = id;
  line.start = z0;
  line.theta = theta;
  line.step = step;

  double arg_ref = grid.singularity ? std::arg(z0 - grid.singularity->center) : 0.0;
  double phi0 = 0.0;
  hf.heading(z0, arg_ref, phi0, &arg_ref);
  line.heading0 = wrap_angle(phi0);
  line.points.push_back(z0);
  line.turning.push_back(0.0);

  const bool use_merge = merges && opts.merge;
  auto apply_merge = [&](Point tip, const MergeEvent* ev) {
    const FlowLine* target = merges->line(ev->target);
    if (ev->point != tip) {
      line.points.push_back(ev->point);
      double h = 0.0;
      line.turning.push_back(hf.heading(ev->point, arg_ref, h, &arg_ref) ? h - phi0 : line.turning.back());
    }
    line.own_length = static_cast<int>(line.points.size());
    line.status = FlowStatus::merged;
    line.merge_target = ev->target;
    line.merge_index = ev->index;
    detail::append_target_arc(line, *target, ev->index, grid, inv_chi, arg_ref);
  };
  auto try_merge = [&](Point tip, double phi) -> bool {
    if (!use_merge) return false;
    auto ev = merges->query(tip, std::polar(1.0, phi), theta);
    if (!ev) return false;
    apply_merge(tip, &*ev);
    return true;
  };

  Point p = z0;
  double phi = phi0;
  if (try_merge(p, phi)) return line;

  const bool sliding = static_cast<bool>(opts.absorbing);
  const Rect box{std::max(clip.x0, grid.window.x0), std::max(clip.y0, grid.window.y0), std::min(clip.x1, grid.window.x1),
                 std::min(clip.y1, grid.window.y1)};
  const double inset = 1e-9 * box.width();
  auto pull_in = [&](Point x) {
    if (!sliding) return x;
    return Point(std::clamp(x.real(), box.x0 + inset, box.x1 - inset), std::clamp(x.imag(), box.y0 + inset, box.y1 - inset));
  };
  int last_slide = 0;

  for (long k = 0; k < opts.max_steps; ++k) {
    double h2, h3, h4;
    const Point k1 = std::polar(1.0, phi);
    if (!hf.heading(pull_in(p + 0.5 * step * k1), arg_ref, h2)) {
      line.status = FlowStatus::exited_window;
      break;
    }
    const Point k2 = std::polar(1.0, h2);
    if (!hf.heading(pull_in(p + 0.5 * step * k2), arg_ref, h3)) {
      line.status = FlowStatus::exited_window;
      break;
    }
    const Point k3 = std::polar(1.0, h3);
    if (!hf.heading(pull_in(p + step * k3), arg_ref, h4)) {
      line.status = FlowStatus::exited_window;
      break;
    }
    const Point k4 = std::polar(1.0, h4);
    const Point inc = (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    const double r = std::abs(inc);
    const Point dir = r > 1e-14 ? inc / r : k1;
    Point q = p + step * dir;
    if (sliding && !box.contains(q)) {
      if (opts.absorbing(box.perimeter_coord(q))) {
        line.status = FlowStatus::exited_window;
        break;
      }
      // slide along the edge being crossed, in the direction of the step
      const double over[4] = {box.y0 - q.imag(), q.real() - box.x1, q.imag() - box.y1, box.x0 - q.real()};
      const Point tangents[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
      const int edge = static_cast<int>(std::max_element(over, over + 4) - over);
      const double along = dot(dir, tangents[edge]);
      const int sgn = along > 0 ? 1 : (along < 0 ? -1 : 0);
      if (sgn == 0 || (last_slide != 0 && sgn != last_slide)) {
        line.status = FlowStatus::exited_window;  // stuck against the edge
        break;
      }
      last_slide = sgn;
      q = pull_in(p + step * static_cast<double>(sgn) * tangents[edge]);
    } else {
      last_slide = 0;
    }
    double phi_q = 0.0;
    if (use_merge) {
      if (auto ev = merges->crossing(p, q, theta)) {
        apply_merge(p, &*ev);
        return line;
      }
    }
    if (!hf.heading(q, arg_ref, phi_q, &arg_ref)) {
      line.status = FlowStatus::exited_window;
      break;
    }
    line.points.push_back(q);
    line.turning.push_back(phi_q - phi0);
    p = q;
    phi = phi_q;
    if (try_merge(p, phi)) return line;
  }
  if (line.status == FlowStatus::running) line.status = FlowStatus::max_steps;
  line.own_length = static_cast<int>(line.points.size());
  return line;
}

/// Merge check for a running tip against the lines already in `others`.
inline std::optional<MergeEvent> merge_rule(const FlowLine& line, const MergeIndex& others) {
  if (line.points.empty()) return std::nullopt;
  const int k = static_cast<int>(line.points.size()) - 1;
  return others.query(line.points.back(), line.tangent(k), line.theta);
}

/// Traces one line per start in id order; each may merge into any earlier line.
inline Forest build_forest(const FieldGrid& grid, const Constants& c, const std::vector<Point>& starts, double theta,
                           const FlowOptions& opts = {}) {
  for (std::size_t i = 0; i < starts.size(); ++i)
    for (std::size_t j = i + 1; j < starts.size(); ++j)
      if (starts[i] == starts[j]) throw InputError("duplicate flow-line start point");
  const double step = opts.step > 0 ? opts.step : grid.spacing / 4;
  const double tol = opts.merge_tol > 0 ? opts.merge_tol : 1.5 * step;
  if (tol < step) throw OptionError("merge tolerance must be at least the step");

  Forest f;
  f.lines.reserve(starts.size());
  f.parent_of.resize(starts.size());
  std::iota(f.parent_of.begin(), f.parent_of.end(), 0);
  MergeIndex index(tol, opts.merge_max_turn);
  FlowOptions o = opts;
  o.step = step;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    f.lines.push_back(trace_flow_line(grid, c, starts[i], theta, o, &index, static_cast<int>(i)));
    const FlowLine& l = f.lines.back();
    if (l.status == FlowStatus::merged) {
      const Point mp = l.points[l.own_length - 1];
      f.merge_edges.push_back({l.id, l.merge_target, mp});
      if (!f.unite(l.id, l.merge_target)) throw Error("flow forest acquired a cycle");
    }
    index.add(l);
  }
  return f;
}

// ---------------------------------------------------------------------------
// Interactions

enum class Side { left, right };

struct HeightDifference {
  double value = 0.0;
  int winding = 0;
  Side side = Side::right;
};

/// D = (2 pi k + theta_b - theta_a) chi, with k read off the relative
/// unwrapped tangent directions of the two lines at the hit.
inline HeightDifference height_difference_at_hit(const FlowLine& a, const FlowLine& b, std::pair<int, int> hit,
                                                 const Constants& c, double tol) {
  const auto [ia, ib] = hit;
  if (ia < 0 || ib < 0 || ia >= static_cast<int>(a.points.size()) || ib >= static_cast<int>(b.points.size()))
    throw InputError("hit index out of range");
  if (std::abs(a.points[ia] - b.points[ib]) > tol) throw InputError("hit points are not within tolerance");
  const double ta = a.heading0 + a.turning[ia];
  const double tb = b.heading0 + b.turning[ib];
  const double dtheta = b.theta - a.theta;
  HeightDifference d;
  d.winding = static_cast<int>(std::lround((tb - ta - dtheta) / kTwoPi));
  d.value = (kTwoPi * d.winding + dtheta) * c.chi;
  // b on the right of a when b's tangent points clockwise from a's
  d.side = cross(a.tangent(ia), b.tangent(ib)) < 0 ? Side::right : Side::left;
  return d;
}

enum class Interaction { crosses, merges, bounces, cannot_hit };

inline const char* to_string(Interaction i) {
  switch (i) {
    case Interaction::crosses: return "crosses";
    case Interaction::merges: return "merges";
    case Interaction::bounces: return "bounces";
    case Interaction::cannot_hit: return "cannot_hit";
  }
  return "?";
}

/// Classification by height difference; D is read from the right side, a
/// left-side hit uses -D.
inline Interaction classify_interaction(const HeightDifference& d, const Constants& c) {
  const double D = d.side == Side::right ? d.value : -d.value;
  if (std::abs(D) <= 1e-9) return Interaction::merges;
  const double upper = 2.0 * c.lambda - kPi * c.chi;
  if (D > -kPi * c.chi && D < 0) return Interaction::crosses;
  if (D > 0 && D < upper) return Interaction::bounces;
  return Interaction::cannot_hit;
}

struct CrossingOptions {
  std::optional<Point> exclude_center;  // ignore intersections near this point
  double exclude_radius = 0.0;
  std::optional<Rect> window;  // only count intersections inside
};

/// Transversal crossings of b over a's polyline. Proper segment
/// intersections are grouped when consecutive ones lie within `tol` along b;
/// a group with an even count is a tangential contact (bounce) and counts 0.
inline int count_crossings(const FlowLine& a, const FlowLine& b, double tol, const CrossingOptions& o = {}) {
  if (a.points.size() < 2 || b.points.size() < 2) return 0;
  double seg_max = 0.0;
  for (std::size_t k = 0; k + 1 < a.points.size(); ++k) seg_max = std::max(seg_max, std::abs(a.points[k + 1] - a.points[k]));
  detail::SpatialHash seg_hash(std::max(seg_max, tol) * 2);
  for (std::size_t k = 0; k + 1 < a.points.size(); ++k) seg_hash.insert(0.5 * (a.points[k] + a.points[k + 1]), 0, static_cast<int>(k));

  std::vector<double> params;  // arclength positions along b
  double arc = 0.0;
  for (std::size_t k = 0; k + 1 < b.points.size(); ++k) {
    const Point q = b.points[k], q2 = b.points[k + 1];
    const double len = std::abs(q2 - q);
    std::vector<double> here;
    seg_hash.visit(0.5 * (q + q2), [&](int, int idx) {
      double s, t;
      const Point p = a.points[idx], p2 = a.points[idx + 1];
      if (!detail::segment_intersection(p, p2, q, q2, s, t)) return;
      const Point x = q + t * (q2 - q);
      if (o.exclude_center && std::abs(x - *o.exclude_center) < o.exclude_radius) return;
      if (o.window && !o.window->contains(x)) return;
      here.push_back(arc + t * len);
    });
    std::sort(here.begin(), here.end());
    params.insert(params.end(), here.begin(), here.end());
    arc += len;
  }
  int crossings = 0;
  std::size_t i = 0;
  while (i < params.size()) {
    std::size_t j = i + 1;
    while (j < params.size() && params[j] - params[j - 1] < tol) ++j;
    crossings += static_cast<int>((j - i) % 2);
    i = j;
  }
  return crossings;
}

/// First index pair (in b's order) where b comes within `tol` of a, subject
/// to the same exclusion options as count_crossings.
inline std::optional<std::pair<int, int>> first_contact(const FlowLine& a, const FlowLine& b, double tol,
                                                        const CrossingOptions& o = {}) {
  detail::SpatialHash hash(tol);
  for (std::size_t k = 0; k < a.points.size(); ++k) hash.insert(a.points[k], 0, static_cast<int>(k));
  for (std::size_t k = 0; k < b.points.size(); ++k) {
    const Point q = b.points[k];
    if (o.exclude_center && std::abs(q - *o.exclude_center) < o.exclude_radius) continue;
    if (o.window && !o.window->contains(q)) continue;
    int best = -1;
    double bd = tol;
    hash.visit(q, [&](int, int idx) {
      const double d = std::abs(a.points[idx] - q);
      if (d < bd) {
        bd = d;
        best = idx;
      }
    });
    if (best >= 0) return std::make_pair(best, static_cast<int>(k));
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Export

inline void write_polylines_csv(std::ostream& os, const std::vector<FlowLine>& lines) {
  os << "id,index,x,y,turning\n";
  os.precision(17);
  for (const auto& l : lines)
    for (std::size_t k = 0; k < l.points.size(); ++k)
      os << l.id << ',' << k << ',' << l.points[k].real() << ',' << l.points[k].imag() << ',' << l.turning[k] << '\n';
}

inline void write_forest_csv(std::ostream& os, const Forest& f) {
  os << "child,parent,mx,my\n";
  os.precision(17);
  for (const auto& e : f.merge_edges) os << e.child << ',' << e.parent << ',' << e.point.real() << ',' << e.point.imag() << '\n';
}

}  // namespace imgeo
