#include <gtest/gtest.h>

#include <sstream>

#include "imgeo/spacefill.hpp"

using namespace imgeo;

namespace {

FieldGrid sf_field(const SpaceFillConfig& cfg, int n, std::uint64_t seed) {
  return add_harmonic_boundary(sample_zero_boundary(n, default_spacing(n), seed), spacefill_boundary(cfg));
}

}  // namespace

TEST(Weights, BoundaryRoundTrip) {
  for (double kp : {5.0, 6.0, 12.0, 128.0})
    for (double r1 : {-1.5, -0.5, 0.0, 1.0})
      for (double r2 : {-1.0, 0.0, 2.0}) {
        if (r1 <= -2 || r1 >= kp / 2 - 2 || r2 <= -2 || r2 >= kp / 2 - 2) continue;
        const auto [a, b] = weights_to_boundary(kp, r1, r2);
        const auto [q1, q2] = boundary_to_weights(kp, a, b);
        EXPECT_NEAR(q1, r1, 1e-12);
        EXPECT_NEAR(q2, r2, 1e-12);
      }
}

TEST(Weights, ReversalExamples) {
  // kappa'/4 - 2 is a fixed point
  for (double kp : {5.0, 6.0, 10.0}) {
    const auto [a, b] = reversal_weights(kp, kp / 4 - 2, kp / 4 - 2);
    EXPECT_NEAR(a, kp / 4 - 2, 1e-12);
    EXPECT_NEAR(b, kp / 4 - 2, 1e-12);
  }
  const auto [a, b] = reversal_weights(12.0, 0.0, 0.0);
  EXPECT_NEAR(a, 2.0, 1e-12);
  EXPECT_NEAR(b, 2.0, 1e-12);
  const auto [c, d] = reversal_weights(6.0, 0.0, -1.0);
  EXPECT_NEAR(c, 0.0, 1e-12);
  EXPECT_NEAR(d, -1.0, 1e-12);
  const auto [e, f] = reversal_weights(6.0, -0.2, 0.3);
  const auto [g, h] = reversal_weights(6.0, e, f);
  EXPECT_NEAR(g, -0.2, 1e-12);
  EXPECT_NEAR(h, 0.3, 1e-12);
}

TEST(Order, SinglePointIsTrivial) {
  const SpaceFillConfig cfg = make_spacefill_config(6.0, -0.5, -0.5, 1);
  const SpaceFillOrder o = order_points(sf_field(cfg, 17, 1), derive_constants_dual(6.0), cfg);
  ASSERT_EQ(o.size(), 1u);
  EXPECT_EQ(o.order, std::vector<int>{0});
  EXPECT_EQ(o.visit_time(0), 0.0);
}

TEST(Order, MeshTwoCurveCoversWindow) {
  const SpaceFillConfig cfg = make_spacefill_config(6.0, -0.5, -0.5, 2);
  const FieldGrid g = sf_field(cfg, 33, 2);
  const SpaceFillOrder o = order_points(g, derive_constants_dual(6.0), cfg);
  const Curve c = space_filling_curve(o);
  EXPECT_EQ(c.vertices.size(), 4u);
  EXPECT_NEAR(c.total_time(), g.window.area(), 1e-12);
}

TEST(Order, AxiomsAndAreaOnSmallMesh) {
  const SpaceFillConfig cfg = make_spacefill_config(6.0, -0.5, -0.5, 8);
  const FieldGrid g = sf_field(cfg, 33, 3);
  const SpaceFillOrder o = order_points(g, derive_constants_dual(6.0), cfg);
  const OrderAxioms ax = check_order_axioms(o);
  EXPECT_GT(ax.triples, 0);
  EXPECT_EQ(ax.antisymmetry_failures, 0);
  EXPECT_EQ(ax.transitivity_failures, 0);
  EXPECT_EQ(ax.totality_failures, 0);
  EXPECT_NEAR(space_filling_curve(o).total_time(), g.window.area(), 1e-12);
  EXPECT_LE(o.violations, o.pairs_decided / 100);
  const OrderAxioms sampled = check_order_axioms(o, 10000, 1);
  EXPECT_EQ(sampled.transitivity_failures, 0);
}

TEST(Order, KappaMismatchRejected) {
  const SpaceFillConfig cfg = make_spacefill_config(6.0, -0.5, -0.5, 4);
  EXPECT_THROW(order_points(sf_field(cfg, 17, 1), derive_constants(2.0), cfg), SpecError);
  EXPECT_THROW(make_spacefill_config(6.0, -2.5, 0.0, 4), Error);
}

TEST(Order, DeterministicForFixedField) {
  const SpaceFillConfig cfg = make_spacefill_config(6.0, -0.5, -0.5, 6);
  const FieldGrid g = sf_field(cfg, 33, 5);
  const Constants c = derive_constants_dual(6.0);
  EXPECT_EQ(order_points(g, c, cfg).order, order_points(g, c, cfg).order);
}

TEST(Reversal, ExactReverseMirrors) {
  SpaceFillOrder f;
  f.mesh = 4;
  f.points = mesh_points(Rect{}, 4);
  const int n = static_cast<int>(f.points.size());
  f.rank.resize(n);
  f.order.resize(n);
  for (int i = 0; i < n; ++i) {
    f.rank[i] = (i * 7) % n;
    f.order[f.rank[i]] = i;
  }
  // the reversed curve visits -p at time 1 - t(p)
  SpaceFillOrder r = f;
  for (int i = 0; i < n; ++i) r.rank[rotated_index(f, i)] = n - 1 - f.rank[i];
  for (int i = 0; i < n; ++i) r.order[r.rank[i]] = i;
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  const KsResult ks = reversal_symmetry_stat(f, r, all);
  EXPECT_NEAR(ks.d, 0.0, 1e-15);
  SpaceFillOrder other = f;
  other.mesh = 8;
  EXPECT_THROW(reversal_samples(f, other, all), InputError);
}

TEST(Reversal, QuadrantProbes) {
  const auto p = quadrant_probes(32);
  ASSERT_EQ(p.size(), 4u);
  EXPECT_EQ(p[0], 8 * 32 + 8);
  EXPECT_EQ(p[3], 24 * 32 + 24);
}

TEST(Export, CurveCsvAndPpm) {
  const SpaceFillConfig cfg = make_spacefill_config(6.0, -0.5, -0.5, 2);
  const SpaceFillOrder o = order_points(sf_field(cfg, 17, 2), derive_constants_dual(6.0), cfg);
  std::ostringstream csv, ppm;
  write_curve_csv(csv, o);
  write_order_ppm(ppm, o, 3);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "visit,x,y,time");
  EXPECT_EQ(ppm.str().substr(0, 11), "P6\n6 6\n255\n");
  EXPECT_EQ(ppm.str().size(), 11u + 6 * 6 * 3);
}

TEST(Islands, SnakeOrderHasNone) {
  SpaceFillOrder o;
  o.mesh = 4;
  o.points = mesh_points(Rect{}, 4);
  o.rank.resize(16);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) o.rank[j * 4 + i] = j * 4 + (j % 2 ? 3 - i : i);
  EXPECT_EQ(island_count(o, 1), 0);
  std::swap(o.rank[0], o.rank[15]);
  EXPECT_GE(island_count(o, 1), 2);
}
