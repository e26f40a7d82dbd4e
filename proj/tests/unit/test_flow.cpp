#include <gtest/gtest.h>

#include <sstream>

#include "imgeo/flow.hpp"

using namespace imgeo;

namespace {

FlowLine straight(Point a, Point b, int pieces, double theta = 0.0) {
  FlowLine l;
  l.theta = theta;
  l.heading0 = std::arg(b - a);
  for (int k = 0; k <= pieces; ++k) {
    l.points.push_back(a + (b - a) * (static_cast<double>(k) / pieces));
    l.turning.push_back(0.0);
  }
  l.step = std::abs(b - a) / pieces;
  l.own_length = static_cast<int>(l.points.size());
  return l;
}

}  // namespace

TEST(Trace, ConstantFieldGivesStraightLine) {
  const FieldGrid g = make_grid(33, default_spacing(33));
  const Constants c = derive_constants(2.0);
  const FlowLine l = trace_flow_line(g, c, Point(-0.5, 0.25), 0.0);
  EXPECT_EQ(l.status, FlowStatus::exited_window);
  for (const Point& p : l.points) EXPECT_NEAR(p.imag(), 0.25, 1e-12);
  EXPECT_NEAR(l.points.back().real(), 1.0, 1e-6);
  EXPECT_NEAR(l.turning.back(), 0.0, 1e-12);
}

TEST(Trace, AngleRotatesHeading) {
  const FieldGrid g = make_grid(33, default_spacing(33));
  const Constants c = derive_constants(2.0);
  const FlowLine l = trace_flow_line(g, c, Point(0.0, 0.0), kPi / 2);
  EXPECT_NEAR(l.heading0, kPi / 2, 1e-12);
  EXPECT_NEAR(l.points.back().imag(), 1.0, 1e-6);
}

TEST(Trace, FieldValueActsAsAngle) {
  // h = chi * pi/2 everywhere turns an angle-0 line north
  FieldGrid g = make_grid(17, default_spacing(17));
  const Constants c = derive_constants(1.0);
  for (double& v : g.values) v = c.chi * kPi / 2;
  const FlowLine l = trace_flow_line(g, c, Point(0.0, 0.0), 0.0);
  EXPECT_NEAR(l.heading0, kPi / 2, 1e-12);
}

TEST(Trace, RejectsBadInput) {
  const FieldGrid g = make_grid(9, default_spacing(9));
  const Constants c = derive_constants(2.0);
  EXPECT_THROW(trace_flow_line(g, c, Point(3.0, 0.0), 0.0), RangeError);
  FlowOptions o;
  o.step = -1;
  EXPECT_THROW(trace_flow_line(g, c, Point(0.0, 0.0), 0.0, o), OptionError);
}

TEST(Forest, SameAngleLinesMerge) {
  const FieldGrid g = make_grid(33, default_spacing(33));
  const Constants c = derive_constants(2.0);
  // the second start lies on the first line's path
  const Forest f = build_forest(g, c, {Point(-0.6, 0.1), Point(0.0, 0.1)}, 0.0);
  EXPECT_EQ(f.lines[0].status, FlowStatus::exited_window);
  EXPECT_EQ(f.lines[1].status, FlowStatus::merged);
  EXPECT_EQ(f.lines[1].merge_target, 0);
  ASSERT_EQ(f.merge_edges.size(), 1u);
  Forest copy = f;
  EXPECT_EQ(copy.component_count(), 1);
  EXPECT_THROW(build_forest(g, c, {Point(0, 0), Point(0, 0)}, 0.0), InputError);
}

TEST(Forest, DistinctAnglesNeverMerge) {
  const FieldGrid g = make_grid(33, default_spacing(33));
  const Constants c = derive_constants(2.0);
  MergeIndex index(0.1);
  const FlowLine a = trace_flow_line(g, c, Point(-0.6, 0.0), 0.0);
  index.add(a);
  const FlowLine b = trace_flow_line(g, c, Point(0.0, -0.6), kPi / 2, {}, &index, 1);
  EXPECT_NE(b.status, FlowStatus::merged);
}

TEST(Crossings, StraightLines) {
  const FlowLine a = straight({-1, 0}, {1, 0}, 40);
  const FlowLine b = straight({0.05, -1}, {0.05, 1}, 40);
  const FlowLine c = straight({-1, 0.5}, {1, 0.5}, 40);
  EXPECT_EQ(count_crossings(a, b, 0.01), 1);
  EXPECT_EQ(count_crossings(a, c, 0.01), 0);
  CrossingOptions o;
  o.exclude_center = Point(0.05, 0.0);
  o.exclude_radius = 0.1;
  EXPECT_EQ(count_crossings(a, b, 0.01, o), 0);
  o = {};
  o.window = Rect{0.5, -1, 1, 1};
  EXPECT_EQ(count_crossings(a, b, 0.01, o), 0);
}

TEST(Crossings, ZigZagCrossesThreeTimes) {
  const FlowLine a = straight({-1, 0}, {1, 0}, 50);
  FlowLine b;
  for (Point p : {Point(-0.9, 0.5), Point(-0.5, -0.5), Point(0.0, 0.5), Point(0.5, -0.5)}) {
    b.points.push_back(p);
    b.turning.push_back(0.0);
  }
  EXPECT_EQ(count_crossings(a, b, 0.01), 3);
}

TEST(Contact, FirstContactIndex) {
  const FlowLine a = straight({-1, 0}, {1, 0}, 20);
  const FlowLine b = straight({0.5, 1}, {0.5, -0.5}, 30);
  const auto hit = first_contact(a, b, 0.03);
  ASSERT_TRUE(hit.has_value());
  EXPECT_NEAR(std::abs(a.points[hit->first] - b.points[hit->second]), 0.0, 0.03);
  EXPECT_FALSE(first_contact(a, straight({-1, 0.5}, {1, 0.5}, 20), 0.03).has_value());
}

TEST(HeightDifference, ClassificationByArithmetic) {
  const Constants c = derive_constants(2.0);
  // same angle, no winding: D = 0
  EXPECT_EQ(classify_interaction({0.0, 0, Side::right}, c), Interaction::merges);
  // small negative D on the right crosses
  EXPECT_EQ(classify_interaction({-0.5 * kPi * c.chi, 0, Side::right}, c), Interaction::crosses);
  // positive D below 2 lambda - pi chi bounces
  EXPECT_EQ(classify_interaction({0.5 * (2 * c.lambda - kPi * c.chi), 0, Side::right}, c), Interaction::bounces);
  // angle gap pi never merges: |D| = pi chi mod 2 pi chi
  for (int k = -3; k <= 3; ++k)
    EXPECT_NE(classify_interaction({(kTwoPi * k + kPi) * c.chi, k, Side::right}, c), Interaction::merges);
  EXPECT_EQ(classify_interaction({5.0 * kTwoPi * c.chi, 5, Side::right}, c), Interaction::cannot_hit);
}

TEST(HeightDifference, ReadFromTangents) {
  const Constants c = derive_constants(2.0);
  FlowLine a = straight({-1, 0}, {1, 0}, 20);
  FlowLine b = straight({0, -1}, {0, 1}, 20, kPi / 2);
  const auto d = height_difference_at_hit(a, b, {10, 10}, c, 1e-9);
  EXPECT_EQ(d.winding, 0);
  EXPECT_NEAR(d.value, kPi / 2 * c.chi, 1e-12);
  EXPECT_EQ(d.side, Side::left);
  EXPECT_THROW(height_difference_at_hit(a, b, {0, 0}, c, 1e-9), InputError);
}

TEST(Export, PolylineCsv) {
  std::ostringstream os;
  write_polylines_csv(os, {straight({0, 0}, {1, 0}, 2)});
  EXPECT_EQ(os.str().substr(0, 21), "id,index,x,y,turning\n");
  int lines = 0;
  for (char ch : os.str()) lines += ch == '\n';
  EXPECT_EQ(lines, 4);
}
