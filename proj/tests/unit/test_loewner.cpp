#include <gtest/gtest.h>

#include <numeric>

#include "imgeo/loewner.hpp"

using namespace imgeo;

namespace {

Driver constant_radial(double horizon, double dt, Point W = 1.0) {
  Driver d;
  d.kind = DriverKind::radial;
  d.dt = dt;
  const long n = std::lround(horizon / dt);
  for (long k = 0; k <= n; ++k) {
    d.times.push_back(k * dt);
    d.W.push_back(W);
  }
  return d;
}

}  // namespace

TEST(RadialSlit, ConstantDriverClosedForm) {
  // with W = 1 the tip x_t solves x/(1+x)^2 = e^{-t}/4
  const Driver d = constant_radial(1.0, 1e-3);
  const Trace tr = loewner_trace(d, 100);
  for (std::size_t k = 1; k < tr.points.size(); ++k) {
    const double t = tr.times[k];
    const double q = 4.0 * std::exp(t);  // (1+x)^2/x = q
    const double x = 0.5 * ((q - 2.0) - std::sqrt((q - 2.0) * (q - 2.0) - 4.0));
    EXPECT_NEAR(tr.points[k].real(), x, 1e-9) << t;
    EXPECT_NEAR(tr.points[k].imag(), 0.0, 1e-12);
  }
}

TEST(RadialSlit, CapacityIsExpMinusT) {
  DriverSpec s;
  s.kind = DriverKind::radial;
  s.kappa = 2.0;
  s.horizon = 0.5;
  s.seed = 3;
  const Driver d = drive(s);
  for (long k : {1000L, 5000L}) {
    const Point der = inverse_map_derivative_at_zero(d, k);
    EXPECT_NEAR(std::abs(der), std::exp(-d.times[k]), 1e-8);
  }
}

TEST(ChordalSlit, ConstantDriverVerticalSegment) {
  Driver d;
  d.kind = DriverKind::chordal;
  d.dt = 1e-3;
  for (int k = 0; k <= 1000; ++k) {
    d.times.push_back(k * d.dt);
    d.W.push_back(0.0);
  }
  const Trace tr = loewner_trace(d, 250);
  for (std::size_t k = 0; k < tr.points.size(); ++k) {
    EXPECT_NEAR(tr.points[k].real(), 0.0, 1e-9);
    EXPECT_NEAR(tr.points[k].imag(), 2.0 * std::sqrt(tr.times[k]), 1e-9);
  }
}

TEST(Inverse, RadialStepInvertsForwardFlow) {
  // the inverse map satisfies z/(1+z)^2 = e^{-dt} w/(1+w)^2 and |z| < 1
  const Point w(0.3, -0.4);
  Point der;
  const Point z = radial_inverse_step(1.0, w, 0.01, &der);
  EXPECT_LT(std::abs(z), 1.0);
  EXPECT_NEAR(std::abs(z / ((1.0 + z) * (1.0 + z)) - std::exp(-0.01) * w / ((1.0 + w) * (1.0 + w))), 0.0, 1e-14);
  const double h = 1e-6;
  const Point num = (radial_inverse_step(1.0, w + h, 0.01) - radial_inverse_step(1.0, w - h, 0.01)) / (2 * h);
  EXPECT_NEAR(std::abs(num - der), 0.0, 1e-7);
}

TEST(Drivers, ChordalBrownianScale) {
  DriverSpec s;
  s.kind = DriverKind::chordal;
  s.kappa = 4.0;
  s.horizon = 1.0;
  s.dt = 1e-3;
  double m2 = 0.0;
  const int runs = 400;
  for (int r = 0; r < runs; ++r) {
    s.seed = r;
    const Driver d = drive(s);
    m2 += d.W.back().real() * d.W.back().real();
  }
  EXPECT_NEAR(m2 / runs, 4.0, 0.6);
}

TEST(Drivers, ChordalWeightsAndThreshold) {
  DriverSpec s;
  s.kind = DriverKind::chordal;
  s.kappa = 2.0;
  s.weights = {{-1.5, 0.0, true}};
  s.horizon = 0.2;
  s.seed = 1;
  const Driver d = drive(s);
  ASSERT_EQ(d.V.size(), 1u);
  for (std::size_t k = 0; k < d.size(); ++k) EXPECT_GE(d.V[0][k] - d.W[k].real(), -1e-9);
  s.weights = {{-1.2, 0.0, true}, {-1.0, 0.0, true}};
  EXPECT_THROW(drive(s), SpecError);
  s.weights = {{-1.5, 0.5, true}, {-1.5, 1.0, true}};
  const Driver d2 = drive(s);
  if (d2.threshold_time) EXPECT_LE(*d2.threshold_time, s.horizon + 1e-12);
}

TEST(Drivers, SpecValidation) {
  DriverSpec s;
  s.kind = DriverKind::whole_plane;
  s.burn_in = 0.0;
  EXPECT_THROW(drive(s), SpecError);
  s.kind = DriverKind::radial;
  s.kappa = -1.0;
  EXPECT_THROW(drive(s), SpecError);
  s.kappa = 2.0;
  s.weights = {{-2.5}};
  EXPECT_THROW(drive(s), SpecError);
}

TEST(Drivers, RadialPairStaysOnCircle) {
  DriverSpec s;
  s.kind = DriverKind::radial;
  s.kappa = 3.0;
  s.weights = {{-1.0}};
  s.horizon = 0.5;
  s.seed = 9;
  const Driver d = drive(s);
  for (std::size_t k = 0; k < d.size(); ++k) {
    EXPECT_NEAR(std::abs(d.W[k]), 1.0, 1e-12);
    EXPECT_GE(d.theta[k], 0.0);
    EXPECT_LE(d.theta[k], kTwoPi);
    EXPECT_NEAR(std::abs(std::arg(d.W[k] / d.O[k]) - wrap_angle(d.theta[k])), 0.0, 1e-9);
  }
}

TEST(Theta, StationaryMeanIsPi) {
  // the stationary density is symmetric about pi
  const auto x = sample_theta(2.0, 0.0, 0.0, 1e-3, 5.0, 0.05, 20000, 11);
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  EXPECT_NEAR(mean, kPi, 0.1);
  EXPECT_THROW(sample_theta(2.0, -2.0, 0.0, 1e-3, 1.0, 0.1, 10, 1), SpecError);
}

TEST(Theta, DriftShiftsMean) {
  const auto x = sample_theta(2.0, 0.0, 0.5, 1e-3, 5.0, 0.05, 20000, 11);
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  EXPECT_GT(mean, kPi + 0.1);
  EXPECT_NEAR(mu_from_beta(4.0, 1.0), 0.5, 1e-15);
}

TEST(Winding, SpiralClosedForm) {
  // arg = 2 pi c log r: c turns per unit log radius
  const Constants k = derive_constants(2.0);
  Trace tr;
  tr.kind = DriverKind::whole_plane;
  const double c = 0.8;
  for (int i = 0; i <= 4000; ++i) {
    const double lr = -6.0 + 12.0 * i / 4000.0;
    tr.points.push_back(std::polar(std::exp(lr), kTwoPi * c * lr));
    tr.times.push_back(lr);
  }
  const double est = winding_beta_estimate(tr, k, 0.0);
  EXPECT_NEAR(est, kTwoPi * k.chi * c, 0.05 * kTwoPi * k.chi * c);
  BetaEstimateOptions o;
  o.r_inner = 1.0;
  o.r_outer = 2.0;
  EXPECT_THROW(winding_beta_estimate(tr, k, 0.0, o), RangeError);
}

TEST(Twisting, RotatingDriverWindsAndTwists) {
  Driver d;
  d.kind = DriverKind::radial;
  d.dt = 1e-4;
  for (int k = 0; k <= 60000; ++k) {
    const double t = k * d.dt;
    d.times.push_back(t);
    d.W.push_back(std::polar(1.0, 4.0 * t));
  }
  const Trace tr = loewner_trace(d, 50);
  const Twisting a = twisting(d, tr, 0.1);
  EXPECT_EQ(a.winding, 1);
  EXPECT_NEAR(a.twisting, kTwoPi, 1e-9);
  const Twisting b = twisting(d, tr, 0.01);
  EXPECT_EQ(b.winding, 2);
  EXPECT_NEAR(b.twisting, 2 * kTwoPi, 1e-9);
  EXPECT_THROW(twisting(d, tr, 1e-9), RangeError);
}

TEST(Twisting, ConstantDriverHasNone) {
  const Driver d = constant_radial(4.0, 1e-3);
  const Trace tr = loewner_trace(d, 10);
  const Twisting t = twisting(d, tr, 0.1);
  EXPECT_EQ(t.twisting, 0.0);
  EXPECT_EQ(t.winding, 0);
}

TEST(WholePlane, TipsGrowOutward) {
  DriverSpec s;
  s.kind = DriverKind::whole_plane;
  s.kappa = 2.0;
  s.t0 = -1.0;
  s.horizon = 1.0;
  s.burn_in = 5.0;
  s.seed = 4;
  const Driver d = drive(s);
  const Point a = loewner_tip(d, 0), b = loewner_tip(d, static_cast<long>(d.size()) - 1);
  EXPECT_NEAR(std::abs(a), std::exp(-1.0), 1e-12);
  EXPECT_GT(std::abs(b), 2.0 * std::abs(a));
  EXPECT_THROW(loewner_tip(d, -1), RangeError);
}

TEST(Export, DriverAndTraceCsv) {
  const Driver d = constant_radial(0.01, 1e-3);
  std::ostringstream a, b;
  write_driver_csv(a, d);
  write_trace_csv(b, loewner_trace(d, 5));
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')), "t,re_w,im_w,re_o,im_o,theta");
  EXPECT_EQ(b.str().substr(0, b.str().find('\n')), "t,x,y");
}
