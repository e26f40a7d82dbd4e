#include <gtest/gtest.h>

#include "imgeo/params.hpp"

using namespace imgeo;

TEST(Constants, IdentitiesOnKappaGrid) {
  for (int i = 1; i <= 400; ++i) {
    const double k = 4.0 * i / 401.0;
    const Constants c = derive_constants(k);
    EXPECT_NEAR(kTwoPi * c.chi, 4.0 * (c.lambda - c.lambda_prime), 1e-12) << k;
    EXPECT_NEAR(kTwoPi * c.chi, (4.0 - k) * c.lambda, 1e-12) << k;
    EXPECT_NEAR(kTwoPi * c.chi, (c.kappa_prime - 4.0) * c.lambda_prime, 1e-12) << k;
    EXPECT_NEAR(c.lambda_prime, c.lambda - 0.5 * kPi * c.chi, 1e-12) << k;
    EXPECT_GT(c.chi, 0.0);
  }
}

TEST(Constants, RejectsKappaOutsideRange) {
  EXPECT_THROW(derive_constants(0.0), DomainError);
  EXPECT_THROW(derive_constants(4.0), DomainError);
  EXPECT_THROW(derive_constants_dual(4.0), DomainError);
  EXPECT_NEAR(derive_constants_dual(6.0).kappa, 16.0 / 6.0, 1e-15);
}

TEST(CriticalAngle, IntegerMultiplesOfPi) {
  for (int n = 1; n <= 4; ++n) EXPECT_NEAR(critical_angle(4.0 * n / (n + 1.0)), n * kPi, 1e-12);
  EXPECT_EQ(critical_angle(2.0), kPi);
  EXPECT_NEAR(critical_angle(8.0 / 3.0), kTwoPi, 1e-12);
}

TEST(CriticalAngle, KappaForEvenlySpacedRays) {
  for (int n = 1; n <= 6; ++n) EXPECT_NEAR(critical_angle(critical_kappa_for_n(n)), kTwoPi / n, 1e-12);
  EXPECT_THROW(critical_kappa_for_n(0), DomainError);
}

TEST(Weights, FlowAndCounterflowDictionary) {
  ImaginaryParams p{derive_constants(2.0), 0.0, 0.0, 0.0};
  EXPECT_NEAR(rho_from_alpha(p, RhoKind::flow), 2.0 - 2.0, 1e-15);
  const Constants& c = p.constants;
  // 2 - kappa' < -2 for every admissible alpha
  EXPECT_THROW(rho_from_alpha(p, RhoKind::counterflow_from_origin), DomainError);
  EXPECT_NEAR(rho_from_alpha(p, RhoKind::counterflow_from_infinity), c.kappa_prime - 6.0, 1e-15);
  p.alpha = 0.5;
  EXPECT_NEAR(rho_from_alpha(p, RhoKind::flow), kTwoPi * 0.5 / c.lambda, 1e-12);
  p.alpha = -10;
  EXPECT_THROW(rho_from_alpha(p, RhoKind::flow), DomainError);
  EXPECT_NEAR((ImaginaryParams{c, 0.0}.angle_range()), kTwoPi, 1e-15);
}

TEST(SelfHits, CountsAndRegimes) {
  EXPECT_EQ(max_self_hits(8.0 / 3.0, 2.0 - 8.0 / 3.0), 1);
  EXPECT_EQ(max_self_hits(3.6, -1.6), 5);
  EXPECT_EQ(max_self_hits(2.0, 0.0), 1);
  EXPECT_EQ(regime(8.0 / 3.0, 2.0 - 8.0 / 3.0), Regime::simple);
  EXPECT_EQ(regime(3.6, -1.6), Regime::self_intersecting);
  EXPECT_EQ(regime(2.0, -1.0), Regime::simple);  // boundary case rho = kappa/2 - 2
  EXPECT_NEAR(bessel_dimension(2.0, -1.0), 2.0, 1e-15);
  EXPECT_THROW(max_self_hits(2.0, -2.0), DomainError);
}
