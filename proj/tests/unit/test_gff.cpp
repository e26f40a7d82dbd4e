#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cstdio>
#include <filesystem>

#include "imgeo/gff.hpp"

using namespace imgeo;

namespace {

// 2 pi times the inverse of the 5-point Dirichlet Laplacian, dense.
Eigen::MatrixXd dense_green(int n) {
  const int m = n - 2;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(m * m, m * m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      const int k = j * m + i;
      L(k, k) = 4.0;
      if (i > 0) L(k, k - 1) = -1.0;
      if (i + 1 < m) L(k, k + 1) = -1.0;
      if (j > 0) L(k, k - m) = -1.0;
      if (j + 1 < m) L(k, k + m) = -1.0;
    }
  return kTwoPi * L.ldlt().solve(Eigen::MatrixXd::Identity(m * m, m * m));
}

}  // namespace

TEST(Green, SpectralMatchesDenseSolve) {
  const int n = 9, m = n - 2;
  const Eigen::MatrixXd G = dense_green(n);
  for (int p = 0; p < m * m; p += 5)
    for (int q = 0; q < m * m; q += 3)
      EXPECT_NEAR(green_spectral(n, p % m + 1, p / m + 1, q % m + 1, q / m + 1), G(p, q), 1e-10);
}

TEST(Sampling, ZeroBoundaryAndDeterminism) {
  const FieldGrid a = sample_zero_boundary(17, default_spacing(17), 7);
  const FieldGrid b = sample_zero_boundary(17, default_spacing(17), 7);
  const FieldGrid c = sample_zero_boundary(17, default_spacing(17), 8);
  EXPECT_EQ(a.values, b.values);
  EXPECT_NE(a.values, c.values);
  for (int j = 0; j < a.n; ++j)
    for (int i = 0; i < a.n; ++i)
      if (a.on_boundary(i, j)) EXPECT_EQ(a.at(i, j), 0.0);
}

TEST(Sampling, CentreVarianceNearGreen) {
  const int n = 9, samples = 4000;
  double s2 = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double v = sample_zero_boundary(n, default_spacing(n), 100 + s).at(4, 4);
    s2 += v * v;
  }
  const double g = green_spectral(n, 4, 4, 4, 4);
  EXPECT_NEAR(s2 / samples, g, 0.1 * g);
}

TEST(Boundary, HarmonicExtension) {
  const FieldGrid g = add_harmonic_boundary(make_grid(33, default_spacing(33)), BoundarySpec::south_north(-1.0, 2.0));
  for (int j = 0; j < g.n; ++j)
    for (int i = 0; i < g.n; ++i) {
      if (g.on_boundary(i, j)) {
        const double u = g.window.perimeter_coord(g.vertex(i, j));
        EXPECT_EQ(g.at(i, j), BoundarySpec::south_north(-1.0, 2.0).value_at(u));
      } else {
        const double lap = 4 * g.at(i, j) - g.at(i - 1, j) - g.at(i + 1, j) - g.at(i, j - 1) - g.at(i, j + 1);
        EXPECT_NEAR(lap, 0.0, 1e-9);
      }
    }
}

TEST(Boundary, ConstantExtensionIsConstant) {
  const FieldGrid g = add_harmonic_boundary(make_grid(17, default_spacing(17)), BoundarySpec::constant(3.0));
  for (double v : g.values) EXPECT_NEAR(v, 3.0, 1e-10);
}

TEST(Singularity, RegularPartAndErrors) {
  FieldGrid g = sample_zero_boundary(17, default_spacing(17), 1);
  const Point z0(0.01, 0.02);
  const FieldGrid s = add_singularity(g, z0, 0.5, 0.25);
  const Point p(0.3, -0.4), v = g.vertex(5, 3);
  const Singularity sg{z0, 0.5, 0.25};
  EXPECT_NEAR(eval(s, v) + singular_term(sg, v), eval_regular(s, v), 1e-12);
  EXPECT_NEAR(eval_regular(s, p), eval(g, p), 1e-9);
  EXPECT_THROW(add_singularity(g, Point(0.0, 0.0), 0.5, 0.0), DomainError);  // grid vertex
  EXPECT_THROW(add_singularity(s, z0, 0.5, 0.0), DomainError);
  EXPECT_THROW(eval(g, Point(2.0, 0.0)), RangeError);
}

TEST(Singularity, BranchJumpAcrossCut) {
  const Singularity s{{0.0, 0.0}, 0.3, 0.0};
  // upper to lower half-plane: principal -alpha arg jumps by +2 pi alpha, so the correction removes it
  EXPECT_NEAR(branch_jump(s, {-1.0, 0.1}, {-1.0, -0.1}), -0.3 * kTwoPi, 1e-12);
  EXPECT_NEAR(branch_jump(s, {-1.0, -0.1}, {-1.0, 0.1}), 0.3 * kTwoPi, 1e-12);
  EXPECT_EQ(branch_jump(s, {1.0, 0.1}, {1.0, -0.1}), 0.0);
}

TEST(Eval, PiecewiseLinearReproducesLinearFunctions) {
  FieldGrid g = make_grid(9, default_spacing(9));
  for (int j = 0; j < g.n; ++j)
    for (int i = 0; i < g.n; ++i) g.at(i, j) = 2.0 * g.vertex(i, j).real() - 3.0 * g.vertex(i, j).imag() + 1.0;
  for (Point p : {Point(0.13, 0.77), Point(-0.9, 0.2), Point(1.0, 1.0)})
    EXPECT_NEAR(eval(g, p), 2.0 * p.real() - 3.0 * p.imag() + 1.0, 1e-12);
}

TEST(Serialization, RoundTrip) {
  const FieldGrid g = add_singularity(sample_zero_boundary(9, default_spacing(9), 3), Point(0.1, 0.1), 0.2, 0.0);
  const std::string path = (std::filesystem::temp_directory_path() / "imgeo_roundtrip.grid").string();
  write_grid(g, path);
  const FieldGrid r = read_grid(path);
  std::remove(path.c_str());
  EXPECT_EQ(r.values, g.values);
  EXPECT_EQ(r.seed, g.seed);
  ASSERT_TRUE(r.singularity.has_value());
  EXPECT_EQ(r.singularity->alpha, 0.2);
  EXPECT_NEAR(eval_regular(r, Point(0.5, 0.5)), eval_regular(g, Point(0.5, 0.5)), 1e-12);
  EXPECT_EQ(grid_sidecar(r)["n"], 9);
}

TEST(WholePlane, WindowAndDeterminism) {
  const FieldGrid a = whole_plane_approx(17, 3, 5);
  EXPECT_EQ(a.n, 17);
  EXPECT_EQ(a.values, whole_plane_approx(17, 3, 5).values);
  double boundary_abs = 0.0;
  for (int i = 0; i < a.n; ++i) boundary_abs += std::abs(a.at(i, 0));
  EXPECT_GT(boundary_abs, 0.0);  // the window edge is interior to the big box
  EXPECT_THROW(whole_plane_approx(17, 1, 5), DomainError);
}
