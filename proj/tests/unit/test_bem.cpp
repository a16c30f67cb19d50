#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "demagkit/bem.hpp"

using namespace demagkit;

namespace {

constexpr double kPi = std::numbers::pi;

Panel segment(Point a, Point b, double g) {
  const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
  Panel p;
  p.vertices = {a, b, Point{}};
  p.normal = {(b[1] - a[1]) / len, -(b[0] - a[0]) / len, 0.0};
  p.density = g;
  return p;
}

Panel triangle(Point a, Point b, Point c, double g) {
  const Point u{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
  const Point v{c[0] - a[0], c[1] - a[1], c[2] - a[2]};
  Point n{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
  const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
  for (double& x : n) x /= len;
  Panel p;
  p.vertices = {a, b, c};
  p.normal = n;
  p.density = g;
  return p;
}

// Polar integral of 1/(4 pi r) over a planar triangle in the z = 0 plane,
// seen from an interior point x: sum over edges of int rho(theta) dtheta.
double polar_oracle(const std::array<Point, 3>& v, const Point& x) {
  const QuadratureRule gl = gauss_legendre_rule(40);
  double total = 0.0;
  for (int i = 0; i < 3; ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % 3];
    const double ta = std::atan2(a[1] - x[1], a[0] - x[0]);
    double tb = std::atan2(b[1] - x[1], b[0] - x[0]);
    if (tb < ta) tb += 2 * kPi;
    const int pieces = 64;
    for (int s = 0; s < pieces; ++s) {
      const double t0 = ta + (tb - ta) * s / pieces;
      const double t1 = ta + (tb - ta) * (s + 1) / pieces;
      for (std::size_t q = 0; q < gl.size(); ++q) {
        const double t = t0 + (t1 - t0) * gl.points[q][0];
        const double dx = std::cos(t), dy = std::sin(t);
        // Ray x + rho (dx, dy) meets the line through a, b.
        const double ex = b[0] - a[0], ey = b[1] - a[1];
        const double den = dx * ey - dy * ex;
        const double rho = ((a[0] - x[0]) * ey - (a[1] - x[1]) * ex) / den;
        total += gl.weights[q] * (t1 - t0) * rho;
      }
    }
  }
  return total / (4 * kPi);
}

BoundaryMesh circle_mesh(double a, int panels, Point shift = {}) {
  std::vector<Point> v;
  for (int i = 0; i < panels; ++i) {
    const double t = 2 * kPi * i / panels;
    v.push_back({shift[0] + a * std::cos(t), shift[1] + a * std::sin(t), 0.0});
  }
  return polygon_mesh(v, [](const Point&, const Point&) { return 1.0; });
}

}  // namespace

TEST(Green, KernelValues) {
  EXPECT_NEAR(green(3, {0, 0, 0}, {1, 0, 0}), 0.0795774715459477, 1e-15);
  EXPECT_EQ(green(2, {0, 0, 0}, {0, 1, 0}), 0.0);
  EXPECT_NEAR(green(2, {0, 0, 0}, {std::exp(1.0), 0, 0}), -1.0 / (2 * kPi), 1e-15);
  EXPECT_THROW(green(2, {1, 1, 0}, {1, 1, 0}), std::invalid_argument);
}

TEST(Quadrature, WeightsSumToReferenceMeasure) {
  for (const QuadratureRule& r : {gauss_legendre_rule(1), gauss_legendre_rule(4), gauss_legendre_rule(17)}) {
    double s = 0.0;
    for (double w : r.weights) {
      EXPECT_GT(w, 0.0);
      s += w;
    }
    EXPECT_NEAR(s, 1.0, 1e-14);
  }
  for (const QuadratureRule& r : {triangle_rule_7(), collapsed_gauss_rule(3), collapsed_gauss_rule(9)}) {
    double s = 0.0;
    for (double w : r.weights) {
      EXPECT_GT(w, 0.0);
      s += w;
    }
    EXPECT_NEAR(s, 0.5, 1e-14);
  }
}

TEST(Quadrature, TriangleRuleIsDegreeFive) {
  const QuadratureRule r = triangle_rule_7();
  // int_0^1 int_0^{1-z} z^a w^b = a! b! / (a + b + 2)!
  auto exact = [](int a, int b) { return std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 3); };
  for (int a = 0; a <= 5; ++a) {
    for (int b = 0; a + b <= 5; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.points[i][0], a) * std::pow(r.points[i][1], b);
      EXPECT_NEAR(s, exact(a, b), 1e-15) << a << "," << b;
    }
  }
}

TEST(PanelIntegral, FarFieldTriangle) {
  const Panel p = triangle({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, 1.0);
  const Point x{0, 0, 10};
  const double got = panel_integral_regular(3, x, p, 1.0, default_rule(3));
  // Reference: high-order collapsed Gauss on four sub-triangles.
  double ref = 0.0;
  const QuadratureRule fine = collapsed_gauss_rule(20);
  const std::array<std::array<Point, 3>, 4> subs = {{{{{0, 0, 0}, {0.5, 0, 0}, {0, 0.5, 0}}},
                                                     {{{0.5, 0, 0}, {1, 0, 0}, {0.5, 0.5, 0}}},
                                                     {{{0, 0.5, 0}, {0.5, 0.5, 0}, {0, 1, 0}}},
                                                     {{{0.5, 0.5, 0}, {0, 0.5, 0}, {0.5, 0, 0}}}}};
  for (const auto& s : subs) {
    for (std::size_t i = 0; i < fine.size(); ++i) {
      const double z = fine.points[i][0], w = fine.points[i][1];
      Point y;
      for (int c = 0; c < 3; ++c) y[c] = s[0][c] + z * (s[1][c] - s[0][c]) + w * (s[2][c] - s[0][c]);
      ref += fine.weights[i] * 2 * 0.125 * green(3, x, y);
    }
  }
  EXPECT_NEAR(got, ref, 1e-9);
  EXPECT_NEAR(got, 0.5 / (40 * kPi), 2e-3 * got);
  EXPECT_EQ(panel_integral_regular(3, x, triangle({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, 0.0), 0.0, default_rule(3)), 0.0);
}

TEST(PanelIntegral, SaturatesUnderRuleDoubling) {
  const Panel p = triangle({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, 1.0);
  const Point x{0.2, 0.1, 10};
  EXPECT_NEAR(panel_integral_regular(3, x, p, 1.0, collapsed_gauss_rule(4)),
              panel_integral_regular(3, x, p, 1.0, collapsed_gauss_rule(8)), 1e-10);
  const Panel s = segment({0, 0, 0}, {1, 0, 0}, 1.0);
  EXPECT_NEAR(panel_integral_regular(2, {0.3, 8, 0}, s, 1.0, gauss_legendre_rule(4)),
              panel_integral_regular(2, {0.3, 8, 0}, s, 1.0, gauss_legendre_rule(8)), 1e-10);
}

TEST(PanelIntegral, NearPanelSubdivisionTracksExact) {
  // Point just above the middle of a segment: compare with the closed form of
  // int -(1/2pi) ln sqrt((s - x)^2 + d^2) ds.
  const Panel s = segment({0, 0, 0}, {1, 0, 0}, 1.0);
  const double x = 0.4, d = 0.05;
  auto F = [&](double t) {
    const double u = t - x;
    return u * std::log(u * u + d * d) / 2 - u + d * std::atan(u / d);
  };
  const double exact = -(F(1.0) - F(0.0)) / (2 * kPi);
  EXPECT_NEAR(panel_integral_regular(2, {x, d, 0}, s, 1.0, default_rule(2)), exact, 1e-6);
}

TEST(SingularTriangle, ClosedFormProperties) {
  const double v1 = singular_triangle_integral(1.0);
  EXPECT_NEAR(v1, 0.19156127071513777, 1e-15);
  EXPECT_NEAR(singular_triangle_integral(2.0), 2 * v1, 1e-15);
  const double t1 = std::sqrt(2.0) / (12 * kPi) * std::log(std::sqrt(10.0) + 3);
  const double t2 = 1.0 / (12 * kPi) * std::log((std::sqrt(2.0) + 1) * (std::sqrt(5.0) + 2));
  EXPECT_NEAR(t1 + 2 * t2, v1, 1e-15);
  EXPECT_THROW(singular_triangle_integral(0.0), std::invalid_argument);
}

TEST(SingularTriangle, MatchesPolarOracle) {
  const std::array<Point, 3> v = {Point{0, 0, 0}, Point{1, 0, 0}, Point{0, 1, 0}};
  const double oracle = polar_oracle(v, {1.0 / 3, 1.0 / 3, 0});
  EXPECT_NEAR(singular_triangle_integral(1.0), oracle, 1e-10 * oracle);
  EXPECT_NEAR(self_panel_integral(3, {1.0 / 3, 1.0 / 3, 0}, triangle(v[0], v[1], v[2], 1.0)), oracle, 1e-10 * oracle);
}

TEST(SelfPanel, GeneralTriangleAndPoint) {
  const std::array<Point, 3> v = {Point{-0.2, 0.1, 0}, Point{1.3, -0.1, 0}, Point{0.4, 0.9, 0}};
  for (const Point& x : {Point{0.5, 0.3, 0}, Point{0.0, 0.1, 0}, Point{0.9, 0.1, 0}}) {
    const double oracle = polar_oracle(v, x);
    EXPECT_NEAR(self_panel_integral(3, x, triangle(v[0], v[1], v[2], 1.0)), oracle, 1e-9 * oracle);
  }
}

TEST(SingularSegment, ClosedForm) {
  EXPECT_NEAR(singular_segment_integral(2.0), 1.0 / kPi, 1e-15);
  EXPECT_NEAR(singular_segment_integral(2.0 * std::exp(1.0)), 0.0, 1e-15);
  EXPECT_THROW(singular_segment_integral(-1.0), std::invalid_argument);
}

TEST(SingularSegment, EpsilonBallExtrapolation) {
  const double L = 0.7;
  // Integral over |s| in [eps, L/2] on both sides, by composite Gauss; the
  // excluded part is O(eps ln eps), removed by Richardson in eps.
  const QuadratureRule gl = gauss_legendre_rule(30);
  auto outer = [&](double eps) {
    double acc = 0.0;
    const int pieces = 200;
    const double a = std::log(eps), b = std::log(L / 2);
    for (int p = 0; p < pieces; ++p) {
      const double t0 = a + (b - a) * p / pieces, t1 = a + (b - a) * (p + 1) / pieces;
      for (std::size_t q = 0; q < gl.size(); ++q) {
        const double t = t0 + (t1 - t0) * gl.points[q][0];
        const double s = std::exp(t);
        acc += gl.weights[q] * (t1 - t0) * s * (-std::log(s) / (2 * kPi));
      }
    }
    return 2 * acc;
  };
  // The eps-ball contributes 2 * (eps - eps ln eps) / (2 pi); that term is
  // known in closed form, so the remainder is exact up to quadrature.
  const double eps = 1e-8;
  const double ball = 2 * (eps - eps * std::log(eps)) / (2 * kPi);
  EXPECT_NEAR(outer(eps) + ball, singular_segment_integral(L), 1e-8);
  EXPECT_NEAR(outer(1e-6), singular_segment_integral(L), 1e-5);
}

TEST(SingleLayer, ZeroDensity) {
  std::vector<Point> v = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  const BoundaryMesh mesh = polygon_mesh(v, [](const Point&, const Point&) { return 0.0; });
  EXPECT_EQ(single_layer_potential({0.5, 0.5, 0}, mesh, default_rule(2)), 0.0);
  EXPECT_EQ(single_layer_potential({1.0, 0.5, 0}, mesh, default_rule(2)), 0.0);
}

TEST(SingleLayer, CircleCenterAndRefinement) {
  // Exact circle: -a ln a at the centre. The inscribed polygon converges at O(h^2).
  for (double a : {1.0, 0.5}) {
    std::vector<double> err;
    for (int n : {32, 64, 128}) {
      err.push_back(std::abs(single_layer_potential({0, 0, 0}, circle_mesh(a, n), default_rule(2)) + a * std::log(a)));
    }
    EXPECT_NEAR(std::log2(err[0] / err[1]), 2.0, 0.1) << a;
    EXPECT_NEAR(std::log2(err[1] / err[2]), 2.0, 0.1) << a;
    EXPECT_LT(err[2], 1e-3) << a;
  }
}

TEST(SingleLayer, HarmonicOffBoundary) {
  const BoundaryMesh mesh = circle_mesh(0.8, 96);
  const QuadratureRule rule = default_rule(2);
  const Point c{0.15, -0.2, 0};
  std::vector<double> res;
  for (double h : {0.02, 0.01}) {
    const double lap = (single_layer_potential({c[0] + h, c[1], 0}, mesh, rule) +
                        single_layer_potential({c[0] - h, c[1], 0}, mesh, rule) +
                        single_layer_potential({c[0], c[1] + h, 0}, mesh, rule) +
                        single_layer_potential({c[0], c[1] - h, 0}, mesh, rule) -
                        4 * single_layer_potential(c, mesh, rule)) / (h * h);
    res.push_back(std::abs(lap));
  }
  EXPECT_LT(res[0], 1e-6);
  EXPECT_LT(res[1], 1e-6);

  // 3D: cube mesh from M = x, probe at an interior point.
  const Grid g(3, 1.0, 4);
  const BoundaryMesh cube = box_boundary_mesh(VectorField::sample(g, [](const Point& x) { return x; }), Subdomain{0.5});
  const double h = 0.02;
  const Point p{0.05, -0.1, 0.08};
  double lap = -6 * single_layer_potential(p, cube, default_rule(3));
  for (int a = 0; a < 3; ++a) {
    for (int s : {-1, 1}) {
      Point q = p;
      q[a] += s * h;
      lap += single_layer_potential(q, cube, default_rule(3));
    }
  }
  EXPECT_LT(std::abs(lap / (h * h)), 1e-2);
}

TEST(SingleLayer, TranslationInvariant) {
  const Point shift{3.25, -1.5, 0};
  const BoundaryMesh a = circle_mesh(0.6, 40);
  const BoundaryMesh b = circle_mesh(0.6, 40, shift);
  for (const Point& x : {Point{0.1, 0.2, 0}, Point{0.6, 0, 0}, Point{2, 1, 0}}) {
    const double va = single_layer_potential(x, a, default_rule(2));
    const double vb = single_layer_potential({x[0] + shift[0], x[1] + shift[1], 0}, b, default_rule(2));
    EXPECT_NEAR(va, vb, 1e-12 * std::max(1.0, std::abs(va)));
  }
  std::vector<Panel> p3, q3;
  p3.push_back(triangle({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, 0.7));
  q3.push_back(triangle({1, 2, 3}, {2, 2, 3}, {1, 3, 3}, 0.7));
  const BoundaryMesh m3(3, p3), n3(3, q3);
  const double va = single_layer_potential({0.3, 0.2, 0.4}, m3, default_rule(3));
  const double vb = single_layer_potential({1.3, 2.2, 3.4}, n3, default_rule(3));
  EXPECT_NEAR(va, vb, 1e-12 * va);
}

TEST(SingleLayer, ThreeDimensionalFarField) {
  const Grid g(3, 1.0, 4);
  const BoundaryMesh cube = box_boundary_mesh(VectorField::sample(g, [](const Point& x) { return x; }), Subdomain{0.5});
  double moment = 0.0;
  for (const Panel& p : cube.panels()) moment += p.density * panel_measure(3, p);
  EXPECT_NEAR(moment, 3.0, 1e-12);  // M.n = 1/2 on every face, total area 6
  const double r = 100 * std::sqrt(3.0);
  const double got = single_layer_potential({r / std::sqrt(3.0), r / std::sqrt(3.0), r / std::sqrt(3.0)}, cube, default_rule(3));
  EXPECT_NEAR(got, moment / (4 * kPi * r), 1e-2 * got);
}

TEST(BoxMesh, NormalsOutwardAndUnit) {
  for (int dim : {2, 3}) {
    const Grid g(dim, 1.0, 4);
    const BoundaryMesh m = box_boundary_mesh(VectorField::sample(g, [](const Point& x) { return x; }), Subdomain{0.5});
    EXPECT_EQ(m.size(), dim == 2 ? 16u : 6u * 16u * 2u);
    for (const Panel& p : m.panels()) {
      const Point c = panel_centroid(dim, p);
      const double n2 = p.normal[0] * p.normal[0] + p.normal[1] * p.normal[1] + p.normal[2] * p.normal[2];
      EXPECT_NEAR(n2, 1.0, 1e-12);
      EXPECT_GT(c[0] * p.normal[0] + c[1] * p.normal[1] + c[2] * p.normal[2], 0.0);
      EXPECT_NEAR(p.density, 0.5, 1e-12);
      EXPECT_GT(panel_measure(dim, p), 0.0);
    }
  }
}

TEST(BoundaryMesh, RejectsInvalidPanels) {
  Panel p = segment({0, 0, 0}, {1, 0, 0}, 1.0);
  p.normal = {0.0, 2.0, 0.0};
  EXPECT_THROW(BoundaryMesh(2, {p}), std::invalid_argument);
  Panel q = segment({0, 0, 0}, {0, 0, 0}, 1.0);
  q.normal = {0.0, 1.0, 0.0};
  EXPECT_THROW(BoundaryMesh(2, {q}), std::invalid_argument);
}

TEST(BoundaryMesh, FileRoundTrip) {
  const Grid g(3, 1.0, 2);
  const BoundaryMesh m = box_boundary_mesh(
      VectorField::sample(g, [](const Point& x) { return Point{std::sin(x[0]), x[1] / 3, 0.1}; }), Subdomain{1.0});
  std::stringstream buf;
  write_mesh(buf, m);
  std::string header;
  std::getline(buf, header);
  EXPECT_EQ(header, "demagkit-mesh v1 dim=3 panels=" + std::to_string(m.size()));
  buf.seekg(0);
  const BoundaryMesh r = read_mesh(buf);
  ASSERT_EQ(r.size(), m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    EXPECT_EQ(r.panels()[i].density, m.panels()[i].density);
    EXPECT_EQ(r.panels()[i].vertices, m.panels()[i].vertices);
    EXPECT_EQ(r.panels()[i].normal, m.panels()[i].normal);
  }
}
