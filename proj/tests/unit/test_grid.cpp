#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "demagkit/field_io.hpp"
#include "demagkit/grid.hpp"
#include "demagkit/laplace.hpp"
#include "values_of.hpp"

using namespace demagkit;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double max_interior_error(const ScalarField& f, const std::function<double(const Point&)>& exact) {
  const Grid& g = f.grid();
  double err = 0.0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    if (g.is_boundary(g.unflatten(i))) continue;
    err = std::max(err, std::abs(f[i] - exact(g.position(i))));
  }
  return err;
}

VectorField section_field(const Grid& g) {
  return VectorField::sample(g, [](const Point& x) {
    return Point{std::sin(kTwoPi * x[0]) / kTwoPi, -std::cos(kTwoPi * x[1]) / kTwoPi, 0.0};
  });
}

}  // namespace

TEST(Grid, ExtremeNodesLandOnBox) {
  const Grid g(2, 3.0, 7);
  EXPECT_EQ(g.nodes_per_axis(), 43);
  EXPECT_EQ(g.node_count(), 43u * 43u);
  EXPECT_EQ(g.coordinate(0), -3.0);
  EXPECT_EQ(g.coordinate(42), 3.0);
  EXPECT_EQ(g.coordinate(g.center_index()), 0.0);
  const Grid g3(3, 1.0, 4);
  EXPECT_EQ(g3.node_count(), 9u * 9u * 9u);
  EXPECT_EQ(g3.interior_count(), 7u * 7u * 7u);
}

TEST(Grid, FlattenRoundTripAxisZeroFastest) {
  const Grid g(3, 1.0, 2);
  EXPECT_EQ(g.flatten({1, 0, 0}), 1u);
  EXPECT_EQ(g.flatten({0, 1, 0}), 5u);
  EXPECT_EQ(g.flatten({0, 0, 1}), 25u);
  for (std::size_t i = 0; i < g.node_count(); ++i) EXPECT_EQ(g.flatten(g.unflatten(i)), i);
}

TEST(Grid, RejectsOffLatticeWidths) {
  EXPECT_THROW(Grid(2, 0.3, 1), SizingError);
  EXPECT_THROW(Grid(4, 1.0, 2), SizingError);
  EXPECT_THROW(Grid(2, 1.0, 0), SizingError);
  EXPECT_THROW(Grid(2, -1.0, 2), SizingError);
}

TEST(Grid, FieldsRejectBadInput) {
  const Grid g(2, 1.0, 2);
  EXPECT_THROW(ScalarField(g, std::vector<double>(3, 0.0)), std::invalid_argument);
  std::vector<double> v(g.node_count(), 0.0);
  v[4] = std::nan("");
  EXPECT_THROW(ScalarField(g, v), std::invalid_argument);
  EXPECT_THROW(VectorField(g, std::vector<double>(g.node_count(), 0.0)), std::invalid_argument);
}

TEST(Divergence, SectionFieldSecondOrder) {
  auto exact = [](const Point& x) { return -std::cos(kTwoPi * x[0]) - std::sin(kTwoPi * x[1]); };
  const double e1 = max_interior_error(divergence(section_field(Grid(2, 1.0, 20))), exact);
  const double e2 = max_interior_error(divergence(section_field(Grid(2, 1.0, 40))), exact);
  EXPECT_LT(e1, 0.05);
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.1);
}

TEST(Divergence, ConstantFieldHasNoSource) {
  const Grid g(2, 1.0, 5);
  const ScalarField F = divergence(VectorField::sample(g, [](const Point&) { return Point{0.3, -1.2, 0}; }));
  for (double v : values_of(F)) EXPECT_NEAR(v, 0.0, 1e-13);
}

TEST(Divergence, LinearFieldExact) {
  const Grid g(2, 1.0, 16);
  const ScalarField F = divergence(VectorField::sample(g, [](const Point& x) { return Point{x[0], 0, 0}; }));
  for (double v : values_of(F)) EXPECT_NEAR(v, -1.0, 1e-12);
  const Grid g3(3, 0.5, 4);
  const ScalarField F3 = divergence(
      VectorField::sample(g3, [](const Point& x) { return Point{x[0], 2 * x[1], -x[2]}; }));
  for (double v : values_of(F3)) EXPECT_NEAR(v, -2.0, 1e-12);
}

TEST(Gradient, LinearExact) {
  const Grid g(2, 1.0, 8);
  const VectorField G = gradient(ScalarField::sample(g, [](const Point& x) { return x[0]; }));
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    EXPECT_NEAR(G.at(i)[0], 1.0, 1e-12);
    EXPECT_NEAR(G.at(i)[1], 0.0, 1e-12);
  }
}

TEST(Gradient, PeriodicSolutionSecondOrder) {
  auto u = [](const Point& x) { return std::cos(kTwoPi * x[0]) + std::sin(kTwoPi * x[1]); };
  auto err = [&](int n) {
    const Grid g(2, 1.0, n);
    const VectorField G = gradient(ScalarField::sample(g, u));
    double e = 0.0;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      if (g.is_boundary(g.unflatten(i))) continue;
      const Point x = g.position(i);
      e = std::max(e, std::abs(G.at(i)[0] + kTwoPi * std::sin(kTwoPi * x[0])));
      e = std::max(e, std::abs(G.at(i)[1] - kTwoPi * std::cos(kTwoPi * x[1])));
    }
    return e;
  };
  EXPECT_NEAR(std::log2(err(20) / err(40)), 2.0, 0.1);
}

TEST(Gradient, ZeroField) {
  const Grid g(3, 0.5, 4);
  const VectorField G = gradient(ScalarField::zeros(g));
  for (double v : values_of(G)) EXPECT_EQ(v, 0.0);
}

TEST(Restrict, FullDomainIsIdentity) {
  const Grid g(2, 1.0, 4);
  const ScalarField f = ScalarField::sample(g, [](const Point& x) { return x[0] * 3 + x[1]; });
  const ScalarField r = restrict_to(f, Subdomain{1.0});
  EXPECT_TRUE(r.grid() == g);
  for (std::size_t i = 0; i < g.node_count(); ++i) EXPECT_EQ(r[i], f[i]);
}

TEST(Restrict, IndicatorOfKGivesOnes) {
  const Grid g(2, 2.0, 4);
  const ScalarField f = ScalarField::sample(g, [](const Point& x) {
    return std::abs(x[0]) <= 0.5 && std::abs(x[1]) <= 0.5 ? 1.0 : 0.0;
  });
  const ScalarField r = restrict_to(f, Subdomain{0.5});
  EXPECT_EQ(r.grid().nodes_per_axis(), 5);
  for (double v : values_of(r)) EXPECT_EQ(v, 1.0);
  EXPECT_NEAR(l2_norm(r, Subdomain{0.5}), 1.0, 1e-14);
}

TEST(EmbedZero, CountsAndRoundTrip) {
  const Grid k(2, 0.5, 4);
  const Grid outer(2, 10.0, 4);
  const ScalarField one = ScalarField::sample(k, [](const Point&) { return 1.0; });
  const ScalarField e = embed_zero(one, outer);
  double sum = 0.0;
  for (double v : values_of(e)) sum += v;
  EXPECT_EQ(sum, static_cast<double>(k.node_count()));

  const ScalarField f = ScalarField::sample(k, [](const Point& x) { return std::exp(x[0]) - x[1]; });
  const ScalarField back = restrict_to(embed_zero(f, outer), Subdomain{0.5});
  ASSERT_TRUE(back.grid() == k);
  for (std::size_t i = 0; i < k.node_count(); ++i) EXPECT_EQ(back[i], f[i]);

  for (double v : values_of(embed_zero(ScalarField::zeros(k), outer))) EXPECT_EQ(v, 0.0);
}

TEST(EmbedZero, RejectsMisalignedLattice) {
  const ScalarField f = ScalarField::zeros(Grid(2, 0.5, 4));
  EXPECT_THROW(embed_zero(f, Grid(2, 2.0, 6)), std::invalid_argument);
  EXPECT_THROW(embed_zero(f, Grid(3, 2.0, 4)), std::invalid_argument);
}

TEST(L2Norm, UnitSquareAndCosine) {
  const Grid g(2, 2.0, 10);
  EXPECT_NEAR(l2_norm(ScalarField::sample(g, [](const Point&) { return 1.0; }), Subdomain{0.5}), 1.0, 1e-14);
  EXPECT_EQ(l2_norm(ScalarField::zeros(g), Subdomain{0.5}), 0.0);
  const ScalarField c = ScalarField::sample(g, [](const Point& x) { return std::cos(kTwoPi * x[0]); });
  EXPECT_NEAR(l2_norm(c, Subdomain{0.5}), 1.0 / std::sqrt(2.0), 1e-3);
}

TEST(L2Norm, BoxBetweenNodes) {
  // At 25 nodes per unit the edges of [-1/2, 1/2] fall midway between nodes.
  const Grid g(2, 2.0, 25);
  const ScalarField one = ScalarField::sample(g, [](const Point&) { return 1.0; });
  EXPECT_NEAR(l2_norm(one, Subdomain{0.5}), 1.0, 1e-14);
  const ScalarField c = ScalarField::sample(g, [](const Point& x) { return std::cos(kTwoPi * x[0]); });
  EXPECT_NEAR(l2_norm(c, Subdomain{0.5}), 1.0 / std::sqrt(2.0), 1e-2);
  EXPECT_EQ(restrict_to(one, Subdomain{0.5}).grid().nodes_per_axis(), 25);
}

TEST(L2Norm, AbsolutelyHomogeneous) {
  const Grid g(3, 1.0, 4);
  const ScalarField f = ScalarField::sample(g, [](const Point& x) { return std::sin(3 * x[0]) + x[1] * x[2]; });
  const double base = l2_norm(f, Subdomain{0.5});
  for (double c : {-3.0, 0.25, 7.5}) {
    EXPECT_NEAR(l2_norm(c * f, Subdomain{0.5}), std::abs(c) * base, 1e-15 * std::abs(c) * base * 10);
  }
}

TEST(Grid, DivGradMatchesFivePointLaplacian) {
  auto u = [](const Point& x) { return std::sin(2.0 * x[0]) * std::cos(1.5 * x[1]) + x[0] * x[1] * x[1]; };
  std::vector<double> errs;
  for (int n : {8, 16, 32}) {
    const Grid g(2, 1.0, n);
    const ScalarField f = ScalarField::sample(g, u);
    const ScalarField a = divergence(gradient(f));
    const ScalarField b = apply_neg_laplacian(f);
    // Nodes whose wide stencil stays clear of the one-sided boundary layer.
    double e = 0.0;
    const int m = g.nodes_per_axis();
    for (int j = 2; j < m - 2; ++j) {
      for (int i = 2; i < m - 2; ++i) e = std::max(e, std::abs(a.at({i, j, 0}) - b.at({i, j, 0})));
    }
    errs.push_back(e);
  }
  const double slope = std::log2(errs[0] / errs[2]) / 2.0;
  EXPECT_GE(slope, 1.9);
}

TEST(FieldFile, RoundTripBitwise) {
  const Grid g(2, 1.5, 4);
  const ScalarField f = ScalarField::sample(g, [](const Point& x) { return std::exp(x[0]) / 3.0 - 1e-300 * x[1]; });
  std::stringstream buf;
  write_field(buf, f);
  std::string header;
  std::getline(buf, header);
  EXPECT_EQ(header, "demagkit-field v1 dim=2 R=1.5 n_per_unit=4");
  buf.seekg(0);
  const ScalarField g2 = read_field(buf);
  ASSERT_TRUE(g2.grid() == g);
  for (std::size_t i = 0; i < g.node_count(); ++i) EXPECT_EQ(g2[i], f[i]);
}

TEST(FieldFile, RejectsMalformedInput) {
  std::stringstream bad("demagkit-field v2 dim=2 R=1 n_per_unit=2\n");
  EXPECT_THROW(read_field(bad), std::runtime_error);
  std::stringstream short_file("demagkit-field v1 dim=2 R=1 n_per_unit=1\n1\n2\n");
  EXPECT_THROW(read_field(short_file), std::runtime_error);
}
