#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "demagkit/grid.hpp"

namespace demagkit {

/// Laplace fundamental solution: -(1/2pi) ln r in 2D, 1/(4 pi r) in 3D.
double green(int dim, const Point& x, const Point& y);

/// Flat panel: a segment (2 vertices) in 2D or a triangle (3 vertices) in 3D.
struct Panel {
  std::array<Point, 3> vertices{};
  Point normal{};
  double density = 0.0;
};

class BoundaryMesh {
 public:
  BoundaryMesh(int dim, std::vector<Panel> panels);

  int dim() const { return dim_; }
  const std::vector<Panel>& panels() const { return panels_; }
  std::size_t size() const { return panels_.size(); }

 private:
  int dim_;
  std::vector<Panel> panels_;
};

/// Points are parametric: t in [0,1] for segments, (z, w) on the reference
/// triangle z, w >= 0, z + w <= 1. Weights sum to the reference measure.
struct QuadratureRule {
  int element_dim = 1;
  std::vector<std::array<double, 2>> points;
  std::vector<double> weights;
  std::size_t size() const { return weights.size(); }
};

QuadratureRule gauss_legendre_rule(int n);
/// Degree-5, 7-point triangle rule.
QuadratureRule triangle_rule_7();
/// n*n-point collapsed Gauss rule on the reference triangle.
QuadratureRule collapsed_gauss_rule(int n);
/// 4-point Gauss-Legendre in 2D, the 7-point triangle rule in 3D.
QuadratureRule default_rule(int dim);

double panel_measure(int dim, const Panel& p);
double panel_diameter(int dim, const Panel& p);
Point panel_centroid(int dim, const Panel& p);
double distance_to_panel(int dim, const Point& x, const Panel& p);

/// Quadrature of g * G(x, .) over the panel; near panels are subdivided.
double panel_integral_regular(int dim, const Point& x, const Panel& p, double g,
                              const QuadratureRule& rule);

/// Integral of 1/(4 pi |c - y|) over the right isosceles triangle with legs l,
/// c its centroid.
double singular_triangle_integral(double l);

/// Integral of -(1/2pi) ln|m - y| over a segment of length L, m its midpoint.
double singular_segment_integral(double L);

/// Exact integral of G(x, .) over a panel for x on the panel (density excluded).
double self_panel_integral(int dim, const Point& x, const Panel& p);

double single_layer_potential(const Point& x, const BoundaryMesh& mesh, const QuadratureRule& rule);

/// Mesh of the box [-r, r]^d with panel vertices on the lattice of M's grid.
/// Densities are M.n at panel centroids, M averaged from the panel vertices.
BoundaryMesh box_boundary_mesh(const VectorField& M, const Subdomain& omega);

/// Closed polygon through `vertices` (counter-clockwise) with density
/// `density(midpoint, outward normal)`.
BoundaryMesh polygon_mesh(const std::vector<Point>& vertices,
                          const std::function<double(const Point&, const Point&)>& density);

void write_mesh(std::ostream& out, const BoundaryMesh& mesh);
BoundaryMesh read_mesh(std::istream& in);

}  // namespace demagkit
