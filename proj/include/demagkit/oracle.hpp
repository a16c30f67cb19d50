#pragma once

#include "demagkit/bem.hpp"
#include "demagkit/grid.hpp"

namespace demagkit {

/// Integral of G(x, .) over the axis-aligned box [lo, hi] (exact, any x).
double box_green_integral(int dim, const Point& x, const Point& lo, const Point& hi);

/// w(x) = int_Omega G(x, y) F(y) dy by the midpoint rule over node-centred
/// cells of F's grid. The cell containing x is integrated exactly.
double volume_integral_potential(const ScalarField& F, const Point& x);

/// Volume term for F = -div M plus the single layer of M.n over `mesh`.
double integral_representation_potential(const VectorField& M, const BoundaryMesh& mesh,
                                         const Point& x);
double integral_representation_potential(const ScalarField& F, const BoundaryMesh& mesh,
                                         const Point& x, const QuadratureRule& rule);

/// -Delta w_R = F on K_R, w_R = 0 on the boundary, F zero-extended.
ScalarField truncated_dirichlet_solve(const ScalarField& F, double R, double cg_tol = 1e-10);

struct HeatConfig {
  double dt = 0.0;
  double T = 0.0;
};

/// Implicit-Euler march of the heat equation on K_R from F with zero
/// Dirichlet data, returning the trapezoidal time integral over [0, T].
ScalarField heat_integrate(const ScalarField& F, double R, const HeatConfig& hc,
                           double cg_tol = 1e-12);

}  // namespace demagkit
