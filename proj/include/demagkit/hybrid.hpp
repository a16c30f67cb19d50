#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "demagkit/bem.hpp"
#include "demagkit/expm.hpp"
#include "demagkit/grid.hpp"

namespace demagkit {

enum class TRule { explicit_T, periodic_optimal, highfreq_optimal };

std::string to_string(TRule rule);
TRule parse_t_rule(const std::string& name);

struct SolverConfig {
  int dim = 2;
  /// Outer box K_R = [-R, R]^dim.
  double R = 10.0;
  double T = 1.8;
  int k = 700;
  int n_per_unit = 25;
  double cg_tol = 1e-10;
  int cg_max_iter = 200000;
  std::optional<double> omega0;
  TRule T_rule = TRule::explicit_T;
  double c_d = 0.25;
  /// Smallest positive periodic eigenvalue for the periodic-optimal rule.
  double lambda1 = 39.47841760435743;
  /// Omega = [-w, w]^dim.
  double omega_half_width = 0.5;
  int ngp = 0;  ///< quadrature points per panel, 0 = default rule
  KrylovMode krylov_mode = KrylovMode::automatic;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
  /// T after applying T_rule.
  double effective_T() const;
  Grid omega_grid() const;
  Grid outer_grid() const;
  QuadratureRule quadrature() const;
  KrylovOptions krylov() const;
};

/// -Delta v = F - e^{T Delta} F on K_R, v = 0 on the boundary. F lives on Omega.
ScalarField solve_regularized(const ScalarField& F, const SolverConfig& cfg);

/// Harmonic extension into Omega of the single layer of `mesh`, sampled at the
/// boundary nodes of Omega.
ScalarField solve_boundary_term(const VectorField& M, const BoundaryMesh& mesh,
                                const SolverConfig& cfg);

/// u = restrict(v_{T,R}, Omega) + b for M sampled on the Omega grid.
ScalarField demag_potential(const VectorField& M, const SolverConfig& cfg);

/// -grad u on Omega.
VectorField demag_field(const VectorField& M, const SolverConfig& cfg);

/// Hybrid solve on a disk of radius `radius` centred at the origin (2D).
struct DiskSolution {
  /// Potential on the grid covering the disk; zero outside.
  ScalarField potential;
  std::vector<char> inside;
  /// Nodes whose whole 5-point stencil lies inside the disk.
  std::vector<char> stencil_inside;
  BoundaryMesh mesh;
};

DiskSolution solve_disk(double radius, const std::function<Point(const Point&)>& M,
                        const SolverConfig& cfg);

}  // namespace demagkit
