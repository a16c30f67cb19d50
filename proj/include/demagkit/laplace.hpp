#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "demagkit/grid.hpp"

namespace demagkit {

/// Matrix-free linear map on R^dim.
struct LinearOperator {
  std::size_t dim = 0;
  std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> apply;
};

/// Thrown when an iterative solve stops before reaching its tolerance.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// Homogeneous-Dirichlet -Delta_h on the interior nodes of a grid.
/// Vectors are compact over interior nodes, axis 0 fastest.
class NegLaplacian {
 public:
  explicit NegLaplacian(const Grid& grid);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return size_; }
  double diagonal() const { return diagonal_; }
  void apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const;
  LinearOperator as_operator(double scale = 1.0) const;

 private:
  Grid grid_;
  int m_;
  std::size_t size_;
  double inv_h2_;
  double diagonal_;
};

Eigen::VectorXd interior_vector(const ScalarField& f);

/// Full-grid field whose interior is `x` and whose boundary is copied from
/// `boundary` (zero if absent).
ScalarField from_interior(const Grid& grid, const Eigen::VectorXd& x,
                          const ScalarField* boundary = nullptr);

/// 5/7-point -Delta_h at interior nodes using the field's own boundary values.
/// Boundary nodes of the result are zero.
ScalarField apply_neg_laplacian(const ScalarField& v);

struct DirichletProblem {
  ScalarField rhs;
  /// Only boundary nodes are read.
  ScalarField boundary_values;
};

struct CgResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients for an SPD operator.
/// Throws SolverError if the true relative residual stays above tol.
CgResult conjugate_gradient(const LinearOperator& op, const Eigen::VectorXd& diag,
                            const Eigen::VectorXd& rhs, double tol, int max_iter);

ScalarField solve_dirichlet(const DirichletProblem& p, double tol = 1e-10, int max_iter = 100000);

/// Interface crossing of the grid line leaving `node` along `axis` in
/// direction `side` (+1/-1). The boundary sits at fraction `theta` of a cell.
struct Crossing {
  std::size_t node;
  int axis;
  int side;
  double theta;
  double value;
};

/// Dirichlet problem on a region cut out of the grid. Nodes flagged inside
/// are unknowns; every stencil arm that leaves the region must be described
/// by a Crossing. Boundary values enter through linear ghost extrapolation,
/// which keeps the operator symmetric.
struct EmbeddedDirichletProblem {
  Grid grid;
  std::vector<char> inside;
  ScalarField rhs;
  std::vector<Crossing> crossings;
};

/// Nodes outside the region are returned as zero.
ScalarField solve_embedded_dirichlet(const EmbeddedDirichletProblem& p, double tol = 1e-10,
                                     int max_iter = 100000);

}  // namespace demagkit
