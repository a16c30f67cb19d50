#pragma once

#include <Eigen/Core>

#include "demagkit/grid.hpp"
#include "demagkit/laplace.hpp"

namespace demagkit {

/// Krylov basis and projected matrix: A Q = Q H + next_coupling * next_vector * e_k^T.
struct ArnoldiDecomposition {
  Eigen::MatrixXd Q;
  Eigen::MatrixXd H;
  double beta = 0.0;
  double next_coupling = 0.0;
  Eigen::VectorXd next_vector;
  /// Requested k exceeded the operator dimension and was clipped.
  bool truncated = false;
  /// Stopped early on an invariant subspace.
  bool breakdown = false;
  int k() const { return static_cast<int>(H.rows()); }
};

/// Modified Gram-Schmidt Arnoldi with one reorthogonalization pass.
ArnoldiDecomposition arnoldi(const LinearOperator& op, const Eigen::VectorXd& f, int k);
ArnoldiDecomposition arnoldi(const LinearOperator& op, const ScalarField& f, int k);

/// Dense exponential by scaling and squaring with the degree-13 Pade approximant.
Eigen::MatrixXd expm_small(const Eigen::MatrixXd& H, int cap = 2000);

enum class KrylovMode { automatic, arnoldi, lanczos };

struct KrylovOptions {
  int max_dim = 700;
  /// automatic picks Arnoldi when n * k^2 stays below lanczos_threshold,
  /// otherwise a two-pass Lanczos that keeps only three vectors.
  KrylovMode mode = KrylovMode::automatic;
  double lanczos_threshold = 2e9;
};

/// exp(-op) f, with op symmetric positive semidefinite.
Eigen::VectorXd krylov_expm_action(const LinearOperator& op, const Eigen::VectorXd& f,
                                   const KrylovOptions& opts = {});

/// e^{T Delta_h} f with homogeneous Dirichlet data on the grid boundary.
/// T = 0 returns f unchanged.
ScalarField expm_action(double T, const ScalarField& f, const KrylovOptions& opts = {});
ScalarField expm_action(double T, const ScalarField& f, int k);

}  // namespace demagkit
