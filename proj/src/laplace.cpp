#include "demagkit/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

namespace demagkit {

namespace {

void require_stencil(const Grid& g) {
  if (g.nodes_per_axis() < 3) throw SizingError("Laplacian: grid needs at least 3 nodes per axis");
}

void require_finite(const ScalarField& f, const char* what) {
  for (double v : f.values()) {
    if (std::isnan(v)) throw std::invalid_argument(std::string(what) + ": NaN in input");
  }
}

}  // namespace

NegLaplacian::NegLaplacian(const Grid& grid) : grid_(grid) {
  require_stencil(grid);
  m_ = grid.nodes_per_axis() - 2;
  size_ = grid.interior_count();
  inv_h2_ = static_cast<double>(grid.n_per_unit()) * grid.n_per_unit();
  diagonal_ = 2.0 * grid.dim() * inv_h2_;
}

void NegLaplacian::apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const {
  out.resize(static_cast<Eigen::Index>(size_));
  const int m = m_;
  const Eigen::Index sy = m;
  const Eigen::Index sz = static_cast<Eigen::Index>(m) * m;
  const int nz = grid_.dim() == 3 ? m : 1;
  const double* x = in.data();
  double* y = out.data();
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < m; ++j) {
      const Eigen::Index row = k * sz + j * sy;
      for (int i = 0; i < m; ++i) {
        const Eigen::Index p = row + i;
        double nb = 0.0;
        if (i > 0) nb += x[p - 1];
        if (i + 1 < m) nb += x[p + 1];
        if (j > 0) nb += x[p - sy];
        if (j + 1 < m) nb += x[p + sy];
        if (grid_.dim() == 3) {
          if (k > 0) nb += x[p - sz];
          if (k + 1 < m) nb += x[p + sz];
        }
        y[p] = diagonal_ * x[p] - inv_h2_ * nb;
      }
    }
  }
}

LinearOperator NegLaplacian::as_operator(double scale) const {
  NegLaplacian self = *this;
  return {size_, [self, scale](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
            self.apply(in, out);
            if (scale != 1.0) out *= scale;
          }};
}

Eigen::VectorXd interior_vector(const ScalarField& f) {
  const Grid& g = f.grid();
  const int m = g.nodes_per_axis() - 2;
  Eigen::VectorXd x(static_cast<Eigen::Index>(g.interior_count()));
  const int nz = g.dim() == 3 ? m : 1;
  Eigen::Index p = 0;
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < m; ++i) x[p++] = f.at({i + 1, j + 1, g.dim() == 3 ? k + 1 : 0});
    }
  }
  return x;
}

ScalarField from_interior(const Grid& g, const Eigen::VectorXd& x, const ScalarField* boundary) {
  if (static_cast<std::size_t>(x.size()) != g.interior_count()) {
    throw std::invalid_argument("from_interior: vector size does not match interior count");
  }
  std::vector<double> out = boundary ? std::vector<double>(boundary->values().begin(),
                                                           boundary->values().end())
                                     : std::vector<double>(g.node_count(), 0.0);
  const int m = g.nodes_per_axis() - 2;
  const int nz = g.dim() == 3 ? m : 1;
  Eigen::Index p = 0;
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < m; ++i) out[g.flatten({i + 1, j + 1, g.dim() == 3 ? k + 1 : 0})] = x[p++];
    }
  }
  return ScalarField(g, std::move(out));
}

ScalarField apply_neg_laplacian(const ScalarField& v) {
  const Grid& g = v.grid();
  require_stencil(g);
  const double inv_h2 = static_cast<double>(g.n_per_unit()) * g.n_per_unit();
  std::vector<double> out(g.node_count(), 0.0);
  std::size_t stride[3] = {1, static_cast<std::size_t>(g.nodes_per_axis()), 0};
  stride[2] = stride[1] * stride[1];
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    const Index3 idx = g.unflatten(flat);
    if (g.is_boundary(idx)) continue;
    double acc = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      acc += 2.0 * v[flat] - v[flat - stride[a]] - v[flat + stride[a]];
    }
    out[flat] = acc * inv_h2;
  }
  return ScalarField(g, std::move(out));
}

CgResult conjugate_gradient(const LinearOperator& op, const Eigen::VectorXd& diag,
                            const Eigen::VectorXd& rhs, double tol, int max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("conjugate_gradient: tol must be positive");
  if (rhs.hasNaN()) throw std::invalid_argument("conjugate_gradient: NaN in right-hand side");
  CgResult res;
  res.x = Eigen::VectorXd::Zero(rhs.size());
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) return res;

  const Eigen::VectorXd inv_diag = diag.cwiseInverse();
  Eigen::VectorXd r = rhs;
  Eigen::VectorXd z = inv_diag.cwiseProduct(r);
  Eigen::VectorXd p = z;
  Eigen::VectorXd ap(rhs.size());
  double rz = r.dot(z);
  double rel = 1.0;
  int it = 0;
  // Iterate a little past the recursive residual target, then confirm with
  // the true residual; restart from the current iterate if drift spoiled it.
  for (int restart = 0; restart < 3; ++restart) {
    while (it < max_iter) {
      rel = r.norm() / bnorm;
      if (rel <= 0.5 * tol) break;
      op.apply(p, ap);
      const double pap = p.dot(ap);
      if (!(pap > 0.0)) break;
      const double alpha = rz / pap;
      res.x.noalias() += alpha * p;
      r.noalias() -= alpha * ap;
      z = inv_diag.cwiseProduct(r);
      const double rz_new = r.dot(z);
      p = z + (rz_new / rz) * p;
      rz = rz_new;
      ++it;
    }
    op.apply(res.x, ap);
    r = rhs - ap;
    rel = r.norm() / bnorm;
    if (rel <= tol || it >= max_iter) break;
    z = inv_diag.cwiseProduct(r);
    p = z;
    rz = r.dot(z);
  }
  res.iterations = it;
  res.relative_residual = rel;
  if (!(rel <= tol)) {
    char msg[128];
    std::snprintf(msg, sizeof msg,
                  "conjugate gradients did not converge: relative residual %.3e after %d iterations",
                  rel, it);
    throw SolverError(msg, rel, it);
  }
  return res;
}

ScalarField solve_dirichlet(const DirichletProblem& p, double tol, int max_iter) {
  const Grid& g = p.rhs.grid();
  if (!(p.boundary_values.grid() == g)) {
    throw std::invalid_argument("solve_dirichlet: rhs and boundary values live on different grids");
  }
  require_finite(p.rhs, "solve_dirichlet");
  require_finite(p.boundary_values, "solve_dirichlet");
  NegLaplacian lap(g);

  // Lift the boundary data: rhs_eff = rhs + (boundary neighbours)/h^2.
  std::vector<double> lifted(g.node_count(), 0.0);
  for (std::size_t flat = 0; flat < lifted.size(); ++flat) {
    if (g.is_boundary(g.unflatten(flat))) lifted[flat] = p.boundary_values[flat];
  }
  const ScalarField lift(g, std::move(lifted));
  Eigen::VectorXd rhs = interior_vector(p.rhs) - interior_vector(apply_neg_laplacian(lift));

  const Eigen::VectorXd diag = Eigen::VectorXd::Constant(rhs.size(), lap.diagonal());
  CgResult cg = conjugate_gradient(lap.as_operator(), diag, rhs, tol, max_iter);
  return from_interior(g, cg.x, &lift);
}

ScalarField solve_embedded_dirichlet(const EmbeddedDirichletProblem& p, double tol, int max_iter) {
  const Grid& g = p.grid;
  require_stencil(g);
  if (p.inside.size() != g.node_count() || !(p.rhs.grid() == g)) {
    throw std::invalid_argument("solve_embedded_dirichlet: mask or rhs does not match the grid");
  }
  require_finite(p.rhs, "solve_embedded_dirichlet");

  std::vector<long> unknown(g.node_count(), -1);
  std::vector<std::size_t> nodes;
  for (std::size_t flat = 0; flat < g.node_count(); ++flat) {
    if (!p.inside[flat]) continue;
    if (g.is_boundary(g.unflatten(flat))) {
      throw std::invalid_argument("solve_embedded_dirichlet: region touches the grid boundary");
    }
    unknown[flat] = static_cast<long>(nodes.size());
    nodes.push_back(flat);
  }
  const std::size_t n = nodes.size();
  const double inv_h2 = static_cast<double>(g.n_per_unit()) * g.n_per_unit();
  std::size_t stride[3] = {1, static_cast<std::size_t>(g.nodes_per_axis()), 0};
  stride[2] = stride[1] * stride[1];

  // Crossing lookup keyed by (node, arm).
  auto arm_key = [](std::size_t node, int axis, int side) {
    return node * 6 + static_cast<std::size_t>(2 * axis + (side > 0 ? 1 : 0));
  };
  std::unordered_map<std::size_t, const Crossing*> cut;
  for (const Crossing& c : p.crossings) {
    if (!(c.theta > 0.0 && c.theta <= 1.0 + 1e-12) || !std::isfinite(c.value)) {
      throw std::invalid_argument("solve_embedded_dirichlet: invalid crossing");
    }
    cut[arm_key(c.node, c.axis, c.side)] = &c;
  }

  // Per unknown: diagonal, neighbour indices, and rhs contribution.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
  std::vector<long> nbr(n * 2 * g.dim(), -1);
  constexpr double kMinTheta = 1e-6;
  for (std::size_t u = 0; u < n; ++u) {
    const std::size_t flat = nodes[u];
    rhs[static_cast<Eigen::Index>(u)] = p.rhs[flat];
    double d = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      for (int s : {-1, 1}) {
        const std::size_t other = s > 0 ? flat + stride[a] : flat - stride[a];
        const auto it = cut.find(arm_key(flat, a, s));
        if (it != cut.end()) {
          const double theta = std::max(it->second->theta, kMinTheta);
          d += inv_h2 / theta;
          rhs[static_cast<Eigen::Index>(u)] += inv_h2 / theta * it->second->value;
        } else if (unknown[other] >= 0) {
          d += inv_h2;
          nbr[u * 2 * g.dim() + 2 * a + (s > 0 ? 1 : 0)] = unknown[other];
        } else {
          throw std::invalid_argument("solve_embedded_dirichlet: stencil arm leaves the region "
                                      "without a crossing");
        }
      }
    }
    diag[static_cast<Eigen::Index>(u)] = d;
  }

  const int arms = 2 * g.dim();
  LinearOperator op{n, [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
                      y.resize(x.size());
                      for (std::size_t u = 0; u < n; ++u) {
                        double acc = diag[static_cast<Eigen::Index>(u)] * x[static_cast<Eigen::Index>(u)];
                        for (int r = 0; r < arms; ++r) {
                          const long v = nbr[u * arms + r];
                          if (v >= 0) acc -= inv_h2 * x[v];
                        }
                        y[static_cast<Eigen::Index>(u)] = acc;
                      }
                    }};
  CgResult cg = conjugate_gradient(op, diag, rhs, tol, max_iter);
  std::vector<double> out(g.node_count(), 0.0);
  for (std::size_t u = 0; u < n; ++u) out[nodes[u]] = cg.x[static_cast<Eigen::Index>(u)];
  return ScalarField(g, std::move(out));
}

}  // namespace demagkit
