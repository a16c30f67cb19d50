#include "demagkit/oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "demagkit/laplace.hpp"

namespace demagkit {

namespace {

constexpr double kPi = std::numbers::pi;

// Antiderivative of ln(s^2 + t^2) over [0,a]x[0,b].
double corner2(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  return a * b * (std::log(a * a + b * b) - 3.0) + a * a * std::atan(b / a) +
         b * b * std::atan(a / b);
}

double primitive3(double x, double y, double z) {
  const double r = std::sqrt(x * x + y * y + z * z);
  double t = 0.0;
  if (x * y != 0.0) t += x * y * std::log(z + r);
  if (y * z != 0.0) t += y * z * std::log(x + r);
  if (z * x != 0.0) t += z * x * std::log(y + r);
  if (x != 0.0) t -= 0.5 * x * x * std::atan(y * z / (x * r));
  if (y != 0.0) t -= 0.5 * y * y * std::atan(z * x / (y * r));
  if (z != 0.0) t -= 0.5 * z * z * std::atan(x * y / (z * r));
  return t;
}

// Integral of 1/|y| over [0,a]x[0,b]x[0,c].
double corner3(double a, double b, double c) {
  if (a == 0.0 || b == 0.0 || c == 0.0) return 0.0;
  double s = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) {
        const double sign = ((i + j + k) % 2 == 0) ? 1.0 : -1.0;
        s += sign * primitive3(i ? 0.0 : a, j ? 0.0 : b, k ? 0.0 : c);
      }
    }
  }
  return s;
}

double sgn(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

double box_green_integral(int dim, const Point& x, const Point& lo, const Point& hi) {
  // Split the box at x into orthants; each integrand is even in every axis.
  double sum = 0.0;
  if (dim == 2) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const double e0 = (i ? hi[0] : lo[0]) - x[0], e1 = (j ? hi[1] : lo[1]) - x[1];
        const double s = (i ? 1.0 : -1.0) * (j ? 1.0 : -1.0);
        sum += s * sgn(e0) * sgn(e1) * corner2(std::abs(e0), std::abs(e1));
      }
    }
    // ln|y| = (1/2) ln(s^2 + t^2).
    return -sum / (4.0 * kPi);
  }
  if (dim != 3) throw std::invalid_argument("box_green_integral: dimension must be 2 or 3");
  const double lo0 = lo[0] - x[0], hi0 = hi[0] - x[0];
  const double lo1 = lo[1] - x[1], hi1 = hi[1] - x[1];
  const double lo2 = lo[2] - x[2], hi2 = hi[2] - x[2];
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) {
        const double e0 = i ? hi0 : lo0, e1 = j ? hi1 : lo1, e2 = k ? hi2 : lo2;
        const double s = (i ? 1.0 : -1.0) * (j ? 1.0 : -1.0) * (k ? 1.0 : -1.0);
        sum += s * sgn(e0) * sgn(e1) * sgn(e2) * corner3(std::abs(e0), std::abs(e1), std::abs(e2));
      }
    }
  }
  return sum / (4.0 * kPi);
}

double volume_integral_potential(const ScalarField& F, const Point& x) {
  const Grid& g = F.grid();
  const int dim = g.dim();
  const double h = g.spacing();
  const double cell = std::pow(h, dim);
  double sum = 0.0;
  for (std::size_t j = 0; j < g.node_count(); ++j) {
    const double f = F[j];
    if (f == 0.0) continue;
    const Point y = g.position(j);
    bool inside = true;
    for (int a = 0; a < dim; ++a) inside = inside && std::abs(x[a] - y[a]) < 0.5 * h;
    if (inside) {
      Point lo{}, hi{};
      for (int a = 0; a < dim; ++a) {
        lo[a] = y[a] - 0.5 * h;
        hi[a] = y[a] + 0.5 * h;
      }
      sum += f * box_green_integral(dim, x, lo, hi);
    } else {
      sum += f * cell * green(dim, x, y);
    }
  }
  return sum;
}

double integral_representation_potential(const ScalarField& F, const BoundaryMesh& mesh,
                                         const Point& x, const QuadratureRule& rule) {
  return volume_integral_potential(F, x) + single_layer_potential(x, mesh, rule);
}

double integral_representation_potential(const VectorField& M, const BoundaryMesh& mesh,
                                         const Point& x) {
  return integral_representation_potential(divergence(M), mesh, x, default_rule(mesh.dim()));
}

ScalarField truncated_dirichlet_solve(const ScalarField& F, double R, double cg_tol) {
  const Grid outer(F.grid().dim(), R, F.grid().n_per_unit());
  const ScalarField rhs = embed_zero(F, outer);
  return solve_dirichlet({rhs, ScalarField::zeros(outer)}, cg_tol);
}

ScalarField heat_integrate(const ScalarField& F, double R, const HeatConfig& hc, double cg_tol) {
  if (!(hc.dt > 0.0) || !(hc.dt <= hc.T)) {
    throw std::invalid_argument("heat_integrate: need 0 < dt <= T");
  }
  const Grid outer(F.grid().dim(), R, F.grid().n_per_unit());
  const NegLaplacian lap(outer);
  Eigen::VectorXd v = interior_vector(embed_zero(F, outer));
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(v.size());

  const long steps = std::max(1L, std::lround(std::ceil(hc.T / hc.dt - 1e-9)));
  double t = 0.0;
  for (long s = 0; s < steps; ++s) {
    const double dt = std::min(hc.dt, hc.T - t);
    LinearOperator op{lap.size(), [&lap, dt](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
                        lap.apply(in, out);
                        out = in + dt * out;
                      }};
    const Eigen::VectorXd diag = Eigen::VectorXd::Constant(v.size(), 1.0 + dt * lap.diagonal());
    Eigen::VectorXd next = conjugate_gradient(op, diag, v, cg_tol, 100000).x;
    acc += 0.5 * dt * (v + next);
    v.swap(next);
    t += dt;
  }
  return from_interior(outer, acc);
}

}  // namespace demagkit
