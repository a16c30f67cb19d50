#include "demagkit/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>

#include "demagkit/laplace.hpp"

namespace demagkit {

std::string to_string(TRule rule) {
  switch (rule) {
    case TRule::explicit_T:
      return "explicit";
    case TRule::periodic_optimal:
      return "periodic-optimal";
    case TRule::highfreq_optimal:
      return "highfreq-optimal";
  }
  return "explicit";
}

TRule parse_t_rule(const std::string& name) {
  if (name == "explicit") return TRule::explicit_T;
  if (name == "periodic-optimal") return TRule::periodic_optimal;
  if (name == "highfreq-optimal") return TRule::highfreq_optimal;
  throw std::invalid_argument("unknown T_rule '" + name +
                              "' (expected explicit, periodic-optimal or highfreq-optimal)");
}

void SolverConfig::validate() const {
  if (dim != 2 && dim != 3) throw std::invalid_argument("dim must be 2 or 3");
  if (n_per_unit < 1) throw std::invalid_argument("n_per_unit must be positive");
  if (!(omega_half_width > 0.0)) throw std::invalid_argument("omega_half_width must be positive");
  if (!(R > 1.0) || !(R > omega_half_width)) {
    throw std::invalid_argument("R must exceed 1 and the half width of Omega");
  }
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (!(cg_tol > 0.0)) throw std::invalid_argument("cg_tol must be positive");
  if (cg_max_iter < 1) throw std::invalid_argument("cg_max_iter must be positive");
  if (!(c_d > 0.0)) throw std::invalid_argument("c_d must be positive");
  if (!(lambda1 > 0.0)) throw std::invalid_argument("lambda1 must be positive");
  if (ngp < 0) throw std::invalid_argument("ngp must be non-negative");
  if (T_rule == TRule::explicit_T && !(T >= 0.0 && std::isfinite(T))) {
    throw std::invalid_argument("T must be a non-negative number");
  }
  if (T_rule == TRule::highfreq_optimal && !(omega0 && *omega0 > 0.0)) {
    throw std::invalid_argument("highfreq-optimal T_rule needs a positive omega0");
  }
  // Throws SizingError, itself an invalid_argument.
  outer_grid();
}

double SolverConfig::effective_T() const {
  switch (T_rule) {
    case TRule::periodic_optimal:
      return (R - 1.0) / (2.0 * std::sqrt(lambda1));
    case TRule::highfreq_optimal:
      return std::abs(R - 1.0) * std::sqrt(c_d) / *omega0;
    case TRule::explicit_T:
      break;
  }
  return T;
}

Grid SolverConfig::omega_grid() const { return Grid(dim, omega_half_width, n_per_unit); }
Grid SolverConfig::outer_grid() const { return Grid(dim, R, n_per_unit); }

QuadratureRule SolverConfig::quadrature() const {
  if (ngp == 0) return default_rule(dim);
  if (dim == 2) return gauss_legendre_rule(ngp);
  if (ngp == 7) return triangle_rule_7();
  const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(ngp))));
  if (n * n != ngp) throw std::invalid_argument("3D ngp must be 7 or a perfect square");
  return collapsed_gauss_rule(n);
}

KrylovOptions SolverConfig::krylov() const {
  KrylovOptions opts;
  opts.max_dim = k;
  opts.mode = krylov_mode;
  return opts;
}

ScalarField solve_regularized(const ScalarField& F, const SolverConfig& cfg) {
  cfg.validate();
  if (F.grid().dim() != cfg.dim || F.grid().n_per_unit() != cfg.n_per_unit) {
    throw std::invalid_argument("solve_regularized: F does not live on the configured lattice");
  }
  const Grid outer = cfg.outer_grid();
  const ScalarField f = embed_zero(F, outer);
  const ScalarField rhs = f - expm_action(cfg.effective_T(), f, cfg.krylov());
  return solve_dirichlet({rhs, ScalarField::zeros(outer)}, cfg.cg_tol, cfg.cg_max_iter);
}

ScalarField solve_boundary_term(const VectorField& M, const BoundaryMesh& mesh,
                                const SolverConfig& cfg) {
  const Grid& g = M.grid();
  const QuadratureRule rule = cfg.quadrature();
  std::vector<double> data(g.node_count(), 0.0);
  for (std::size_t flat = 0; flat < g.node_count(); ++flat) {
    if (g.is_boundary(g.unflatten(flat))) {
      data[flat] = single_layer_potential(g.position(flat), mesh, rule);
    }
  }
  return solve_dirichlet({ScalarField::zeros(g), ScalarField(g, std::move(data))}, cfg.cg_tol,
                         cfg.cg_max_iter);
}

ScalarField demag_potential(const VectorField& M, const SolverConfig& cfg) {
  cfg.validate();
  cfg.omega_grid();
  if (!(M.grid() == cfg.omega_grid())) {
    throw std::invalid_argument("demag_potential: M must be sampled on the Omega grid");
  }
  const ScalarField F = divergence(M);
  // The two parts are independent; the volume solve runs on a worker thread.
  auto volume = std::async(std::launch::async, [&] { return solve_regularized(F, cfg); });
  const BoundaryMesh mesh = box_boundary_mesh(M, Subdomain{cfg.omega_half_width});
  const ScalarField b = solve_boundary_term(M, mesh, cfg);
  const ScalarField v = volume.get();
  return restrict_to(v, Subdomain{cfg.omega_half_width}) + b;
}

VectorField demag_field(const VectorField& M, const SolverConfig& cfg) {
  return -1.0 * gradient(demag_potential(M, cfg));
}

namespace {

struct CircleCut {
  std::vector<Crossing> crossings;
  std::vector<Point> points;  // parallel to crossings
};

CircleCut cut_circle(const Grid& g, const std::vector<char>& inside, double radius) {
  CircleCut cut;
  const double h = g.spacing();
  std::size_t stride[2] = {1, static_cast<std::size_t>(g.nodes_per_axis())};
  for (std::size_t flat = 0; flat < g.node_count(); ++flat) {
    if (!inside[flat]) continue;
    const Point p = g.position(flat);
    for (int a = 0; a < 2; ++a) {
      const double other = p[1 - a];
      const double reach = std::sqrt(std::max(0.0, radius * radius - other * other));
      for (int s : {-1, 1}) {
        const std::size_t nb = s > 0 ? flat + stride[a] : flat - stride[a];
        if (inside[nb]) continue;
        const double x = s * reach;
        const double theta = std::clamp(s * (x - p[a]) / h, 1e-12, 1.0);
        Point q = p;
        q[a] = x;
        cut.crossings.push_back({flat, a, s, theta, 0.0});
        cut.points.push_back(q);
      }
    }
  }
  return cut;
}

}  // namespace

DiskSolution solve_disk(double radius, const std::function<Point(const Point&)>& M,
                        const SolverConfig& cfg_in) {
  if (cfg_in.dim != 2) throw std::invalid_argument("solve_disk: the disk problem is 2D");
  if (!(radius > 0.0)) throw std::invalid_argument("solve_disk: radius must be positive");
  SolverConfig cfg = cfg_in;
  const int n = cfg.n_per_unit;
  cfg.omega_half_width = (std::ceil(radius * n - 1e-9) + 1.0) / n;
  cfg.validate();

  const Grid g = cfg.omega_grid();
  std::vector<char> inside(g.node_count(), 0);
  for (std::size_t flat = 0; flat < g.node_count(); ++flat) {
    const Point p = g.position(flat);
    inside[flat] = p[0] * p[0] + p[1] * p[1] < radius * radius;
  }

  // Volume part: F = -div M inside the disk.
  const ScalarField div = divergence(VectorField::sample(g, M));
  std::vector<double> f(g.node_count(), 0.0);
  for (std::size_t flat = 0; flat < f.size(); ++flat) f[flat] = inside[flat] ? div[flat] : 0.0;
  const ScalarField F(g, std::move(f));
  auto volume = std::async(std::launch::async, [&] { return solve_regularized(F, cfg); });

  // Boundary part: polygon through the grid-line crossings so that every
  // Dirichlet sample sits on a panel vertex.
  CircleCut cut = cut_circle(g, inside, radius);
  std::vector<std::pair<double, Point>> ring;
  for (const Point& q : cut.points) ring.push_back({std::atan2(q[1], q[0]), q});
  std::sort(ring.begin(), ring.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Point> vertices;
  for (const auto& [angle, q] : ring) {
    if (!vertices.empty() && std::hypot(q[0] - vertices.back()[0], q[1] - vertices.back()[1]) <
                                 1e-12 * radius) {
      continue;
    }
    vertices.push_back(q);
  }
  if (vertices.size() > 1 &&
      std::hypot(vertices.front()[0] - vertices.back()[0], vertices.front()[1] - vertices.back()[1]) <
          1e-12 * radius) {
    vertices.pop_back();
  }
  BoundaryMesh mesh = polygon_mesh(vertices, [&](const Point& mid, const Point& normal) {
    const Point m = M(mid);
    return m[0] * normal[0] + m[1] * normal[1];
  });
  const QuadratureRule rule = cfg.quadrature();
  for (std::size_t c = 0; c < cut.crossings.size(); ++c) {
    cut.crossings[c].value = single_layer_potential(cut.points[c], mesh, rule);
  }
  const ScalarField b = solve_embedded_dirichlet(
      {g, inside, ScalarField::zeros(g), std::move(cut.crossings)}, cfg.cg_tol, cfg.cg_max_iter);

  const ScalarField v = restrict_to(volume.get(), Subdomain{cfg.omega_half_width});
  std::vector<double> u(g.node_count(), 0.0);
  for (std::size_t flat = 0; flat < u.size(); ++flat) {
    if (inside[flat]) u[flat] = v[flat] + b[flat];
  }

  std::vector<char> stencil_inside(g.node_count(), 0);
  const std::size_t m = static_cast<std::size_t>(g.nodes_per_axis());
  for (std::size_t flat = 0; flat < u.size(); ++flat) {
    if (!inside[flat]) continue;
    const Index3 idx = g.unflatten(flat);
    if (g.is_boundary(idx)) continue;
    stencil_inside[flat] = inside[flat - 1] && inside[flat + 1] && inside[flat - m] && inside[flat + m];
  }
  return {ScalarField(g, std::move(u)), std::move(inside), std::move(stencil_inside),
          std::move(mesh)};
}

}  // namespace demagkit
