#include "demagkit/bem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace demagkit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxSubdivision = 4;
constexpr double kOnPanel = 1e-10;

Point sub(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Point add(const Point& a, const Point& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Point scale(double s, const Point& a) { return {s * a[0], s * a[1], s * a[2]}; }
double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm(const Point& a) { return std::sqrt(dot(a, a)); }
Point cross(const Point& a, const Point& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
Point midpoint(const Point& a, const Point& b) { return scale(0.5, add(a, b)); }

double segment_distance(const Point& x, const Point& a, const Point& b) {
  const Point e = sub(b, a);
  const double t = std::clamp(dot(sub(x, a), e) / dot(e, e), 0.0, 1.0);
  return norm(sub(x, add(a, scale(t, e))));
}

double quadrature(int dim, const Point& x, const std::array<Point, 3>& v,
                  const QuadratureRule& rule) {
  double sum = 0.0;
  if (dim == 2) {
    const Point e = sub(v[1], v[0]);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      sum += rule.weights[q] * green(2, x, add(v[0], scale(rule.points[q][0], e)));
    }
    return sum * norm(e);
  }
  const Point ez = sub(v[1], v[0]);
  const Point ew = sub(v[2], v[0]);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Point y = add(v[0], add(scale(rule.points[q][0], ez), scale(rule.points[q][1], ew)));
    sum += rule.weights[q] * green(3, x, y);
  }
  return sum * norm(cross(ez, ew));
}

double integrate_adaptive(int dim, const Point& x, const std::array<Point, 3>& v,
                          const QuadratureRule& rule, int depth) {
  Panel p;
  p.vertices = v;
  const double diam = panel_diameter(dim, p);
  const double dist = norm(sub(x, panel_centroid(dim, p)));
  if (dist >= diam || depth >= kMaxSubdivision) return quadrature(dim, x, v, rule);
  if (dim == 2) {
    const Point m = midpoint(v[0], v[1]);
    return integrate_adaptive(dim, x, {v[0], m, Point{}}, rule, depth + 1) +
           integrate_adaptive(dim, x, {m, v[1], Point{}}, rule, depth + 1);
  }
  const Point m01 = midpoint(v[0], v[1]);
  const Point m12 = midpoint(v[1], v[2]);
  const Point m20 = midpoint(v[2], v[0]);
  return integrate_adaptive(dim, x, {v[0], m01, m20}, rule, depth + 1) +
         integrate_adaptive(dim, x, {m01, v[1], m12}, rule, depth + 1) +
         integrate_adaptive(dim, x, {m20, m12, v[2]}, rule, depth + 1) +
         integrate_adaptive(dim, x, {m01, m12, m20}, rule, depth + 1);
}

double xlogx_term(double s) { return s > 0.0 ? s * (1.0 - std::log(s)) : 0.0; }

}  // namespace

double green(int dim, const Point& x, const Point& y) {
  const double r = norm(sub(x, y));
  if (r == 0.0) throw std::invalid_argument("green: kernel is singular at x = y");
  if (dim == 2) return -std::log(r) / (2.0 * kPi);
  if (dim == 3) return 1.0 / (4.0 * kPi * r);
  throw std::invalid_argument("green: dimension must be 2 or 3");
}

BoundaryMesh::BoundaryMesh(int dim, std::vector<Panel> panels)
    : dim_(dim), panels_(std::move(panels)) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("BoundaryMesh: dimension must be 2 or 3");
  for (const Panel& p : panels_) {
    if (std::abs(norm(p.normal) - 1.0) > 1e-12) {
      throw std::invalid_argument("BoundaryMesh: panel normal is not a unit vector");
    }
    if (!(panel_measure(dim, p) > 0.0)) {
      throw std::invalid_argument("BoundaryMesh: degenerate panel");
    }
    if (!std::isfinite(p.density)) throw std::invalid_argument("BoundaryMesh: non-finite density");
  }
}

QuadratureRule gauss_legendre_rule(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_rule: n must be positive");
  // Legendre P_n and its derivative by the three-term recurrence.
  auto legendre = [n](double x) {
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    return std::array<double, 2>{p1, n * (x * p1 - p0) / (x * x - 1.0)};
  };
  QuadratureRule rule;
  rule.element_dim = 1;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(x)[1];
    // Map [-1, 1] to [0, 1], nodes ascending.
    rule.points[n - 1 - i] = {0.5 * (x + 1.0), 0.0};
    rule.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

QuadratureRule triangle_rule_7() {
  const double s15 = std::sqrt(15.0);
  const double a1 = (6.0 - s15) / 21.0, b1 = (9.0 + 2.0 * s15) / 21.0;
  const double a2 = (6.0 + s15) / 21.0, b2 = (9.0 - 2.0 * s15) / 21.0;
  const double w1 = (155.0 - s15) / 2400.0, w2 = (155.0 + s15) / 2400.0;
  QuadratureRule rule;
  rule.element_dim = 2;
  rule.points = {{1.0 / 3.0, 1.0 / 3.0}, {a1, a1}, {a1, b1}, {b1, a1},
                 {a2, a2},               {a2, b2}, {b2, a2}};
  rule.weights = {9.0 / 80.0, w1, w1, w1, w2, w2, w2};
  return rule;
}

QuadratureRule collapsed_gauss_rule(int n) {
  const QuadratureRule g = gauss_legendre_rule(n);
  QuadratureRule rule;
  rule.element_dim = 2;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double u = g.points[i][0];
      const double v = g.points[j][0];
      rule.points.push_back({u, (1.0 - u) * v});
      rule.weights.push_back(g.weights[i] * g.weights[j] * (1.0 - u));
    }
  }
  return rule;
}

QuadratureRule default_rule(int dim) {
  return dim == 2 ? gauss_legendre_rule(4) : triangle_rule_7();
}

double panel_measure(int dim, const Panel& p) {
  const auto& v = p.vertices;
  if (dim == 2) return norm(sub(v[1], v[0]));
  return 0.5 * norm(cross(sub(v[1], v[0]), sub(v[2], v[0])));
}

double panel_diameter(int dim, const Panel& p) {
  const auto& v = p.vertices;
  if (dim == 2) return norm(sub(v[1], v[0]));
  return std::max({norm(sub(v[1], v[0])), norm(sub(v[2], v[1])), norm(sub(v[0], v[2]))});
}

Point panel_centroid(int dim, const Panel& p) {
  const auto& v = p.vertices;
  if (dim == 2) return midpoint(v[0], v[1]);
  return scale(1.0 / 3.0, add(v[0], add(v[1], v[2])));
}

double distance_to_panel(int dim, const Point& x, const Panel& p) {
  const auto& v = p.vertices;
  if (dim == 2) return segment_distance(x, v[0], v[1]);
  const Point e1 = sub(v[1], v[0]);
  const Point e2 = sub(v[2], v[0]);
  const Point n = cross(e1, e2);
  const double n2 = dot(n, n);
  const Point r = sub(x, v[0]);
  // Barycentric coordinates of the projection onto the panel plane.
  const double b1 = dot(cross(r, e2), n) / n2;
  const double b2 = dot(cross(e1, r), n) / n2;
  if (b1 >= 0.0 && b2 >= 0.0 && b1 + b2 <= 1.0) return std::abs(dot(r, n)) / std::sqrt(n2);
  return std::min({segment_distance(x, v[0], v[1]), segment_distance(x, v[1], v[2]),
                   segment_distance(x, v[2], v[0])});
}

double panel_integral_regular(int dim, const Point& x, const Panel& p, double g,
                              const QuadratureRule& rule) {
  if (g == 0.0) return 0.0;
  if (rule.element_dim != dim - 1) {
    throw std::invalid_argument("panel_integral_regular: rule does not match the panel type");
  }
  if (distance_to_panel(dim, x, p) <= 1e-12 * panel_diameter(dim, p)) {
    throw std::invalid_argument("panel_integral_regular: evaluation point lies on the panel");
  }
  return g * integrate_adaptive(dim, x, p.vertices, rule, 0);
}

double singular_triangle_integral(double l) {
  if (!(l > 0.0)) throw std::invalid_argument("singular_triangle_integral: l must be positive");
  const double s2 = std::sqrt(2.0);
  const double log_arg = s2 * std::log(std::sqrt(10.0) + 3.0) +
                         2.0 * std::log(std::sqrt(5.0) + 2.0) + 2.0 * std::log(s2 + 1.0);
  return l / (12.0 * kPi) * log_arg;
}

double singular_segment_integral(double L) {
  if (!(L > 0.0)) throw std::invalid_argument("singular_segment_integral: L must be positive");
  return L / (2.0 * kPi) * (1.0 - std::log(L / 2.0));
}

double self_panel_integral(int dim, const Point& x, const Panel& p) {
  const auto& v = p.vertices;
  if (dim == 2) {
    const Point e = sub(v[1], v[0]);
    const double len = norm(e);
    const double t = std::clamp(dot(sub(x, v[0]), e) / (len * len), 0.0, 1.0);
    return (xlogx_term(t * len) + xlogx_term((1.0 - t) * len)) / (2.0 * kPi);
  }
  // Split the panel into three triangles with apex at x; each is a polar
  // integral of the edge distance, sec-antiderivative in closed form.
  const Point e1 = scale(1.0 / norm(sub(v[1], v[0])), sub(v[1], v[0]));
  Point nrm = cross(sub(v[1], v[0]), sub(v[2], v[0]));
  nrm = scale(1.0 / norm(nrm), nrm);
  const Point e2 = cross(nrm, e1);
  auto local = [&](const Point& y) {
    const Point r = sub(y, v[0]);
    return std::array<double, 2>{dot(r, e1), dot(r, e2)};
  };
  const std::array<std::array<double, 2>, 3> P = {local(v[0]), local(v[1]), local(v[2])};
  const std::array<double, 2> X = local(x);
  const double diam = panel_diameter(dim, p);
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    const auto& A = P[i];
    const auto& B = P[(i + 1) % 3];
    const double ex = B[0] - A[0], ey = B[1] - A[1];
    const double len = std::hypot(ex, ey);
    const double tx = ex / len, ty = ey / len;
    // Inward normal of a counter-clockwise edge in the local frame.
    const double nx = -ty, ny = tx;
    const double d = (X[0] - A[0]) * nx + (X[1] - A[1]) * ny;
    if (std::abs(d) <= 1e-14 * diam) continue;
    const double sa = (A[0] - X[0]) * tx + (A[1] - X[1]) * ty;
    const double sb = (B[0] - X[0]) * tx + (B[1] - X[1]) * ty;
    const double ad = std::abs(d);
    sum += d * (std::asinh(sb / ad) - std::asinh(sa / ad));
  }
  return sum / (4.0 * kPi);
}

double single_layer_potential(const Point& x, const BoundaryMesh& mesh, const QuadratureRule& rule) {
  const int dim = mesh.dim();
  double sum = 0.0;
  for (const Panel& p : mesh.panels()) {
    if (p.density == 0.0) continue;
    if (distance_to_panel(dim, x, p) <= kOnPanel * panel_diameter(dim, p)) {
      sum += p.density * self_panel_integral(dim, x, p);
    } else {
      sum += panel_integral_regular(dim, x, p, p.density, rule);
    }
  }
  return sum;
}

BoundaryMesh box_boundary_mesh(const VectorField& M, const Subdomain& omega) {
  const Grid& g = M.grid();
  const IndexBox box = index_box(g, omega);
  const int dim = g.dim();
  auto m_at = [&](const Index3& idx) { return M.at(g.flatten(idx)); };
  std::vector<Panel> panels;

  if (dim == 2) {
    // Counter-clockwise walk of the boundary nodes.
    std::vector<Index3> ring;
    for (int i = box.lo; i < box.hi; ++i) ring.push_back({i, box.lo, 0});
    for (int j = box.lo; j < box.hi; ++j) ring.push_back({box.hi, j, 0});
    for (int i = box.hi; i > box.lo; --i) ring.push_back({i, box.hi, 0});
    for (int j = box.hi; j > box.lo; --j) ring.push_back({box.lo, j, 0});
    for (std::size_t s = 0; s < ring.size(); ++s) {
      const Index3& a = ring[s];
      const Index3& b = ring[(s + 1) % ring.size()];
      Panel p;
      p.vertices = {g.position(a), g.position(b), Point{}};
      const double ex = b[0] - a[0], ey = b[1] - a[1];
      p.normal = {ey, -ex, 0.0};
      const Point ma = m_at(a), mb = m_at(b);
      p.density = 0.5 * (dot(ma, p.normal) + dot(mb, p.normal));
      panels.push_back(p);
    }
    return BoundaryMesh(2, std::move(panels));
  }

  for (int axis = 0; axis < 3; ++axis) {
    const int u = (axis + 1) % 3;
    const int w = (axis + 2) % 3;
    for (int side : {-1, 1}) {
      Point normal{0.0, 0.0, 0.0};
      normal[axis] = side;
      for (int i = box.lo; i < box.hi; ++i) {
        for (int j = box.lo; j < box.hi; ++j) {
          auto corner = [&](int di, int dj) {
            Index3 idx{};
            idx[axis] = side > 0 ? box.hi : box.lo;
            idx[u] = i + di;
            idx[w] = j + dj;
            return idx;
          };
          const Index3 c00 = corner(0, 0), c10 = corner(1, 0), c11 = corner(1, 1), c01 = corner(0, 1);
          for (const auto& tri : {std::array<Index3, 3>{c00, c10, c11}, std::array<Index3, 3>{c00, c11, c01}}) {
            Panel p;
            p.vertices = {g.position(tri[0]), g.position(tri[1]), g.position(tri[2])};
            p.normal = normal;
            const Point mc = scale(1.0 / 3.0, add(m_at(tri[0]), add(m_at(tri[1]), m_at(tri[2]))));
            p.density = dot(mc, normal);
            panels.push_back(p);
          }
        }
      }
    }
  }
  return BoundaryMesh(3, std::move(panels));
}

BoundaryMesh polygon_mesh(const std::vector<Point>& vertices,
                          const std::function<double(const Point&, const Point&)>& density) {
  if (vertices.size() < 3) throw std::invalid_argument("polygon_mesh: need at least 3 vertices");
  std::vector<Panel> panels;
  panels.reserve(vertices.size());
  for (std::size_t s = 0; s < vertices.size(); ++s) {
    const Point& a = vertices[s];
    const Point& b = vertices[(s + 1) % vertices.size()];
    const Point e = sub(b, a);
    const double len = norm(e);
    Panel p;
    p.vertices = {a, b, Point{}};
    p.normal = {e[1] / len, -e[0] / len, 0.0};
    p.density = density(midpoint(a, b), p.normal);
    panels.push_back(p);
  }
  return BoundaryMesh(2, std::move(panels));
}

void write_mesh(std::ostream& out, const BoundaryMesh& mesh) {
  const int dim = mesh.dim();
  out << "demagkit-mesh v1 dim=" << dim << " panels=" << mesh.size() << '\n';
  char buf[32];
  auto put = [&](double v, bool last) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << (last ? '\n' : ' ');
  };
  for (const Panel& p : mesh.panels()) {
    for (int k = 0; k < dim; ++k) {
      for (int c = 0; c < dim; ++c) put(p.vertices[k][c], false);
    }
    for (int c = 0; c < dim; ++c) put(p.normal[c], false);
    put(p.density, true);
  }
}

BoundaryMesh read_mesh(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("mesh file: missing header");
  std::istringstream header(line);
  std::string magic, version, dim_tok, count_tok;
  header >> magic >> version >> dim_tok >> count_tok;
  if (magic != "demagkit-mesh" || version != "v1" || dim_tok.rfind("dim=", 0) != 0 ||
      count_tok.rfind("panels=", 0) != 0) {
    throw std::runtime_error("mesh file: unrecognized header '" + line + "'");
  }
  const int dim = std::stoi(dim_tok.substr(4));
  const long count = std::stol(count_tok.substr(7));
  if (dim != 2 && dim != 3) throw std::runtime_error("mesh file: bad dimension");
  std::vector<Panel> panels;
  for (long i = 0; i < count; ++i) {
    Panel p;
    for (int k = 0; k < dim; ++k) {
      for (int c = 0; c < dim; ++c) in >> p.vertices[k][c];
    }
    for (int c = 0; c < dim; ++c) in >> p.normal[c];
    in >> p.density;
    if (!in) throw std::runtime_error("mesh file: truncated panel list");
    panels.push_back(p);
  }
  return BoundaryMesh(dim, std::move(panels));
}

}  // namespace demagkit
