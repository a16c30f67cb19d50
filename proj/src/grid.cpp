#include "demagkit/grid.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace demagkit {

namespace {

int lattice_cells(double half_width, int n_per_unit, const char* what) {
  const double cells = half_width * n_per_unit;
  const double rounded = std::round(cells);
  if (!(half_width > 0.0) || std::abs(cells - rounded) > 1e-9 * std::max(1.0, cells)) {
    std::ostringstream msg;
    msg << what << ": half width " << half_width << " is not a positive multiple of 1/"
        << n_per_unit;
    throw SizingError(msg.str());
  }
  return static_cast<int>(rounded);
}

void require_stencil(const Grid& g, const char* op) {
  if (g.nodes_per_axis() < 3) {
    throw SizingError(std::string(op) + ": grid needs at least 3 nodes per axis");
  }
}

std::size_t stride(const Grid& g, int axis) {
  std::size_t s = 1;
  for (int a = 0; a < axis; ++a) s *= static_cast<std::size_t>(g.nodes_per_axis());
  return s;
}

// Second-order derivative of `values` along `axis` at node `flat`.
double axis_derivative(const Grid& g, std::span<const double> values, std::size_t flat,
                       const Index3& idx, int axis) {
  const std::size_t s = stride(g, axis);
  const int i = idx[axis];
  const int last = g.nodes_per_axis() - 1;
  const double inv2h = 0.5 * g.n_per_unit();
  if (i == 0) {
    return (-3.0 * values[flat] + 4.0 * values[flat + s] - values[flat + 2 * s]) * inv2h;
  }
  if (i == last) {
    return (3.0 * values[flat] - 4.0 * values[flat - s] + values[flat - 2 * s]) * inv2h;
  }
  return (values[flat + s] - values[flat - s]) * inv2h;
}

template <class F>
void for_each_in_box(const Grid& g, const IndexBox& box, F&& fn) {
  const int lo2 = g.dim() == 3 ? box.lo : 0;
  const int hi2 = g.dim() == 3 ? box.hi : 0;
  for (int k = lo2; k <= hi2; ++k) {
    for (int j = box.lo; j <= box.hi; ++j) {
      for (int i = box.lo; i <= box.hi; ++i) fn(Index3{i, j, k});
    }
  }
}

// Length of the node's dual cell clipped to [-r, r], in units of h. Reduces
// to trapezoidal weights when the box edges fall on nodes.
double cell_weight(const Grid& g, double r, const Index3& idx) {
  const double h = g.spacing();
  double w = 1.0;
  for (int a = 0; a < g.dim(); ++a) {
    const double x = g.coordinate(idx[a]);
    const double lo = std::max(x - 0.5 * h, -r);
    const double hi = std::min(x + 0.5 * h, r);
    w *= std::max(0.0, hi - lo) / h;
  }
  return w;
}

}  // namespace

Grid::Grid(int dim, double half_width, int n_per_unit)
    : dim_(dim), half_width_(half_width), n_per_unit_(n_per_unit) {
  if (dim != 2 && dim != 3) throw SizingError("Grid: dimension must be 2 or 3");
  if (n_per_unit <= 0) throw SizingError("Grid: n_per_unit must be positive");
  half_cells_ = lattice_cells(half_width, n_per_unit, "Grid");
  half_width_ = static_cast<double>(half_cells_) / n_per_unit_;
  nodes_per_axis_ = 2 * half_cells_ + 1;
  node_count_ = 1;
  for (int a = 0; a < dim_; ++a) node_count_ *= static_cast<std::size_t>(nodes_per_axis_);
}

std::size_t Grid::interior_count() const {
  std::size_t n = 1;
  for (int a = 0; a < dim_; ++a) n *= static_cast<std::size_t>(nodes_per_axis_ - 2);
  return n;
}

Index3 Grid::unflatten(std::size_t flat) const {
  const std::size_t m = static_cast<std::size_t>(nodes_per_axis_);
  Index3 idx{0, 0, 0};
  idx[0] = static_cast<int>(flat % m);
  flat /= m;
  idx[1] = static_cast<int>(flat % m);
  idx[2] = static_cast<int>(flat / m);
  return idx;
}

Point Grid::position(const Index3& idx) const {
  Point p{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) p[a] = coordinate(idx[a]);
  return p;
}

Point Grid::position(std::size_t flat) const { return position(unflatten(flat)); }

bool Grid::is_boundary(const Index3& idx) const {
  for (int a = 0; a < dim_; ++a) {
    if (idx[a] == 0 || idx[a] == nodes_per_axis_ - 1) return true;
  }
  return false;
}

IndexBox index_box(const Grid& grid, const Subdomain& s) {
  const double h = grid.spacing();
  if (!(s.half_width >= 0.0) || s.half_width > grid.half_width() + 0.5 * h + 1e-12) {
    throw SizingError("Subdomain: half width lies outside the grid box");
  }
  const int cells = std::min(grid.center_index(),
                             static_cast<int>(std::floor(s.half_width * grid.n_per_unit() + 1e-9)));
  return {grid.center_index() - cells, grid.center_index() + cells};
}

ScalarField::ScalarField(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.node_count()) {
    throw std::invalid_argument("ScalarField: value count does not match the grid");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("ScalarField: non-finite value");
  }
}

ScalarField ScalarField::zeros(const Grid& grid) {
  return ScalarField(grid, std::vector<double>(grid.node_count(), 0.0));
}

ScalarField ScalarField::sample(const Grid& grid, const std::function<double(const Point&)>& fn) {
  std::vector<double> v(grid.node_count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid.position(i));
  return ScalarField(grid, std::move(v));
}

VectorField::VectorField(Grid grid, std::vector<double> components)
    : grid_(std::move(grid)), components_(std::move(components)) {
  if (components_.size() != static_cast<std::size_t>(grid_.dim()) * grid_.node_count()) {
    throw std::invalid_argument("VectorField: component count does not match dim x nodes");
  }
  for (double v : components_) {
    if (!std::isfinite(v)) throw std::invalid_argument("VectorField: non-finite value");
  }
}

VectorField VectorField::sample(const Grid& grid, const std::function<Point(const Point&)>& fn) {
  const std::size_t n = grid.node_count();
  std::vector<double> c(static_cast<std::size_t>(grid.dim()) * n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point m = fn(grid.position(i));
    for (int a = 0; a < grid.dim(); ++a) c[a * n + i] = m[a];
  }
  return VectorField(grid, std::move(c));
}

std::span<const double> VectorField::component(int c) const {
  const std::size_t n = grid_.node_count();
  return std::span<const double>(components_).subspan(static_cast<std::size_t>(c) * n, n);
}

Point VectorField::at(std::size_t flat) const {
  Point p{0.0, 0.0, 0.0};
  const std::size_t n = grid_.node_count();
  for (int a = 0; a < grid_.dim(); ++a) p[a] = components_[a * n + flat];
  return p;
}

ScalarField divergence(const VectorField& m) {
  const Grid& g = m.grid();
  require_stencil(g, "divergence");
  std::vector<double> out(g.node_count(), 0.0);
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    const Index3 idx = g.unflatten(flat);
    double div = 0.0;
    for (int a = 0; a < g.dim(); ++a) div += axis_derivative(g, m.component(a), flat, idx, a);
    out[flat] = -div;
  }
  return ScalarField(g, std::move(out));
}

VectorField gradient(const ScalarField& u) {
  const Grid& g = u.grid();
  require_stencil(g, "gradient");
  const std::size_t n = g.node_count();
  std::vector<double> out(static_cast<std::size_t>(g.dim()) * n);
  for (std::size_t flat = 0; flat < n; ++flat) {
    const Index3 idx = g.unflatten(flat);
    for (int a = 0; a < g.dim(); ++a) out[a * n + flat] = axis_derivative(g, u.values(), flat, idx, a);
  }
  return VectorField(g, std::move(out));
}

ScalarField restrict_to(const ScalarField& f, const Subdomain& s) {
  const Grid& g = f.grid();
  const IndexBox box = index_box(g, s);
  const int cells = box.hi - g.center_index();
  if (cells < 1) throw SizingError("restrict_to: subdomain holds a single node");
  Grid sub(g.dim(), static_cast<double>(cells) / g.n_per_unit(), g.n_per_unit());
  std::vector<double> out;
  out.reserve(sub.node_count());
  for_each_in_box(g, box, [&](const Index3& idx) { out.push_back(f.at(idx)); });
  return ScalarField(sub, std::move(out));
}

ScalarField embed_zero(const ScalarField& f, const Grid& target) {
  const Grid& src = f.grid();
  if (src.dim() != target.dim() || src.n_per_unit() != target.n_per_unit()) {
    throw std::invalid_argument("embed_zero: source and target lattices are not aligned");
  }
  const IndexBox box = index_box(target, Subdomain{src.half_width()});
  std::vector<double> out(target.node_count(), 0.0);
  std::size_t k = 0;
  for_each_in_box(target, box, [&](const Index3& idx) { out[target.flatten(idx)] = f[k++]; });
  return ScalarField(target, std::move(out));
}

double l2_norm(const ScalarField& f, const Subdomain& s) {
  const Grid& g = f.grid();
  const IndexBox box = index_box(g, s);
  double sum = 0.0;
  for_each_in_box(g, box, [&](const Index3& idx) {
    const double v = f.at(idx);
    sum += cell_weight(g, s.half_width, idx) * v * v;
  });
  return std::sqrt(sum * std::pow(g.spacing(), g.dim()));
}

double mean(const ScalarField& f, const Subdomain& s) {
  const Grid& g = f.grid();
  const IndexBox box = index_box(g, s);
  double sum = 0.0;
  double wsum = 0.0;
  for_each_in_box(g, box, [&](const Index3& idx) {
    const double w = cell_weight(g, s.half_width, idx);
    sum += w * f.at(idx);
    wsum += w;
  });
  if (wsum == 0.0) return f.at({box.lo, box.lo, g.dim() == 3 ? box.lo : 0});
  return sum / wsum;
}

ScalarField remove_mean(const ScalarField& f, const Subdomain& s) {
  const double m = mean(f, s);
  std::vector<double> out(f.values().begin(), f.values().end());
  for (double& v : out) v -= m;
  return ScalarField(f.grid(), std::move(out));
}

namespace {
template <class Op>
ScalarField combine(const ScalarField& a, const ScalarField& b, Op op) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("field arithmetic: grids differ");
  std::vector<double> out(a.values().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(a[i], b[i]);
  return ScalarField(a.grid(), std::move(out));
}
}  // namespace

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  return combine(a, b, [](double x, double y) { return x + y; });
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  return combine(a, b, [](double x, double y) { return x - y; });
}

ScalarField operator*(double c, const ScalarField& f) {
  std::vector<double> out(f.values().begin(), f.values().end());
  for (double& v : out) v *= c;
  return ScalarField(f.grid(), std::move(out));
}

VectorField operator*(double c, const VectorField& f) {
  std::vector<double> out(f.data().begin(), f.data().end());
  for (double& v : out) v *= c;
  return VectorField(f.grid(), std::move(out));
}

}  // namespace demagkit
