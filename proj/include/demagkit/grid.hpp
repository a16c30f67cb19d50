#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace demagkit {

/// Raised when a grid cannot support the requested stencil or lattice.
class SizingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Spatial point. Components beyond the grid dimension are zero.
using Point = std::array<double, 3>;
using Index3 = std::array<int, 3>;

/// Node-centred lattice on the box [-R, R]^dim with spacing 1/n_per_unit.
///
/// Nodes are flattened with axis 0 fastest. Coordinates are computed as
/// (i - c) / n so that the extreme nodes land exactly on +-R.
class Grid {
 public:
  Grid(int dim, double half_width, int n_per_unit);

  int dim() const { return dim_; }
  double half_width() const { return half_width_; }
  int n_per_unit() const { return n_per_unit_; }
  double spacing() const { return 1.0 / n_per_unit_; }
  int nodes_per_axis() const { return nodes_per_axis_; }
  /// Index of the node at coordinate zero on every axis.
  int center_index() const { return half_cells_; }
  std::size_t node_count() const { return node_count_; }
  std::size_t interior_count() const;

  double coordinate(int i) const {
    return static_cast<double>(i - half_cells_) / n_per_unit_;
  }
  Point position(std::size_t flat) const;
  Point position(const Index3& idx) const;

  std::size_t flatten(const Index3& idx) const {
    std::size_t m = static_cast<std::size_t>(nodes_per_axis_);
    return static_cast<std::size_t>(idx[0]) +
           m * (static_cast<std::size_t>(idx[1]) + m * static_cast<std::size_t>(idx[2]));
  }
  Index3 unflatten(std::size_t flat) const;
  bool is_boundary(const Index3& idx) const;

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.dim_ == b.dim_ && a.half_cells_ == b.half_cells_ && a.n_per_unit_ == b.n_per_unit_;
  }

 private:
  int dim_;
  double half_width_;
  int n_per_unit_;
  int half_cells_;
  int nodes_per_axis_;
  std::size_t node_count_;
};

/// Centred sub-box K_r identified by its half width. The edges need not fall
/// on nodes: norms weight each node by its dual cell clipped to the box.
struct Subdomain {
  double half_width;
};

/// Inclusive per-axis index range of a centred sub-box on `grid`.
struct IndexBox {
  int lo;
  int hi;
};
IndexBox index_box(const Grid& grid, const Subdomain& s);

class ScalarField {
 public:
  ScalarField(Grid grid, std::vector<double> values);
  static ScalarField zeros(const Grid& grid);
  static ScalarField sample(const Grid& grid, const std::function<double(const Point&)>& fn);

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t flat) const { return values_[flat]; }
  double at(const Index3& idx) const { return values_[grid_.flatten(idx)]; }

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// dim components per node, stored component-blocked: comps[c * N + node].
class VectorField {
 public:
  VectorField(Grid grid, std::vector<double> components);
  static VectorField sample(const Grid& grid, const std::function<Point(const Point&)>& fn);

  const Grid& grid() const { return grid_; }
  std::span<const double> component(int c) const;
  std::span<const double> data() const { return components_; }
  Point at(std::size_t flat) const;

 private:
  Grid grid_;
  std::vector<double> components_;
};

/// F = -div M. Central differences inside, second-order one-sided on the outer layer.
ScalarField divergence(const VectorField& m);

/// Second-order finite-difference gradient (one-sided on the outer layer).
VectorField gradient(const ScalarField& u);

/// Copy of f on the nodes of s; the result grid spans the outermost nodes inside s.
ScalarField restrict_to(const ScalarField& f, const Subdomain& s);

/// Copies `f` into the larger lattice `target`, zero elsewhere.
ScalarField embed_zero(const ScalarField& f, const Grid& target);

/// L2 norm over the centred sub-box s (trapezoidal when s is node-aligned).
double l2_norm(const ScalarField& f, const Subdomain& s);

/// Weighted mean over the centred sub-box s, same weights as l2_norm.
double mean(const ScalarField& f, const Subdomain& s);

ScalarField remove_mean(const ScalarField& f, const Subdomain& s);

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double c, const ScalarField& f);
VectorField operator*(double c, const VectorField& f);

}  // namespace demagkit
