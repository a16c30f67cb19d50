#include "demagkit/spectral.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace demagkit {

Point Spectrum::frequency(std::size_t flat) const {
  const std::size_t m = frequencies.size();
  Point w{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) {
    w[a] = frequencies[flat % m];
    flat /= m;
  }
  return w;
}

Spectrum dft_magnitude(const ScalarField& F, double freq_extent, double freq_resolution) {
  if (!(freq_resolution > 0.0) || !(freq_extent >= 0.0) || !std::isfinite(freq_extent)) {
    throw std::invalid_argument("dft_magnitude: empty frequency lattice");
  }
  const Grid& g = F.grid();
  const int dim = g.dim();
  const long K = static_cast<long>(std::floor(freq_extent / freq_resolution + 1e-9));

  Spectrum s;
  s.dim = dim;
  for (long k = -K; k <= K; ++k) s.frequencies.push_back(static_cast<double>(k) * freq_resolution);
  const std::size_t nw = s.frequencies.size();
  const std::size_t m = static_cast<std::size_t>(g.nodes_per_axis());

  // Trapezoid-weighted 1D kernel E[w][j] = w_j h exp(-i w x_j).
  std::vector<std::complex<double>> E(nw * m);
  for (std::size_t a = 0; a < nw; ++a) {
    for (std::size_t j = 0; j < m; ++j) {
      const double wt = (j == 0 || j + 1 == m) ? 0.5 : 1.0;
      const double phase = -s.frequencies[a] * g.coordinate(static_cast<int>(j));
      E[a * m + j] = wt * g.spacing() * std::polar(1.0, phase);
    }
  }

  // Contract one axis at a time; `shape` tracks the current extents.
  std::vector<std::complex<double>> cur(F.values().begin(), F.values().end());
  std::size_t shape[3] = {m, m, dim == 3 ? m : 1};
  for (int axis = 0; axis < dim; ++axis) {
    std::size_t new_shape[3] = {shape[0], shape[1], shape[2]};
    new_shape[axis] = nw;
    std::vector<std::complex<double>> next(new_shape[0] * new_shape[1] * new_shape[2]);
    for (std::size_t k = 0; k < new_shape[2]; ++k) {
      for (std::size_t j = 0; j < new_shape[1]; ++j) {
        for (std::size_t i = 0; i < new_shape[0]; ++i) {
          const std::size_t out_idx[3] = {i, j, k};
          std::size_t src[3] = {i, j, k};
          std::complex<double> acc = 0.0;
          for (std::size_t q = 0; q < m; ++q) {
            src[axis] = q;
            acc += E[out_idx[axis] * m + q] * cur[src[0] + shape[0] * (src[1] + shape[1] * src[2])];
          }
          next[i + new_shape[0] * (j + new_shape[1] * k)] = acc;
        }
      }
    }
    cur.swap(next);
    for (int a = 0; a < 3; ++a) shape[a] = new_shape[a];
  }
  s.magnitude.resize(cur.size());
  for (std::size_t i = 0; i < cur.size(); ++i) s.magnitude[i] = std::abs(cur[i]);
  return s;
}

double estimate_gap(const Spectrum& s, double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("estimate_gap: threshold must be positive");
  double peak = 0.0;
  double lattice_radius = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    peak = std::max(peak, s.magnitude[i]);
    const Point w = s.frequency(i);
    lattice_radius = std::max(lattice_radius, std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]));
  }
  if (peak == 0.0) return lattice_radius;
  double gap = lattice_radius;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.magnitude[i] < threshold * peak) continue;
    const Point w = s.frequency(i);
    gap = std::min(gap, std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]));
  }
  return gap;
}

void write_spectrum_csv(std::ostream& out, const Spectrum& s) {
  for (int a = 0; a < s.dim; ++a) out << "omega_" << a + 1 << ',';
  out << "magnitude\n";
  char buf[32];
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Point w = s.frequency(i);
    for (int a = 0; a < s.dim; ++a) {
      std::snprintf(buf, sizeof buf, "%.17g", w[a]);
      out << buf << ',';
    }
    std::snprintf(buf, sizeof buf, "%.17g", s.magnitude[i]);
    out << buf << '\n';
  }
}

}  // namespace demagkit
