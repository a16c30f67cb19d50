#pragma once

#include <iosfwd>
#include <vector>

#include "demagkit/grid.hpp"

namespace demagkit {

/// |F^(w)| on the symmetric lattice w_k = k * resolution, |k| <= extent / resolution,
/// same on every axis, flattened with axis 0 fastest.
struct Spectrum {
  int dim = 2;
  std::vector<double> frequencies;
  std::vector<double> magnitude;

  std::size_t size() const { return magnitude.size(); }
  Point frequency(std::size_t flat) const;
};

/// Trapezoidal evaluation of F^(w) = int F(x) exp(-i w.x) dx (angular frequencies).
Spectrum dft_magnitude(const ScalarField& F, double freq_extent, double freq_resolution);

/// Smallest |w| on the lattice where |F^| reaches threshold * max|F^|; the
/// full lattice radius when the spectrum vanishes.
double estimate_gap(const Spectrum& s, double threshold);

/// Rows `omega_1,...,omega_d,magnitude`.
void write_spectrum_csv(std::ostream& out, const Spectrum& s);

}  // namespace demagkit
