#pragma once

#include <iosfwd>
#include <string>

#include "demagkit/grid.hpp"

namespace demagkit {

// Text format: header `demagkit-field v1 dim=<d> R=<R> n_per_unit=<n>`,
// then one value per line (17 significant digits) in flattened order.
void write_field(std::ostream& out, const ScalarField& f);
ScalarField read_field(std::istream& in);

void save_field(const std::string& path, const ScalarField& f);
ScalarField load_field(const std::string& path);

}  // namespace demagkit
