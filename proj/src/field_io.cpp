#include "demagkit/field_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace demagkit {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
T header_value(const std::string& token, const std::string& key) {
  const std::string prefix = key + "=";
  if (token.rfind(prefix, 0) != 0) {
    throw std::runtime_error("field file: expected " + prefix + " in header, got '" + token + "'");
  }
  std::istringstream in(token.substr(prefix.size()));
  T value{};
  if (!(in >> value)) throw std::runtime_error("field file: bad value for " + key);
  return value;
}

}  // namespace

void write_field(std::ostream& out, const ScalarField& f) {
  const Grid& g = f.grid();
  out << "demagkit-field v1 dim=" << g.dim() << " R=" << format_double(g.half_width())
      << " n_per_unit=" << g.n_per_unit() << '\n';
  for (double v : f.values()) out << format_double(v) << '\n';
}

ScalarField read_field(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("field file: missing header");
  std::istringstream header(line);
  std::string magic, version, dim_tok, r_tok, n_tok;
  header >> magic >> version >> dim_tok >> r_tok >> n_tok;
  if (magic != "demagkit-field" || version != "v1") {
    throw std::runtime_error("field file: unrecognized header '" + line + "'");
  }
  Grid g(header_value<int>(dim_tok, "dim"), header_value<double>(r_tok, "R"),
         header_value<int>(n_tok, "n_per_unit"));
  std::vector<double> values;
  values.reserve(g.node_count());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    values.push_back(std::stod(line));
  }
  if (values.size() != g.node_count()) {
    throw std::runtime_error("field file: expected " + std::to_string(g.node_count()) +
                             " values, found " + std::to_string(values.size()));
  }
  return ScalarField(g, std::move(values));
}

void save_field(const std::string& path, const ScalarField& f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_field(out, f);
}

ScalarField load_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_field(in);
}

}  // namespace demagkit
