#pragma once

// CSV dump of a nodal field: header "x[,y[,z]],u", one row per interior node
// in flat order (last axis fastest), 17 significant digits.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "nehari/errors.hpp"
#include "nehari/grid.hpp"

namespace nehari {

namespace detail {

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_header(int dim) {
  static const char* names[] = {"x", "y", "z"};
  std::string h;
  for (int i = 0; i < dim; ++i) {
    h += names[i];
    h += ',';
  }
  return h + "u";
}

}  // namespace detail

inline void write_field_csv(std::ostream& out, const Field& u) {
  const Grid& g = u.grid();
  out << detail::csv_header(g.dim()) << '\n';
  for (std::size_t k = 0; k < u.size(); ++k) {
    const auto x = g.position(k);
    for (int i = 0; i < g.dim(); ++i) out << detail::format_g17(x[i]) << ',';
    out << detail::format_g17(u[k]) << '\n';
  }
}

/// Reads a field written by write_field_csv back onto `grid`. Coordinates are
/// checked against the grid to 1e-9 relative.
inline Field read_field_csv(std::istream& in, const Grid& grid) {
  std::string line;
  if (!std::getline(in, line)) throw ContractError("empty field CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != detail::csv_header(grid.dim())) {
    throw ContractError("field CSV header '" + line + "' does not match a " + std::to_string(grid.dim()) +
                        "D grid");
  }
  std::vector<double> values;
  values.reserve(grid.node_count());
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    if (row >= grid.node_count()) throw ContractError("field CSV has more rows than grid nodes");
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> cols;
    while (std::getline(ss, cell, ',')) cols.push_back(std::stod(cell));
    if (static_cast<int>(cols.size()) != grid.dim() + 1) {
      throw ContractError("field CSV row " + std::to_string(row + 2) + " has the wrong column count");
    }
    const auto x = grid.position(row);
    for (int i = 0; i < grid.dim(); ++i) {
      if (std::abs(cols[i] - x[i]) > 1e-9 * std::max(1.0, grid.extent(i))) {
        throw ContractError("field CSV row " + std::to_string(row + 2) + " is off the grid");
      }
    }
    values.push_back(cols.back());
    ++row;
  }
  if (values.size() != grid.node_count()) throw ContractError("field CSV has fewer rows than grid nodes");
  return Field(grid, std::move(values));
}

}  // namespace nehari
