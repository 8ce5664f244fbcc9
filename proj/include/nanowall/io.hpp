#ifndef NANOWALL_IO_HPP
#define NANOWALL_IO_HPP

#include <string>

#include "nanowall/grid.hpp"

namespace nanowall {

// Shortest representation with 17 significant digits (round-trips a double).
std::string fmt17(double x);

// Snapshot text format: one header line
//   # nanowall-snapshot v1 n=<n> x_max=<x_max>
// then one line per node "x u1 u2 u3", 17 significant digits, LF endings.
void write_snapshot(const std::string& path, const VectorField3& u);
VectorField3 read_snapshot(const std::string& path);

}  // namespace nanowall

#endif
