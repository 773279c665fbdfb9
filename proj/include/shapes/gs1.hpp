#pragma once

#include <iosfwd>
#include <string>

#include "shapes/grid.hpp"

namespace shapes {

// "GS1" shape text format.
//
//   GS1 <dim> <spacing> <origin_0> ... <origin_{dim-1}>
//   <i> [j] [k]          one line per cell, lexicographically sorted
//
// Emission is deterministic; reals are printed with 17 significant digits so
// the round trip is value-exact.
std::string write_gs1(const GridShape& s);
void write_gs1(std::ostream& os, const GridShape& s);

// Throws ParseError (with 1-based line number) on malformed input.
GridShape read_gs1(std::istream& is);
GridShape read_gs1_string(const std::string& text);
GridShape read_gs1_file(const std::string& path);
void write_gs1_file(const std::string& path, const GridShape& s);

}  // namespace shapes
