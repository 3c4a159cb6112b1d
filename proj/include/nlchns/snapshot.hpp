#pragma once

#include <string>

#include "nlchns/field.hpp"

namespace nlchns {

// Raw snapshot format, shared repo-wide: 32-byte little-endian header
// (magic "NLCHNS01", u32 nx, u32 ny, f64 lx, f64 ly) followed by row-major
// 64-bit IEEE-754 cell values.

void write_snapshot(const std::string& path, const ScalarField& f);
ScalarField read_snapshot(const std::string& path);

}  // namespace nlchns
