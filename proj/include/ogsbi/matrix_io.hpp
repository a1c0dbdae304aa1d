// SPDX-License-Identifier: Apache-2.0
//
// Plain-text matrices: one row per sensor, real and imaginary parts
// interleaved (re0,im0,re1,im1,...), values printed to round-trip exactly.
#pragma once

#include <iosfwd>
#include <string>

#include "ogsbi/spectrum.hpp"

namespace ogsbi {

void write_snapshots_csv(const CMatrix& Y, std::ostream& os);
/// Throws std::runtime_error on ragged rows, odd column counts or bad numbers.
CMatrix read_snapshots_csv(std::istream& is);

void save_snapshots(const CMatrix& Y, const std::string& path);
CMatrix load_snapshots(const std::string& path);

/// Columns grid_deg, power, beta_deg, refined_deg.
void write_spectrum_csv(const Spectrum& spectrum, const Grid& grid, std::ostream& os);

/// Shortest text that parses back to the same double; "inf", "-inf", "nan".
std::string format_double(double x);
double parse_double(const std::string& s);

}  // namespace ogsbi
