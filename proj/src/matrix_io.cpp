// SPDX-License-Identifier: Apache-2.0
#include "ogsbi/matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace ogsbi {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) throw std::runtime_error("empty number");
  const std::string t = s.substr(b, e - b + 1);
  if (t == "inf" || t == "+inf" || t == "Inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf" || t == "-Inf") return -std::numeric_limits<double>::infinity();
  if (t == "nan" || t == "NaN") return std::numeric_limits<double>::quiet_NaN();
  const char* first = t.data() + (t[0] == '+' ? 1 : 0);
  double v = 0.0;
  const auto res = std::from_chars(first, t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) throw std::runtime_error("bad number: " + t);
  return v;
}

void write_snapshots_csv(const CMatrix& Y, std::ostream& os) {
  for (Index m = 0; m < Y.rows(); ++m) {
    for (Index t = 0; t < Y.cols(); ++t) {
      if (t) os << ',';
      os << format_double(Y(m, t).real()) << ',' << format_double(Y(m, t).imag());
    }
    os << '\n';
  }
}

CMatrix read_snapshots_csv(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(parse_double(cell));
    if (row.empty() || row.size() % 2 != 0) throw std::runtime_error("snapshot row needs re,im pairs");
    if (!rows.empty() && row.size() != rows.front().size()) throw std::runtime_error("ragged snapshot rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("no snapshot rows");
  CMatrix Y(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size() / 2));
  for (Index m = 0; m < Y.rows(); ++m)
    for (Index t = 0; t < Y.cols(); ++t) Y(m, t) = cd(rows[m][2 * t], rows[m][2 * t + 1]);
  return Y;
}

void save_snapshots(const CMatrix& Y, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_snapshots_csv(Y, os);
  if (!os) throw std::runtime_error("write failed: " + path);
}

CMatrix load_snapshots(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_snapshots_csv(is);
}

void write_spectrum_csv(const Spectrum& spectrum, const Grid& grid, std::ostream& os) {
  os << "grid_deg,power,beta_deg,refined_deg\n";
  for (Index n = 0; n < grid.size(); ++n) {
    const double beta = spectrum.refined_angles[n] - grid[n];
    os << format_double(rad2deg(grid[n])) << ',' << format_double(spectrum.powers[n]) << ','
       << format_double(rad2deg(beta)) << ',' << format_double(rad2deg(spectrum.refined_angles[n])) << '\n';
  }
}

}  // namespace ogsbi
