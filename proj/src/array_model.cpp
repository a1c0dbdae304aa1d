// SPDX-License-Identifier: Apache-2.0
#include "ogsbi/array_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ogsbi {
namespace {

void check_angle(double theta) {
  if (!(theta >= 0.0 && theta <= kPi)) {
    std::ostringstream os;
    os << "angle " << theta << " rad outside [0, pi]";
    throw DomainError(os.str());
  }
}

}  // namespace

UlaConfig::UlaConfig(Index sensors) : sensors_(sensors) {
  if (sensors < 2) throw DomainError("ULA needs at least 2 sensors");
}

Grid Grid::uniform(double interval_rad) {
  if (!(interval_rad > 0.0) || interval_rad > kPi) throw DomainError("grid interval must lie in (0, pi]");
  const double cells = kPi / interval_rad;
  const double rounded = std::round(cells);
  if (std::abs(cells - rounded) > 1e-9 * std::max(1.0, cells))
    throw DomainError("grid interval must divide pi exactly");
  const auto n_cells = static_cast<Index>(rounded);
  RVector points(n_cells + 1);
  for (Index n = 0; n <= n_cells; ++n) points[n] = kPi * static_cast<double>(n) / static_cast<double>(n_cells);
  points[n_cells] = kPi;
  return Grid(kPi / static_cast<double>(n_cells), std::move(points));
}

Grid Grid::from_degrees(double interval_deg) {
  if (!(interval_deg > 0.0)) throw DomainError("grid interval must be positive");
  const double cells = 180.0 / interval_deg;
  if (std::abs(cells - std::round(cells)) > 1e-9 * std::max(1.0, cells))
    throw DomainError("grid interval must divide 180 degrees exactly");
  return uniform(kPi / std::round(cells));
}

Index Grid::nearest(double theta) const {
  const double pos = theta / interval_;
  auto n = static_cast<Index>(std::floor(pos));
  n = std::clamp<Index>(n, 0, size() - 1);
  if (n + 1 < size() && std::abs(points_[n + 1] - theta) < std::abs(points_[n] - theta)) ++n;
  return n;
}

CVector steering_vector(double theta, const UlaConfig& ula) {
  check_angle(theta);
  const double c = std::cos(theta);
  CVector a(ula.sensors());
  for (Index m = 0; m < ula.sensors(); ++m) a[m] = std::polar(1.0, kPi * ula.offset(m) * c);
  return a;
}

CVector steering_derivative(double theta, const UlaConfig& ula) {
  check_angle(theta);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  CVector b(ula.sensors());
  for (Index m = 0; m < ula.sensors(); ++m) {
    const double k = kPi * ula.offset(m);
    b[m] = cd(0.0, -k * s) * std::polar(1.0, k * c);
  }
  return b;
}

CMatrix steering_matrix(const RVector& thetas, const UlaConfig& ula) {
  CMatrix out(ula.sensors(), thetas.size());
  for (Index k = 0; k < thetas.size(); ++k) out.col(k) = steering_vector(thetas[k], ula);
  return out;
}

Dictionary build_dictionary(const Grid& grid, const UlaConfig& ula) {
  if (grid.size() <= ula.sensors()) throw DomainError("grid must have more points than sensors");
  CMatrix A(ula.sensors(), grid.size());
  CMatrix B(ula.sensors(), grid.size());
  for (Index n = 0; n < grid.size(); ++n) {
    A.col(n) = steering_vector(grid[n], ula);
    B.col(n) = steering_derivative(grid[n], ula);
  }
  return Dictionary{std::move(A), std::move(B), grid, ula};
}

CMatrix perturbed_manifold(const Dictionary& dict, const RVector& beta) {
  if (beta.size() != dict.points()) throw std::invalid_argument("beta length must equal the grid size");
  const double half = 0.5 * dict.grid.interval() * (1.0 + 1e-12);
  CMatrix phi = dict.A;
  for (Index n = 0; n < beta.size(); ++n) {
    if (!(std::abs(beta[n]) <= half)) throw DomainError("beta entry outside [-r/2, r/2]");
    if (beta[n] != 0.0) phi.col(n) += beta[n] * dict.B.col(n);
  }
  return phi;
}

}  // namespace ogsbi
