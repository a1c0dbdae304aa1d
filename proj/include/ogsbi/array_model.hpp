// SPDX-License-Identifier: Apache-2.0
//
// Uniform linear array geometry, sampling grid and the first-order
// (off-grid) dictionary pair A, B. All angles are radians in [0, pi].
#pragma once

#include "ogsbi/types.hpp"

namespace ogsbi {

/// Half-wavelength ULA with its phase origin at the array midpoint.
class UlaConfig {
 public:
  explicit UlaConfig(Index sensors);

  Index sensors() const { return sensors_; }

  /// Phase offset m - (M+1)/2 of the 0-based sensor index.
  double offset(Index m) const { return static_cast<double>(m + 1) - 0.5 * static_cast<double>(sensors_ + 1); }

 private:
  Index sensors_;
};

/// Uniform grid {0, r, 2r, ..., pi}; the interval must divide pi.
class Grid {
 public:
  /// Throws DomainError unless pi / interval is a positive integer (within 1e-9).
  static Grid uniform(double interval_rad);
  static Grid from_degrees(double interval_deg);

  Index size() const { return points_.size(); }
  double interval() const { return interval_; }
  const RVector& points() const { return points_; }
  double operator[](Index n) const { return points_[n]; }

  /// Index of the grid point nearest to theta (lower index on exact ties).
  Index nearest(double theta) const;

 private:
  Grid(double interval, RVector points) : interval_(interval), points_(std::move(points)) {}

  double interval_;
  RVector points_;
};

struct Dictionary {
  CMatrix A;  // a(theta_n) columns
  CMatrix B;  // a'(theta_n) columns
  Grid grid;
  UlaConfig ula;

  Index sensors() const { return ula.sensors(); }
  Index points() const { return grid.size(); }
};

CVector steering_vector(double theta, const UlaConfig& ula);
CVector steering_derivative(double theta, const UlaConfig& ula);

/// Steering vectors of several angles stacked as columns (M x K).
CMatrix steering_matrix(const RVector& thetas, const UlaConfig& ula);

/// Requires grid.size() > ula.sensors().
Dictionary build_dictionary(const Grid& grid, const UlaConfig& ula);

/// Phi(beta) = A + B diag(beta); every |beta_n| must lie within r/2.
CMatrix perturbed_manifold(const Dictionary& dict, const RVector& beta);

}  // namespace ogsbi
