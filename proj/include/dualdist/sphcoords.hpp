#pragma once

#include <Eigen/Dense>

namespace dualdist {

// Spherical coordinates in R^N with a signed radius: rho takes either sign
// and the first angle is restricted to [0, pi/2], so that every line through
// the origin is covered exactly once by (|rho|, direction-on-half-sphere).
// Angle domains: phi_1 in [0, pi/2], phi_2..phi_{N-2} in [0, pi],
// phi_{N-1} in [0, 2*pi).  N = phi.size() + 1 >= 3.
struct SphCoords {
  double rho = 0.0;
  Eigen::VectorXd phi;

  int ambient_dim() const { return int(phi.size()) + 1; }
};

// Forward map: x1 = rho*cos(phi1), x_i = rho*cos(phi_i)*prod_{k<i} sin(phi_k),
// x_N = rho*prod sin(phi_k).  Throws DimensionError for N < 3.
Eigen::VectorXd cartesian_from_sph(const SphCoords& c);

// Inverse map: rho = sign(x1)*||x|| with sign(0) := +1; angles via the
// two-argument arctangent chain.  Throws DegenerateError for x = 0 and
// DimensionError for N < 3.
SphCoords sph_from_cartesian(const Eigen::VectorXd& x);

// |det d x / d (rho, phi)| = |rho|^{N-1} * prod_{k=1}^{N-2} sin^{N-1-k}(phi_k).
double volume_element(const SphCoords& c);

}  // namespace dualdist
