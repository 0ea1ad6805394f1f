#pragma once

#include <Eigen/Dense>

namespace dualdist {

// Hyperplane {theta' : y'^T theta' = 0} named by its signed offset s along
// the canonical normal and the direction angles phi (length M-2) of the
// normal on the half-sphere with non-negative first component.
struct HyperplaneParam {
  double s = 0.0;
  Eigen::VectorXd phi;
};

// Signed offset of the hyperplane of a reduced feature vector y' in R^M:
// s = -y'_M / (sign(y'_{M-1}) * sqrt(y'^T y' - y'_M^2)), sign(0) := +1.
// Throws DegenerateError when the tangent part nearly vanishes (hyperplane
// through the origin of the offset chart).
double signed_distance(const Eigen::VectorXd& y_reduced);

// Direction angles paired with signed_distance: angles of the unit tangent
// direction canonicalized to positive first component.
HyperplaneParam hyperplane_param(const Eigen::VectorXd& y_reduced);

// Change of variables s = -1/rho (involution).  Throws DegenerateError at 0.
double rho_from_s(double s);
double s_from_rho(double rho);

// p(s): standard normal.
double marginal_s_density(double s);

// p(phi) = Gamma((M-1)/2) / pi^{(M-1)/2} * prod_{i=1}^{M-3} sin^{M-2-i}(phi_i),
// the uniform density on the half-sphere of normal directions, expressed in
// the angle chart (the last angle's factor is flat).  phi has length M-2.
double direction_density(const Eigen::VectorXd& phi, int M);

// p(rho, phi) = Gamma((M-1)/2) e^{-1/(2 rho^2)} prod sin^{M-2-i}(phi_i)
//               / (sqrt(2 pi^M) rho^2), extended by 0 at rho = 0.
double dual_density_single(double rho, const Eigen::VectorXd& phi, int M);

}  // namespace dualdist
