#include "dualdist/sphcoords.hpp"

#include <cmath>

#include "dualdist/errors.hpp"

namespace dualdist {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_dim(int n) {
  if (n < 3)
    throw DimensionError("spherical coordinates require ambient dimension >= 3, got " +
                         std::to_string(n));
}

double sign_pos(double v) { return v < 0.0 ? -1.0 : 1.0; }
}  // namespace

Eigen::VectorXd cartesian_from_sph(const SphCoords& c) {
  const int n = c.ambient_dim();
  check_dim(n);
  Eigen::VectorXd x(n);
  double sin_prod = 1.0;  // prod_{k<i} sin(phi_k)
  for (int i = 0; i < n - 1; ++i) {
    x[i] = c.rho * sin_prod * std::cos(c.phi[i]);
    sin_prod *= std::sin(c.phi[i]);
  }
  x[n - 1] = c.rho * sin_prod;
  return x;
}

SphCoords sph_from_cartesian(const Eigen::VectorXd& x) {
  const int n = int(x.size());
  check_dim(n);
  const double norm = x.norm();
  if (norm == 0.0) throw DegenerateError("zero vector has no direction");

  SphCoords c;
  const double sgn = sign_pos(x[0]);
  c.rho = sgn * norm;
  c.phi.resize(n - 1);
  // tail_i = || (x_{i+1}, ..., x_N) ||, accumulated back to front.
  double tail = std::hypot(x[n - 1], x[n - 2]);
  // atan2(-0.0, -0.0) would pick pi; pin the degenerate last angle to 0 like
  // the other angles (the forward map is insensitive once the plane vanishes).
  c.phi[n - 2] = (x[n - 1] == 0.0 && x[n - 2] == 0.0)
                     ? 0.0
                     : std::atan2(sgn * x[n - 1], sgn * x[n - 2]);
  if (c.phi[n - 2] < 0.0) c.phi[n - 2] += kTwoPi;
  if (c.phi[n - 2] >= kTwoPi) c.phi[n - 2] = 0.0;
  for (int i = n - 3; i >= 0; --i) {
    // atan2(0, 0) would be an arbitrary choice; pin the angle to 0 (the
    // forward map is insensitive to it once the sine product vanishes).
    c.phi[i] = (tail == 0.0 && x[i] == 0.0) ? 0.0 : std::atan2(tail, sgn * x[i]);
    tail = std::hypot(tail, x[i]);
  }
  return c;
}

double volume_element(const SphCoords& c) {
  const int n = c.ambient_dim();
  check_dim(n);
  double v = std::pow(std::fabs(c.rho), n - 1);
  for (int k = 0; k < n - 2; ++k) v *= std::pow(std::sin(c.phi[k]), n - 2 - k);
  return std::fabs(v);
}

}  // namespace dualdist
