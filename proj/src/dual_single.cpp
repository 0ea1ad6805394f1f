#include "dualdist/dual_single.hpp"

#include <cmath>

#include "dualdist/errors.hpp"
#include "dualdist/subspace.hpp"

namespace dualdist {

namespace {
double sign_pos(double v) { return v < 0.0 ? -1.0 : 1.0; }
}  // namespace

double signed_distance(const Eigen::VectorXd& y_reduced) {
  const int m = int(y_reduced.size());
  if (m < 3) throw DimensionError("signed_distance: need M >= 3");
  const double denom = y_reduced.head(m - 1).norm();
  if (denom < 1e-14 * y_reduced.norm())
    throw DegenerateError("signed_distance: hyperplane direction degenerate");
  return -y_reduced[m - 1] / (sign_pos(y_reduced[m - 2]) * denom);
}

HyperplaneParam hyperplane_param(const Eigen::VectorXd& y_reduced) {
  const int m = int(y_reduced.size());
  HyperplaneParam h;
  h.s = signed_distance(y_reduced);
  Eigen::VectorXd g = y_reduced.head(m - 1);
  g *= sign_pos(g[0]) / g.norm();
  h.phi = angles_from_unit(g);
  return h;
}

double rho_from_s(double s) {
  if (s == 0.0) throw DegenerateError("rho_from_s: s = 0 maps to infinite radius");
  return -1.0 / s;
}

double s_from_rho(double rho) {
  if (rho == 0.0) throw DegenerateError("s_from_rho: rho = 0 maps to infinite offset");
  return -1.0 / rho;
}

double marginal_s_density(double s) {
  static const double inv_sqrt_2pi = 0.3989422804014326779399461;
  return inv_sqrt_2pi * std::exp(-0.5 * s * s);
}

double direction_density(const Eigen::VectorXd& phi, int M) {
  if (M < 3) throw DimensionError("direction_density: need M >= 3");
  if (int(phi.size()) != M - 2) throw DimensionError("direction_density: bad angle count");
  double v = std::exp(std::lgamma(0.5 * (M - 1)) - 0.5 * (M - 1) * std::log(M_PI));
  for (int i = 0; i < M - 3; ++i) v *= std::pow(std::sin(phi[i]), M - 3 - i);
  return v;
}

double dual_density_single(double rho, const Eigen::VectorXd& phi, int M) {
  if (rho == 0.0) return 0.0;  // continuous extension of the essential singularity
  const double s = -1.0 / rho;
  return marginal_s_density(s) / (rho * rho) * direction_density(phi, M);
}

}  // namespace dualdist
