#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "dualdist/conditional.hpp"
#include "dualdist/subspace.hpp"

namespace dualdist {

// Conic x^T A x = 0 with theta = (a11, a22, a33, 2*a12, 2*a23, 2*a13) on the
// unit sphere and a 6x6 tangent-space covariance.
struct ConicModel {
  Eigen::VectorXd theta;  // R^6, unit norm
  Eigen::MatrixXd cov;    // 6x6, cov * theta ~ 0
  double sigma = 0.0;     // noise level used for the covariance

  GaussianParam gaussian() const;
  Eigen::Matrix3d matrix() const;  // symmetric A with theta^T y(x) = x^T A x
};

// y(x) = (x1^2, x2^2, x3^2, x1 x2, x2 x3, x1 x3) for homogeneous x != 0.
Eigen::VectorXd veronese_embed(const Eigen::Vector3d& x);
// Convenience for inhomogeneous (u, v) (x3 = 1).
Eigen::VectorXd veronese_embed(double u, double v);

// Maximum-likelihood conic from 2-D points, Gauss-Newton on the Sampson
// distance over the unit sphere.  sigma <= 0 estimates the noise level from
// the residuals.  Covariance: sigma^2 * (J^T J)^+ in the tangent space.
// Throws InsufficientDataError (< 5 points) / DegenerateError (ill-posed).
ConicModel fit_conic_ml(const std::vector<Eigen::Vector2d>& points, double sigma = -1.0);

// Feature map (u, v) -> (s, phi) of the reduced conic feature, with a
// numerically stable evaluation of the conditional point density (the radial
// chart the density lives in has a pole on the zero-offset set, handled by
// expanding the determinant).
FeatureMap conic_dual_chart(const ConicModel& model, const ReducedFrame& frame);

// Ellipse trace of theta's zero set: npts parameter samples with arc-length
// weights.  Returns false (no deposit) for non-elliptic samples.
bool trace_conic_ellipse(const Eigen::VectorXd& theta, int npts,
                         std::vector<Eigen::Vector2d>& pts, std::vector<double>& wgt);

// Rasterizer for mc_oracle_grid: traces each sampled conic with >= npts
// points, weights uniform per arc length.
SampleRasterizer conic_rasterizer(int npts = 4096);

// Direct sampler of the conic point density: draws a uniform direction and a
// standard-normal offset in the whitened feature frame, maps the feature back
// and reads off the point.  Near-zero denominators are rejected and redrawn
// (count reported through n_rejected).
std::vector<Eigen::Vector2d> direct_conic_sample(const GaussianParam& g, int64_t n,
                                                 uint64_t seed,
                                                 int64_t* n_rejected = nullptr);

}  // namespace dualdist
