#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "dualdist/rng.hpp"
#include "dualdist/subspace.hpp"

namespace dualdist {

// Differentiable chart from feature space (dim_in) into the subspace
// parameters (s, Phi) stacked into one vector.  `periodic` flags output
// components that live on a 2*pi circle so finite differences can unwrap
// them.  When a chart has a numerically better evaluation of the full
// conditional value than the generic sqrt(det(J^T J)) * density route
// (e.g. charts with a pole on the zero-offset set), it supplies stable_eval
// and conditional_density uses it.
struct FeatureMap {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> map;
  int dim_in = 0;
  std::function<double(const Eigen::VectorXd&)> density;  // dual density at (s, Phi)
  std::vector<bool> periodic;                              // per output component
  std::function<double(const Eigen::VectorXd&)> stable_eval;  // optional
};

// Central-difference Jacobian of f.map at x, step h_i = cbrt(eps)*max(1,|x_i|),
// with periodic components unwrapped.  Throws on non-finite map values.
Eigen::MatrixXd numerical_jacobian(const FeatureMap& f, const Eigen::VectorXd& x);

// Unnormalized conditional feature density sqrt(det(J^T J)) * p(s(x), Phi(x)).
// Returns 0 (and sets *degenerate when given) at chart-degenerate points.
double conditional_density(const FeatureMap& f, const Eigen::VectorXd& x,
                           bool* degenerate = nullptr);

// Random-walk Metropolis-Hastings chain targeting conditional_density.
// The step size adapts towards 20-40% acceptance during the first 20% of the
// chain (burn-in) and is frozen afterwards.  Deterministic given the seed.
std::vector<Eigen::VectorXd> mh_sample(const FeatureMap& f, const Eigen::VectorXd& x0,
                                       int n, uint64_t seed);

struct GridSpec {
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  int nx = 2, ny = 2;
};

struct DensityGrid {
  GridSpec spec;
  Eigen::MatrixXd values;  // nx x ny, values(ix, iy)
  bool normalized = false;

  double cell_w() const { return (spec.xmax - spec.xmin) / spec.nx; }
  double cell_h() const { return (spec.ymax - spec.ymin) / spec.ny; }
  double cell_area() const { return cell_w() * cell_h(); }
  // Scales values so that sum * cell_area = 1.
  void normalize();
  bool cell_of(double x, double y, int& ix, int& iy) const;
};

// A sample of theta ~ N(theta0, cov) (tangent-space Gaussian).
Eigen::VectorXd sample_tangent_gaussian(const GaussianParam& g, Rng& rng);

// Rasterizes one parameter sample onto a grid through the deposit callback
// (weight-carrying points; for curve-valued features, trace points weighted
// by arc length).
using SampleRasterizer = std::function<void(
    const Eigen::VectorXd& theta,
    const std::function<void(double x, double y, double w)>& deposit)>;

// Monte-Carlo feature-density oracle: draws n parameter samples, rasterizes
// each, and returns the normalized grid.  Work is split into fixed chunks
// with per-sample substreams, so the result is independent of thread count.
// When `counts` is given it receives the raw per-cell deposit counts.
DensityGrid mc_oracle_grid(const GaussianParam& g, const SampleRasterizer& rasterize,
                           const GridSpec& spec, int64_t n, uint64_t seed,
                           int threads = 1, Eigen::MatrixXd* counts = nullptr);

// Evaluates fn(x, y) cell-averaged (sub x sub points per cell) on the grid.
DensityGrid eval_grid(const std::function<double(double, double)>& fn,
                      const GridSpec& spec, int subsample = 1, int threads = 1);

}  // namespace dualdist
