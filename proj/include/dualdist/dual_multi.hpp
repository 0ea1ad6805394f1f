#pragma once

#include <Eigen/Dense>

#include "dualdist/subspace.hpp"

namespace dualdist {

// Dimension bookkeeping for the multi-constraint dual density.
struct MultiDualContext {
  int M = 0;
  int K = 0;
  int K_tilde = 0;

  static MultiDualContext make(int M, int K);
};

// p(s): standard multivariate normal in the offset coordinates (dim M-K-1).
double offset_density(const Eigen::VectorXd& s);

// Conditional density of the k-th angle block (1-based k):
// Gamma((M-2k+1)/2) / pi^{(M-2k+1)/2} * prod_{i=1}^{M-2k-1} sin^{M-2k-i}(phi_i),
// the uniform density on the half-sphere S^{M-2k} in its angle chart.
double direction_block_density(const Eigen::VectorXd& Phi_k, int k, int M);

// p(s, Phi) = offset_density(s) * prod_k direction_block_density(Phi_k).
double dual_density_multi(const AffineSubspaceParams& p);

// Canonical subspace parameters from a (possibly redundant) reduced
// constraint matrix; reduces to a rank-K column basis first so the result
// depends only on Ker{Y'^T}.
AffineSubspaceParams params_from_kernel(const Eigen::MatrixXd& Y_reduced,
                                        double rel_tol = -1.0);

}  // namespace dualdist
