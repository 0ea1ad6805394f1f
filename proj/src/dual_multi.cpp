#include "dualdist/dual_multi.hpp"

#include <cmath>

#include "dualdist/errors.hpp"

namespace dualdist {

MultiDualContext MultiDualContext::make(int M, int K) {
  if (K < 1 || K > M - 2) throw DimensionError("MultiDualContext: need 1 <= K <= M-2");
  MultiDualContext c;
  c.M = M;
  c.K = K;
  c.K_tilde = (2 * K <= M) ? K : (M - K - 1);
  return c;
}

double offset_density(const Eigen::VectorXd& s) {
  const double log_2pi = 1.8378770664093454835606594728112;
  return std::exp(-0.5 * (s.squaredNorm() + s.size() * log_2pi));
}

double direction_block_density(const Eigen::VectorXd& Phi_k, int k, int M) {
  const int len = M - 2 * k;  // ambient dimension of the block sphere is len+1
  if (len < 1) throw DimensionError("direction_block_density: block index too large");
  if (int(Phi_k.size()) != len)
    throw DimensionError("direction_block_density: bad angle count for block");
  double v = std::exp(std::lgamma(0.5 * (len + 1)) - 0.5 * (len + 1) * std::log(M_PI));
  for (int i = 0; i < len - 1; ++i) v *= std::pow(std::sin(Phi_k[i]), len - 1 - i);
  return v;
}

double dual_density_multi(const AffineSubspaceParams& p) {
  if (int(p.s.size()) != p.M - p.K - 1)
    throw DimensionError("dual_density_multi: offset length inconsistent with (M,K)");
  if (int(p.Phi.size()) != p.K_tilde)
    throw DimensionError("dual_density_multi: block count inconsistent with K~");
  double v = offset_density(p.s);
  for (int k = 1; k <= p.K_tilde; ++k)
    v *= direction_block_density(p.Phi[k - 1], k, p.M);
  return v;
}

AffineSubspaceParams params_from_kernel(const Eigen::MatrixXd& Y_reduced, double rel_tol) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Y_reduced);
  qr.setThreshold(rel_tol > 0.0 ? rel_tol : default_rank_tol(Y_reduced));
  const int r = int(qr.rank());
  if (r < 1) throw DegenerateError("params_from_kernel: zero constraint matrix");
  // Rank-r column basis: the pivot columns, in pivot order.
  Eigen::MatrixXd basis(Y_reduced.rows(), r);
  const auto& perm = qr.colsPermutation().indices();
  for (int i = 0; i < r; ++i) basis.col(i) = Y_reduced.col(perm[i]);
  return subspace_params(basis, rel_tol);
}

}  // namespace dualdist
