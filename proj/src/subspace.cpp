#include "dualdist/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dualdist/errors.hpp"
#include "dualdist/sphcoords.hpp"

namespace dualdist {

namespace {

// Orthonormalize `v` against the columns in `basis` (two passes for
// numerical stability); returns the residual norm before normalization.
double orthogonalize(Eigen::VectorXd& v, const std::vector<Eigen::VectorXd>& basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& u : basis) v -= (u.dot(v)) * u;
  return v.norm();
}

// Gram-Schmidt that silently skips dependent candidates; used to build
// canonical bases from coordinate-vector seeds.
std::vector<Eigen::VectorXd> gs_skip(const std::vector<Eigen::VectorXd>& candidates,
                                     int want, double tol) {
  std::vector<Eigen::VectorXd> basis;
  for (const auto& c : candidates) {
    if (int(basis.size()) == want) break;
    Eigen::VectorXd v = c;
    double n0 = v.norm();
    if (n0 < tol) continue;
    double n = orthogonalize(v, basis);
    if (n < tol * std::max(1.0, n0)) continue;
    basis.push_back(v / n);
  }
  return basis;
}

}  // namespace

double default_rank_tol(const Eigen::MatrixXd& a) {
  return double(std::max(a.rows(), a.cols())) * std::numeric_limits<double>::epsilon();
}

Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& a, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0)
    return Eigen::MatrixXd::Zero(a.cols(), a.rows());
  const double tol = (rel_tol > 0.0 ? rel_tol : default_rank_tol(a)) * sv[0];
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > tol) inv[i] = 1.0 / sv[i];
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

int numerical_rank(const Eigen::MatrixXd& a, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) return 0;
  const double tol = (rel_tol > 0.0 ? rel_tol : default_rank_tol(a)) * sv[0];
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > tol) ++r;
  return r;
}

std::vector<Eigen::VectorXd> gram_schmidt(const std::vector<Eigen::VectorXd>& vectors,
                                          double rel_tol) {
  const double tol = rel_tol > 0.0 ? rel_tol : 1e-10;
  std::vector<Eigen::VectorXd> basis;
  for (size_t i = 0; i < vectors.size(); ++i) {
    Eigen::VectorXd v = vectors[i];
    const double n0 = v.norm();
    const double n = orthogonalize(v, basis);
    if (n <= tol * std::max(1.0, n0))
      throw DegenerateError("gram_schmidt: input " + std::to_string(i + 1) +
                            " is linearly dependent on its predecessors");
    basis.push_back(v / n);
  }
  return basis;
}

void GaussianParam::validate() const {
  const int n = int(theta0.size());
  if (n < 2 || cov.rows() != n || cov.cols() != n)
    throw DimensionError("GaussianParam: inconsistent dimensions");
  if (std::fabs(theta0.norm() - 1.0) > 1e-12)
    throw DegenerateError("GaussianParam: theta0 is not unit norm");
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw DegenerateError("GaussianParam: covariance not symmetric");
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if ((cov * theta0).norm() > 1e-8 * scale)
    throw DegenerateError("GaussianParam: theta0 not in the covariance kernel");
}

Eigen::VectorXd ReducedFrame::to_whitened(const Eigen::VectorXd& theta) const {
  Eigen::VectorXd t = U_tilde.transpose() * theta;
  for (int i = 0; i < M - 1; ++i) t[i] /= std::sqrt(lambda_tilde[i]);
  return t;
}

Eigen::VectorXd ReducedFrame::from_whitened(const Eigen::VectorXd& theta_prime) const {
  Eigen::VectorXd t = theta_prime;
  for (int i = 0; i < M - 1; ++i) t[i] *= std::sqrt(lambda_tilde[i]);
  return U_tilde * t;
}

Eigen::VectorXd ReducedFrame::reduce_feature(const Eigen::VectorXd& y) const {
  Eigen::VectorXd t = U_tilde.transpose() * y;
  for (int i = 0; i < M - 1; ++i) t[i] *= std::sqrt(lambda_tilde[i]);
  return t;
}

ReducedFrame tangent_whitening(const GaussianParam& g, const WhiteningOptions& opt) {
  g.validate();
  const int n = int(g.theta0.size());

  // Orthonormal tangent basis at theta0 via a Householder reflection that
  // maps e_n to theta0; working in tangent coordinates keeps all retained
  // eigenvectors exactly orthogonal to theta0.
  Eigen::VectorXd u = g.theta0;
  u[n - 1] -= 1.0;
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
  if (u.squaredNorm() > 1e-30) H -= (2.0 / u.squaredNorm()) * (u * u.transpose());
  Eigen::MatrixXd T = H.leftCols(n - 1);  // N x (N-1), columns orthonormal, _|_ theta0

  Eigen::MatrixXd B = T.transpose() * g.cov * T;
  B = 0.5 * (B + B.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  if (es.info() != Eigen::Success) throw DegenerateError("whitening: eigensolver failed");
  // Descending eigenvalues, stable under ties: repeated eigenvalues keep the
  // solver's original column order instead of being reversed with the rest.
  const int nt = int(B.rows());
  std::vector<int> order(nt);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return es.eigenvalues()[a] > es.eigenvalues()[b]; });
  Eigen::VectorXd evals(nt);
  Eigen::MatrixXd evecs(nt, nt);
  for (int i = 0; i < nt; ++i) {
    evals[i] = es.eigenvalues()[order[i]];
    evecs.col(i) = es.eigenvectors().col(order[i]);
  }

  const double lmax = std::max(evals[0], 0.0);
  if (lmax <= 0.0) throw DegenerateError("whitening: covariance numerically zero");

  int keep;
  if (g.rank_hint) {
    keep = *g.rank_hint;
    if (keep < 1 || keep > n - 1) throw DimensionError("whitening: rank hint out of range");
  } else if (opt.lambda_reg > 0.0) {
    keep = n - 1;
  } else {
    const double tol = (opt.rel_tol > 0.0 ? opt.rel_tol : n * std::numeric_limits<double>::epsilon()) * lmax;
    keep = 0;
    while (keep < n - 1 && evals[keep] > tol) ++keep;
    if (keep == 0) throw DegenerateError("whitening: covariance numerically zero");
  }

  ReducedFrame f;
  f.M = keep + 1;
  f.U_tilde.resize(n, f.M);
  f.lambda_tilde.resize(keep);
  for (int i = 0; i < keep; ++i) {
    Eigen::VectorXd v = T * evecs.col(i);
    // Sign canonicalization: largest-magnitude entry positive.
    int idx = 0;
    v.cwiseAbs().maxCoeff(&idx);
    if (v[idx] < 0.0) v = -v;
    f.U_tilde.col(i) = v;
    f.lambda_tilde[i] = std::max(evals[i], 0.0) + opt.lambda_reg;
    if (f.lambda_tilde[i] <= 0.0)
      throw DegenerateError("whitening: non-positive retained eigenvalue");
  }
  f.U_tilde.col(keep) = g.theta0;
  return f;
}

Eigen::MatrixXd reduce_features(const ReducedFrame& f, const ConstraintMatrix& y) {
  if (y.Y.rows() != f.U_tilde.rows())
    throw DimensionError("reduce_features: feature dimension mismatch");
  Eigen::MatrixXd yr(f.M, y.Y.cols());
  for (int l = 0; l < y.Y.cols(); ++l) yr.col(l) = f.reduce_feature(y.Y.col(l));
  return yr;
}

TriangularFactor triangular_factor(const Eigen::MatrixXd& P, int K, bool allow_pivoting,
                                   std::vector<int>* permutation) {
  const int d = int(P.rows());
  if (P.cols() != d) throw DimensionError("triangular_factor: P not square");
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-8 ||
      (P * P - P).cwiseAbs().maxCoeff() > 1e-8)
    throw DegenerateError("triangular_factor: P is not an orthogonal projector");
  if (K < 1 || K > d) throw DimensionError("triangular_factor: bad rank K");

  Eigen::MatrixXd Q = P;  // residual projector
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(d, K);
  std::vector<int> perm;
  const double tol = 1e-8;
  int col = 0;
  for (int k = 0; k < d && col < K; ++k) {
    Eigen::VectorXd v = Q.col(k);
    double n = v.norm();
    if (n < tol) {
      if (!allow_pivoting)
        throw DegenerateError("triangular_factor: pivot breakdown at coordinate " +
                              std::to_string(k + 1));
      continue;  // skip this coordinate; triangularity then holds w.r.t. perm
    }
    v /= n;
    // Entries above the pivot are zero analytically; enforce it exactly.
    for (int i = 0; i < k; ++i) v[i] = 0.0;
    v.normalize();
    L.col(col) = v;
    Q -= v * v.transpose();
    perm.push_back(k);
    ++col;
  }
  if (col < K) throw DegenerateError("triangular_factor: projector rank below K");
  if (permutation) *permutation = perm;
  return TriangularFactor{L, K};
}

Eigen::VectorXd angles_from_unit(const Eigen::VectorXd& u) {
  const int d = int(u.size());
  if (d == 1) return Eigen::VectorXd(0);
  if (d == 2) {
    Eigen::VectorXd phi(1);
    phi[0] = std::atan2(u[1], u[0]);
    return phi;
  }
  SphCoords c = sph_from_cartesian(u);
  return c.phi;
}

Eigen::VectorXd unit_from_angles(const Eigen::VectorXd& phi, int dim) {
  if (dim == 1) return Eigen::VectorXd::Ones(1);
  if (dim == 2) {
    Eigen::VectorXd u(2);
    u << std::cos(phi[0]), std::sin(phi[0]);
    return u;
  }
  SphCoords c;
  c.rho = 1.0;
  c.phi = phi;
  return cartesian_from_sph(c);
}

namespace {

// Canonical basis of S_k = {v : v_i = 0 for i < k} ∩ {v _|_ u_j, j < k},
// built by Gram-Schmidt over coordinate seeds in index order.  `prev` holds
// u_1..u_{k-1} (0-based count k-1); dimension of S_k is d - 2(k-1) - ... as
// long as the constraints are independent on the coordinate subspace.
Eigen::MatrixXd block_basis(const std::vector<Eigen::VectorXd>& prev, int k1, int d) {
  // k1 is 1-based block index; support on coordinates >= k1.
  std::vector<Eigen::VectorXd> cons;  // u_j restricted to the support
  for (const auto& u : prev) {
    Eigen::VectorXd c = u;
    c.head(k1 - 1).setZero();
    cons.push_back(c);
  }
  std::vector<Eigen::VectorXd> cons_on = gs_skip(cons, int(cons.size()), 1e-12);
  const int want = d - 2 * (k1 - 1) - 1 + 1;  // d - 2(k1-1)
  std::vector<Eigen::VectorXd> cands;
  for (int i = k1 - 1; i < d; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
    e[i] = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& c : cons_on) e -= c.dot(e) * c;
    cands.push_back(e);
  }
  auto basis = gs_skip(cands, want, 1e-10);
  if (int(basis.size()) != want)
    throw DegenerateError("subspace_params: degenerate block basis");
  Eigen::MatrixXd B(d, want);
  for (int i = 0; i < want; ++i) B.col(i) = basis[i];
  return B;
}

// Orthonormal basis of the K-complement used for the offset coordinates:
// Gram-Schmidt of P_perp e_i with seeds i = K+1..M-1 (1-based).
Eigen::MatrixXd offset_basis(const Eigen::MatrixXd& P_perp, int K) {
  const int d = int(P_perp.rows());  // d = M-1
  std::vector<Eigen::VectorXd> cands;
  for (int i = K; i < d; ++i) cands.push_back(P_perp.col(i));
  auto basis = gs_skip(cands, d - K, 1e-10);
  if (int(basis.size()) != d - K) {
    // Fallback seeds from the start; generic inputs never get here.
    for (int i = 0; i < K; ++i) cands.push_back(P_perp.col(i));
    basis = gs_skip(cands, d - K, 1e-10);
    if (int(basis.size()) != d - K)
      throw DegenerateError("subspace_params: degenerate offset basis");
  }
  Eigen::MatrixXd B(d, d - K);
  for (int i = 0; i < d - K; ++i) B.col(i) = basis[i];
  return B;
}

}  // namespace

AffineSubspaceParams subspace_params(const Eigen::MatrixXd& Y_reduced, double rel_tol) {
  const int M = int(Y_reduced.rows());
  const int L = int(Y_reduced.cols());
  if (M < 3 || L < 1) throw DimensionError("subspace_params: bad constraint matrix");

  // Y'^T theta' = 0 with theta' = (theta~, 1): A theta~ = b.
  Eigen::MatrixXd A = Y_reduced.topRows(M - 1).transpose();  // L x (M-1)
  Eigen::VectorXd b = -Y_reduced.row(M - 1).transpose();

  Eigen::MatrixXd Ap = pseudoinverse(A, rel_tol);
  Eigen::VectorXd w = Ap * b;
  const double scale = std::max(1.0, b.norm());
  if ((A * w - b).norm() > 1e-8 * scale)
    throw InfeasibleError("subspace_params: constraints admit no finite solution");

  const int rank = numerical_rank(A, rel_tol);
  const int K = (M - 1) - rank;
  if (rank == 0) throw DegenerateError("subspace_params: all constraints vanish");
  if (K < 1) throw DegenerateError("subspace_params: solution set is a single point");

  Eigen::MatrixXd P_perp = Ap * A;  // projector onto V-perp (row space of A)
  P_perp = 0.5 * (P_perp + P_perp.transpose());
  Eigen::MatrixXd P_V = Eigen::MatrixXd::Identity(M - 1, M - 1) - P_perp;

  AffineSubspaceParams out;
  out.M = M;
  out.K = K;
  out.K_tilde = (2 * K <= M) ? K : (M - K - 1);

  Eigen::MatrixXd B = offset_basis(P_perp, K);
  out.s = B.transpose() * w;

  TriangularFactor F = triangular_factor(2 * K <= M ? P_V : P_perp, out.K_tilde);
  std::vector<Eigen::VectorXd> prev;
  for (int k = 1; k <= out.K_tilde; ++k) {
    Eigen::MatrixXd Bk = block_basis(prev, k, M - 1);
    Eigen::VectorXd xi = Bk.transpose() * F.L_mat.col(k - 1);
    xi.normalize();
    out.Phi.push_back(angles_from_unit(xi));
    prev.push_back(F.L_mat.col(k - 1));
  }
  return out;
}

void reconstruct_subspace(const AffineSubspaceParams& p, Eigen::VectorXd& w,
                          Eigen::MatrixXd& V_basis) {
  const int d = p.M - 1;
  std::vector<Eigen::VectorXd> us;
  for (int k = 1; k <= p.K_tilde; ++k) {
    Eigen::MatrixXd Bk = block_basis(us, k, d);
    us.push_back(Bk * unit_from_angles(p.Phi[k - 1], d - 2 * (k - 1)));
  }
  Eigen::MatrixXd P_fact = Eigen::MatrixXd::Zero(d, d);
  for (const auto& u : us) P_fact += u * u.transpose();

  const bool factored_V = (2 * p.K <= p.M);
  Eigen::MatrixXd P_V = factored_V ? P_fact : Eigen::MatrixXd(Eigen::MatrixXd::Identity(d, d) - P_fact);
  Eigen::MatrixXd P_perp = Eigen::MatrixXd::Identity(d, d) - P_V;

  Eigen::MatrixXd B = offset_basis(P_perp, p.K);
  w = B * p.s;

  // Any orthonormal basis of V works for subspace-distance checks.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P_V);
  Eigen::MatrixXd evecs = es.eigenvectors().rowwise().reverse();
  V_basis = evecs.leftCols(p.K);
}

}  // namespace dualdist
