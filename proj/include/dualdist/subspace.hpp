#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace dualdist {

// Default relative tolerance for numerical-rank decisions:
// max(rows, cols) * eps * largest singular value.
double default_rank_tol(const Eigen::MatrixXd& a);

// Moore-Penrose pseudoinverse; singular values below rel_tol * sigma_max are
// treated as zero.  rel_tol <= 0 selects the default policy.
Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& a, double rel_tol = -1.0);

// Numerical rank under the same policy.
int numerical_rank(const Eigen::MatrixXd& a, double rel_tol = -1.0);

// Classical Gram-Schmidt with re-orthogonalization.  Throws DegenerateError
// naming the first dependent input index (1-based).
std::vector<Eigen::VectorXd> gram_schmidt(const std::vector<Eigen::VectorXd>& vectors,
                                          double rel_tol = -1.0);

// Unit-norm parameter estimate with its tangent-space covariance.
struct GaussianParam {
  Eigen::VectorXd theta0;        // unit vector, R^N
  Eigen::MatrixXd cov;           // N x N symmetric PSD, cov * theta0 ~ 0
  std::optional<int> rank_hint;  // informative tangent directions to retain

  void validate() const;  // throws on violated invariants
};

// Whitening frame: theta' = diag(Lambda^{-1/2}, 1) * U~^T * theta maps the
// parameter Gaussian to N(e_M, diag(I, 0)); reduced features
// y' = diag(Lambda^{1/2}, 1) * U~^T * y preserve theta^T y = theta'^T y'.
struct ReducedFrame {
  Eigen::MatrixXd U_tilde;       // N x M; columns = eigenvectors (descending
                                 // eigenvalue) then theta0 last
  Eigen::VectorXd lambda_tilde;  // M-1 positive eigenvalues, descending
  int M = 0;

  Eigen::VectorXd to_whitened(const Eigen::VectorXd& theta) const;
  Eigen::VectorXd from_whitened(const Eigen::VectorXd& theta_prime) const;
  Eigen::VectorXd reduce_feature(const Eigen::VectorXd& y) const;
};

struct WhiteningOptions {
  double lambda_reg = 0.0;  // added to retained eigenvalues when > 0
  double rel_tol = -1.0;    // rank threshold when no rank hint is given
};

// Eigendecomposition-based whitening of the tangent covariance.  With a rank
// hint, exactly that many leading eigendirections are retained; with
// lambda_reg > 0 and no hint, all N-1 tangent directions are retained
// (regularized); otherwise the numerical rank decides.  Eigenvector signs are
// canonicalized (largest-magnitude entry positive); ties in eigenvalues keep
// the original ordering.  Throws DegenerateError when cov is numerically zero.
ReducedFrame tangent_whitening(const GaussianParam& g, const WhiteningOptions& opt = {});

// Joint-feature constraint columns, one per constraint equation.
struct ConstraintMatrix {
  Eigen::MatrixXd Y;  // N x L
  int K_rank = -1;    // numerical rank of the reduced matrix (filled on use)
};

// Y' = diag(sqrt(lambda), 1) * U~^T * Y, column by column.
Eigen::MatrixXd reduce_features(const ReducedFrame& f, const ConstraintMatrix& y);

// Lower-triangular factor of an orthogonal projector: L is (M-1) x K with
// orthonormal columns, positive diagonal, and L L^T = P.
struct TriangularFactor {
  Eigen::MatrixXd L_mat;
  int K = 0;
};

// Unique triangular factor via Gram-Schmidt of P e_1, ..., P e_K.  Requires P
// symmetric idempotent with rank K and independent pivot projections; throws
// DegenerateError on pivot breakdown (or reorders when allow_pivoting, with
// the permutation recorded in *permutation).
TriangularFactor triangular_factor(const Eigen::MatrixXd& P, int K,
                                   bool allow_pivoting = false,
                                   std::vector<int>* permutation = nullptr);

// Canonical parameters of the affine solution set W = {theta~ : A theta~ = b}
// of a reduced constraint system: offset coordinates s of the nearest point
// in the canonical basis of the orthogonal complement, and per-column
// spherical angles Phi_k of the triangular factor.
struct AffineSubspaceParams {
  Eigen::VectorXd s;                  // length M - K - 1
  std::vector<Eigen::VectorXd> Phi;   // K~ blocks, Phi_k has length M - 2k
  int K = 0;                          // dim of the parallel subspace V
  int K_tilde = 0;                    // K if K <= M/2, else M - K - 1
  int M = 0;

  int free_parameter_count() const { return (M - 1) * K_tilde - K_tilde * K_tilde; }
};

// Extracts (s, Phi) from a reduced constraint matrix Y' (M x L).  Writing
// Y'^T = (A  -b) for theta' = (theta~, 1): w = A^+ b, V = Ker A, and the
// factored projector is the one onto V when K <= M/2, onto V-perp otherwise.
// Throws InfeasibleError when the system A theta~ = b has no solution.
AffineSubspaceParams subspace_params(const Eigen::MatrixXd& Y_reduced,
                                     double rel_tol = -1.0);

// Rebuilds (w, orthonormal basis of V) from canonical parameters; used to
// verify that the parameterization uniquely names the subspace.
void reconstruct_subspace(const AffineSubspaceParams& p, Eigen::VectorXd& w,
                          Eigen::MatrixXd& V_basis);

// Angles of a unit vector with positive first component: for dim >= 3 the
// spherical angles (first in [0, pi/2], last in [0, 2 pi)); for dim == 2 the
// single angle atan2(x2, x1) in (-pi/2, pi/2].
Eigen::VectorXd angles_from_unit(const Eigen::VectorXd& u);
Eigen::VectorXd unit_from_angles(const Eigen::VectorXd& phi, int dim);

}  // namespace dualdist
