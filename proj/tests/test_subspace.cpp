#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "dualdist/errors.hpp"
#include "dualdist/rng.hpp"
#include "dualdist/subspace.hpp"

using namespace dualdist;

namespace {

Eigen::MatrixXd random_matrix(int r, int c, Rng& rng) {
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rng.normal();
  return m;
}

// Random rank-K orthogonal projector in dimension d.
Eigen::MatrixXd random_projector(int d, int k, Rng& rng, Eigen::MatrixXd* basis = nullptr) {
  Eigen::MatrixXd g = random_matrix(d, k, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, k);
  if (basis) *basis = q;
  return q * q.transpose();
}

}  // namespace

TEST_CASE("pseudoinverse hand values and Penrose identities") {
  Eigen::MatrixXd i3 = Eigen::MatrixXd::Identity(3, 3);
  CHECK((pseudoinverse(i3) - i3).norm() < 1e-14);

  Eigen::MatrixXd d2 = Eigen::Vector2d(2, 0).asDiagonal();
  Eigen::MatrixXd want = Eigen::Vector2d(0.5, 0).asDiagonal();
  CHECK((pseudoinverse(d2) - want).norm() < 1e-14);

  Rng rng(3);
  Eigen::MatrixXd a = random_matrix(5, 2, rng) * random_matrix(2, 3, rng);  // rank 2
  Eigen::MatrixXd ap = pseudoinverse(a);
  CHECK((a * ap * a - a).norm() < 1e-8);
  CHECK((ap * a * ap - ap).norm() < 1e-8);
  CHECK((a * ap - (a * ap).transpose()).norm() < 1e-8);
  CHECK((ap * a - (ap * a).transpose()).norm() < 1e-8);
  CHECK(numerical_rank(a) == 2);
}

TEST_CASE("gram_schmidt basics") {
  std::vector<Eigen::VectorXd> in{Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0)};
  auto out = gram_schmidt(in);
  CHECK((out[0] - in[0]).norm() < 1e-14);
  CHECK((out[1] - in[1]).norm() < 1e-14);

  in = {Eigen::Vector3d(1, 1, 0), Eigen::Vector3d(0, 1, 0)};
  out = gram_schmidt(in);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK((out[0] - Eigen::Vector3d(r, r, 0)).norm() < 1e-14);
  CHECK((out[1] - Eigen::Vector3d(-r, r, 0)).norm() < 1e-14);
}

TEST_CASE("gram_schmidt names the dependent index") {
  Eigen::Vector3d v(0.3, -1.2, 0.5);
  std::vector<Eigen::VectorXd> in{v, 2 * v};
  try {
    gram_schmidt(in);
    FAIL("expected DegenerateError");
  } catch (const DegenerateError& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
}

TEST_CASE("tangent_whitening on an identity-like covariance") {
  const int n = 5;
  GaussianParam g;
  g.theta0 = Eigen::VectorXd::Unit(n, n - 1);
  Eigen::VectorXd d = Eigen::VectorXd::Ones(n);
  d[n - 1] = 0.0;
  g.cov = d.asDiagonal();
  ReducedFrame f = tangent_whitening(g);
  CHECK(f.M == n);
  CHECK((f.U_tilde - Eigen::MatrixXd::Identity(n, n)).norm() < 1e-12);
  CHECK((f.lambda_tilde - Eigen::VectorXd::Ones(n - 1)).norm() < 1e-12);
}

TEST_CASE("tangent_whitening reproduces the covariance quadratic form") {
  Rng rng(11);
  const int n = 6;
  GaussianParam g;
  g.theta0 = random_matrix(n, 1, rng);
  g.theta0.normalize();
  Eigen::MatrixXd t = random_matrix(n, n, rng);
  Eigen::MatrixXd cov = t * t.transpose();
  // restrict to the tangent space of theta0
  Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(n, n) - g.theta0 * g.theta0.transpose();
  g.cov = proj * cov * proj;
  ReducedFrame f = tangent_whitening(g);
  CHECK(f.M == n);  // full tangent rank
  for (int t2 = 0; t2 < 100; ++t2) {
    Eigen::VectorXd v = random_matrix(n, 1, rng);
    double direct = v.dot(g.cov * v);
    double viaframe = 0.0;
    for (int i = 0; i < f.M - 1; ++i) {
      const double c = f.U_tilde.col(i).dot(v);
      viaframe += f.lambda_tilde[i] * c * c;
    }
    CHECK(std::fabs(direct - viaframe) <= 1e-8 * std::max(1.0, std::fabs(direct)));
  }
}

TEST_CASE("regularized whitening retains every tangent direction") {
  Rng rng(12);
  const int n = 6;
  GaussianParam g;
  g.theta0 = random_matrix(n, 1, rng);
  g.theta0.normalize();
  Eigen::MatrixXd b = random_matrix(n, 2, rng);  // rank-2 covariance
  Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(n, n) - g.theta0 * g.theta0.transpose();
  g.cov = proj * (b * b.transpose()) * proj;
  ReducedFrame plain = tangent_whitening(g);
  CHECK(plain.M == 3);  // rank 2 + theta0
  ReducedFrame reg = tangent_whitening(g, {1e-8, -1.0});
  CHECK(reg.M == n);  // all n-1 tangent directions + theta0
  CHECK(reg.lambda_tilde.minCoeff() >= 1e-8 * 0.99);
}

TEST_CASE("reduced features preserve the incidence form") {
  Rng rng(13);
  const int n = 6;
  GaussianParam g;
  g.theta0 = random_matrix(n, 1, rng);
  g.theta0.normalize();
  Eigen::MatrixXd t = random_matrix(n, n, rng);
  Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(n, n) - g.theta0 * g.theta0.transpose();
  g.cov = proj * (t * t.transpose()) * proj;
  ReducedFrame f = tangent_whitening(g);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd theta = f.from_whitened(f.to_whitened(random_matrix(n, 1, rng)));
    Eigen::VectorXd y = random_matrix(n, 1, rng);
    ConstraintMatrix cm;
    cm.Y = y;
    Eigen::MatrixXd yr = reduce_features(f, cm);
    CHECK(std::fabs(theta.dot(y) - f.to_whitened(theta).dot(yr.col(0))) < 1e-8);
  }
  // zero column stays zero
  ConstraintMatrix zero;
  zero.Y = Eigen::MatrixXd::Zero(n, 1);
  CHECK(reduce_features(f, zero).norm() == 0.0);
}

TEST_CASE("triangular_factor hand values") {
  Eigen::MatrixXd p = Eigen::Vector4d(1, 1, 0, 0).asDiagonal();
  TriangularFactor f = triangular_factor(p, 2);
  CHECK((f.L_mat - Eigen::MatrixXd::Identity(4, 4).leftCols(2)).norm() < 1e-14);

  Eigen::Vector2d v(0.6, 0.8);
  TriangularFactor f1 = triangular_factor(v * v.transpose(), 1);
  CHECK(f1.L_mat(0, 0) == doctest::Approx(0.6));
  CHECK(f1.L_mat(1, 0) == doctest::Approx(0.8));
}

TEST_CASE("triangular_factor invariants and uniqueness across presentations") {
  Rng rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    const int d = 3 + int(rng.uniform() * 6);         // 3..8
    const int k = 1 + int(rng.uniform() * (d - 1));   // 1..d-1
    Eigen::MatrixXd basis;
    Eigen::MatrixXd p = random_projector(d, k, rng, &basis);
    TriangularFactor f = triangular_factor(p, k);
    CHECK((f.L_mat * f.L_mat.transpose() - p).norm() < 1e-9);
    CHECK((f.L_mat.transpose() * f.L_mat - Eigen::MatrixXd::Identity(k, k)).norm() < 1e-9);
    for (int j = 0; j < k; ++j) {
      CHECK(f.L_mat(j, j) > 0.0);
      for (int i = 0; i < j; ++i) CHECK(f.L_mat(i, j) == 0.0);  // exactly zero
    }
    // same subspace, different orthonormal basis -> identical factor
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(k, k, rng));
    Eigen::MatrixXd rot = qr.householderQ();
    Eigen::MatrixXd basis2 = basis * rot;
    TriangularFactor f2 = triangular_factor(basis2 * basis2.transpose(), k);
    CHECK((f.L_mat - f2.L_mat).norm() < 1e-9);
  }
}

TEST_CASE("subspace_params rejects infeasible systems") {
  // single constraint column e_M: A = 0, b = -1 has no solution
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(4, 1);
  y(3, 0) = 1.0;
  CHECK_THROWS_AS(subspace_params(y), InfeasibleError);
}

TEST_CASE("subspace_params hand case in M = 3") {
  // constraint normal (1, 0.3, 0): w = 0, s = (0), direction = kernel of A
  Eigen::MatrixXd y(3, 1);
  y << 1.0, 0.3, 0.0;
  AffineSubspaceParams p = subspace_params(y);
  CHECK(p.M == 3);
  CHECK(p.K == 1);
  CHECK(p.K_tilde == 1);
  REQUIRE(p.s.size() == 1);
  CHECK(std::fabs(p.s[0]) < 1e-12);
  REQUIRE(p.Phi.size() == 1);
  REQUIRE(p.Phi[0].size() == 1);
  // kernel direction with positive first component: (0.3, -1)/sqrt(1.09)
  CHECK(p.Phi[0][0] == doctest::Approx(std::atan2(-1.0, 0.3)).epsilon(1e-10));
}

TEST_CASE("subspace_params dimension bookkeeping at M = 19") {
  Rng rng(31);
  Eigen::MatrixXd y = random_matrix(19, 4, rng);
  AffineSubspaceParams p = subspace_params(y);
  CHECK(p.M == 19);
  CHECK(p.K == 14);
  CHECK(p.K_tilde == 4);
  CHECK(p.free_parameter_count() == 56);
  CHECK(p.s.size() == 4);
  REQUIRE(p.Phi.size() == 4);
  for (int k = 0; k < 4; ++k) CHECK(p.Phi[k].size() == 19 - 2 * (k + 1));
}

TEST_CASE("reconstruct_subspace inverts the parameterization") {
  Rng rng(32);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 5 + int(rng.uniform() * 5);  // 5..9
    const int l = 1 + int(rng.uniform() * 3);
    Eigen::MatrixXd y = random_matrix(m, l, rng);
    AffineSubspaceParams p = subspace_params(y);
    Eigen::VectorXd w;
    Eigen::MatrixXd v;
    reconstruct_subspace(p, w, v);
    CHECK(v.cols() == p.K);
    // every reconstructed point theta' = (w + V a, 1) satisfies the constraints
    for (int t = 0; t < 5; ++t) {
      Eigen::VectorXd a = random_matrix(p.K, 1, rng);
      Eigen::VectorXd theta(m);
      theta.head(m - 1) = w + v * a;
      theta[m - 1] = 1.0;
      CHECK((y.transpose() * theta).norm() < 1e-8);
    }
  }
}

TEST_CASE("angles_from_unit round trips") {
  Rng rng(33);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + int(rng.uniform() * 6);  // 2..7
    Eigen::VectorXd u = random_matrix(d, 1, rng);
    u.normalize();
    if (u[0] < 0) u = -u;  // canonical half-sphere
    Eigen::VectorXd phi = angles_from_unit(u);
    CHECK(phi.size() == d - 1);
    CHECK((unit_from_angles(phi, d) - u).norm() < 1e-10);
  }
}
