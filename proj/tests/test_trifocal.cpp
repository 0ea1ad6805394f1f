#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dualdist/errors.hpp"
#include "dualdist/rng.hpp"
#include "dualdist/subspace.hpp"
#include "dualdist/trifocal.hpp"

using namespace dualdist;

namespace {

double angular_distance(Eigen::VectorXd a, Eigen::VectorXd b) {
  a.normalize();
  b.normalize();
  if (a.dot(b) < 0) b = -b;
  return (a - b).norm();
}

// A line through the homogeneous point p (and a second fixed direction).
Eigen::Vector3d line_through(const Eigen::Vector3d& p, double wx, double wy) {
  return p.cross(Eigen::Vector3d(wx, wy, 1.0));
}

}  // namespace

TEST_CASE("true tensor annihilates every point-triple column") {
  SyntheticScene sc = make_synthetic_scene(20, 0.0, 3);
  for (const auto& c : sc.clean_corrs) {
    ConstraintMatrix cm = trilinearity_columns(c);
    CHECK(cm.Y.rows() == 27);
    CHECK(cm.Y.cols() == 9);
    for (int l = 0; l < 9; ++l)
      CHECK(std::fabs(cm.Y.col(l).dot(sc.theta_true)) <
            1e-12 * std::max(1.0, cm.Y.col(l).norm()));
  }
}

TEST_CASE("constraint block ranks by tag pattern") {
  SyntheticScene sc = make_synthetic_scene(5, 0.0, 4);
  const Correspondence& base = sc.clean_corrs[0];

  // point-point-point: 9 columns, rank 4
  CHECK(numerical_rank(trilinearity_columns(base).Y) == 4);

  // point-point-line: 3 columns, rank 2
  Correspondence ppl = base;
  ppl.is_line[2] = true;
  ppl.views[2] = line_through(base.views[2], 0.3, -0.2);
  ConstraintMatrix y_ppl = trilinearity_columns(ppl);
  CHECK(y_ppl.Y.cols() == 3);
  CHECK(numerical_rank(y_ppl.Y) == 2);
  CHECK((y_ppl.Y.transpose() * sc.theta_true).cwiseAbs().maxCoeff() < 1e-10);

  // point-line-line: 1 column, rank 1
  Correspondence pll = ppl;
  pll.is_line[1] = true;
  pll.views[1] = line_through(base.views[1], -0.1, 0.4);
  ConstraintMatrix y_pll = trilinearity_columns(pll);
  CHECK(y_pll.Y.cols() == 1);
  CHECK(numerical_rank(y_pll.Y) == 1);
  CHECK((y_pll.Y.transpose() * sc.theta_true).cwiseAbs().maxCoeff() < 1e-10);

  // line-line-line needs a view-1 line matching an actual 3-D line; build it
  // from two point correspondences
  const Correspondence& b2 = sc.clean_corrs[1];
  Correspondence lll;
  lll.is_line = {true, true, true};
  for (int v = 0; v < 3; ++v) lll.views[v] = base.views[v].cross(b2.views[v]);
  ConstraintMatrix y_lll = trilinearity_columns(lll);
  CHECK(y_lll.Y.cols() == 3);
  CHECK(numerical_rank(y_lll.Y) == 2);
  // the line coordinates are products of pixel-scale entries; measure the
  // incidence residual relative to the column norms
  for (int c = 0; c < 3; ++c)
    CHECK(std::fabs(y_lll.Y.col(c).dot(sc.theta_true)) < 1e-12 * y_lll.Y.col(c).norm());

  // a view-1 line over points elsewhere has no incidence relation
  Correspondence lpp = base;
  lpp.is_line[0] = true;
  CHECK_THROWS_AS(trilinearity_columns(lpp), DegenerateError);
}

TEST_CASE("tensor is invariant under a projective change of world frame") {
  SyntheticScene sc = make_synthetic_scene(5, 0.0, 6);
  Rng rng(61);
  Eigen::Matrix4d h;
  do {
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) h(i, j) = rng.normal();
  } while (std::fabs(h.determinant()) < 0.1);
  Eigen::VectorXd t1 = tensor_from_cameras(sc.P1, sc.P2, sc.P3);
  Eigen::VectorXd t2 = tensor_from_cameras(sc.P1 * h, sc.P2 * h, sc.P3 * h);
  CHECK(angular_distance(t1, t2) < 1e-9);
  CHECK(angular_distance(t1, sc.theta_true) < 1e-12);
}

TEST_CASE("noiseless fit recovers the camera tensor") {
  SyntheticScene sc = make_synthetic_scene(20, 0.0, 7);
  TrifocalModel m = fit_trifocal(sc.clean_corrs, 1.0);
  CHECK(angular_distance(m.theta, sc.theta_true) < 1e-6);
  CHECK(numerical_rank(m.cov) == 18);
}

TEST_CASE("degenerate correspondence sets are rejected") {
  SyntheticScene sc = make_synthetic_scene(5, 0.0, 8);
  std::vector<Correspondence> dup(30, sc.clean_corrs[0]);
  CHECK_THROWS_AS(fit_trifocal(dup), Error);
}

TEST_CASE("deterministic transfer reproduces clean projections") {
  SyntheticScene sc = make_synthetic_scene(20, 0.0, 9);
  TrifocalModel m = fit_trifocal(sc.clean_corrs, 1.0);
  for (int i = 0; i < 10; ++i) {
    const auto& c = sc.clean_corrs[i];
    Eigen::Vector2d p = deterministic_transfer(m, c.views[1], c.views[2]);
    CHECK((p - Eigen::Vector2d(c.views[0].head<2>())).norm() < 1e-6);
  }
}

TEST_CASE("transfer chart dimension bookkeeping") {
  SyntheticScene sc = make_synthetic_scene(50, 1.0, 11);
  TrifocalModel m = fit_trifocal(sc.corrs, 1.0);
  ReducedFrame frame = tangent_whitening(m.gaussian(18), {1e-8, -1.0});
  CHECK(frame.M == 19);

  const auto& pc = sc.clean_corrs[0];
  Eigen::Vector2d base = deterministic_transfer(m, pc.views[1], pc.views[2]);
  bool rank_warning = true;
  FeatureMap chart =
      transfer_density_chart(m, frame, pc.views[1], pc.views[2], base, &rank_warning);
  CHECK_FALSE(rank_warning);

  Eigen::VectorXd out = chart.map(Eigen::VectorXd(base));
  // s (4) + angle blocks of lengths 17, 15, 13, 11
  CHECK(out.size() == 4 + 17 + 15 + 13 + 11);
  CHECK(chart.density(out) > 0.0);
  CHECK(std::isfinite(conditional_density(chart, Eigen::VectorXd(base))));
}
