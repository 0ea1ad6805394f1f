#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dualdist/conditional.hpp"
#include "dualdist/rng.hpp"

using namespace dualdist;

namespace {
constexpr double kPi = 3.14159265358979323846;

double gauss2(const Eigen::VectorXd& x) { return std::exp(-0.5 * x.squaredNorm()); }
}  // namespace

TEST_CASE("numerical_jacobian of an affine map is exact") {
  Rng rng(1);
  Eigen::MatrixXd a(3, 2);
  Eigen::VectorXd b(3);
  for (int i = 0; i < 3; ++i) {
    b[i] = rng.normal();
    for (int j = 0; j < 2; ++j) a(i, j) = rng.normal();
  }
  FeatureMap f;
  f.dim_in = 2;
  f.map = [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(a * x + b); };
  Eigen::VectorXd x(2);
  x << 0.7, -1.3;
  CHECK((numerical_jacobian(f, x) - a).norm() < 1e-9);
}

TEST_CASE("numerical_jacobian of x^2 at 3") {
  FeatureMap f;
  f.dim_in = 1;
  f.map = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd y(1);
    y[0] = x[0] * x[0];
    return y;
  };
  Eigen::VectorXd x(1);
  x << 3.0;
  CHECK(numerical_jacobian(f, x)(0, 0) == doctest::Approx(6.0).epsilon(1e-6));
}

TEST_CASE("numerical_jacobian unwraps periodic components") {
  // output lives on [0, 2 pi); the slope across the wrap point is still 1
  FeatureMap f;
  f.dim_in = 1;
  f.map = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd y(1);
    y[0] = std::fmod(x[0] + 4.0 * kPi, 2.0 * kPi);
    return y;
  };
  f.periodic = {true};
  Eigen::VectorXd x(1);
  x << 2.0 * kPi - 1e-9;  // stencil straddles the wrap
  CHECK(numerical_jacobian(f, x)(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("numerical_jacobian retreats to one-sided differences at folds") {
  // |x| at the crease: central differencing reports slope 0; the fold-aware
  // stencil keeps one consistent side and reports slope of magnitude 1
  FeatureMap f;
  f.dim_in = 1;
  f.map = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd y(1);
    y[0] = std::fabs(x[0]);
    return y;
  };
  Eigen::VectorXd x(1);
  x << 0.0;
  CHECK(std::fabs(numerical_jacobian(f, x)(0, 0)) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("conditional_density through the identity chart is the bare density") {
  FeatureMap f;
  f.dim_in = 2;
  f.map = [](const Eigen::VectorXd& x) { return x; };
  f.density = gauss2;
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd x(2);
    x << rng.normal(), rng.normal();
    CHECK(conditional_density(f, x) == doctest::Approx(gauss2(x)).epsilon(1e-8));
  }
}

TEST_CASE("conditional_density scales with the chart volume factor") {
  const double ax = 2.0, ay = 3.0;
  FeatureMap f;
  f.dim_in = 2;
  f.map = [=](const Eigen::VectorXd& x) {
    Eigen::VectorXd y(2);
    y << ax * x[0], ay * x[1];
    return y;
  };
  f.density = gauss2;
  Eigen::VectorXd x(2);
  x << 0.4, -0.2;
  Eigen::VectorXd mapped = f.map(x);
  CHECK(conditional_density(f, x) ==
        doctest::Approx(ax * ay * gauss2(mapped)).epsilon(1e-8));
}

TEST_CASE("stable_eval takes precedence when supplied") {
  FeatureMap f;
  f.dim_in = 2;
  f.map = [](const Eigen::VectorXd& x) { return x; };
  f.density = gauss2;
  f.stable_eval = [](const Eigen::VectorXd&) { return 42.0; };
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
  CHECK(conditional_density(f, x) == 42.0);
}

TEST_CASE("mh_sample targets the density and is deterministic") {
  FeatureMap f;
  f.dim_in = 2;
  f.map = [](const Eigen::VectorXd& x) { return x; };
  f.density = gauss2;
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(2);
  auto chain = mh_sample(f, x0, 100000, 4242);
  REQUIRE(chain.size() == 100000);

  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  const int burn = 20000;
  const int n = int(chain.size()) - burn;
  for (int i = burn; i < int(chain.size()); ++i) mean += chain[i];
  mean /= n;
  for (int i = burn; i < int(chain.size()); ++i) {
    Eigen::Vector2d d = Eigen::Vector2d(chain[i]) - mean;
    cov += d * d.transpose();
  }
  cov /= n;
  // generous bounds: the chain is autocorrelated
  CHECK(mean.norm() < 0.08);
  CHECK((cov - Eigen::Matrix2d::Identity()).norm() < 0.15);

  auto chain2 = mh_sample(f, x0, 100000, 4242);
  bool identical = true;
  for (size_t i = 0; i < chain.size(); ++i)
    if (chain[i] != chain2[i]) identical = false;
  CHECK(identical);
}

TEST_CASE("sample_tangent_gaussian respects the tangent covariance") {
  const int n = 4;
  GaussianParam g;
  g.theta0 = Eigen::VectorXd::Unit(n, n - 1);
  Eigen::VectorXd d(n);
  d << 0.04, 0.01, 0.0025, 0.0;
  g.cov = d.asDiagonal();
  Rng rng(31);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(n, n);
  const int64_t trials = 200000;
  for (int64_t t = 0; t < trials; ++t) {
    Eigen::VectorXd s = sample_tangent_gaussian(g, rng);
    Eigen::VectorXd dd = s - g.theta0;
    mean += dd;
    second += dd * dd.transpose();
  }
  mean /= double(trials);
  second /= double(trials);
  CHECK(mean.norm() < 0.002);
  for (int i = 0; i < n - 1; ++i)
    CHECK(second(i, i) == doctest::Approx(d[i]).epsilon(0.03));
}

TEST_CASE("mc_oracle_grid normalizes and is thread-count independent") {
  const int n = 3;
  GaussianParam g;
  g.theta0 = Eigen::VectorXd::Unit(n, n - 1);
  Eigen::VectorXd d(n);
  d << 0.01, 0.01, 0.0;
  g.cov = d.asDiagonal();
  SampleRasterizer raster = [](const Eigen::VectorXd& theta,
                               const std::function<void(double, double, double)>& dep) {
    dep(theta[0], theta[1], 1.0);
  };
  GridSpec spec{-1, 1, -1, 1, 20, 20};
  Eigen::MatrixXd counts;
  DensityGrid g1 = mc_oracle_grid(g, raster, spec, 20000, 7, 1, &counts);
  CHECK(g1.values.sum() * g1.cell_area() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(counts.sum() == doctest::Approx(20000.0));  // everything lands inside

  DensityGrid g4 = mc_oracle_grid(g, raster, spec, 20000, 7, 4);
  CHECK((g1.values - g4.values).norm() == 0.0);
}

TEST_CASE("eval_grid cell averaging is exact for affine integrands") {
  GridSpec spec{0, 1, 0, 2, 4, 8};
  auto fn = [](double x, double y) { return 3.0 * x - y + 0.5; };
  DensityGrid g = eval_grid(fn, spec, 4, 2);
  for (int ix = 0; ix < spec.nx; ++ix)
    for (int iy = 0; iy < spec.ny; ++iy) {
      const double cx = spec.xmin + (ix + 0.5) * g.cell_w();
      const double cy = spec.ymin + (iy + 0.5) * g.cell_h();
      CHECK(g.values(ix, iy) == doctest::Approx(fn(cx, cy)).epsilon(1e-12));
    }
}
