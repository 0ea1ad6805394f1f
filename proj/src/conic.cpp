#include "dualdist/conic.hpp"

#include <cmath>

#include "dualdist/dual_single.hpp"
#include "dualdist/errors.hpp"

namespace dualdist {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

double sign_pos(double v) { return v < 0.0 ? -1.0 : 1.0; }

// Sampson residual f/||grad f|| and its Jacobian w.r.t. theta.
void sampson_residuals(const Eigen::VectorXd& theta,
                       const std::vector<Eigen::Vector2d>& pts, Eigen::VectorXd& r,
                       Eigen::MatrixXd& J) {
  const int n = int(pts.size());
  r.resize(n);
  J.resize(n, 6);
  for (int i = 0; i < n; ++i) {
    const double u = pts[i][0], v = pts[i][1];
    Eigen::VectorXd y = veronese_embed(u, v);
    Eigen::VectorXd dyu(6), dyv(6);
    dyu << 2 * u, 0, 0, v, 0, 1;
    dyv << 0, 2 * v, 0, u, 1, 0;
    const double f = theta.dot(y);
    const Eigen::Vector2d g(theta.dot(dyu), theta.dot(dyv));
    const double ng = g.norm();
    if (ng < 1e-12) throw DegenerateError("fit_conic_ml: vanishing gradient at a point");
    r[i] = f / ng;
    J.row(i) = y.transpose() / ng -
               (f / (ng * ng * ng)) * (g[0] * dyu + g[1] * dyv).transpose();
  }
}

// Orthonormal basis of the tangent space of the unit sphere at theta.
Eigen::MatrixXd sphere_tangent_basis(const Eigen::VectorXd& theta) {
  const int n = int(theta.size());
  Eigen::VectorXd u = theta;
  u[n - 1] -= 1.0;
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
  if (u.squaredNorm() > 1e-30) H -= (2.0 / u.squaredNorm()) * (u * u.transpose());
  return H.leftCols(n - 1);
}

}  // namespace

GaussianParam ConicModel::gaussian() const { return GaussianParam{theta, cov, std::nullopt}; }

Eigen::Matrix3d ConicModel::matrix() const {
  Eigen::Matrix3d a;
  a << theta[0], theta[3] / 2, theta[5] / 2,  //
      theta[3] / 2, theta[1], theta[4] / 2,   //
      theta[5] / 2, theta[4] / 2, theta[2];
  return a;
}

Eigen::VectorXd veronese_embed(const Eigen::Vector3d& x) {
  if (x.norm() == 0.0) throw DegenerateError("veronese_embed: zero vector");
  Eigen::VectorXd y(6);
  y << x[0] * x[0], x[1] * x[1], x[2] * x[2], x[0] * x[1], x[1] * x[2], x[0] * x[2];
  return y;
}

Eigen::VectorXd veronese_embed(double u, double v) {
  return veronese_embed(Eigen::Vector3d(u, v, 1.0));
}

ConicModel fit_conic_ml(const std::vector<Eigen::Vector2d>& points, double sigma) {
  const int n = int(points.size());
  if (n < 5) throw InsufficientDataError("fit_conic_ml: need at least 5 points");

  // Linear init: smallest right singular vector of the design matrix.
  Eigen::MatrixXd Y(n, 6);
  for (int i = 0; i < n; ++i) Y.row(i) = veronese_embed(points[i][0], points[i][1]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Y, Eigen::ComputeFullV);
  Eigen::VectorXd theta = svd.matrixV().col(5);

  Eigen::VectorXd r;
  Eigen::MatrixXd J;
  Eigen::MatrixXd T;
  for (int it = 0; it < 100; ++it) {
    sampson_residuals(theta, points, r, J);
    T = sphere_tangent_basis(theta);
    Eigen::MatrixXd Jt = J * T;
    Eigen::JacobiSVD<Eigen::MatrixXd> s(Jt, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = s.singularValues();
    if (sv[0] <= 0.0 || sv[sv.size() - 1] < 1e-12 * sv[0])
      throw DegenerateError("fit_conic_ml: degenerate point configuration");
    Eigen::VectorXd d = s.solve(-r);
    theta += T * d;
    theta.normalize();
    if (d.norm() < 1e-13) break;
  }
  // Canonical overall sign: largest-magnitude entry positive.
  int idx = 0;
  theta.cwiseAbs().maxCoeff(&idx);
  if (theta[idx] < 0.0) theta = -theta;

  sampson_residuals(theta, points, r, J);
  T = sphere_tangent_basis(theta);
  Eigen::MatrixXd Jt = J * T;
  const Eigen::VectorXd final_sv = Jt.jacobiSvd().singularValues();
  if (final_sv(4) < 1e-12 * final_sv(0))
    throw DegenerateError("fit_conic_ml: degenerate point configuration");
  const double s2 = sigma > 0.0 ? sigma * sigma
                                : r.squaredNorm() / std::max(1, n - 5);
  Eigen::MatrixXd Ct = s2 * pseudoinverse(Jt.transpose() * Jt);

  ConicModel m;
  m.theta = theta;
  m.cov = T * Ct * T.transpose();
  m.cov = 0.5 * (m.cov + m.cov.transpose());
  m.sigma = std::sqrt(s2);
  return m;
}

namespace {

// Smooth (s, phi) chart of the reduced conic feature at (u, v).  The
// direction is canonicalized by the sign of its last component and expressed
// in plain hyperspherical angles (first M-3 in [0, pi], last in (-pi, pi]),
// which keeps the chart smooth away from its own fold set while evaluating
// to the same density (the sine factors are nonnegative on [0, pi]).
Eigen::VectorXd conic_sphi(const ReducedFrame& frame, double u, double v) {
  const int M = frame.M;
  Eigen::VectorXd yp = frame.reduce_feature(veronese_embed(u, v));
  Eigen::VectorXd yt = yp.head(M - 1);
  const double n = yt.norm();
  if (n < 1e-14 * yp.norm())
    throw DegenerateError("conic chart: hyperplane direction degenerate");
  const double sg = sign_pos(yt[M - 2]);
  Eigen::VectorXd dir = (sg / n) * yt;
  Eigen::VectorXd out(M - 1);
  out[0] = -sg * yp[M - 1] / n;  // signed offset s
  double tail = std::hypot(dir[M - 2], dir[M - 3]);
  for (int i = 0; i < M - 4; ++i) {
    out[1 + i] = std::atan2(dir.segment(i + 1, M - 2 - i).norm(), dir[i]);
  }
  out[M - 3] = std::atan2(tail, dir[M - 4]);
  out[M - 2] = std::atan2(dir[M - 2], dir[M - 3]);
  return out;
}

// Density of the (s, phi) pair: N(s) times the uniform half-sphere density
// in the angle chart.
double conic_sphi_density(const Eigen::VectorXd& sphi, int M) {
  double p = marginal_s_density(sphi[0]);
  p *= std::exp(std::lgamma(0.5 * (M - 1)) - 0.5 * (M - 1) * std::log(M_PI));
  for (int i = 0; i < M - 3; ++i) p *= std::pow(std::sin(sphi[1 + i]), M - 3 - i);
  return p;
}

}  // namespace

FeatureMap conic_dual_chart(const ConicModel& model, const ReducedFrame& frame) {
  const int M = frame.M;
  if (M < 4) throw DimensionError("conic_dual_chart: reduced dimension too small");
  FeatureMap f;
  f.dim_in = 2;
  f.map = [frame](const Eigen::VectorXd& x) {
    return conic_sphi(frame, x[0], x[1]);
  };
  f.density = [M](const Eigen::VectorXd& sphi) { return conic_sphi_density(sphi, M); };
  f.periodic.assign(M - 1, false);
  f.periodic[M - 2] = true;

  // Conditional value in the radial chart (rho, phi), rho = -1/s: the naive
  // sqrt(det(J^T J)) * p(rho, phi) route has a pole at s = 0 (on the fitted
  // conic itself); expanding the determinant cancels it:
  //   sqrt(s^4 det(G^T G) + grad_s^T adj(G^T G) grad_s) * N(s) * p(phi),
  // with G the angle block of the (s, phi) Jacobian.
  f.stable_eval = [frame, M](const Eigen::VectorXd& x) -> double {
    const double h = 1e-5;
    Eigen::VectorXd c0, up, um, vp, vm;
    try {
      c0 = conic_sphi(frame, x[0], x[1]);
      up = conic_sphi(frame, x[0] + h, x[1]);
      um = conic_sphi(frame, x[0] - h, x[1]);
      vp = conic_sphi(frame, x[0], x[1] + h);
      vm = conic_sphi(frame, x[0], x[1] - h);
    } catch (const Error&) {
      return 0.0;
    }
    auto diff = [M](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
      Eigen::VectorXd d = a - b;
      double& last = d[M - 2];
      while (last > M_PI) last -= kTwoPi;
      while (last <= -M_PI) last += kTwoPi;
      return d;
    };
    Eigen::VectorXd du = diff(up, um) / (2 * h), dv = diff(vp, vm) / (2 * h);
    Eigen::Vector2d ds(du[0], dv[0]);
    Eigen::MatrixXd G(M - 2, 2);
    G.col(0) = du.tail(M - 2);
    G.col(1) = dv.tail(M - 2);
    Eigen::Matrix2d GtG = G.transpose() * G;
    Eigen::Matrix2d adj;
    adj << GtG(1, 1), -GtG(0, 1), -GtG(1, 0), GtG(0, 0);
    const double s = c0[0];
    const double q = s * s * s * s * GtG.determinant() + ds.dot(adj * ds);
    if (!(q > 0.0) || !std::isfinite(q)) return 0.0;
    return std::sqrt(q) * conic_sphi_density(c0, M);
  };
  return f;
}

bool trace_conic_ellipse(const Eigen::VectorXd& theta, int npts,
                         std::vector<Eigen::Vector2d>& pts, std::vector<double>& wgt) {
  ConicModel tmp;
  tmp.theta = theta;
  Eigen::Matrix3d A = tmp.matrix();
  Eigen::Matrix2d Q2 = A.topLeftCorner<2, 2>();
  Eigen::Vector2d b(A(0, 2), A(1, 2));
  const double det = Q2.determinant();
  if (std::fabs(det) < 1e-300) return false;
  Eigen::Vector2d c = -Q2.inverse() * b;
  const double k = A(2, 2) + b.dot(c);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(Q2);
  const Eigen::Vector2d ev = es.eigenvalues();
  if (!(ev[0] * ev[1] > 0.0)) return false;   // not an ellipse
  if (k * ev[0] > 0.0 || k == 0.0) return false;  // empty or degenerate
  const Eigen::Vector2d ax = (-k / ev.array()).sqrt();
  const Eigen::Matrix2d R = es.eigenvectors();

  pts.resize(npts);
  wgt.resize(npts);
  for (int i = 0; i < npts; ++i) {
    const double g = kTwoPi * i / npts;
    const double cg = std::cos(g), sg = std::sin(g);
    pts[i] = c + R * Eigen::Vector2d(ax[0] * cg, ax[1] * sg);
    wgt[i] = (R * Eigen::Vector2d(-ax[0] * sg, ax[1] * cg)).norm();
  }
  return true;
}

SampleRasterizer conic_rasterizer(int npts) {
  return [npts](const Eigen::VectorXd& theta,
                const std::function<void(double, double, double)>& deposit) {
    std::vector<Eigen::Vector2d> pts;
    std::vector<double> wgt;
    if (!trace_conic_ellipse(theta, npts, pts, wgt)) return;
    for (size_t i = 0; i < pts.size(); ++i) deposit(pts[i][0], pts[i][1], wgt[i]);
  };
}

std::vector<Eigen::Vector2d> direct_conic_sample(const GaussianParam& g, int64_t n,
                                                 uint64_t seed, int64_t* n_rejected) {
  if (g.theta0.size() != 6)
    throw DimensionError("direct_conic_sample: expects a 6-dimensional conic model");
  ReducedFrame frame = tangent_whitening(g);
  const int M = frame.M;
  if (M != 6)
    throw DegenerateError("direct_conic_sample: covariance must have full tangent rank");

  std::vector<Eigen::Vector2d> out;
  out.reserve(n);
  int64_t rejected = 0;
  Rng rng(seed);
  while (int64_t(out.size()) < n) {
    // Uniform direction on the sphere S^{M-2} plus independent normal offset.
    Eigen::VectorXd dir(M - 1);
    for (int i = 0; i < M - 1; ++i) dir[i] = rng.normal();
    const double nn = dir.norm();
    if (nn < 1e-12) continue;
    dir /= nn;
    const double s = rng.normal();
    Eigen::VectorXd yp(M);
    yp.head(M - 1) = dir;
    yp[M - 1] = -s * sign_pos(dir[M - 2]);
    // Invert the feature reduction: y = U~ diag(lambda^{-1/2}, 1) y'.
    Eigen::VectorXd t = yp;
    for (int i = 0; i < M - 1; ++i) t[i] /= std::sqrt(frame.lambda_tilde[i]);
    Eigen::VectorXd y = frame.U_tilde * t;
    // (u, v) = (y4/y5, y4/y6); reject near-vanishing denominators.
    const double scale = y.norm();
    if (std::fabs(y[4]) < 1e-10 * scale || std::fabs(y[5]) < 1e-10 * scale) {
      ++rejected;
      continue;
    }
    out.emplace_back(y[3] / y[4], y[3] / y[5]);
  }
  if (n_rejected) *n_rejected = rejected;
  return out;
}

}  // namespace dualdist
