#include "dualdist/trifocal.hpp"

#include <Eigen/Geometry>

#include <cmath>

#include "dualdist/dual_multi.hpp"
#include "dualdist/errors.hpp"
#include "dualdist/rng.hpp"

namespace dualdist {

namespace {

// Levi-Civita symbol.
double eps3(int a, int b, int c) {
  return double((a - b) * (b - c) * (c - a)) / 2.0;
}

// C(v)(q,s) = sum_j v_j eps_{jqs}.
Eigen::Matrix3d eps_contract(const Eigen::Vector3d& v) {
  Eigen::Matrix3d c = Eigen::Matrix3d::Zero();
  for (int q = 0; q < 3; ++q)
    for (int s = 0; s < 3; ++s)
      for (int j = 0; j < 3; ++j) c(q, s) += v[j] * eps3(j, q, s);
  return c;
}

void canonical_sign(Eigen::VectorXd& theta) {
  int idx = 0;
  theta.cwiseAbs().maxCoeff(&idx);
  if (theta[idx] < 0.0) theta = -theta;
}

// T'^{qr}_i = sum_{w,j,k} M1(w,i) M2(q,j) M3(r,k) T^{jk}_w.
Eigen::VectorXd transform_tensor(const Eigen::VectorXd& theta, const Eigen::Matrix3d& M1,
                                 const Eigen::Matrix3d& M2, const Eigen::Matrix3d& M3) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(27);
  for (int w = 0; w < 3; ++w) {
    Eigen::Matrix3d Tw;
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) Tw(j, k) = theta[tensor_index(w, j, k)];
    Eigen::Matrix3d Tw2 = M2 * Tw * M3.transpose();
    for (int i = 0; i < 3; ++i)
      for (int q = 0; q < 3; ++q)
        for (int r = 0; r < 3; ++r) out[tensor_index(i, q, r)] += M1(w, i) * Tw2(q, r);
  }
  return out;
}

Eigen::Vector3d normalized_point(const Eigen::Vector3d& x) {
  if (std::fabs(x[2]) < 1e-12 * x.norm())
    throw DegenerateError("trifocal: point at infinity");
  return x / x[2];
}

}  // namespace

GaussianParam TrifocalModel::gaussian(int rank_hint) const {
  GaussianParam g{theta, cov, std::nullopt};
  if (rank_hint > 0) g.rank_hint = rank_hint;
  return g;
}

Eigen::VectorXd tensor_from_cameras(const Eigen::Matrix<double, 3, 4>& P1,
                                    const Eigen::Matrix<double, 3, 4>& P2,
                                    const Eigen::Matrix<double, 3, 4>& P3) {
  // 4x4 change of world frame H with P1 H = [I | 0].
  Eigen::MatrixXd P1d = P1;
  Eigen::MatrixXd pinv = pseudoinverse(P1d);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(P1d, Eigen::ComputeFullV);
  Eigen::Matrix4d H;
  H.leftCols<3>() = pinv;
  H.col(3) = svd.matrixV().col(3);
  Eigen::Matrix<double, 3, 4> A = P2 * H;
  Eigen::Matrix<double, 3, 4> B = P3 * H;

  Eigen::VectorXd theta(27);
  for (int i = 0; i < 3; ++i)
    for (int q = 0; q < 3; ++q)
      for (int r = 0; r < 3; ++r)
        theta[tensor_index(i, q, r)] = A(q, i) * B(r, 3) - A(q, 3) * B(r, i);
  theta.normalize();
  canonical_sign(theta);
  return theta;
}

ConstraintMatrix trilinearity_columns(const Correspondence& c) {
  const auto& v1 = c.views[0];
  const auto& v2 = c.views[1];
  const auto& v3 = c.views[2];
  for (const auto& v : c.views)
    if (v.norm() == 0.0) throw DegenerateError("trilinearity: zero feature vector");

  ConstraintMatrix out;
  const bool l1 = c.is_line[0], l2 = c.is_line[1], l3 = c.is_line[2];
  if (!l1 && !l2 && !l3) {
    // x^i x'^j x''^k eps_{jqs} eps_{krt} T^{qr}_i = 0_{st}
    Eigen::Matrix3d C2 = eps_contract(v2), C3 = eps_contract(v3);
    out.Y.resize(27, 9);
    for (int s = 0; s < 3; ++s)
      for (int t = 0; t < 3; ++t) {
        int col = 3 * s + t;
        for (int i = 0; i < 3; ++i)
          for (int q = 0; q < 3; ++q)
            for (int r = 0; r < 3; ++r)
              out.Y(tensor_index(i, q, r), col) = v1[i] * C2(q, s) * C3(r, t);
      }
  } else if (!l1 && !l2 && l3) {
    // x^i x'^j eps_{jqs} l''_r T^{qr}_i = 0_s
    Eigen::Matrix3d C2 = eps_contract(v2);
    out.Y.resize(27, 3);
    for (int s = 0; s < 3; ++s)
      for (int i = 0; i < 3; ++i)
        for (int q = 0; q < 3; ++q)
          for (int r = 0; r < 3; ++r)
            out.Y(tensor_index(i, q, r), s) = v1[i] * C2(q, s) * v3[r];
  } else if (!l1 && l2 && l3) {
    // x^i l'_q l''_r T^{qr}_i = 0
    out.Y.resize(27, 1);
    for (int i = 0; i < 3; ++i)
      for (int q = 0; q < 3; ++q)
        for (int r = 0; r < 3; ++r)
          out.Y(tensor_index(i, q, r), 0) = v1[i] * v2[q] * v3[r];
  } else if (l1 && l2 && l3) {
    // eps_{piw} l_p l'_q l''_r T^{qr}_i = 0_w
    out.Y.resize(27, 3);
    out.Y.setZero();
    for (int w = 0; w < 3; ++w)
      for (int i = 0; i < 3; ++i) {
        double coef = 0.0;
        for (int p = 0; p < 3; ++p) coef += v1[p] * eps3(p, i, w);
        for (int q = 0; q < 3; ++q)
          for (int r = 0; r < 3; ++r)
            out.Y(tensor_index(i, q, r), w) = coef * v2[q] * v3[r];
      }
  } else {
    throw DegenerateError("trilinearity: unsupported point/line tag pattern");
  }
  return out;
}

namespace {

struct ViewNormalization {
  Eigen::Matrix3d N;    // x_hat = N x
  double scale = 1.0;   // isotropic scale factor applied to coordinates
};

ViewNormalization normalize_view(const std::vector<Correspondence>& corrs, int view) {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& c : corrs) mean += normalized_point(c.views[view]).head<2>();
  mean /= double(corrs.size());
  double spread = 0.0;
  for (const auto& c : corrs)
    spread += (normalized_point(c.views[view]).head<2>() - mean).norm();
  spread /= double(corrs.size());
  if (spread < 1e-12) throw DegenerateError("fit_trifocal: coincident points in a view");
  ViewNormalization vn;
  vn.scale = std::sqrt(2.0) / spread;
  vn.N << vn.scale, 0, -vn.scale * mean[0], 0, vn.scale, -vn.scale * mean[1], 0, 0, 1;
  return vn;
}

// Standardized residuals of one correspondence: r = Y^T theta whitened by
// the first-order covariance of r under per-coordinate noise sd[0..5]
// (u1,v1,u2,v2,u3,v3).  Returns the rows of the whitened residual and, when
// J is non-null, the whitened Jacobian w.r.t. theta.
void standardized_residuals(const Correspondence& c, const Eigen::VectorXd& theta,
                            const Eigen::Matrix<double, 6, 1>& sd, Eigen::VectorXd& r,
                            Eigen::MatrixXd* J) {
  Eigen::MatrixXd Y = trilinearity_columns(c).Y;  // 27 x 9
  Eigen::VectorXd raw = Y.transpose() * theta;

  // B = d raw / d coords, central differences.
  Eigen::MatrixXd B(9, 6);
  for (int k = 0; k < 6; ++k) {
    Correspondence cp = c, cm = c;
    const int view = k / 2, comp = k % 2;
    const double h = 1e-6 * std::max(1.0, std::fabs(c.views[view][comp]));
    cp.views[view][comp] += h;
    cm.views[view][comp] -= h;
    B.col(k) = (trilinearity_columns(cp).Y.transpose() * theta -
                trilinearity_columns(cm).Y.transpose() * theta) /
               (2.0 * h);
  }
  // The stacked equations are redundant: r = Y^T theta always lies in
  // range(Y^T) (dimension 4 for point-point-point).  Express the residual in
  // an orthonormal basis of that space and whiten its full covariance there.
  Eigen::JacobiSVD<Eigen::MatrixXd> ysvd(Y.transpose(), Eigen::ComputeThinU);
  const int rank_y = numerical_rank(Y);
  Eigen::MatrixXd Qy = ysvd.matrixU().leftCols(rank_y);  // 9 x rank_y
  Eigen::MatrixXd Wq = Qy.transpose() * B * sd.array().square().matrix().asDiagonal() *
                       B.transpose() * Qy;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Wq);
  const double lmax = es.eigenvalues().maxCoeff();
  int keep = 0;
  for (int i = rank_y - 1; i >= 0; --i)
    if (es.eigenvalues()[i] > 1e-10 * lmax) ++keep;
  r.resize(keep);
  if (J) J->resize(keep, 27);
  int row = 0;
  for (int i = rank_y - 1; i >= rank_y - keep; --i) {
    const double inv = 1.0 / std::sqrt(es.eigenvalues()[i]);
    const Eigen::VectorXd dir = Qy * es.eigenvectors().col(i);
    r[row] = inv * dir.dot(raw);
    if (J) J->row(row) = inv * (Y * dir).transpose();
    ++row;
  }
}

Eigen::MatrixXd sphere_tangent_basis27(const Eigen::VectorXd& theta) {
  const int n = int(theta.size());
  Eigen::VectorXd u = theta;
  u[n - 1] -= 1.0;
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
  if (u.squaredNorm() > 1e-30) H -= (2.0 / u.squaredNorm()) * (u * u.transpose());
  return H.leftCols(n - 1);
}

}  // namespace

TrifocalModel fit_trifocal(const std::vector<Correspondence>& corrs, double sigma) {
  const int n = int(corrs.size());
  if (n < 7) throw InsufficientDataError("fit_trifocal: need at least 7 correspondences");
  for (const auto& c : corrs)
    if (c.is_line[0] || c.is_line[1] || c.is_line[2])
      throw DegenerateError("fit_trifocal: expects point correspondences");

  // Per-view coordinate normalization for conditioning.
  std::array<ViewNormalization, 3> vn = {normalize_view(corrs, 0), normalize_view(corrs, 1),
                                         normalize_view(corrs, 2)};
  std::vector<Correspondence> nc(corrs.size());
  for (size_t i = 0; i < corrs.size(); ++i)
    for (int v = 0; v < 3; ++v)
      nc[i].views[v] = vn[v].N * normalized_point(corrs[i].views[v]);

  // Linear estimate.
  Eigen::MatrixXd stack(9 * n, 27);
  for (int i = 0; i < n; ++i)
    stack.middleRows(9 * i, 9) = trilinearity_columns(nc[i]).Y.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stack, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(0) <= 0.0 || sv(0) / std::max(sv(25), 1e-300) > 1e12)
    throw DegenerateError("fit_trifocal: degenerate correspondence configuration");
  Eigen::VectorXd theta = svd.matrixV().col(26);

  // Per-coordinate noise in normalized units.
  const double sig = sigma > 0.0 ? sigma : 1.0;
  Eigen::Matrix<double, 6, 1> sd;
  for (int v = 0; v < 3; ++v) sd[2 * v] = sd[2 * v + 1] = sig * vn[v].scale;

  // Cameras of the linear tensor (first camera [I|0] in normalized
  // coordinates): epipoles from the slice null spaces, then the canonical
  // camera pair.  The refinement runs over the 24 camera entries; that keeps
  // every retained parameter direction observably constrained (18 geometric
  // dof plus exactly-null gauge directions), unlike a fit over all 27 tensor
  // entries whose near-flat directions leave the asymptotic-covariance
  // regime at realistic noise.
  Eigen::Matrix3d Trow_u, Trow_v;
  for (int i = 0; i < 3; ++i) {
    Eigen::Matrix3d Ti;
    for (int q = 0; q < 3; ++q)
      for (int rr = 0; rr < 3; ++rr) Ti(q, rr) = theta[tensor_index(i, q, rr)];
    Eigen::JacobiSVD<Eigen::Matrix3d> ts(Ti, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Trow_u.row(i) = ts.matrixU().col(2).transpose();
    Trow_v.row(i) = ts.matrixV().col(2).transpose();
  }
  const Eigen::Vector3d ep2 =
      Trow_u.jacobiSvd(Eigen::ComputeFullV).matrixV().col(2);  // epipole in view 2
  const Eigen::Vector3d ep3 = Trow_v.jacobiSvd(Eigen::ComputeFullV).matrixV().col(2);
  Eigen::VectorXd x(24);
  for (int i = 0; i < 3; ++i) {
    Eigen::Matrix3d Ti;
    for (int q = 0; q < 3; ++q)
      for (int rr = 0; rr < 3; ++rr) Ti(q, rr) = theta[tensor_index(i, q, rr)];
    Eigen::Vector3d col2 = Ti * ep3;
    Eigen::Vector3d col3 = (ep3 * ep3.transpose() - Eigen::Matrix3d::Identity()) *
                           Ti.transpose() * ep2;
    for (int q = 0; q < 3; ++q) {
      x[4 * q + i] = col2[q];
      x[12 + 4 * q + i] = col3[q];
    }
  }
  for (int q = 0; q < 3; ++q) {
    x[4 * q + 3] = ep2[q];
    x[12 + 4 * q + 3] = ep3[q];
  }

  Eigen::Matrix<double, 3, 4> P10;
  P10.setZero();
  P10.leftCols<3>().setIdentity();
  auto theta_of = [&](const Eigen::VectorXd& xc, const Eigen::VectorXd& align) {
    Eigen::Matrix<double, 3, 4> Q2, Q3;
    for (int q = 0; q < 3; ++q)
      for (int j = 0; j < 4; ++j) {
        Q2(q, j) = xc[4 * q + j];
        Q3(q, j) = xc[12 + 4 * q + j];
      }
    Eigen::VectorXd th = tensor_from_cameras(P10, Q2, Q3);
    if (align.size() > 0 && th.dot(align) < 0) th = -th;
    return th;
  };
  theta = theta_of(x, theta);

  Eigen::VectorXd allr;
  Eigen::MatrixXd allJ;
  auto assemble = [&](const Eigen::VectorXd& th, bool with_jac) {
    std::vector<Eigen::VectorXd> rs(n);
    std::vector<Eigen::MatrixXd> Js(n);
    int rows = 0;
    for (int i = 0; i < n; ++i) {
      standardized_residuals(nc[i], th, sd, rs[i], with_jac ? &Js[i] : nullptr);
      rows += int(rs[i].size());
    }
    allr.resize(rows);
    if (with_jac) allJ.resize(rows, 27);
    int at = 0;
    for (int i = 0; i < n; ++i) {
      allr.segment(at, rs[i].size()) = rs[i];
      if (with_jac) allJ.middleRows(at, rs[i].size()) = Js[i];
      at += int(rs[i].size());
    }
  };
  auto camera_jacobian = [&](const Eigen::VectorXd& xc, const Eigen::VectorXd& th) {
    Eigen::MatrixXd D(27, 24);
    for (int j = 0; j < 24; ++j) {
      const double h = 1e-6 * std::max(1.0, std::fabs(xc[j]));
      Eigen::VectorXd xp = xc, xm = xc;
      xp[j] += h;
      xm[j] -= h;
      D.col(j) = (theta_of(xp, th) - theta_of(xm, th)) / (2.0 * h);
    }
    return D;
  };

  Eigen::MatrixXd D;
  double cur = -1.0;
  for (int it = 0; it < 60; ++it) {
    theta = theta_of(x, theta);
    assemble(theta, true);
    cur = allr.squaredNorm();
    D = camera_jacobian(x, theta);
    Eigen::MatrixXd Jx = allJ * D;
    Eigen::JacobiSVD<Eigen::MatrixXd> step(Jx, Eigen::ComputeThinU | Eigen::ComputeThinV);
    step.setThreshold(1e-8);
    Eigen::VectorXd dx = step.solve(-allr);
    // backtracking: the residual is strongly nonlinear in the cameras and a
    // full step routinely overshoots
    double alpha = 1.0, next = cur;
    Eigen::VectorXd x_try = x;
    for (int bt = 0; bt < 30; ++bt) {
      Eigen::VectorXd xa = x + alpha * dx;
      Eigen::VectorXd tha = theta_of(xa, theta);
      assemble(tha, false);
      if (allr.squaredNorm() < cur) {
        next = allr.squaredNorm();
        x_try = xa;
        break;
      }
      alpha *= 0.5;
    }
#ifdef TRI_DEBUG
    std::fprintf(stderr, "it %d  |r|^2 %.6g -> %.6g  alpha %.3g  |dx| %.3g\n", it, cur, next,
                 alpha, dx.norm());
#endif
    if (next >= cur * (1.0 - 1e-12)) break;  // no usable descent left
    x = x_try;
    cur = next;
    if (alpha * dx.norm() < 1e-12 * std::max(1.0, x.norm())) break;
  }
  theta = theta_of(x, theta);

  assemble(theta, true);
  D = camera_jacobian(x, theta);
  Eigen::MatrixXd Jx = allJ * D;
  double scale2 = 1.0;
  if (sigma <= 0.0) {
    const int dof = int(allr.size()) - 18;
    scale2 = allr.squaredNorm() / std::max(1, dof);
  }
  // pinv drops the exact gauge null directions; 18 informative dof remain.
  Eigen::MatrixXd Cx = scale2 * pseudoinverse(Jx.transpose() * Jx, 1e-8);
  Eigen::MatrixXd C_hat = D * Cx * D.transpose();
  const Eigen::MatrixXd Pt =
      Eigen::MatrixXd::Identity(27, 27) - theta * theta.transpose();
  C_hat = Pt * C_hat * Pt;
  canonical_sign(theta);

  // Map back to unnormalized image coordinates: the fitted tensor satisfies
  // the trilinearities of x_hat = N x, so T = transform(T_hat; N1, N2^{-1}, N3^{-1}).
  Eigen::VectorXd theta_un =
      transform_tensor(theta, vn[0].N, vn[1].N.inverse(), vn[2].N.inverse());
  const double nrm = theta_un.norm();
  Eigen::VectorXd theta_out = theta_un / nrm;
  // Push the covariance through the same linear map plus renormalization.
  Eigen::MatrixXd Mlin(27, 27);
  for (int c = 0; c < 27; ++c) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(27);
    e[c] = 1.0;
    Mlin.col(c) = transform_tensor(e, vn[0].N, vn[1].N.inverse(), vn[2].N.inverse());
  }
  Eigen::MatrixXd Jmap =
      (Eigen::MatrixXd::Identity(27, 27) - theta_out * theta_out.transpose()) * Mlin / nrm;
  Eigen::MatrixXd C = Jmap * C_hat * Jmap.transpose();

  TrifocalModel m;
  m.theta = theta_out;
  canonical_sign(m.theta);  // the covariance is sign-invariant
  m.cov = 0.5 * (C + C.transpose());
  m.sigma = sig * std::sqrt(scale2);
  return m;
}

Eigen::Vector2d deterministic_transfer(const TrifocalModel& model,
                                       const Eigen::Vector3d& m2,
                                       const Eigen::Vector3d& m3) {
  Eigen::Matrix3d C2 = eps_contract(m2), C3 = eps_contract(m3);
  Eigen::MatrixXd D(9, 3);
  for (int s = 0; s < 3; ++s)
    for (int t = 0; t < 3; ++t) {
      for (int i = 0; i < 3; ++i) {
        double acc = 0.0;
        for (int q = 0; q < 3; ++q)
          for (int r = 0; r < 3; ++r)
            acc += C2(q, s) * C3(r, t) * model.theta[tensor_index(i, q, r)];
        D(3 * s + t, i) = acc;
      }
    }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(D.leftCols<2>(),
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(1) < 1e-12 * std::max(sv(0), 1e-300))
    throw DegenerateError("deterministic_transfer: epipole-degenerate pair");
  Eigen::Vector2d uv = svd.solve(-D.col(2));
  return uv;
}

FeatureMap transfer_density_chart(const TrifocalModel& model, const ReducedFrame& frame,
                                  const Eigen::Vector3d& m2, const Eigen::Vector3d& m3,
                                  const Eigen::Vector2d& probe, bool* rank_warning) {
  FeatureMap f;
  f.dim_in = 2;
  auto params_at = [frame, m2, m3](double u, double v) {
    Correspondence c;
    c.views = {Eigen::Vector3d(u, v, 1.0), m2, m3};
    ConstraintMatrix Y = trilinearity_columns(c);
    Eigen::MatrixXd Yr = reduce_features(frame, Y);
    return params_from_kernel(Yr);
  };

  AffineSubspaceParams p0 = params_at(probe[0], probe[1]);
  if (rank_warning) *rank_warning = (p0.K != frame.M - 1 - 4);
  const int M = p0.M, K = p0.K, Kt = p0.K_tilde;
  const int s_len = M - K - 1;
  int total = s_len;
  for (int k = 1; k <= Kt; ++k) total += M - 2 * k;

  f.map = [params_at, s_len, Kt, M, total](const Eigen::VectorXd& x) {
    AffineSubspaceParams p = params_at(x[0], x[1]);
    if (p.K_tilde != Kt || int(p.s.size()) != s_len)
      throw DegenerateError("transfer chart: constraint rank changed");
    Eigen::VectorXd out(total);
    out.head(s_len) = p.s;
    int at = s_len;
    for (const auto& blk : p.Phi) {
      out.segment(at, blk.size()) = blk;
      at += int(blk.size());
    }
    return out;
  };
  f.density = [s_len, Kt, M, K](const Eigen::VectorXd& v) {
    AffineSubspaceParams p;
    p.M = M;
    p.K = K;
    p.K_tilde = Kt;
    p.s = v.head(s_len);
    int at = s_len;
    for (int k = 1; k <= Kt; ++k) {
      p.Phi.push_back(v.segment(at, M - 2 * k));
      at += M - 2 * k;
    }
    return dual_density_multi(p);
  };
  // Periodic components: the last angle of each block lives on a circle.
  f.periodic.assign(total, false);
  int at = s_len;
  for (int k = 1; k <= Kt; ++k) {
    at += M - 2 * k;
    if (M - 2 * k >= 2) f.periodic[at - 1] = true;
  }
  return f;
}

SyntheticScene make_synthetic_scene(int n_points, double sigma_px, uint64_t seed) {
  Rng rng(seed);
  SyntheticScene sc;

  const double f = 1000.0;
  Eigen::Matrix3d K;
  K << f, 0, 0, 0, f, 0, 0, 0, 1;
  auto rot = [](double ax, double ay, double az) {
    return (Eigen::AngleAxisd(az, Eigen::Vector3d::UnitZ()) *
            Eigen::AngleAxisd(ay, Eigen::Vector3d::UnitY()) *
            Eigen::AngleAxisd(ax, Eigen::Vector3d::UnitX()))
        .toRotationMatrix();
  };
  sc.P1.setZero();
  sc.P1.leftCols<3>() = K;
  Eigen::Matrix<double, 3, 4> E2, E3;
  // Camera centres are deliberately far from collinear (one sideways, one
  // mostly vertical baseline); collinear centres are a weak configuration
  // for tensor estimation.
  E2.leftCols<3>() = rot(0.04, -0.15, 0.02);
  E2.col(3) = Eigen::Vector3d(-1.0, 0.10, 0.15);
  E3.leftCols<3>() = rot(-0.12, 0.06, -0.04);
  E3.col(3) = Eigen::Vector3d(0.25, 0.90, 0.30);
  sc.P2 = K * E2;
  sc.P3 = K * E3;
  sc.theta_true = tensor_from_cameras(sc.P1, sc.P2, sc.P3);

  for (int i = 0; i < n_points; ++i) {
    Eigen::Vector3d X(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(4.0, 8.0));
    sc.points.push_back(X);
    Eigen::Vector4d Xh(X[0], X[1], X[2], 1.0);
    Correspondence clean, noisy;
    std::array<Eigen::Matrix<double, 3, 4>, 3> Ps = {sc.P1, sc.P2, sc.P3};
    for (int v = 0; v < 3; ++v) {
      Eigen::Vector3d x = Ps[v] * Xh;
      x /= x[2];
      clean.views[v] = x;
      noisy.views[v] =
          Eigen::Vector3d(x[0] + sigma_px * rng.normal(), x[1] + sigma_px * rng.normal(), 1.0);
    }
    sc.clean_corrs.push_back(clean);
    sc.corrs.push_back(noisy);
  }
  return sc;
}

}  // namespace dualdist
