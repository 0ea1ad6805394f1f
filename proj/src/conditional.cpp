#include "dualdist/conditional.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "dualdist/errors.hpp"

namespace dualdist {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

// Wraps an angular difference to (-pi, pi].
double wrap_diff(double d) {
  while (d > M_PI) d -= kTwoPi;
  while (d <= -M_PI) d += kTwoPi;
  return d;
}
}  // namespace

Eigen::MatrixXd numerical_jacobian(const FeatureMap& f, const Eigen::VectorXd& x) {
  const double h0 = std::cbrt(std::numeric_limits<double>::epsilon());
  Eigen::VectorXd f0 = f.map(x);
  const int m = int(f0.size());

  auto diff_to = [&](const Eigen::VectorXd& fa, const Eigen::VectorXd& fb) {
    Eigen::VectorXd d = fa - fb;
    for (int j = 0; j < m; ++j)
      if (j < int(f.periodic.size()) && f.periodic[j]) d[j] = wrap_diff(d[j]);
    return d;
  };

  Eigen::MatrixXd J(m, f.dim_in);
  for (int i = 0; i < f.dim_in; ++i) {
    const double h = h0 * std::max(1.0, std::fabs(x[i]));
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    Eigen::VectorXd fp = f.map(xp), fm = f.map(xm);
    if (!fp.allFinite() || !fm.allFinite())
      throw DegenerateError("numerical_jacobian: non-finite map values near x");
    Eigen::VectorXd dp = diff_to(fp, f0), dm = diff_to(f0, fm);

    // The canonical angle chart has antipodal cuts (measure zero); a stencil
    // that straddles one shows wildly different forward/backward slopes.
    // Retreat to a second-order one-sided difference on the consistent side.
    const double scale = 0.5 * (dp.norm() + dm.norm());
    if ((dp - dm).norm() > 0.25 * scale + 1e-12) {
      Eigen::VectorXd xph = x, xmh = x;
      xph[i] += 0.5 * h;
      xmh[i] -= 0.5 * h;
      Eigen::VectorXd dph = diff_to(f.map(xph), f0), dmh = diff_to(f0, f.map(xmh));
      const double err_p = (dp - 2.0 * dph).norm();
      const double err_m = (dm - 2.0 * dmh).norm();
      if (err_p <= err_m)
        J.col(i) = (4.0 * dph - dp) / h;
      else
        J.col(i) = (4.0 * dmh - dm) / h;
    } else {
      J.col(i) = (dp + dm) / (2.0 * h);
    }
  }
  return J;
}

double conditional_density(const FeatureMap& f, const Eigen::VectorXd& x,
                           bool* degenerate) {
  if (degenerate) *degenerate = false;
  try {
    if (f.stable_eval) return f.stable_eval(x);
    Eigen::MatrixXd J = numerical_jacobian(f, x);
    Eigen::MatrixXd JtJ = J.transpose() * J;
    double det = JtJ.determinant();
    if (!(det > 1e-300)) {
      if (degenerate) *degenerate = true;
      return 0.0;
    }
    return std::sqrt(det) * f.density(f.map(x));
  } catch (const Error&) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
}

std::vector<Eigen::VectorXd> mh_sample(const FeatureMap& f, const Eigen::VectorXd& x0,
                                       int n, uint64_t seed) {
  double p0 = conditional_density(f, x0);
  if (!(p0 > 0.0)) throw DegenerateError("mh_sample: start point has zero density");

  Rng rng(seed);
  std::vector<Eigen::VectorXd> chain;
  chain.reserve(n);
  Eigen::VectorXd x = x0;
  double px = p0;
  double step = 1.0;
  const int burn = n / 5;
  int accepted = 0, window = 0;
  for (int it = 0; it < n; ++it) {
    Eigen::VectorXd prop = x;
    for (int i = 0; i < f.dim_in; ++i) prop[i] += step * rng.normal();
    double pp = conditional_density(f, prop);
    double u = rng.uniform();
    if (pp > 0.0 && u * px < pp) {
      x = prop;
      px = pp;
      ++accepted;
    }
    ++window;
    if (it < burn && window == 100) {
      const double rate = accepted / 100.0;
      if (rate > 0.4) step *= 1.5;
      if (rate < 0.2) step /= 1.5;
      accepted = 0;
      window = 0;
    }
    chain.push_back(x);
  }
  return chain;
}

void DensityGrid::normalize() {
  const double total = values.sum() * cell_area();
  if (!(total > 0.0)) throw EmptyResultError("density grid carries no mass");
  values /= total;
  normalized = true;
}

bool DensityGrid::cell_of(double x, double y, int& ix, int& iy) const {
  if (!(x >= spec.xmin && x < spec.xmax && y >= spec.ymin && y < spec.ymax)) return false;
  ix = int((x - spec.xmin) / cell_w());
  iy = int((y - spec.ymin) / cell_h());
  ix = std::min(ix, spec.nx - 1);
  iy = std::min(iy, spec.ny - 1);
  return true;
}

Eigen::VectorXd sample_tangent_gaussian(const GaussianParam& g, Rng& rng) {
  const int n = int(g.theta0.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.cov);
  Eigen::VectorXd theta = g.theta0;
  for (int i = 0; i < n; ++i) {
    const double l = es.eigenvalues()[i];
    if (l > 1e-14 * es.eigenvalues().maxCoeff())
      theta += std::sqrt(l) * rng.normal() * es.eigenvectors().col(i);
  }
  return theta;
}

DensityGrid mc_oracle_grid(const GaussianParam& g, const SampleRasterizer& rasterize,
                           const GridSpec& spec, int64_t n, uint64_t seed, int threads,
                           Eigen::MatrixXd* counts) {
  // Covariance factor computed once; per-sample substreams keep the result
  // independent of scheduling.
  const int dim = int(g.theta0.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.cov);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const double l = es.eigenvalues()[i];
    if (l > 1e-14 * std::max(es.eigenvalues().maxCoeff(), 0.0))
      A.col(i) = std::sqrt(l) * es.eigenvectors().col(i);
  }

  const int nchunks = 256;
  std::vector<Eigen::MatrixXd> partial(nchunks);
  std::vector<Eigen::MatrixXd> partial_cnt(nchunks);
  std::atomic<int> next{0};
  auto work = [&]() {
    for (;;) {
      const int c = next.fetch_add(1);
      if (c >= nchunks) return;
      Eigen::MatrixXd local = Eigen::MatrixXd::Zero(spec.nx, spec.ny);
      Eigen::MatrixXd local_cnt = Eigen::MatrixXd::Zero(spec.nx, spec.ny);
      DensityGrid view;
      view.spec = spec;
      auto deposit = [&](double x, double y, double w) {
        int ix, iy;
        if (view.cell_of(x, y, ix, iy)) {
          local(ix, iy) += w;
          local_cnt(ix, iy) += 1.0;
        }
      };
      const int64_t lo = n * c / nchunks, hi = n * (c + 1) / nchunks;
      for (int64_t i = lo; i < hi; ++i) {
        Rng rng = Rng::substream(seed, uint64_t(i));
        Eigen::VectorXd z(dim);
        for (int j = 0; j < dim; ++j) z[j] = rng.normal();
        Eigen::VectorXd theta = g.theta0 + A * z;
        rasterize(theta, deposit);
      }
      partial[c] = std::move(local);
      partial_cnt[c] = std::move(local_cnt);
    }
  };
  std::vector<std::thread> pool;
  const int nthreads = std::max(1, threads);
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  DensityGrid grid;
  grid.spec = spec;
  grid.values = Eigen::MatrixXd::Zero(spec.nx, spec.ny);
  for (const auto& p : partial) grid.values += p;
  if (counts) {
    *counts = Eigen::MatrixXd::Zero(spec.nx, spec.ny);
    for (const auto& p : partial_cnt) *counts += p;
  }
  grid.normalize();
  return grid;
}

DensityGrid eval_grid(const std::function<double(double, double)>& fn,
                      const GridSpec& spec, int subsample, int threads) {
  DensityGrid grid;
  grid.spec = spec;
  grid.values = Eigen::MatrixXd::Zero(spec.nx, spec.ny);
  const int sub = std::max(1, subsample);
  std::atomic<int> next{0};
  auto work = [&]() {
    for (;;) {
      const int ix = next.fetch_add(1);
      if (ix >= spec.nx) return;
      for (int iy = 0; iy < spec.ny; ++iy) {
        double acc = 0.0;
        for (int a = 0; a < sub; ++a)
          for (int b = 0; b < sub; ++b) {
            const double x = spec.xmin + grid.cell_w() * (ix + (a + 0.5) / sub);
            const double y = spec.ymin + grid.cell_h() * (iy + (b + 0.5) / sub);
            acc += fn(x, y);
          }
        grid.values(ix, iy) = acc / double(sub * sub);
      }
    }
  };
  std::vector<std::thread> pool;
  const int nthreads = std::max(1, threads);
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return grid;
}

}  // namespace dualdist
