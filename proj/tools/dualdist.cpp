// dualdist: fits conic / three-view tensor models, evaluates their dual point
// densities on grids, extracts contours, samples, and cross-checks against a
// Monte-Carlo oracle.  All commands are deterministic given --seed.

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dualdist/conditional.hpp"
#include "dualdist/conic.hpp"
#include "dualdist/contours.hpp"
#include "dualdist/errors.hpp"
#include "dualdist/io.hpp"
#include "dualdist/trifocal.hpp"

using namespace dualdist;

namespace {

struct RunConfig {
  uint64_t seed = 1;
  double rel_tol = -1.0;
  double lambda_reg = 1e-8;
  std::string grid_str = "-2,2,-2,2,64,64";
  std::string levels_str = "0.1,0.01,0.001";
  int threads = 1;
  std::string out;
};

GridSpec parse_grid(const std::string& s) {
  std::stringstream ss(s);
  GridSpec g;
  char c1, c2, c3, c4, c5;
  if (!(ss >> g.xmin >> c1 >> g.xmax >> c2 >> g.ymin >> c3 >> g.ymax >> c4 >> g.nx >> c5 >>
        g.ny) ||
      c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',' || c5 != ',' || g.nx < 2 || g.ny < 2 ||
      !(g.xmax > g.xmin) || !(g.ymax > g.ymin))
    throw ParseError("bad --grid value '" + s + "'", 0);
  return g;
}

std::vector<double> parse_levels(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  for (size_t i = 0; i < out.size(); ++i) {
    if (out[i] <= 0.0 || out[i] >= 1.0) throw ParseError("levels must lie in (0,1)", 0);
    if (i && out[i] >= out[i - 1]) throw ParseError("levels must be strictly decreasing", 0);
  }
  if (out.empty()) throw ParseError("empty --levels", 0);
  return out;
}

Eigen::Vector2d parse_xy(const std::string& s, const char* what) {
  std::stringstream ss(s);
  double u, v;
  char c;
  if (!(ss >> u >> c >> v) || c != ',')
    throw ParseError(std::string("bad ") + what + " value '" + s + "'", 0);
  return {u, v};
}

Eigen::MatrixXd read_points_path(const std::string& path, int cols) {
  if (path == "-") return read_points_csv(std::cin, cols);
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  return read_points_csv(in, cols);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  return out;
}

ModelFile read_model_path(const std::string& path, const std::string& expect_kind) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  ModelFile m = read_model_file(in);
  if (!expect_kind.empty() && m.kind != expect_kind)
    throw ParseError("model file is '" + m.kind + "', expected '" + expect_kind + "'", 0);
  return m;
}

// Evaluates the chart density on the grid, normalizes, writes the grid CSV
// and the contour file at levels * max.
void grid_and_contours(const FeatureMap& chart, const RunConfig& cfg,
                       const std::string& contours_path) {
  const GridSpec spec = parse_grid(cfg.grid_str);
  const std::vector<double> levels = parse_levels(cfg.levels_str);
  auto fn = [&chart](double x, double y) {
    Eigen::VectorXd p(2);
    p << x, y;
    return conditional_density(chart, p);
  };
  DensityGrid grid = eval_grid(fn, spec, 1, cfg.threads);
  const double raw_sum = grid.values.sum() * grid.cell_area();
  if (!(raw_sum > 0.0)) throw EmptyResultError("no positive density in the grid window");
  grid.values /= raw_sum;
  grid.normalized = true;
  {
    auto out = open_out(cfg.out);
    write_grid_csv(out, grid, raw_sum);
  }
  const double vmax = grid.values.maxCoeff();
  std::vector<double> abs_levels;
  for (double l : levels) abs_levels.push_back(l * vmax);
  auto contours = extract_contours(grid, abs_levels);
  if (contours.empty()) throw EmptyResultError("no contours at the requested levels");
  auto out = open_out(contours_path);
  write_contours_json(out, contours);
}

int run(CLI::App& app, int argc, char** argv) {
  RunConfig cfg;
  app.add_option("--seed", cfg.seed, "random seed")->envname("DUALDIST_SEED");
  app.add_option("--rel-tol", cfg.rel_tol, "relative rank tolerance (<=0: default)")
      ->envname("DUALDIST_REL_TOL");
  app.add_option("--lambda", cfg.lambda_reg, "whitening regularization")
      ->envname("DUALDIST_LAMBDA");
  app.add_option("--grid", cfg.grid_str, "xmin,xmax,ymin,ymax,nx,ny")
      ->envname("DUALDIST_GRID");
  app.add_option("--levels", cfg.levels_str, "contour levels as fractions of the maximum")
      ->envname("DUALDIST_LEVELS");
  app.add_option("--threads", cfg.threads, "worker threads")->envname("DUALDIST_THREADS");
  app.require_subcommand(1);
  app.fallthrough();

  std::function<void()> action;

  // ---- fit-conic ----------------------------------------------------------
  {
    auto* c = app.add_subcommand("fit-conic", "maximum-likelihood conic from a 2-D point CSV");
    c->fallthrough();
    auto in = std::make_shared<std::string>();
    auto sigma = std::make_shared<double>(-1.0);
    auto out = std::make_shared<std::string>("conic_model.txt");
    c->add_option("points", *in, "points CSV (x,y with header; '-' for stdin)")->required();
    c->add_option("--sigma", *sigma, "known noise level (<=0: estimate)")
        ->envname("DUALDIST_SIGMA");
    c->add_option("--out", *out, "output model file")->envname("DUALDIST_OUT");
    c->callback([&, in, sigma, out] {
      action = [&, in, sigma, out] {
        Eigen::MatrixXd pts = read_points_path(*in, 2);
        std::vector<Eigen::Vector2d> v(pts.rows());
        for (int i = 0; i < pts.rows(); ++i) v[i] = pts.row(i).transpose();
        ConicModel m = fit_conic_ml(v, *sigma);
        auto f = open_out(*out);
        write_model_file(f, ModelFile{"conic", m.sigma, m.theta, m.cov});
        std::cout << "points: " << v.size() << "\n"
                  << "sigma-hat: " << format_g17(m.sigma) << "\n";
      };
    });
  }

  // ---- fit-trifocal -------------------------------------------------------
  {
    auto* c = app.add_subcommand("fit-trifocal",
                                 "maximum-likelihood three-view tensor from correspondences");
    c->fallthrough();
    auto in = std::make_shared<std::string>();
    auto sigma = std::make_shared<double>(-1.0);
    auto out = std::make_shared<std::string>("trifocal_model.txt");
    c->add_option("corrs", *in, "CSV x1,y1,x2,y2,x3,y3 with header; '-' for stdin")
        ->required();
    c->add_option("--sigma", *sigma, "known pixel noise (<=0: estimate)")
        ->envname("DUALDIST_SIGMA");
    c->add_option("--out", *out, "output model file")->envname("DUALDIST_OUT");
    c->callback([&, in, sigma, out] {
      action = [&, in, sigma, out] {
        Eigen::MatrixXd rows = read_points_path(*in, 6);
        std::vector<Correspondence> corrs(rows.rows());
        for (int i = 0; i < rows.rows(); ++i)
          for (int v = 0; v < 3; ++v)
            corrs[i].views[v] = Eigen::Vector3d(rows(i, 2 * v), rows(i, 2 * v + 1), 1.0);
        TrifocalModel m = fit_trifocal(corrs, *sigma);
        auto f = open_out(*out);
        write_model_file(f, ModelFile{"trifocal", m.sigma, m.theta, m.cov});
        std::cout << "correspondences: " << corrs.size() << "\n"
                  << "sigma-hat: " << format_g17(m.sigma) << "\n";
      };
    });
  }

  // ---- dual-grid ----------------------------------------------------------
  {
    auto* c = app.add_subcommand("dual-grid",
                                 "conic dual point density on a grid, with contours");
    c->fallthrough();
    auto in = std::make_shared<std::string>();
    auto out_contours = std::make_shared<std::string>("contours.json");
    c->add_option("model", *in, "conic model file")->required();
    c->add_option("--out", cfg.out, "output grid CSV")->required()->envname("DUALDIST_OUT");
    c->add_option("--contours", *out_contours, "output contour file")
        ->envname("DUALDIST_CONTOURS");
    c->callback([&, in, out_contours] {
      action = [&, in, out_contours] {
        ModelFile mf = read_model_path(*in, "conic");
        ConicModel m{mf.theta, mf.cov, mf.sigma};
        ReducedFrame frame = tangent_whitening(m.gaussian(), {cfg.lambda_reg, cfg.rel_tol});
        FeatureMap chart = conic_dual_chart(m, frame);
        grid_and_contours(chart, cfg, *out_contours);
      };
    });
  }

  // ---- transfer -----------------------------------------------------------
  {
    auto* c = app.add_subcommand(
        "transfer", "view-1 transfer density for measured points in views 2 and 3");
    c->fallthrough();
    auto in = std::make_shared<std::string>();
    auto m2s = std::make_shared<std::string>(), m3s = std::make_shared<std::string>();
    auto out_contours = std::make_shared<std::string>("contours.json");
    c->add_option("model", *in, "trifocal model file")->required();
    c->add_option("--m2", *m2s, "view-2 point u,v")->required()->envname("DUALDIST_M2");
    c->add_option("--m3", *m3s, "view-3 point u,v")->required()->envname("DUALDIST_M3");
    c->add_option("--out", cfg.out, "output grid CSV")->required()->envname("DUALDIST_OUT");
    c->add_option("--contours", *out_contours, "output contour file")
        ->envname("DUALDIST_CONTOURS");
    c->callback([&, in, m2s, m3s, out_contours] {
      action = [&, in, m2s, m3s, out_contours] {
        ModelFile mf = read_model_path(*in, "trifocal");
        TrifocalModel m{mf.theta, mf.cov, mf.sigma};
        Eigen::Vector2d p2 = parse_xy(*m2s, "--m2"), p3 = parse_xy(*m3s, "--m3");
        Eigen::Vector3d m2(p2[0], p2[1], 1.0), m3(p3[0], p3[1], 1.0);
        Eigen::Vector2d base = deterministic_transfer(m, m2, m3);
        std::cout << "transfer: " << format_g17(base[0]) << " " << format_g17(base[1])
                  << "\n";
        ReducedFrame frame = tangent_whitening(m.gaussian(18), {cfg.lambda_reg, cfg.rel_tol});
        bool rank_warning = false;
        FeatureMap chart = transfer_density_chart(m, frame, m2, m3, base, &rank_warning);
        if (rank_warning) std::cout << "note: constraint rank differs from 4 at the probe\n";
        grid_and_contours(chart, cfg, *out_contours);
      };
    });
  }

  // ---- sample -------------------------------------------------------------
  {
    auto* c = app.add_subcommand("sample", "draw points from the dual density");
    c->fallthrough();
    auto in = std::make_shared<std::string>();
    auto mode = std::make_shared<std::string>("mh");
    auto n = std::make_shared<int64_t>(1000);
    auto m2s = std::make_shared<std::string>(), m3s = std::make_shared<std::string>();
    auto x0s = std::make_shared<std::string>();
    c->add_option("model", *in, "model file")->required();
    c->add_option("--mode", *mode, "mh | direct")
        ->check(CLI::IsMember({"mh", "direct"}))
        ->envname("DUALDIST_MODE");
    c->add_option("-n,--n", *n, "number of samples")->envname("DUALDIST_N");
    c->add_option("--m2", *m2s, "view-2 point u,v (trifocal)")->envname("DUALDIST_M2");
    c->add_option("--m3", *m3s, "view-3 point u,v (trifocal)")->envname("DUALDIST_M3");
    c->add_option("--x0", *x0s, "chain start u,v (mh)")->envname("DUALDIST_X0");
    c->add_option("--out", cfg.out, "output points CSV")->required()->envname("DUALDIST_OUT");
    c->callback([&, in, mode, n, m2s, m3s, x0s] {
      action = [&, in, mode, n, m2s, m3s, x0s] {
        ModelFile mf = read_model_path(*in, "");
        Eigen::MatrixXd pts(*n, 2);
        if (mf.kind == "conic") {
          ConicModel m{mf.theta, mf.cov, mf.sigma};
          if (*mode == "direct") {
            auto s = direct_conic_sample(m.gaussian(), *n, cfg.seed);
            for (int64_t i = 0; i < *n; ++i) pts.row(i) = s[i].transpose();
          } else {
            ReducedFrame frame =
                tangent_whitening(m.gaussian(), {cfg.lambda_reg, cfg.rel_tol});
            FeatureMap chart = conic_dual_chart(m, frame);
            Eigen::Vector2d x0;
            if (!x0s->empty()) {
              x0 = parse_xy(*x0s, "--x0");
            } else {
              std::vector<Eigen::Vector2d> tr;
              std::vector<double> wg;
              if (!trace_conic_ellipse(m.theta, 16, tr, wg))
                throw DegenerateError("sample: not an ellipse; pass --x0");
              x0 = tr.front();
            }
            auto chain = mh_sample(chart, x0, int(*n), cfg.seed);
            for (int64_t i = 0; i < *n; ++i) pts.row(i) = chain[i].transpose();
          }
        } else if (mf.kind == "trifocal") {
          if (*mode == "direct")
            throw ParseError("direct sampling is only available for conic models", 0);
          if (m2s->empty() || m3s->empty())
            throw ParseError("trifocal sampling needs --m2 and --m3", 0);
          TrifocalModel m{mf.theta, mf.cov, mf.sigma};
          Eigen::Vector2d p2 = parse_xy(*m2s, "--m2"), p3 = parse_xy(*m3s, "--m3");
          Eigen::Vector3d m2(p2[0], p2[1], 1.0), m3(p3[0], p3[1], 1.0);
          Eigen::Vector2d x0 = x0s->empty() ? Eigen::Vector2d(deterministic_transfer(m, m2, m3))
                                            : parse_xy(*x0s, "--x0");
          ReducedFrame frame =
              tangent_whitening(m.gaussian(18), {cfg.lambda_reg, cfg.rel_tol});
          FeatureMap chart = transfer_density_chart(m, frame, m2, m3, x0);
          auto chain = mh_sample(chart, x0, int(*n), cfg.seed);
          for (int64_t i = 0; i < *n; ++i) pts.row(i) = chain[i].transpose();
        } else {
          throw ParseError("unknown model kind '" + mf.kind + "'", 0);
        }
        auto f = open_out(cfg.out);
        write_points_csv(f, "u,v", pts);
      };
    });
  }

  // ---- verify-mc ----------------------------------------------------------
  {
    auto* c = app.add_subcommand(
        "verify-mc", "compare the analytic conic density with a Monte-Carlo oracle");
    c->fallthrough();
    auto in = std::make_shared<std::string>();
    auto n = std::make_shared<int64_t>(1000000);
    c->add_option("model", *in, "conic model file")->required();
    c->add_option("-n,--n", *n, "Monte-Carlo sample count")->envname("DUALDIST_N");
    c->add_option("--out", cfg.out, "output report (JSON)")->required()->envname("DUALDIST_OUT");
    c->callback([&, in, n] {
      action = [&, in, n] {
        ModelFile mf = read_model_path(*in, "conic");
        ConicModel m{mf.theta, mf.cov, mf.sigma};
        const GridSpec spec = parse_grid(cfg.grid_str);
        ReducedFrame frame = tangent_whitening(m.gaussian(), {cfg.lambda_reg, cfg.rel_tol});
        FeatureMap chart = conic_dual_chart(m, frame);
        DensityGrid analytic = eval_grid(
            [&chart](double x, double y) {
              Eigen::VectorXd p(2);
              p << x, y;
              return conditional_density(chart, p);
            },
            spec, 8, cfg.threads);
        const double asum = analytic.values.sum() * analytic.cell_area();
        if (!(asum > 0.0)) throw EmptyResultError("no positive density in the grid window");
        analytic.values /= asum;
        Eigen::MatrixXd counts;
        DensityGrid mc = mc_oracle_grid(m.gaussian(), conic_rasterizer(), spec, *n, cfg.seed,
                                        cfg.threads, &counts);
        nlohmann::json cells = nlohmann::json::array();
        double sum_dev = 0.0, max_dev = 0.0;
        int n_high = 0;
        for (int iy = 0; iy < spec.ny; ++iy)
          for (int ix = 0; ix < spec.nx; ++ix) {
            if (counts(ix, iy) < 500.0) continue;
            const double a = analytic.values(ix, iy), o = mc.values(ix, iy);
            const double dev = std::fabs(a - o) / o;
            sum_dev += dev;
            max_dev = std::max(max_dev, dev);
            ++n_high;
            cells.push_back({{"ix", ix},
                             {"iy", iy},
                             {"count", counts(ix, iy)},
                             {"analytic", a},
                             {"mc", o},
                             {"rel_dev", dev}});
          }
        if (n_high == 0) throw EmptyResultError("no grid cell reached 500 deposits");
        const double mean_dev = sum_dev / n_high;
        nlohmann::json report = {{"n", *n},
                                 {"high_count_cells", n_high},
                                 {"mean_rel_dev", mean_dev},
                                 {"max_rel_dev", max_dev},
                                 {"verdict", mean_dev <= 0.10 ? "pass" : "fail"},
                                 {"cells", std::move(cells)}};
        auto f = open_out(cfg.out);
        f << report.dump(2) << "\n";
        std::cout << "verdict: " << (mean_dev <= 0.10 ? "pass" : "fail") << "\n";
      };
    });
  }

  // ---- synth (hidden) -----------------------------------------------------
  {
    auto* c = app.add_subcommand("synth", "generate synthetic datasets");
    c->fallthrough();
    c->group("");  // hidden
    auto kind = std::make_shared<std::string>();
    auto n = std::make_shared<int>(25);
    auto sigma = std::make_shared<double>(-1.0);
    auto clean = std::make_shared<bool>(false);
    c->add_option("kind", *kind, "conic | trifocal")
        ->required()
        ->check(CLI::IsMember({"conic", "trifocal"}));
    c->add_option("-n,--n", *n, "number of points")->envname("DUALDIST_N");
    c->add_option("--sigma", *sigma, "noise level")->envname("DUALDIST_SIGMA");
    c->add_flag("--clean", *clean, "emit noiseless data");
    c->add_option("--out", cfg.out, "output CSV")->required()->envname("DUALDIST_OUT");
    c->callback([&, kind, n, sigma, clean] {
      action = [&, kind, n, sigma, clean] {
        auto f = open_out(cfg.out);
        if (*kind == "conic") {
          const double sig = *sigma > 0 ? *sigma : 0.05;
          Rng rng(cfg.seed);
          Eigen::MatrixXd pts(*n, 2);
          const double cx = 0.2, cy = -0.1, a = 1.1, b = 0.8, tilt = 0.3;
          for (int i = 0; i < *n; ++i) {
            const double t = rng.uniform(0.0, 6.283185307179586);
            const double ex = a * std::cos(t), ey = b * std::sin(t);
            double u = cx + ex * std::cos(tilt) - ey * std::sin(tilt);
            double v = cy + ex * std::sin(tilt) + ey * std::cos(tilt);
            if (!*clean) {
              u += sig * rng.normal();
              v += sig * rng.normal();
            }
            pts(i, 0) = u;
            pts(i, 1) = v;
          }
          write_points_csv(f, "x,y", pts);
        } else {
          const double sig = *sigma > 0 ? *sigma : 1.0;
          SyntheticScene sc = make_synthetic_scene(*n, sig, cfg.seed);
          const auto& src = *clean ? sc.clean_corrs : sc.corrs;
          Eigen::MatrixXd rows(*n, 6);
          for (int i = 0; i < *n; ++i)
            for (int v = 0; v < 3; ++v) {
              rows(i, 2 * v) = src[i].views[v][0];
              rows(i, 2 * v + 1) = src[i].views[v][1];
            }
          write_points_csv(f, "x1,y1,x2,y2,x3,y3", rows);
        }
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    action();
  } catch (const ParseError& e) {
    std::cerr << "parse error";
    if (e.line > 0) std::cerr << " at line " << e.line;
    std::cerr << ": " << e.what() << "\n";
    return 2;
  } catch (const EmptyResultError& e) {
    std::cerr << "empty result: " << e.what() << "\n";
    return 4;
  } catch (const DegenerateError& e) {
    std::cerr << "degeneracy: " << e.what() << "\n";
    return 3;
  } catch (const InfeasibleError& e) {
    std::cerr << "degeneracy: " << e.what() << "\n";
    return 3;
  } catch (const InsufficientDataError& e) {
    std::cerr << "degeneracy: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dual distributions of fitted multilinear models"};
  return run(app, argc, argv);
}
