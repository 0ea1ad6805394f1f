#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dualdist/io.hpp"

using namespace dualdist;
namespace fs = std::filesystem;

namespace {

const std::string kCli = DUALDIST_CLI_PATH;

struct RunResult {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "dualdist_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run(const std::string& args) {
  const fs::path out = work_dir() / "stdout.txt";
  const fs::path err = work_dir() / "stderr.txt";
  const std::string cmd =
      kCli + " " + args + " >" + out.string() + " 2>" + err.string();
  const int rc = std::system(cmd.c_str());
  RunResult r;
  r.code = (rc >= 256) ? rc / 256 : rc;  // WEXITSTATUS without <sys/wait.h>
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string path(const std::string& name) { return (work_dir() / name).string(); }

}  // namespace

TEST_CASE("fit-conic pipeline is byte-deterministic") {
  REQUIRE(run("synth conic -n 25 --sigma 0.05 --seed 5 --out " + path("pts.csv")).code == 0);
  REQUIRE(run("fit-conic " + path("pts.csv") + " --sigma 0.05 --out " + path("m1.txt")).code ==
          0);
  REQUIRE(run("fit-conic " + path("pts.csv") + " --sigma 0.05 --out " + path("m2.txt")).code ==
          0);
  CHECK(slurp(path("m1.txt")) == slurp(path("m2.txt")));
  CHECK(!slurp(path("m1.txt")).empty());
}

TEST_CASE("malformed rows exit with code 2 and name the line") {
  std::ofstream(path("bad.csv")) << "x,y\n1.0,2.0\n1.0,abc\n";
  RunResult r = run("fit-conic " + path("bad.csv") + " --out " + path("bad.txt"));
  CHECK(r.code == 2);
  CHECK(r.err.find("3") != std::string::npos);
}

TEST_CASE("degenerate data exits with code 3") {
  std::ofstream f(path("collinear.csv"));
  f << "x,y\n";
  for (int i = 0; i < 6; ++i) f << i << "," << 2 * i + 1 << "\n";
  f.close();
  RunResult r = run("fit-conic " + path("collinear.csv") + " --out " + path("col.txt"));
  CHECK(r.code == 3);
}

TEST_CASE("clean circle points recover the circle") {
  std::ofstream f(path("circle.csv"));
  f << "x,y\n";
  for (int i = 0; i < 12; ++i) {
    const double t = 2.0 * 3.14159265358979323846 * i / 12.0 + 0.05;
    f << format_g17(std::cos(t)) << "," << format_g17(std::sin(t)) << "\n";
  }
  f.close();
  REQUIRE(run("fit-conic " + path("circle.csv") + " --sigma 1e-9 --out " +
              path("circle_model.txt")).code == 0);
  std::ifstream in(path("circle_model.txt"));
  ModelFile m = read_model_file(in);
  Eigen::VectorXd circle(6);
  circle << 1, 1, -1, 0, 0, 0;
  circle.normalize();
  if (m.theta.dot(circle) < 0) circle = -circle;
  CHECK((m.theta - circle).norm() < 1e-8);
}

TEST_CASE("dual-grid writes a normalized grid and contours") {
  RunResult r = run("dual-grid " + path("m1.txt") + " --grid -2,2,-2,2,32,32 --out " +
                    path("grid.csv") + " --contours " + path("contours.json"));
  REQUIRE(r.code == 0);
  std::ifstream in(path("grid.csv"));
  DensityGrid g = read_grid_csv(in);
  CHECK(g.spec.nx == 32);
  CHECK(g.values.sum() * g.cell_area() == doctest::Approx(1.0).epsilon(1e-6));
  std::ifstream cj(path("contours.json"));
  auto cs = read_contours_json(cj);
  CHECK(!cs.empty());

  // identical invocation, identical bytes
  REQUIRE(run("dual-grid " + path("m1.txt") + " --grid -2,2,-2,2,32,32 --out " +
              path("grid2.csv") + " --contours " + path("contours2.json")).code == 0);
  CHECK(slurp(path("grid.csv")) == slurp(path("grid2.csv")));
  CHECK(slurp(path("contours.json")) == slurp(path("contours2.json")));
}

TEST_CASE("an all-zero window exits with code 4") {
  RunResult r = run("dual-grid " + path("m1.txt") + " --grid 500,501,500,501,8,8 --out " +
                    path("empty.csv"));
  CHECK(r.code == 4);
}

TEST_CASE("mh sampling is seed-deterministic") {
  REQUIRE(run("sample " + path("m1.txt") + " --mode mh -n 500 --seed 17 --out " +
              path("s1.csv")).code == 0);
  REQUIRE(run("sample " + path("m1.txt") + " --mode mh -n 500 --seed 17 --out " +
              path("s2.csv")).code == 0);
  const std::string s1 = slurp(path("s1.csv"));
  CHECK(!s1.empty());
  CHECK(s1 == slurp(path("s2.csv")));

  // a different seed gives a different chain
  REQUIRE(run("sample " + path("m1.txt") + " --mode mh -n 500 --seed 18 --out " +
              path("s3.csv")).code == 0);
  CHECK(s1 != slurp(path("s3.csv")));
}

TEST_CASE("bad flags exit with code 2") {
  CHECK(run("dual-grid " + path("m1.txt") + " --grid nonsense --out " + path("x.csv")).code ==
        2);
  CHECK(run("no-such-command").code == 2);
}
