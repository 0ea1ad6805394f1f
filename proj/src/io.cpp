#include "dualdist/io.hpp"

#include <cctype>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "dualdist/errors.hpp"

namespace dualdist {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

bool parse_double(const std::string& tok, double& out) {
  size_t pos = 0;
  try {
    out = std::stod(tok, &pos);
  } catch (...) {
    return false;
  }
  while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
  return pos == tok.size();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> toks;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, sep)) toks.push_back(tok);
  return toks;
}

}  // namespace

Eigen::MatrixXd read_points_csv(std::istream& in, int cols) {
  std::string line;
  int lineno = 0;
  bool saw_header = false;
  std::vector<double> data;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (!saw_header) {
      double tmp;
      if (parse_double(split(line, ',').front(), tmp))
        throw ParseError("missing header line", lineno);
      saw_header = true;
      continue;
    }
    auto toks = split(line, ',');
    if (int(toks.size()) != cols)
      throw ParseError("expected " + std::to_string(cols) + " fields", lineno);
    for (const auto& t : toks) {
      double v;
      if (!parse_double(t, v)) throw ParseError("bad numeric field '" + t + "'", lineno);
      data.push_back(v);
    }
  }
  if (!saw_header) throw ParseError("empty input", lineno);
  const int n = int(data.size()) / cols;
  Eigen::MatrixXd pts(n, cols);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < cols; ++j) pts(i, j) = data[size_t(i) * cols + j];
  return pts;
}

void write_points_csv(std::ostream& out, const std::string& header,
                      const Eigen::MatrixXd& points) {
  out << header << "\n";
  for (int i = 0; i < points.rows(); ++i) {
    for (int j = 0; j < points.cols(); ++j) {
      if (j) out << ",";
      out << format_g17(points(i, j));
    }
    out << "\n";
  }
}

void write_model_file(std::ostream& out, const ModelFile& m) {
  out << "format-version: 1\n";
  out << "model: " << m.kind << "\n";
  out << "sigma: " << format_g17(m.sigma) << "\n";
  out << "dim: " << m.theta.size() << "\n";
  out << "theta:";
  for (int i = 0; i < m.theta.size(); ++i) out << " " << format_g17(m.theta[i]);
  out << "\n";
  for (int r = 0; r < m.cov.rows(); ++r) {
    out << "cov:";
    for (int c = 0; c < m.cov.cols(); ++c) out << " " << format_g17(m.cov(r, c));
    out << "\n";
  }
}

ModelFile read_model_file(std::istream& in) {
  ModelFile m;
  std::string line;
  int lineno = 0;
  int dim = -1, cov_row = 0;
  bool version_ok = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError("expected 'key: value'", lineno);
    const std::string key = line.substr(0, colon);
    const std::string rest = line.substr(colon + 1);
    std::stringstream ss(rest);
    if (key == "format-version") {
      int v = 0;
      ss >> v;
      if (v != 1) throw ParseError("unsupported format-version", lineno);
      version_ok = true;
    } else if (key == "model") {
      ss >> m.kind;
    } else if (key == "sigma") {
      if (!(ss >> m.sigma)) throw ParseError("bad sigma", lineno);
    } else if (key == "dim") {
      if (!(ss >> dim) || dim <= 0) throw ParseError("bad dim", lineno);
      m.theta.resize(dim);
      m.cov.resize(dim, dim);
    } else if (key == "theta") {
      if (dim <= 0) throw ParseError("dim must precede theta", lineno);
      for (int i = 0; i < dim; ++i)
        if (!(ss >> m.theta[i])) throw ParseError("short theta row", lineno);
    } else if (key == "cov") {
      if (dim <= 0 || cov_row >= dim) throw ParseError("unexpected cov row", lineno);
      for (int c = 0; c < dim; ++c)
        if (!(ss >> m.cov(cov_row, c))) throw ParseError("short cov row", lineno);
      ++cov_row;
    } else {
      throw ParseError("unknown key '" + key + "'", lineno);
    }
  }
  if (!version_ok) throw ParseError("missing format-version", lineno);
  if (dim <= 0 || cov_row != dim) throw ParseError("incomplete model file", lineno);
  return m;
}

void write_grid_csv(std::ostream& out, const DensityGrid& grid, double normalization) {
  const auto& s = grid.spec;
  out << "# bounds: " << format_g17(s.xmin) << " " << format_g17(s.xmax) << " "
      << format_g17(s.ymin) << " " << format_g17(s.ymax) << "\n";
  out << "# resolution: " << s.nx << " " << s.ny << "\n";
  out << "# normalization: " << format_g17(normalization) << "\n";
  for (int iy = 0; iy < s.ny; ++iy) {
    for (int ix = 0; ix < s.nx; ++ix) {
      if (ix) out << ",";
      out << format_g17(grid.values(ix, iy));
    }
    out << "\n";
  }
}

DensityGrid read_grid_csv(std::istream& in, double* normalization) {
  DensityGrid g;
  std::string line;
  int lineno = 0;
  auto header = [&](const std::string& tag) {
    if (!std::getline(in, line)) throw ParseError("missing header", ++lineno);
    ++lineno;
    const std::string prefix = "# " + tag + ":";
    if (line.rfind(prefix, 0) != 0) throw ParseError("expected '" + prefix + "'", lineno);
    return std::stringstream(line.substr(prefix.size()));
  };
  {
    auto ss = header("bounds");
    if (!(ss >> g.spec.xmin >> g.spec.xmax >> g.spec.ymin >> g.spec.ymax))
      throw ParseError("bad bounds", lineno);
  }
  {
    auto ss = header("resolution");
    if (!(ss >> g.spec.nx >> g.spec.ny) || g.spec.nx < 2 || g.spec.ny < 2)
      throw ParseError("bad resolution", lineno);
  }
  {
    auto ss = header("normalization");
    double z;
    if (!(ss >> z)) throw ParseError("bad normalization", lineno);
    if (normalization) *normalization = z;
  }
  g.values.resize(g.spec.nx, g.spec.ny);
  for (int iy = 0; iy < g.spec.ny; ++iy) {
    if (!std::getline(in, line)) throw ParseError("missing grid row", ++lineno);
    ++lineno;
    auto toks = split(line, ',');
    if (int(toks.size()) != g.spec.nx) throw ParseError("short grid row", lineno);
    for (int ix = 0; ix < g.spec.nx; ++ix) {
      double v;
      if (!parse_double(toks[ix], v)) throw ParseError("bad grid value", lineno);
      g.values(ix, iy) = v;
    }
  }
  g.normalized = true;
  return g;
}

void write_contours_json(std::ostream& out, const std::vector<Contour>& contours) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : contours) {
    // group consecutive contours of the same level
    if (arr.empty() || arr.back()["level"].get<double>() != c.level) {
      arr.push_back({{"level", c.level}, {"polylines", nlohmann::json::array()}});
    }
    nlohmann::json poly = {{"closed", c.closed}, {"points", nlohmann::json::array()}};
    for (const auto& p : c.points) poly["points"].push_back({p[0], p[1]});
    arr.back()["polylines"].push_back(std::move(poly));
  }
  out << arr.dump(2) << "\n";
}

std::vector<Contour> read_contours_json(std::istream& in) {
  nlohmann::json arr;
  try {
    in >> arr;
  } catch (const std::exception& e) {
    throw ParseError(std::string("bad contour file: ") + e.what(), 0);
  }
  std::vector<Contour> out;
  for (const auto& grp : arr)
    for (const auto& poly : grp.at("polylines")) {
      Contour c;
      c.level = grp.at("level").get<double>();
      c.closed = poly.at("closed").get<bool>();
      for (const auto& p : poly.at("points"))
        c.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
      out.push_back(std::move(c));
    }
  return out;
}

}  // namespace dualdist
