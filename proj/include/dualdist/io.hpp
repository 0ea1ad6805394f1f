#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "dualdist/conditional.hpp"
#include "dualdist/contours.hpp"

namespace dualdist {

// Full-precision decimal rendering ("%.17g") so every file round-trips.
std::string format_g17(double v);

// CSV of points, one row per record, `cols` numeric fields, header line
// required.  Throws ParseError (with the 1-based line number) on malformed
// input.  Blank lines are ignored.
Eigen::MatrixXd read_points_csv(std::istream& in, int cols);
void write_points_csv(std::ostream& out, const std::string& header,
                      const Eigen::MatrixXd& points);

// Model file: line-oriented "key: value(s)" text with a format-version field.
struct ModelFile {
  std::string kind;       // "conic" or "trifocal"
  double sigma = 0.0;
  Eigen::VectorXd theta;
  Eigen::MatrixXd cov;
};
void write_model_file(std::ostream& out, const ModelFile& m);
ModelFile read_model_file(std::istream& in);

// Density grid CSV: three header lines (bounds, resolution, normalization
// constant), then ny rows of nx comma-separated values (row iy holds
// values(ix, iy) for ix = 0..nx-1).
void write_grid_csv(std::ostream& out, const DensityGrid& grid, double normalization);
DensityGrid read_grid_csv(std::istream& in, double* normalization = nullptr);

// Contours: JSON array of {level, polylines: [{closed, points: [[x,y]..]}]},
// grouped by level in the order the levels were requested.
void write_contours_json(std::ostream& out, const std::vector<Contour>& contours);
std::vector<Contour> read_contours_json(std::istream& in);

}  // namespace dualdist
