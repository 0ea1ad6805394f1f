#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dualdist/conditional.hpp"

namespace dualdist {

// One level curve: an ordered polyline in grid coordinates.
struct Contour {
  double level = 0.0;
  std::vector<Eigen::Vector2d> points;
  bool closed = false;
};

// Marching-squares level curves of a grid.  Segment endpoints are joined
// into polylines; a polyline whose ends meet within one cell diagonal is
// marked closed.  Cells containing non-finite values are skipped.
std::vector<Contour> extract_contours(const DensityGrid& grid, const std::vector<double>& levels);

// Bilinear interpolation of the grid at an (x, y) point; points outside the
// grid clamp to the boundary cells.
double grid_interpolate(const DensityGrid& grid, double x, double y);

}  // namespace dualdist
