#include "dualdist/contours.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>

namespace dualdist {

double grid_interpolate(const DensityGrid& grid, double x, double y) {
  const auto& s = grid.spec;
  const double cw = grid.cell_w(), ch = grid.cell_h();
  // continuous index relative to cell centers
  double fx = (x - s.xmin) / cw - 0.5;
  double fy = (y - s.ymin) / ch - 0.5;
  fx = std::clamp(fx, 0.0, double(s.nx - 1));
  fy = std::clamp(fy, 0.0, double(s.ny - 1));
  const int ix = std::min(int(fx), s.nx - 2 >= 0 ? s.nx - 2 : 0);
  const int iy = std::min(int(fy), s.ny - 2 >= 0 ? s.ny - 2 : 0);
  const double tx = fx - ix, ty = fy - iy;
  const int ix1 = std::min(ix + 1, s.nx - 1), iy1 = std::min(iy + 1, s.ny - 1);
  return (1 - tx) * (1 - ty) * grid.values(ix, iy) + tx * (1 - ty) * grid.values(ix1, iy) +
         (1 - tx) * ty * grid.values(ix, iy1) + tx * ty * grid.values(ix1, iy1);
}

namespace {

struct Segment {
  int64_t e0, e1;            // edge ids of the two endpoints
  Eigen::Vector2d p0, p1;
};

}  // namespace

std::vector<Contour> extract_contours(const DensityGrid& grid,
                                      const std::vector<double>& levels) {
  const auto& s = grid.spec;
  const double cw = grid.cell_w(), ch = grid.cell_h();
  auto xc = [&](int i) { return s.xmin + (i + 0.5) * cw; };
  auto yc = [&](int j) { return s.ymin + (j + 0.5) * ch; };
  // edge ids over the node lattice: horizontal (i,j)-(i+1,j) and vertical
  // (i,j)-(i,j+1)
  auto h_edge = [&](int i, int j) { return (int64_t(j) * s.nx + i) * 2; };
  auto v_edge = [&](int i, int j) { return (int64_t(j) * s.nx + i) * 2 + 1; };

  std::vector<Contour> out;
  for (double level : levels) {
    std::vector<Segment> segs;
    auto lerp = [&](double va, double vb, const Eigen::Vector2d& pa,
                    const Eigen::Vector2d& pb) -> Eigen::Vector2d {
      double t = (level - va) / (vb - va);
      t = std::clamp(t, 0.0, 1.0);
      return pa + t * (pb - pa);
    };
    for (int j = 0; j + 1 < s.ny; ++j)
      for (int i = 0; i + 1 < s.nx; ++i) {
        const double v00 = grid.values(i, j), v10 = grid.values(i + 1, j);
        const double v01 = grid.values(i, j + 1), v11 = grid.values(i + 1, j + 1);
        if (!(std::isfinite(v00) && std::isfinite(v10) && std::isfinite(v01) &&
              std::isfinite(v11)))
          continue;
        int code = (v00 > level ? 1 : 0) | (v10 > level ? 2 : 0) | (v11 > level ? 4 : 0) |
                   (v01 > level ? 8 : 0);
        if (code == 0 || code == 15) continue;
        const Eigen::Vector2d p00(xc(i), yc(j)), p10(xc(i + 1), yc(j)), p01(xc(i), yc(j + 1)),
            p11(xc(i + 1), yc(j + 1));
        // crossing points on the four edges (bottom, right, top, left)
        auto bottom = [&] { return lerp(v00, v10, p00, p10); };
        auto right = [&] { return lerp(v10, v11, p10, p11); };
        auto top = [&] { return lerp(v01, v11, p01, p11); };
        auto left = [&] { return lerp(v00, v01, p00, p01); };
        const int64_t eb = h_edge(i, j), er = v_edge(i + 1, j), et = h_edge(i, j + 1),
                      el = v_edge(i, j);
        auto add = [&](int64_t ea, const Eigen::Vector2d& pa, int64_t ebid,
                       const Eigen::Vector2d& pb) { segs.push_back({ea, ebid, pa, pb}); };
        switch (code) {
          case 1: case 14: add(el, left(), eb, bottom()); break;
          case 2: case 13: add(eb, bottom(), er, right()); break;
          case 3: case 12: add(el, left(), er, right()); break;
          case 4: case 11: add(er, right(), et, top()); break;
          case 6: case 9:  add(eb, bottom(), et, top()); break;
          case 7: case 8:  add(el, left(), et, top()); break;
          case 5: case 10: {
            const double center = 0.25 * (v00 + v10 + v01 + v11);
            const bool joined = (center > level) == (code == 5);
            if (code == 5) {
              if (joined) { add(el, left(), et, top()); add(eb, bottom(), er, right()); }
              else { add(el, left(), eb, bottom()); add(er, right(), et, top()); }
            } else {
              if (joined) { add(eb, bottom(), el, left()); add(et, top(), er, right()); }
              else { add(eb, bottom(), er, right()); add(el, left(), et, top()); }
            }
            break;
          }
          default: break;
        }
      }

    // link segments sharing an edge id into polylines
    std::multimap<int64_t, int> at_edge;
    for (int k = 0; k < int(segs.size()); ++k) {
      at_edge.emplace(segs[k].e0, k);
      at_edge.emplace(segs[k].e1, k);
    }
    std::vector<bool> used(segs.size(), false);
    auto take_neighbor = [&](int64_t edge, int self) -> int {
      auto range = at_edge.equal_range(edge);
      for (auto it = range.first; it != range.second; ++it)
        if (it->second != self && !used[it->second]) return it->second;
      return -1;
    };
    for (int k = 0; k < int(segs.size()); ++k) {
      if (used[k]) continue;
      used[k] = true;
      std::vector<Eigen::Vector2d> pts = {segs[k].p0, segs[k].p1};
      std::vector<int64_t> ends = {segs[k].e0, segs[k].e1};
      // grow forward from ends[1], then backward from ends[0]
      for (int dir = 1; dir >= 0; --dir) {
        int cur = k;
        int64_t edge = ends[dir];
        while (true) {
          int nb = take_neighbor(edge, cur);
          if (nb < 0) break;
          used[nb] = true;
          const bool from0 = (segs[nb].e0 == edge);
          const Eigen::Vector2d& np = from0 ? segs[nb].p1 : segs[nb].p0;
          edge = from0 ? segs[nb].e1 : segs[nb].e0;
          if (dir == 1) pts.push_back(np);
          else pts.insert(pts.begin(), np);
          cur = nb;
        }
        ends[dir] = edge;
      }
      Contour c;
      c.level = level;
      c.points = std::move(pts);
      const double diag = std::sqrt(cw * cw + ch * ch);
      c.closed = c.points.size() >= 3 && (c.points.front() - c.points.back()).norm() <= diag;
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace dualdist
