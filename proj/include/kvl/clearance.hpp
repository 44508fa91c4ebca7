#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "kvl/geometry.hpp"

namespace kvl {

/// Uniform analysis grid over an axis-aligned domain. Cells are squares of
/// side 1/res; y = 1/2 is kept on a row boundary so no cell center lies on
/// the critical line.
struct GridSpec {
  Point lo = Point(-0.0625, -0.0625);
  Point hi = Point(1.0625, 1.0625);
  int res = 512;  // cells per unit
  int nx = 0, ny = 0;

  GridSpec() { finish(); }
  GridSpec(const Point& l, const Point& h, int r) : lo(l), hi(h), res(r) { finish(); }
  void finish() {
    nx = static_cast<int>(std::lround((hi.x() - lo.x()) * res));
    ny = static_cast<int>(std::lround((hi.y() - lo.y()) * res));
  }
  double cell() const { return 1.0 / res; }
  Point center(int ix, int iy) const {
    return Point(lo.x() + (ix + 0.5) / res, lo.y() + (iy + 0.5) / res);
  }
  int xindex(double x) const { return static_cast<int>(std::floor((x - lo.x()) * res)); }
  int yindex(double y) const { return static_cast<int>(std::floor((y - lo.y()) * res)); }
  bool inside(int ix, int iy) const { return ix >= 0 && iy >= 0 && ix < nx && iy < ny; }
  int id(int ix, int iy) const { return iy * nx + ix; }
};

/// Distance-to-obstacle field (plane units) on a GridSpec. Zero exactly on
/// cells whose square intersects an obstacle segment.
struct ClearanceField {
  GridSpec grid;
  Eigen::ArrayXXd values;  // nx x ny
  double at(int ix, int iy) const { return values(ix, iy); }
  bool open(int ix, int iy) const { return values(ix, iy) > 0.0; }
};

/// Two-pass chamfer transform with exact per-cell refinement against nearby
/// obstacle segments. Rejects resolution < 64 cells/unit.
ClearanceField clearance_field(const std::vector<Polyline>& obstacles, const Box& domain,
                               int resolution);

using CellPredicate = std::function<bool(int ix, int iy, const GridSpec&)>;

struct WidestPathResult {
  double bottleneck = 0.0;
  Polyline path;      // cell-center polyline of one witness
  bool reachable = false;
};

/// Bottleneck-maximizing grid search between two cell regions. Ties broken by
/// lexicographic cell order for deterministic witnesses.
WidestPathResult widest_path(const ClearanceField& field, const CellPredicate& source,
                             const CellPredicate& target);

}  // namespace kvl
