#include "kvl/clearance.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace kvl {

namespace {

// Marks cells whose square intersects the segment by walking it in sub-cell
// steps; the step is small enough that no crossed cell is skipped.
void mark_segment(const GridSpec& g, const Segment& s, std::vector<char>& hit) {
  const double step = 0.45 * g.cell();
  const double len = s.length();
  const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
  for (int k = 0; k <= n; ++k) {
    const Point p = s.a + (static_cast<double>(k) / n) * (s.b - s.a);
    const int ix = g.xindex(p.x()), iy = g.yindex(p.y());
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy) {
        const int jx = ix + dx, jy = iy + dy;
        if (!g.inside(jx, jy)) continue;
        // cell square vs segment
        const Point lo(g.lo.x() + jx * g.cell(), g.lo.y() + jy * g.cell());
        const Box cellbox(lo, lo + Point(g.cell(), g.cell()));
        if (hit[g.id(jx, jy)]) continue;
        if (segment_intersects_box(s, cellbox)) hit[g.id(jx, jy)] = 1;
      }
  }
}

}  // namespace

ClearanceField clearance_field(const std::vector<Polyline>& obstacles, const Box& domain,
                               int resolution) {
  if (resolution < 64)
    throw std::runtime_error("clearance_field: resolution must be >= 64 cells/unit");
  ClearanceField f;
  f.grid = GridSpec(domain.lo, domain.hi, resolution);
  const GridSpec& g = f.grid;
  const double big = (domain.hi - domain.lo).norm();  // cap: domain diameter

  std::vector<char> hit(static_cast<std::size_t>(g.nx) * g.ny, 0);
  std::vector<Segment> segs;
  for (const Polyline& poly : obstacles)
    for (std::size_t i = 0; i + 1 < poly.pts.size(); ++i) {
      segs.emplace_back(poly.pts[i], poly.pts[i + 1]);
      mark_segment(g, segs.back(), hit);
    }

  f.values = Eigen::ArrayXXd::Constant(g.nx, g.ny, big);
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix)
      if (hit[g.id(ix, iy)]) f.values(ix, iy) = 0.0;

  if (segs.empty()) return f;  // empty obstacle set: capped field

  // Exact squared distance transform to the rasterized obstacle cells (two
  // passes of the 1D lower-envelope transform), then sqrt.
  const double c = g.cell();
  const double inf = 1e18;
  std::vector<double> d2(static_cast<std::size_t>(g.nx) * g.ny, inf);
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix)
      if (hit[g.id(ix, iy)]) d2[static_cast<std::size_t>(g.id(ix, iy))] = 0.0;

  const int maxn = std::max(g.nx, g.ny);
  std::vector<double> fbuf(static_cast<std::size_t>(maxn)), dbuf(static_cast<std::size_t>(maxn)),
      zbuf(static_cast<std::size_t>(maxn) + 1);
  std::vector<int> vbuf(static_cast<std::size_t>(maxn));
  auto dt1d = [&](int n) {
    int k = 0;
    vbuf[0] = 0;
    zbuf[0] = -inf;
    zbuf[1] = inf;
    for (int q = 1; q < n; ++q) {
      double s = ((fbuf[q] + q * q) - (fbuf[vbuf[k]] + vbuf[k] * vbuf[k])) /
                 (2.0 * q - 2.0 * vbuf[k]);
      while (s <= zbuf[k]) {
        --k;
        s = ((fbuf[q] + q * q) - (fbuf[vbuf[k]] + vbuf[k] * vbuf[k])) /
            (2.0 * q - 2.0 * vbuf[k]);
      }
      ++k;
      vbuf[k] = q;
      zbuf[k] = s;
      zbuf[k + 1] = inf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
      while (zbuf[k + 1] < q) ++k;
      const double dq = q - vbuf[k];
      dbuf[q] = dq * dq + fbuf[vbuf[k]];
    }
  };
  for (int ix = 0; ix < g.nx; ++ix) {
    for (int iy = 0; iy < g.ny; ++iy) fbuf[iy] = d2[static_cast<std::size_t>(g.id(ix, iy))];
    dt1d(g.ny);
    for (int iy = 0; iy < g.ny; ++iy) d2[static_cast<std::size_t>(g.id(ix, iy))] = dbuf[iy];
  }
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) fbuf[ix] = d2[static_cast<std::size_t>(g.id(ix, iy))];
    dt1d(g.nx);
    for (int ix = 0; ix < g.nx; ++ix) d2[static_cast<std::size_t>(g.id(ix, iy))] = dbuf[ix];
  }
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix)
      f.values(ix, iy) = std::min(big, std::sqrt(d2[static_cast<std::size_t>(g.id(ix, iy))]) * c);

  // Exact refinement: bucket segments, then recompute cells near obstacles
  // against the true segment set. Gives half-cell accuracy near walls where
  // the analyses actually look.
  const int bx = std::max(1, g.nx / 64), by = std::max(1, g.ny / 64);
  const int nbx = (g.nx + bx - 1) / bx, nby = (g.ny + by - 1) / by;
  std::vector<std::vector<int>> buckets(static_cast<std::size_t>(nbx) * nby);
  auto bucket_id = [&](int cx, int cy) { return cy * nbx + cx; };
  for (std::size_t si = 0; si < segs.size(); ++si) {
    const Segment& s = segs[si];
    const double pad = 0.0;
    int x0 = std::clamp(static_cast<int>(std::floor((std::min(s.a.x(), s.b.x()) - pad - g.lo.x()) * g.res)) / bx, 0, nbx - 1);
    int x1 = std::clamp(static_cast<int>(std::floor((std::max(s.a.x(), s.b.x()) + pad - g.lo.x()) * g.res)) / bx, 0, nbx - 1);
    int y0 = std::clamp(static_cast<int>(std::floor((std::min(s.a.y(), s.b.y()) - pad - g.lo.y()) * g.res)) / by, 0, nby - 1);
    int y1 = std::clamp(static_cast<int>(std::floor((std::max(s.a.y(), s.b.y()) + pad - g.lo.y()) * g.res)) / by, 0, nby - 1);
    for (int cy = y0; cy <= y1; ++cy)
      for (int cx = x0; cx <= x1; ++cx) buckets[bucket_id(cx, cy)].push_back(static_cast<int>(si));
  }
  const double refine_limit = 8.0 * c;
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      if (f.values(ix, iy) <= 0.0 || f.values(ix, iy) > refine_limit) continue;
      const Point p = g.center(ix, iy);
      double best = f.values(ix, iy);
      const int cx = ix / bx, cy = iy / by;
      const int reach = 1 + static_cast<int>(std::ceil(refine_limit * g.res / std::min(bx, by)));
      for (int oy = -reach; oy <= reach; ++oy)
        for (int ox = -reach; ox <= reach; ++ox) {
          const int qx = cx + ox, qy = cy + oy;
          if (qx < 0 || qy < 0 || qx >= nbx || qy >= nby) continue;
          for (int si : buckets[bucket_id(qx, qy)])
            best = std::min(best, dist_point_segment(p, segs[si]));
        }
      f.values(ix, iy) = best;
    }
  return f;
}

WidestPathResult widest_path(const ClearanceField& field, const CellPredicate& source,
                             const CellPredicate& target) {
  const GridSpec& g = field.grid;
  const int n = g.nx * g.ny;
  std::vector<double> best(n, -1.0);
  std::vector<int> parent(n, -1);
  std::vector<char> done(n, 0);
  std::vector<char> is_target(n, 0);

  // Max-heap keyed by (bottleneck, -cell id) for determinism.
  using Entry = std::pair<double, int>;
  auto cmp = [](const Entry& a, const Entry& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);

  bool any_source = false, any_target = false;
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      const int id = g.id(ix, iy);
      if (target(ix, iy, g)) { is_target[id] = 1; any_target = true; }
      if (source(ix, iy, g)) {
        any_source = true;
        const double v = field.at(ix, iy);
        if (v > 0.0 && v > best[id]) { best[id] = v; heap.emplace(v, id); }
      }
    }
  if (!any_source || !any_target)
    throw std::runtime_error("widest_path: empty source or target region");

  WidestPathResult res;
  int goal = -1;
  const int dx[4] = {1, -1, 0, 0};
  const int dy[4] = {0, 0, 1, -1};
  while (!heap.empty()) {
    auto [v, id] = heap.top();
    heap.pop();
    if (done[id] || v < best[id]) continue;
    done[id] = 1;
    if (is_target[id]) { goal = id; res.bottleneck = v; break; }
    const int ix = id % g.nx, iy = id / g.nx;
    for (int k = 0; k < 4; ++k) {
      const int jx = ix + dx[k], jy = iy + dy[k];
      if (!g.inside(jx, jy)) continue;
      const int jd = g.id(jx, jy);
      if (done[jd]) continue;
      if (field.at(jx, jy) <= 0.0) continue;
      const double nv = std::min(v, field.at(jx, jy));
      if (nv > best[jd]) {
        best[jd] = nv;
        parent[jd] = id;
        heap.emplace(nv, jd);
      }
    }
  }
  if (goal < 0) {
    res.reachable = false;
    res.bottleneck = 0.0;
    return res;
  }
  res.reachable = true;
  std::vector<Point> rev;
  for (int id = goal; id >= 0; id = parent[id]) rev.push_back(g.center(id % g.nx, id / g.nx));
  std::reverse(rev.begin(), rev.end());
  if (rev.size() == 1) rev.push_back(rev.front() + Point(1e-9, 0));
  res.path = Polyline(std::move(rev));
  return res;
}

}  // namespace kvl
