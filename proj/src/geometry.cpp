#include "kvl/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace kvl {

namespace {

double cross2(const Point& o, const Point& a, const Point& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

bool on_segment_collinear(const Point& p, const Segment& s, double eps) {
  return p.x() >= std::min(s.a.x(), s.b.x()) - eps && p.x() <= std::max(s.a.x(), s.b.x()) + eps &&
         p.y() >= std::min(s.a.y(), s.b.y()) - eps && p.y() <= std::max(s.a.y(), s.b.y()) + eps;
}

}  // namespace

SegIntersect seg_intersect(const Segment& s, const Segment& t, double eps) {
  SegIntersect r;
  const double d1 = cross2(t.a, t.b, s.a);
  const double d2 = cross2(t.a, t.b, s.b);
  const double d3 = cross2(s.a, s.b, t.a);
  const double d4 = cross2(s.a, s.b, t.b);
  const double scale = std::max({1.0, s.length(), t.length()});
  const double tol = eps * scale;

  const bool c1 = std::abs(d1) <= tol, c2 = std::abs(d2) <= tol;
  const bool c3 = std::abs(d3) <= tol, c4 = std::abs(d4) <= tol;

  if (c1 && c2 && c3 && c4) {
    // Collinear. Project on the dominant axis.
    const Point dir = s.b - s.a;
    const int ax = std::abs(dir.x()) >= std::abs(dir.y()) ? 0 : 1;
    double s0 = s.a[ax], s1 = s.b[ax], t0 = t.a[ax], t1 = t.b[ax];
    if (s0 > s1) std::swap(s0, s1);
    if (t0 > t1) std::swap(t0, t1);
    const double lo = std::max(s0, t0), hi = std::min(s1, t1);
    if (hi < lo - tol) return r;
    if (hi - lo <= tol) {
      r.kind = IntersectKind::Touch;
      // shared endpoint
      for (const Point* p : {&s.a, &s.b})
        if (dist_point_segment(*p, t) <= tol) r.p = *p;
      return r;
    }
    r.kind = IntersectKind::Overlap;
    r.p = 0.5 * (Point(std::max(s0, t0), 0) + Point(std::min(s1, t1), 0));  // placeholder x
    // representative point: middle of the overlap along the segment
    {
      const double mid = 0.5 * (lo + hi);
      const double denom = (s.b[ax] - s.a[ax]);
      const double u = denom == 0 ? 0.5 : (mid - s.a[ax]) / denom;
      r.p = s.a + u * (s.b - s.a);
    }
    return r;
  }

  if (((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol)) &&
      ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol))) {
    const double denom = d1 - d2;
    const double u = d1 / denom;
    r.kind = IntersectKind::Cross;
    r.p = s.a + u * (s.b - s.a);
    return r;
  }

  // Endpoint touches.
  if (c1 && on_segment_collinear(s.a, t, tol)) { r.kind = IntersectKind::Touch; r.p = s.a; return r; }
  if (c2 && on_segment_collinear(s.b, t, tol)) { r.kind = IntersectKind::Touch; r.p = s.b; return r; }
  if (c3 && on_segment_collinear(t.a, s, tol)) { r.kind = IntersectKind::Touch; r.p = t.a; return r; }
  if (c4 && on_segment_collinear(t.b, s, tol)) { r.kind = IntersectKind::Touch; r.p = t.b; return r; }
  return r;
}

double dist_point_segment(const Point& p, const Segment& s) {
  const Point d = s.b - s.a;
  const double l2 = d.squaredNorm();
  if (l2 == 0.0) return (p - s.a).norm();
  double u = (p - s.a).dot(d) / l2;
  u = std::clamp(u, 0.0, 1.0);
  return (p - (s.a + u * d)).norm();
}

double dist_point_polyline(const Point& p, const Polyline& poly) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < poly.pts.size(); ++i)
    best = std::min(best, dist_point_segment(p, Segment(poly.pts[i], poly.pts[i + 1])));
  return best;
}

double dist_segment_segment(const Segment& s, const Segment& t) {
  if (seg_intersect(s, t).hit()) return 0.0;
  return std::min(std::min(dist_point_segment(s.a, t), dist_point_segment(s.b, t)),
                  std::min(dist_point_segment(t.a, s), dist_point_segment(t.b, s)));
}

int crossings(const Polyline& path, double line_y, double nudge) {
  int count = 0;
  auto adj = [&](double y) {
    if (y == line_y) return y - nudge;
    return y;
  };
  for (std::size_t i = 0; i + 1 < path.pts.size(); ++i) {
    const double y0 = adj(path.pts[i].y());
    const double y1 = adj(path.pts[i + 1].y());
    if ((y0 < line_y && y1 > line_y) || (y0 > line_y && y1 < line_y)) ++count;
  }
  return count;
}

bool is_simple(const Polyline& poly, double eps) {
  const std::size_t n = poly.segments();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const SegIntersect r = seg_intersect(poly.segment(i), poly.segment(j), eps);
      if (!r.hit()) continue;
      if (j == i + 1) {
        if (r.kind == IntersectKind::Touch &&
            (r.p - poly.pts[i + 1]).norm() <= eps * 10) continue;
        return false;
      }
      // closing touch of first/last is allowed
      if (i == 0 && j == n - 1 && r.kind == IntersectKind::Touch &&
          ((r.p - poly.pts.front()).norm() <= eps * 10 || (r.p - poly.pts.back()).norm() <= eps * 10))
        continue;
      return false;
    }
  }
  return true;
}

bool segment_intersects_box(const Segment& s, const Box& b) {
  // Trivial accept: either endpoint inside.
  if (b.contains(s.a) || b.contains(s.b)) return true;
  const Point c[4] = {b.lo, Point(b.hi.x(), b.lo.y()), b.hi, Point(b.lo.x(), b.hi.y())};
  for (int i = 0; i < 4; ++i)
    if (seg_intersect(s, Segment(c[i], c[(i + 1) % 4])).hit()) return true;
  return false;
}

}  // namespace kvl
