#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace kvl {

using Point = Eigen::Vector2d;

/// Straight segment with distinct endpoints.
struct Segment {
  Point a;
  Point b;
  Segment() : a(Point::Zero()), b(Point::Zero()) {}
  Segment(const Point& a_, const Point& b_) : a(a_), b(b_) {}
  double length() const { return (b - a).norm(); }
};

/// Ordered list of >= 2 points, consecutive points distinct.
struct Polyline {
  std::vector<Point> pts;
  Polyline() = default;
  explicit Polyline(std::vector<Point> p) : pts(std::move(p)) {}
  Polyline(std::initializer_list<Point> p) : pts(p) {}
  std::size_t segments() const { return pts.empty() ? 0 : pts.size() - 1; }
  Segment segment(std::size_t i) const { return Segment(pts[i], pts[i + 1]); }
};

enum class IntersectKind { None, Touch, Cross, Overlap };

/// Result of a segment/segment intersection test.
struct SegIntersect {
  IntersectKind kind = IntersectKind::None;
  Point p = Point::Zero();   // representative point for Touch/Cross
  bool hit() const { return kind != IntersectKind::None; }
};

/// Symmetric segment intersection. Touch means a shared endpoint or an
/// endpoint lying on the other segment; Cross is a transversal interior
/// crossing; Overlap is a collinear overlap of positive length.
SegIntersect seg_intersect(const Segment& s, const Segment& t, double eps = 1e-12);

double dist_point_segment(const Point& p, const Segment& s);
double dist_point_polyline(const Point& p, const Polyline& poly);
double dist_segment_segment(const Segment& s, const Segment& t);

/// Number of transversal crossings of the horizontal line y = line_y.
/// Vertices exactly on the line are nudged down by `nudge`; tangential
/// touches therefore count 0.
int crossings(const Polyline& path, double line_y, double nudge = 1e-9);

/// True when no two non-adjacent segments of the polyline intersect and
/// adjacent segments meet only at their shared vertex.
bool is_simple(const Polyline& poly, double eps = 1e-12);

/// Axis-aligned box.
struct Box {
  Point lo, hi;
  Box() : lo(Point::Zero()), hi(Point::Zero()) {}
  Box(const Point& l, const Point& h) : lo(l), hi(h) {}
  double width() const { return hi.x() - lo.x(); }
  double height() const { return hi.y() - lo.y(); }
  double diameter() const { return (hi - lo).norm(); }
  bool contains(const Point& p) const {
    return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y();
  }
  bool contains_open(const Point& p) const {
    return p.x() > lo.x() && p.x() < hi.x() && p.y() > lo.y() && p.y() < hi.y();
  }
  bool intersects_open(const Box& o) const {
    return lo.x() < o.hi.x() && o.lo.x() < hi.x() && lo.y() < o.hi.y() && o.lo.y() < hi.y();
  }
};

bool segment_intersects_box(const Segment& s, const Box& b);

}  // namespace kvl
