#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kvl/geometry.hpp"

using namespace kvl;

TEST_CASE("segment intersection basics") {
  // symmetric diagonal crossing
  auto r = seg_intersect(Segment({0, 0}, {1, 1}), Segment({0, 1}, {1, 0}));
  CHECK(r.kind == IntersectKind::Cross);
  CHECK(r.p.x() == doctest::Approx(0.5));
  CHECK(r.p.y() == doctest::Approx(0.5));

  // parallel disjoint
  CHECK(!seg_intersect(Segment({0, 0}, {1, 0}), Segment({0, 1}, {1, 1})).hit());

  // shared endpoint
  auto t = seg_intersect(Segment({0, 0}, {1, 0}), Segment({1, 0}, {1, 1}));
  CHECK(t.kind == IntersectKind::Touch);
  CHECK(t.p.x() == doctest::Approx(1.0));
  CHECK(t.p.y() == doctest::Approx(0.0));

  // collinear overlap
  auto o = seg_intersect(Segment({0, 0}, {1, 0}), Segment({0.5, 0}, {2, 0}));
  CHECK(o.kind == IntersectKind::Overlap);
}

TEST_CASE("segment intersection is symmetric") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  for (int it = 0; it < 500; ++it) {
    Segment a({u(rng), u(rng)}, {u(rng), u(rng)});
    Segment b({u(rng), u(rng)}, {u(rng), u(rng)});
    auto r1 = seg_intersect(a, b);
    auto r2 = seg_intersect(b, a);
    CHECK(r1.kind == r2.kind);
    if (r1.kind == IntersectKind::Cross) CHECK((r1.p - r2.p).norm() < 1e-9);
  }
}

TEST_CASE("point to polyline distance") {
  CHECK(dist_point_polyline(Point(0, 0), Polyline{Point(1, 0), Point(1, 1)}) ==
        doctest::Approx(1.0));
  CHECK(dist_point_polyline(Point(0.5, 0.5), Polyline{Point(0, 0), Point(1, 0)}) ==
        doctest::Approx(0.5));
  CHECK(dist_point_polyline(Point(2, 0), Polyline{Point(0, 0), Point(1, 0)}) ==
        doctest::Approx(1.0));
}

TEST_CASE("crossing counts") {
  CHECK(crossings(Polyline{Point(0.5, 0), Point(0.5, 1)}, 0.5) == 1);
  CHECK(crossings(Polyline{Point(1.0 / 3, 1), Point(0.5, 0), Point(2.0 / 3, 1)}, 0.5) == 2);
  CHECK(crossings(Polyline{Point(0, 0.25), Point(1, 0.25)}, 0.5) == 0);
  // vertex exactly on the line is perturbed down: tangential touch counts 0
  CHECK(crossings(Polyline{Point(0, 0.4), Point(0.5, 0.5), Point(1, 0.4)}, 0.5) == 0);
  // passing through a vertex on the line still counts once
  CHECK(crossings(Polyline{Point(0, 0.4), Point(0.5, 0.5), Point(1, 0.6)}, 0.5) == 1);
}

TEST_CASE("crossing parity property") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (int it = 0; it < 300; ++it) {
    Polyline p;
    const int n = 3 + static_cast<int>(u(rng) * 6);
    for (int i = 0; i < n; ++i) p.pts.emplace_back(u(rng), u(rng));
    bool ok = true;  // skip paths with vertices too close to the line
    for (const Point& q : p.pts)
      if (std::abs(q.y() - 0.5) < 1e-6) ok = false;
    if (!ok) continue;
    const int c = crossings(p, 0.5);
    const bool same_side = (p.pts.front().y() < 0.5) == (p.pts.back().y() < 0.5);
    CHECK((c % 2 == 0) == same_side);
  }
}

TEST_CASE("simplicity check") {
  CHECK(is_simple(Polyline{Point(0, 0), Point(1, 0), Point(1, 1)}));
  CHECK(!is_simple(Polyline{Point(0, 0), Point(1, 1), Point(1, 0), Point(0, 1)}));
}
