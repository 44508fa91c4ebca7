#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kvl/knaster.hpp"

using namespace kvl;

TEST_CASE("stage 1 geometry matches the construction exactly") {
  const StageApprox st = build_standard_stage(1);
  REQUIRE(st.arcs.size() == 3);
  const Arc* v = nullptr;
  for (const Arc& a : st.arcs)
    if (a.tag.kind == LayerKind::V) v = &a;
  REQUIRE(v != nullptr);
  CHECK(v->poly.pts[0] == Point(1.0 / 3, 1));
  CHECK(v->poly.pts[1] == Point(0.5, 0));
  CHECK(v->poly.pts[2] == Point(2.0 / 3, 1));
}

TEST_CASE("stage 2 left lambda") {
  const StageApprox st = build_standard_stage(2);
  const Arc* lam = nullptr;
  for (const Arc& a : st.arcs)
    if (a.tag.kind == LayerKind::Lambda && a.tag.address == std::vector<int>{0}) lam = &a;
  REQUIRE(lam != nullptr);
  CHECK(lam->poly.pts[1].x() == doctest::Approx(1.0 / 6).epsilon(1e-12));
  CHECK(lam->poly.pts[1].y() == doctest::Approx(1.0));
  CHECK(lam->poly.pts[0].x() == doctest::Approx(1.0 / 6).epsilon(1e-12));
  CHECK(lam->poly.pts[0].y() == doctest::Approx(0.0));
  CHECK(lam->poly.pts[2].x() == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(lam->poly.pts[2].y() == doctest::Approx(0.0));
}

TEST_CASE("count law: 2^{k-1} arcs per step, 2^n - 1 total") {
  for (int n = 1; n <= 8; ++n) {
    const StageApprox st = build_standard_stage(n);
    int total = 0;
    for (int k = 1; k <= n; ++k) {
      int c = 0;
      for (const Arc& a : st.arcs)
        if (a.tag.stage_introduced == k &&
            (a.tag.kind == LayerKind::V || a.tag.kind == LayerKind::Lambda))
          ++c;
      CHECK(c == (1 << (k - 1)));
      total += c;
    }
    CHECK(total == (1 << n) - 1);
    CHECK(st.arc_count(LayerKind::EndLeft) == 1);
    CHECK(st.arc_count(LayerKind::EndRight) == 1);
  }
}

TEST_CASE("V at odd stages, Lambda at even stages") {
  const StageApprox st = build_standard_stage(6);
  for (const Arc& a : st.arcs) {
    if (a.tag.kind == LayerKind::V) CHECK(a.tag.stage_introduced % 2 == 1);
    if (a.tag.kind == LayerKind::Lambda) CHECK(a.tag.stage_introduced % 2 == 0);
    if (a.tag.kind == LayerKind::V || a.tag.kind == LayerKind::Lambda)
      CHECK(static_cast<int>(a.tag.address.size()) == a.tag.stage_introduced - 1);
  }
}

TEST_CASE("quadrilaterals") {
  const StageApprox st = build_standard_stage(4);
  CHECK(quadrilaterals(st, 1).size() == 1);
  const auto d2 = quadrilaterals(st, 2);
  REQUIRE(d2.size() == 2);
  CHECK(d2[0].bl == Point(0, 0));
  CHECK(d2[0].br == Point(0.5, 0));
  CHECK(d2[0].tr.x() == doctest::Approx(1.0 / 3));
  CHECK(d2[0].tr.y() == doctest::Approx(1.0));
  CHECK(d2[0].tl == Point(0, 1));
  CHECK(quadrilaterals(st, 3).size() == 4);
  CHECK(quadrilaterals(st, 5).size() == 16);
  CHECK_THROWS(quadrilaterals(st, 6));
}

TEST_CASE("arcs never cross: exhaustive sweep") {
  const StageApprox st = build_standard_stage(6);
  for (std::size_t i = 0; i < st.arcs.size(); ++i)
    for (std::size_t j = i + 1; j < st.arcs.size(); ++j)
      for (std::size_t s = 0; s + 1 < st.arcs[i].poly.pts.size(); ++s)
        for (std::size_t t = 0; t + 1 < st.arcs[j].poly.pts.size(); ++t)
          CHECK(!seg_intersect(st.arcs[i].poly.segment(s), st.arcs[j].poly.segment(t)).hit());
}

TEST_CASE("nesting: stage n+1 arcs live inside one quad of Delta_{n+1}") {
  const StageApprox st = build_standard_stage(5);
  const auto d5 = quadrilaterals(st, 5);
  for (const Arc& a : st.arcs) {
    if (a.tag.stage_introduced != 5) continue;
    int containing = 0;
    for (const Quad& q : d5) {
      bool inside = true;
      for (const Point& p : a.poly.pts)
        if (!q.contains(p, 1e-9)) inside = false;
      if (inside) ++containing;
    }
    CHECK(containing == 1);
  }
}

TEST_CASE("marked points") {
  const StageApprox st1 = build_standard_stage(1);
  const MarkedSets m1 = marked_points(st1);
  CHECK(m1.P.size() == 3);
  CHECK(m1.Q.size() == 4);
  for (const auto& p : m1.P) CHECK(p.p.y() == 0.0);
  for (const auto& q : m1.Q) CHECK(q.p.y() == 1.0);

  const StageApprox st2 = build_standard_stage(2);
  const MarkedSets m2 = marked_points(st2);
  bool has_sixth = false;
  for (const auto& q : m2.Q)
    if (std::abs(q.p.x() - 1.0 / 6) < 1e-12 && q.p.y() == 1.0) has_sixth = true;
  CHECK(has_sixth);

  // every arc endpoint and vertex is covered by the marked sets
  for (int n = 1; n <= 4; ++n) {
    const StageApprox st = build_standard_stage(n);
    auto covered = [&](const Point& p) {
      for (const MarkedPoint& m : st.marked)
        if ((m.p - p).norm() < 1e-12) return true;
      return false;
    };
    for (const Arc& a : st.arcs) {
      CHECK(covered(a.poly.pts.front()));
      CHECK(covered(a.poly.pts.back()));
      if (a.poly.pts.size() == 3) CHECK(covered(a.poly.pts[1]));
    }
  }
}

TEST_CASE("hausdorff cascade: new arcs lie within h(n) of the old stage") {
  for (int n = 1; n <= 6; ++n) {
    const StageApprox st = build_standard_stage(n);
    const StageApprox nxt = build_standard_stage(n + 1);
    double worst = 0;
    for (const Arc& a : nxt.arcs) {
      if (a.tag.stage_introduced != n + 1) continue;
      for (const Point& p : a.poly.pts) {
        double best = std::numeric_limits<double>::infinity();
        for (const Arc& b : st.arcs) best = std::min(best, dist_point_polyline(p, b.poly));
        worst = std::max(worst, best);
      }
    }
    CHECK(worst <= st.hausdorff_bound + 1e-12);
    CHECK(build_standard_stage(n + 1).hausdorff_bound < st.hausdorff_bound);
  }
}

TEST_CASE("continuity layer estimates") {
  std::vector<int> leftmost(10, 0), rightmost(10, 1);
  const LayerEstimate l = continuity_layer_estimate(leftmost, 6);
  CHECK(l.segment.a.x() == 0.0);
  CHECK(l.segment.b.x() == 0.0);
  CHECK(l.bound == 0.0);
  const LayerEstimate r = continuity_layer_estimate(rightmost, 6);
  CHECK(r.segment.a.x() == 1.0);
  CHECK(r.bound == 0.0);

  std::vector<int> alt;
  for (int i = 0; i < 10; ++i) alt.push_back(i % 2);
  const LayerEstimate e6 = continuity_layer_estimate(alt, 6);
  const LayerEstimate e7 = continuity_layer_estimate(alt, 7);
  // Hausdorff distance between the two estimates within the n=6 bound
  double worst = 0;
  for (int k = 0; k <= 8; ++k) {
    const Point p = e7.segment.a + (k / 8.0) * (e7.segment.b - e7.segment.a);
    worst = std::max(worst, dist_point_segment(p, e6.segment));
    const Point q = e6.segment.a + (k / 8.0) * (e6.segment.b - e6.segment.a);
    worst = std::max(worst, dist_point_segment(q, e7.segment));
  }
  CHECK(worst <= e6.bound + 1e-12);
  CHECK(e7.bound < e6.bound);
  CHECK_THROWS(continuity_layer_estimate({0, 1}, 5));
}

TEST_CASE("build_standard_stage rejects out-of-range stages") {
  CHECK_THROWS(build_standard_stage(0));
  CHECK_THROWS(build_standard_stage(13));
}
