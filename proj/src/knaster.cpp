#include "kvl/knaster.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace kvl {

const char* layer_kind_name(LayerKind k) {
  switch (k) {
    case LayerKind::EndLeft: return "end_left";
    case LayerKind::EndRight: return "end_right";
    case LayerKind::V: return "v";
    case LayerKind::Lambda: return "lambda";
    case LayerKind::ContinuityEstimate: return "continuity_estimate";
  }
  return "?";
}

bool Quad::contains(const Point& p, double eps) const {
  const Point c[4] = {bl, br, tr, tl};
  for (int i = 0; i < 4; ++i) {
    const Point& a = c[i];
    const Point& b = c[(i + 1) % 4];
    const double cr = (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
    if (cr < -eps) return false;
  }
  return true;
}

std::string SchemeSpec::name() const {
  switch (variant) {
    case Variant::Standard: return "standard";
    case Variant::TypeA: return "type_a";
    case Variant::Schema: return "schema";
  }
  return "?";
}

std::vector<MarkedPoint> StageApprox::marked_P() const {
  std::vector<MarkedPoint> out;
  for (const auto& m : marked)
    if (!m.top) out.push_back(m);
  return out;
}

std::vector<MarkedPoint> StageApprox::marked_Q() const {
  std::vector<MarkedPoint> out;
  for (const auto& m : marked)
    if (m.top) out.push_back(m);
  return out;
}

std::vector<Polyline> StageApprox::obstacle_polylines() const {
  std::vector<Polyline> out;
  out.reserve(arcs.size());
  for (const auto& a : arcs) out.push_back(a.poly);
  return out;
}

int StageApprox::arc_count(LayerKind k) const {
  int c = 0;
  for (const auto& a : arcs)
    if (a.tag.kind == k) ++c;
  return c;
}

namespace {

struct QuadSplit {
  Quad left, right;
  Polyline arc;  // [left endpoint, vertex, right endpoint]
  Point vertex;
  Point e1, e2;
};

// Step-k arc inside one quad: V when k odd (vertex on bottom, endpoints at the
// 1/3 and 2/3 parameter points of the top side), Lambda when k even.
QuadSplit split_quad(const Quad& q, int k) {
  QuadSplit s;
  if (k % 2 == 1) {
    s.vertex = 0.5 * (q.bl + q.br);
    s.e1 = q.tl + (q.tr - q.tl) / 3.0;
    s.e2 = q.tl + 2.0 * (q.tr - q.tl) / 3.0;
    s.arc = Polyline{s.e1, s.vertex, s.e2};
    s.left = Quad{q.bl, s.vertex, s.e1, q.tl};
    s.right = Quad{s.vertex, q.br, q.tr, s.e2};
  } else {
    s.vertex = 0.5 * (q.tl + q.tr);
    s.e1 = q.bl + (q.br - q.bl) / 3.0;
    s.e2 = q.bl + 2.0 * (q.br - q.bl) / 3.0;
    s.arc = Polyline{s.e1, s.vertex, s.e2};
    s.left = Quad{q.bl, s.e1, s.vertex, q.tl};
    s.right = Quad{s.e2, q.br, q.tr, s.vertex};
  }
  return s;
}

void add_marked(std::vector<MarkedPoint>& out, std::map<std::pair<int64_t, int64_t>, int>& seen,
                const Point& p, bool top, const std::string& label) {
  const auto key = std::make_pair(static_cast<int64_t>(std::llround(p.x() * 1e12)),
                                  static_cast<int64_t>(std::llround(p.y() * 1e12)));
  if (seen.count(key)) return;
  seen[key] = 1;
  out.push_back(MarkedPoint{p, top, label});
}

}  // namespace

StageApprox build_standard_stage(int n) {
  if (n < 1 || n > 12) throw std::runtime_error("build_standard_stage: n out of range [1,12]");
  StageApprox st;
  st.scheme.variant = SchemeSpec::Variant::Standard;
  st.scheme.stage = n;
  st.stage = n;

  std::map<std::pair<int64_t, int64_t>, int> seen;
  const Polyline endl{Point(0, 0), Point(0, 1)};
  const Polyline endr{Point(1, 0), Point(1, 1)};
  st.arcs.push_back(Arc{endl, LayerTag{LayerKind::EndLeft, 0, {}}});
  st.arcs.push_back(Arc{endr, LayerTag{LayerKind::EndRight, 0, {}}});
  add_marked(st.marked, seen, Point(0, 0), false, "p");
  add_marked(st.marked, seen, Point(1, 0), false, "p'");
  add_marked(st.marked, seen, Point(0, 1), true, "q");
  add_marked(st.marked, seen, Point(1, 1), true, "q'");

  Quad unit{Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)};
  unit.stage = 1;
  unit.index = 0;
  st.deltas.push_back({unit});

  for (int k = 1; k <= n; ++k) {
    const std::vector<Quad>& delta = st.deltas.back();
    std::vector<Quad> next;
    next.reserve(delta.size() * 2);
    for (const Quad& q : delta) {
      QuadSplit s = split_quad(q, k);
      LayerTag tag;
      tag.kind = (k % 2 == 1) ? LayerKind::V : LayerKind::Lambda;
      tag.stage_introduced = k;
      tag.address = q.address;
      st.arcs.push_back(Arc{s.arc, tag});
      const bool vertex_top = (k % 2 == 0);
      add_marked(st.marked, seen, s.vertex, vertex_top, "vertex");
      add_marked(st.marked, seen, s.e1, !vertex_top, "end");
      add_marked(st.marked, seen, s.e2, !vertex_top, "end");
      s.left.stage = k + 1;
      s.right.stage = k + 1;
      s.left.address = q.address;
      s.left.address.push_back(0);
      s.right.address = q.address;
      s.right.address.push_back(1);
      s.left.index = static_cast<int>(next.size());
      next.push_back(s.left);
      s.right.index = static_cast<int>(next.size());
      next.push_back(s.right);
    }
    st.deltas.push_back(std::move(next));
  }
  for (std::size_t i = 0; i < st.deltas.back().size(); ++i) st.deltas.back()[i].index = static_cast<int>(i);

  double h = 0.0;
  for (const Quad& q : st.deltas.back()) h = std::max(h, q.max_width());
  st.hausdorff_bound = h;
  return st;
}

std::vector<Quad> quadrilaterals(const StageApprox& stage, int n) {
  if (stage.scheme.variant == SchemeSpec::Variant::Schema)
    throw std::runtime_error("quadrilaterals: standard-scheme stages only");
  if (n < 1 || n > static_cast<int>(stage.deltas.size()))
    throw std::runtime_error("quadrilaterals: n out of range");
  return stage.deltas[static_cast<std::size_t>(n - 1)];
}

LayerEstimate continuity_layer_estimate(const std::vector<int>& address, int n) {
  if (n < 1) throw std::runtime_error("continuity_layer_estimate: n must be >= 1");
  if (static_cast<int>(address.size()) < n)
    throw std::runtime_error("continuity_layer_estimate: address shorter than n");
  for (int b : address)
    if (b != 0 && b != 1) throw std::runtime_error("continuity_layer_estimate: address bits must be 0/1");
  Quad q{Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)};
  for (int k = 1; k <= n; ++k) {
    QuadSplit s = split_quad(q, k);
    q = address[static_cast<std::size_t>(k - 1)] == 0 ? s.left : s.right;
  }
  const bool side_right = static_cast<int>(address.size()) > n && address[static_cast<std::size_t>(n)] == 1;
  LayerEstimate est;
  est.segment = side_right ? q.right_side() : q.left_side();
  const bool is_end_left = std::abs(est.segment.a.x()) < 1e-15 && std::abs(est.segment.b.x()) < 1e-15;
  const bool is_end_right = std::abs(est.segment.a.x() - 1) < 1e-15 && std::abs(est.segment.b.x() - 1) < 1e-15;
  est.bound = (is_end_left || is_end_right) ? 0.0 : q.max_width();
  return est;
}

MarkedSets marked_points(const StageApprox& stage) {
  MarkedSets s;
  s.P = stage.marked_P();
  s.Q = stage.marked_Q();
  return s;
}

Segment continuity_layer_limit(const std::vector<int>& head, int tail_a, int tail_b, int depth) {
  Quad q{Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)};
  for (int k = 1; k <= depth; ++k) {
    QuadSplit s = split_quad(q, k);
    int bit;
    const std::size_t i = static_cast<std::size_t>(k - 1);
    if (i < head.size()) bit = head[i];
    else bit = ((i - head.size()) % 2 == 0) ? tail_a : tail_b;
    q = bit == 0 ? s.left : s.right;
  }
  // The quad collapses onto the limiting straight arc; average its sides.
  return Segment(0.5 * (q.bl + q.br), 0.5 * (q.tl + q.tr));
}

}  // namespace kvl
