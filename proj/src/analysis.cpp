#include "kvl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>
#include <sstream>

namespace kvl {

Box analysis_domain() { return Box(Point(-0.0625, -0.0625), Point(1.0625, 1.0625)); }

namespace {

std::vector<int> cut_cells(const GridSpec& g, const Segment& s) {
  std::vector<int> out;
  const double step = 0.4 / g.res;
  const int n = std::max(1, static_cast<int>(std::ceil(s.length() / step)));
  std::set<int> seen;
  for (int k = 0; k <= n; ++k) {
    const Point p = s.a + (static_cast<double>(k) / n) * (s.b - s.a);
    const int ix = g.xindex(p.x()), iy = g.yindex(p.y());
    if (!g.inside(ix, iy)) continue;
    const int id = g.id(ix, iy);
    if (seen.insert(id).second) out.push_back(id);
  }
  return out;
}

// flood over open, non-barrier cells; returns false if the flood reaches the
// domain edge (unbounded side)
bool flood_from(const ClearanceField& field, int seed, const std::vector<char>& barrier,
                std::vector<int>& mask) {
  const GridSpec& g = field.grid;
  std::vector<char> vis(static_cast<std::size_t>(g.nx) * g.ny, 0);
  std::vector<int> stack{seed};
  vis[static_cast<std::size_t>(seed)] = 1;
  mask.clear();
  bool bounded = true;
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    mask.push_back(id);
    const int ix = id % g.nx, iy = id / g.nx;
    if (ix == 0 || iy == 0 || ix == g.nx - 1 || iy == g.ny - 1) bounded = false;
    const int dx[4] = {1, -1, 0, 0};
    const int dy[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int jx = ix + dx[k], jy = iy + dy[k];
      if (!g.inside(jx, jy) || !field.open(jx, jy)) continue;
      const int jd = g.id(jx, jy);
      if (vis[static_cast<std::size_t>(jd)] || barrier[static_cast<std::size_t>(jd)]) continue;
      vis[static_cast<std::size_t>(jd)] = 1;
      stack.push_back(jd);
    }
    if (!bounded) return false;
  }
  return true;
}

std::vector<Pocket> flood_pockets(const ClearanceField& field, const std::vector<Crosscut>& cuts) {
  const GridSpec& g = field.grid;
  std::vector<char> schema_barrier(static_cast<std::size_t>(g.nx) * g.ny, 0);
  for (const Crosscut& c : cuts)
    if (c.kind == CutKind::SchemaCut)
      for (int id : cut_cells(g, c.segment)) schema_barrier[static_cast<std::size_t>(id)] = 1;

  std::vector<Pocket> out;
  for (const Crosscut& c : cuts) {
    std::vector<char> barrier = schema_barrier;
    for (int id : cut_cells(g, c.segment)) barrier[static_cast<std::size_t>(id)] = 1;

    Point dir = c.segment.b - c.segment.a;
    dir.normalize();
    const Point perp(-dir.y(), dir.x());

    std::vector<int> mask;
    bool found = false;
    for (double f : {0.5, 0.62, 0.38, 0.75, 0.25}) {
      for (double sgn : {1.0, -1.0}) {
        for (int off = 1; off <= 4 && !found; ++off) {
          const Point p = c.segment.a + f * (c.segment.b - c.segment.a) +
                          sgn * off * (1.0 / g.res) * perp;
          const int ix = g.xindex(p.x()), iy = g.yindex(p.y());
          if (!g.inside(ix, iy) || !field.open(ix, iy)) continue;
          const int id = g.id(ix, iy);
          if (barrier[static_cast<std::size_t>(id)]) continue;
          std::vector<int> m;
          if (flood_from(field, id, barrier, m)) {
            mask = std::move(m);
            found = true;
          }
        }
        if (found) break;
      }
      if (found) break;
    }
    if (!found)
      throw std::runtime_error("pockets: cut failed to separate a bounded component");

    Pocket p;
    p.kind = c.kind;
    p.index = c.index;
    p.cut = c;
    p.mask = std::move(mask);
    std::sort(p.mask.begin(), p.mask.end());
    int best = p.mask.front();
    double bestv = -1;
    for (int id : p.mask) {
      const double v = field.at(id % g.nx, id / g.nx);
      if (v > bestv) {
        bestv = v;
        best = id;
      }
    }
    p.interior_sample = g.center(best % g.nx, best / g.nx);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace


StageAnalysis make_analysis(const StageApprox& stage, int res) {
  StageAnalysis a;
  a.stage = &stage;
  a.res = res;
  a.field = clearance_field(stage.obstacle_polylines(), analysis_domain(), res);
  const GridSpec& g = a.field.grid;
  a.cross_row = static_cast<int>(std::lround((0.5 - g.lo.y()) * res));

  const int n = g.nx * g.ny;
  a.up_free.assign(static_cast<std::size_t>(n), 0);
  a.down_free.assign(static_cast<std::size_t>(n), 0);
  for (int ix = 0; ix < g.nx; ++ix) {
    bool clear = true;
    for (int iy = g.ny - 1; iy >= 0; --iy) {
      if (!a.field.open(ix, iy)) clear = false;
      a.up_free[static_cast<std::size_t>(g.id(ix, iy))] = clear ? 1 : 0;
      if (!clear) break;
    }
    clear = true;
    for (int iy = 0; iy < g.ny; ++iy) {
      if (!a.field.open(ix, iy)) clear = false;
      a.down_free[static_cast<std::size_t>(g.id(ix, iy))] = clear ? 1 : 0;
      if (!clear) break;
    }
  }

  // schema / alternate pockets: their cells never count as free, matching the
  // escape-arc endpoint condition
  a.in_pocket.assign(static_cast<std::size_t>(n), 0);
  if (!stage.cuts.empty()) {
    a.schema_pockets = flood_pockets(a.field, stage.cuts);
    for (const Pocket& p : a.schema_pockets)
      for (int id : p.mask) a.in_pocket[static_cast<std::size_t>(id)] = 1;
  }

  // 0-1 BFS from all free cells; edge cost 1 when stepping across y = 1/2.
  a.depth_cells.assign(static_cast<std::size_t>(n), -1);
  a.depth_parent.assign(static_cast<std::size_t>(n), -1);
  std::deque<int> dq;
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      const int id = g.id(ix, iy);
      if (!a.field.open(ix, iy)) continue;
      if ((a.up_free[static_cast<std::size_t>(id)] || a.down_free[static_cast<std::size_t>(id)]) &&
          !a.in_pocket[static_cast<std::size_t>(id)]) {
        a.depth_cells[static_cast<std::size_t>(id)] = 0;
        dq.push_back(id);
      }
    }
  const int dx[4] = {1, -1, 0, 0};
  const int dy[4] = {0, 0, 1, -1};
  while (!dq.empty()) {
    const int id = dq.front();
    dq.pop_front();
    const int ix = id % g.nx, iy = id / g.nx;
    const int d = a.depth_cells[static_cast<std::size_t>(id)];
    for (int k = 0; k < 4; ++k) {
      const int jx = ix + dx[k], jy = iy + dy[k];
      if (!g.inside(jx, jy) || !a.field.open(jx, jy)) continue;
      const int jd = g.id(jx, jy);
      const bool crossing = (k >= 2) && (std::min(iy, jy) == a.cross_row - 1) &&
                            (std::max(iy, jy) == a.cross_row);
      const int nd = d + (crossing ? 1 : 0);
      int& cur = a.depth_cells[static_cast<std::size_t>(jd)];
      if (cur == -1 || nd < cur) {
        cur = nd;
        a.depth_parent[static_cast<std::size_t>(jd)] = id;
        if (crossing)
          dq.push_back(jd);
        else
          dq.push_front(jd);
      }
    }
  }
  return a;
}

std::vector<int> region_depth_field(const StageAnalysis& a) {
  const GridSpec& g = a.field.grid;
  const int n = g.nx * g.ny;
  std::vector<int> comp(static_cast<std::size_t>(n), -1);

  // label connected components above / below the critical line
  int ncomp = 0;
  std::vector<int> stack;
  for (int start = 0; start < n; ++start) {
    if (comp[static_cast<std::size_t>(start)] != -1) continue;
    const int sx = start % g.nx, sy = start / g.nx;
    if (!a.field.open(sx, sy)) continue;
    const bool above = sy >= a.cross_row;
    comp[static_cast<std::size_t>(start)] = ncomp;
    stack.assign(1, start);
    while (!stack.empty()) {
      const int id = stack.back();
      stack.pop_back();
      const int ix = id % g.nx, iy = id / g.nx;
      const int dx[4] = {1, -1, 0, 0};
      const int dy[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        const int jx = ix + dx[k], jy = iy + dy[k];
        if (!g.inside(jx, jy) || !a.field.open(jx, jy)) continue;
        if ((jy >= a.cross_row) != above) continue;
        const int jd = g.id(jx, jy);
        if (comp[static_cast<std::size_t>(jd)] != -1) continue;
        comp[static_cast<std::size_t>(jd)] = ncomp;
        stack.push_back(jd);
      }
    }
    ++ncomp;
  }

  // room graph: doors where open cells face each other across the line
  std::vector<std::set<int>> adj(static_cast<std::size_t>(ncomp));
  if (a.cross_row > 0 && a.cross_row < g.ny) {
    for (int ix = 0; ix < g.nx; ++ix) {
      if (!a.field.open(ix, a.cross_row - 1) || !a.field.open(ix, a.cross_row)) continue;
      const int cb = comp[static_cast<std::size_t>(g.id(ix, a.cross_row - 1))];
      const int ca = comp[static_cast<std::size_t>(g.id(ix, a.cross_row))];
      adj[static_cast<std::size_t>(cb)].insert(ca);
      adj[static_cast<std::size_t>(ca)].insert(cb);
    }
  }

  std::vector<int> roomd(static_cast<std::size_t>(ncomp), -1);
  std::deque<int> q;
  for (int id = 0; id < n; ++id) {
    if (comp[static_cast<std::size_t>(id)] < 0) continue;
    if (a.in_pocket[static_cast<std::size_t>(id)]) continue;
    if (a.up_free[static_cast<std::size_t>(id)] || a.down_free[static_cast<std::size_t>(id)]) {
      const int c = comp[static_cast<std::size_t>(id)];
      if (roomd[static_cast<std::size_t>(c)] == -1) {
        roomd[static_cast<std::size_t>(c)] = 0;
        q.push_back(c);
      }
    }
  }
  while (!q.empty()) {
    const int c = q.front();
    q.pop_front();
    for (int d : adj[static_cast<std::size_t>(c)])
      if (roomd[static_cast<std::size_t>(d)] == -1) {
        roomd[static_cast<std::size_t>(d)] = roomd[static_cast<std::size_t>(c)] + 1;
        q.push_back(d);
      }
  }

  std::vector<int> out(static_cast<std::size_t>(n), -1);
  for (int id = 0; id < n; ++id)
    if (comp[static_cast<std::size_t>(id)] >= 0)
      out[static_cast<std::size_t>(id)] = roomd[static_cast<std::size_t>(comp[static_cast<std::size_t>(id)])];
  return out;
}

DepthResult depth(const StageAnalysis& a, const Point& x) {
  const GridSpec& g = a.field.grid;
  const int ix = g.xindex(x.x()), iy = g.yindex(x.y());
  if (!g.inside(ix, iy)) throw std::runtime_error("depth: point outside analysis domain");
  if (!a.field.open(ix, iy)) throw std::runtime_error("depth: point lies on the stage arcs");
  const int id = g.id(ix, iy);
  DepthResult r;
  r.depth = a.depth_cells[static_cast<std::size_t>(id)];
  if (r.depth < 0) return r;  // unreachable; no witness

  std::vector<Point> pts;
  int cur = id;
  while (cur != -1) {
    pts.push_back(g.center(cur % g.nx, cur / g.nx));
    cur = a.depth_parent[static_cast<std::size_t>(cur)];
  }
  if (pts.size() == 1) pts.push_back(pts.front() + Point(0, 0.5 / g.res));
  r.escape_path = Polyline(pts);

  // turning points: extremum of each run strictly between two crossings
  std::vector<std::size_t> cross_at;  // index i: crossing between pts[i], pts[i+1]
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const bool b0 = pts[i].y() < 0.5, b1 = pts[i + 1].y() < 0.5;
    if (b0 != b1) cross_at.push_back(i);
  }
  for (std::size_t c = 0; c + 1 < cross_at.size(); ++c) {
    const std::size_t lo = cross_at[c] + 1, hi = cross_at[c + 1];
    const bool above = pts[lo].y() > 0.5;
    std::size_t best = lo;
    for (std::size_t i = lo; i <= hi; ++i)
      if ((above && pts[i].y() > pts[best].y()) || (!above && pts[i].y() < pts[best].y())) best = i;
    r.turning_points.emplace_back(pts[best], above);
  }
  return r;
}

std::vector<Pocket> pockets(const StageAnalysis& a, const std::vector<Crosscut>& cuts) {
  return flood_pockets(a.field, cuts);
}

int pocket_depth(const StageAnalysis& a, const Pocket& p) {
  int d = 0;
  for (int id : p.mask) d = std::max(d, a.depth_cells[static_cast<std::size_t>(id)]);
  return d;
}

DepthSignature depth_signature(const StageApprox& stage, int res) {
  if (stage.scheme.variant != SchemeSpec::Variant::Schema)
    throw std::runtime_error("depth_signature: schema stages only");
  StageAnalysis a = make_analysis(stage, res);
  std::vector<Crosscut> schema_cuts;
  for (const Crosscut& c : stage.cuts)
    if (c.kind == CutKind::SchemaCut) schema_cuts.push_back(c);
  std::sort(schema_cuts.begin(), schema_cuts.end(),
            [](const Crosscut& x, const Crosscut& y) { return x.index < y.index; });
  const std::vector<Pocket> ps = pockets(a, schema_cuts);
  DepthSignature sig;
  for (const Pocket& p : ps) sig.values.push_back(pocket_depth(a, p));
  return sig;
}

// ---------------------------------------------------------------------------
// tail equivalence
// ---------------------------------------------------------------------------

namespace {

std::vector<int> minimal_period(const std::vector<int>& w) {
  const std::size_t n = w.size();
  for (std::size_t p = 1; p <= n; ++p) {
    if (n % p != 0) continue;
    bool ok = true;
    for (std::size_t i = p; i < n && ok; ++i)
      if (w[i] != w[i - p]) ok = false;
    if (ok) return std::vector<int>(w.begin(), w.begin() + static_cast<long>(p));
  }
  return w;
}

std::vector<int> least_rotation(const std::vector<int>& w) {
  std::vector<int> best = w;
  std::vector<int> cur = w;
  for (std::size_t k = 1; k < w.size(); ++k) {
    std::rotate(cur.begin(), cur.begin() + 1, cur.end());
    if (cur < best) best = cur;
  }
  return best;
}

}  // namespace

SchemaSeq seq_of(const SchemeSpec& spec) {
  SchemaSeq s;
  s.prefix = spec.n;
  s.tail = spec.tail_period;
  return s;
}

bool tail_equivalent(const SchemaSeq& a, const SchemaSeq& b) {
  auto canonical = [](const SchemaSeq& s) {
    std::vector<int> tail = s.tail;
    if (tail.empty()) {
      if (s.prefix.empty())
        throw std::runtime_error("tail_equivalent: empty sequence representation");
      tail.assign(1, s.prefix.back());
    }
    return least_rotation(minimal_period(tail));
  };
  return canonical(a) == canonical(b);
}

// ---------------------------------------------------------------------------
// accessibility
// ---------------------------------------------------------------------------

namespace {

std::vector<Polyline> clip_obstacles(const std::vector<Polyline>& obstacles, const Point& c,
                                     double R) {
  std::vector<Polyline> out;
  for (const Polyline& poly : obstacles) {
    Polyline cur;
    auto flush = [&]() {
      if (cur.pts.size() >= 2) out.push_back(cur);
      cur.pts.clear();
    };
    for (std::size_t i = 0; i + 1 < poly.pts.size(); ++i) {
      const Point a = poly.pts[i], b = poly.pts[i + 1];
      // segment vs circle |p - c| = R
      const Point d = b - a, f = a - c;
      const double A = d.squaredNorm();
      const double B = 2 * f.dot(d);
      const double C = f.squaredNorm() - R * R;
      double t0 = 0.0, t1 = 1.0;
      const double disc = B * B - 4 * A * C;
      std::vector<std::pair<double, double>> outside;  // intervals of t outside the disc
      if (disc <= 0 || A == 0) {
        if (C > 0) outside.emplace_back(0.0, 1.0);  // fully outside
      } else {
        const double sq = std::sqrt(disc);
        double r0 = (-B - sq) / (2 * A), r1 = (-B + sq) / (2 * A);
        if (r0 > r1) std::swap(r0, r1);
        if (r0 > t0) outside.emplace_back(t0, std::min(r0, t1));
        if (r1 < t1) outside.emplace_back(std::max(r1, t0), t1);
      }
      for (auto [u0, u1] : outside) {
        if (u1 - u0 <= 1e-12) continue;
        const Point p0 = a + u0 * d, p1 = a + u1 * d;
        if (u0 == 0.0 && !cur.pts.empty()) {
          cur.pts.push_back(p1);
        } else {
          flush();
          cur.pts.push_back(p0);
          cur.pts.push_back(p1);
        }
        if (u1 < 1.0) flush();
      }
      if (outside.empty()) flush();
    }
    flush();
  }
  return out;
}

}  // namespace

Point resolve_target(const SchemeSpec& spec, const StageApprox& stage, const std::string& target) {
  auto layer_x = [&]() {
    // canonical interior continuity layer: one left, then alternating
    const Segment lim = continuity_layer_limit({0}, 1, 0);
    return lim;
  };
  if (target == "std_cont_mid") {
    const Segment s = layer_x();
    return 0.5 * (s.a + s.b);
  }
  if (target == "std_cont_bottom") {
    const Segment s = layer_x();
    return s.a.y() < s.b.y() ? s.a : s.b;
  }
  if (target == "std_cont_top") {
    const Segment s = layer_x();
    return s.a.y() < s.b.y() ? s.b : s.a;
  }
  auto indexed = [&](const std::string& prefix) -> std::optional<int> {
    if (target.rfind(prefix, 0) != 0) return std::nullopt;
    return std::stoi(target.substr(prefix.size()));
  };
  if (auto i = indexed("qa_bottom:")) {
    std::vector<int> addr(static_cast<std::size_t>(*i), 0);
    addr.push_back(1);
    const Quad* q = nullptr;
    for (const Quad& qq : stage.deltas[addr.size()])
      if (qq.address == addr) q = &qq;
    if (!q) throw std::runtime_error("resolve_target: perturbed quad not found");
    const double cx = 0.5 * (std::max(q->bl.x(), q->tl.x()) + std::min(q->br.x(), q->tr.x()));
    return Point(cx, 0.0);
  }
  if (auto i = indexed("qa_top:")) {
    std::vector<int> addr(static_cast<std::size_t>(*i), 0);
    addr.push_back(1);
    const Quad* q = nullptr;
    for (const Quad& qq : stage.deltas[addr.size()])
      if (qq.address == addr) q = &qq;
    if (!q) throw std::runtime_error("resolve_target: perturbed quad not found");
    const double cx = 0.5 * (std::max(q->bl.x(), q->tl.x()) + std::min(q->br.x(), q->tr.x()));
    return Point(cx, 1.0);
  }
  if (auto i = indexed("schema_v:")) {
    for (const Arc& a : stage.arcs)
      if (a.tag.block == *i && a.tag.kind == LayerKind::V && a.tag.piece == 2)
        return a.poly.pts[a.poly.pts.size() / 2];
    throw std::runtime_error("resolve_target: schema V arc not found");
  }
  if (auto i = indexed("schema_end:")) {
    for (const Arc& a : stage.arcs)
      if (a.tag.block == *i && a.tag.kind == LayerKind::V && a.tag.piece == 2)
        return a.poly.pts.front();
    throw std::runtime_error("resolve_target: schema layer endpoint not found");
  }
  (void)spec;
  throw std::runtime_error("resolve_target: unknown target '" + target + "'");
}

AccessVerdict accessibility(const SchemeSpec& spec, const std::string& target,
                            const std::vector<int>& stages, int res) {
  if (stages.size() < 3) throw std::runtime_error("accessibility: need at least 3 stages");
  AccessVerdict v;
  v.target = target;
  v.stages = stages;
  for (int s : stages) {
    SchemeSpec sp = spec;
    if (spec.variant == SchemeSpec::Variant::Schema)
      sp.m = s;
    else {
      sp.resolution = s;
      sp.stage = s;
    }
    const StageApprox st = build_stage(sp);
    const Point t = resolve_target(sp, st, target);
    const double R = std::max(st.hausdorff_bound, 8.0 / res);
    const std::vector<Polyline> obs = clip_obstacles(st.obstacle_polylines(), t, R);
    const ClearanceField f = clearance_field(obs, analysis_domain(), res);
    const GridSpec& g = f.grid;
    auto source = [](int ix, int iy, const GridSpec& gs) {
      return ix == 0 || iy == 0 || ix == gs.nx - 1 || iy == gs.ny - 1;
    };
    auto targetp = [&t, R](int ix, int iy, const GridSpec& gs) {
      return (gs.center(ix, iy) - t).norm() <= R;
    };
    ClearanceField ff = f;
    const WidestPathResult wp = widest_path(ff, source, targetp);
    v.profile.push_back(wp.reachable ? wp.bottleneck : 0.0);
  }
  v.floor_c = 0.5 * std::min(v.profile[0], v.profile[1]);
  bool dec = true, above = true;
  for (std::size_t k = 0; k + 1 < v.profile.size(); ++k)
    if (v.profile[k + 1] > v.rho * v.profile[k]) dec = false;
  for (double p : v.profile)
    if (p < v.floor_c || p <= 0.0) above = false;
  if (dec)
    v.verdict = Access::Inaccessible;
  else if (above)
    v.verdict = Access::Accessible;
  else
    v.verdict = Access::Indeterminate;
  return v;
}

// ---------------------------------------------------------------------------
// chain cover
// ---------------------------------------------------------------------------

namespace {

double arc_order_key(const Arc& a) {
  switch (a.tag.kind) {
    case LayerKind::EndLeft: return -1.0;
    case LayerKind::EndRight: return 2.0;
    default: return a.poly.pts[1].x();  // vertex x
  }
}

}  // namespace

std::vector<Box> chain_cover(const StageApprox& stage, double mesh, int res) {
  if (mesh <= 2.0 / res)
    throw std::runtime_error("chain_cover: mesh too small for the grid resolution");
  if (stage.scheme.variant == SchemeSpec::Variant::Schema)
    throw std::runtime_error("chain_cover: standard-scheme stages only");

  std::vector<const Arc*> order;
  for (const Arc& a : stage.arcs) order.push_back(&a);
  std::sort(order.begin(), order.end(),
            [](const Arc* x, const Arc* y) { return arc_order_key(*x) < arc_order_key(*y); });

  // per-arc clearance to non-neighbor arcs in the layer order
  const std::size_t na = order.size();
  std::vector<double> clear_of(na, 1.0);
  for (std::size_t i = 0; i < na; ++i) {
    double best = 1.0;
    for (std::size_t j = 0; j < na; ++j) {
      if (j + 1 == i || j == i || j == i + 1) continue;
      for (std::size_t s = 0; s + 1 < order[i]->poly.pts.size(); ++s)
        for (std::size_t t = 0; t + 1 < order[j]->poly.pts.size(); ++t)
          best = std::min(best, dist_segment_segment(order[i]->poly.segment(s),
                                                     order[j]->poly.segment(t)));
    }
    clear_of[i] = best;
  }
  // neighbor gaps (for bridge sizing)
  std::vector<double> gap(na, 0.0);
  std::vector<std::pair<Point, Point>> jump(na);  // exit of arc i, entry of arc i+1
  for (std::size_t i = 0; i + 1 < na; ++i) {
    const Polyline& pa = order[i]->poly;
    const Polyline& pb = order[i + 1]->poly;
    double best = std::numeric_limits<double>::infinity();
    for (const Point& ea : {pa.pts.front(), pa.pts.back()})
      for (const Point& eb : {pb.pts.front(), pb.pts.back()}) {
        const double d = (ea - eb).norm();
        if (d < best) {
          best = d;
          jump[i] = {ea, eb};
        }
      }
    gap[i] = best;
  }

  std::vector<Box> boxes;
  auto drop_along = [&](const std::vector<Point>& path, double hw, double hh) {
    // walk the path, dropping a box every 1.05*hh of arclength
    double carried = 0.0;
    const double step = 1.05 * hh;
    bool first = boxes.empty();
    for (std::size_t s = 0; s + 1 < path.size(); ++s) {
      const Point a = path[s], b = path[s + 1];
      const double len = (b - a).norm();
      double pos = first ? 0.0 : carried;
      first = false;
      while (pos <= len) {
        const Point c = a + (len == 0 ? 0.0 : pos / len) * (b - a);
        boxes.emplace_back(Point(c.x() - hw, c.y() - hh), Point(c.x() + hw, c.y() + hh));
        pos += step;
      }
      carried = pos - len;
    }
    // ensure the endpoint is covered
    const Point c = path.back();
    const Box last(Point(c.x() - hw, c.y() - hh), Point(c.x() + hw, c.y() + hh));
    if (!(boxes.back().contains_open(c))) boxes.push_back(last);
  };

  const double half_diag = mesh / 2.0;
  for (std::size_t i = 0; i < na; ++i) {
    const double hw = std::min(0.32 * mesh, 0.38 * clear_of[i]);
    const double hh = std::sqrt(std::max(half_diag * half_diag - hw * hw, hw * hw)) * 0.98;
    const Polyline& pa = order[i]->poly;
    // enter from the endpoint nearest the previous jump target
    std::vector<Point> path(pa.pts.begin(), pa.pts.end());
    if (i > 0) {
      const Point entry = jump[i - 1].second;
      if ((path.back() - entry).norm() < (path.front() - entry).norm())
        std::reverse(path.begin(), path.end());
    }
    // re-orient the stored jump for this arc
    if (i + 1 < na) {
      const Point exitp = path.back();
      if ((jump[i].first - exitp).norm() > 1e-12) {
        // recompute jump from the actual exit endpoint
        const Polyline& pb = order[i + 1]->poly;
        const Point eb = ((pb.pts.front() - exitp).norm() < (pb.pts.back() - exitp).norm())
                             ? pb.pts.front()
                             : pb.pts.back();
        jump[i] = {exitp, eb};
      }
    }
    drop_along(path, hw, hh);
    if (i + 1 < na) {
      const double bw = std::min({0.32 * mesh, 0.38 * clear_of[i], 0.38 * clear_of[i + 1]});
      const double bh = std::sqrt(std::max(half_diag * half_diag - bw * bw, bw * bw)) * 0.98;
      drop_along({jump[i].first, jump[i].second}, std::max(bw, 0.52 * gap[i] + 0.26 * bw),
                 bh);
    }
  }

  // exhaustive validation
  for (const Box& b : boxes)
    if (b.diameter() > mesh + 1e-12) throw std::runtime_error("chain_cover: box exceeds mesh");
  for (std::size_t i = 0; i < boxes.size(); ++i)
    for (std::size_t j = i + 1; j < boxes.size(); ++j) {
      const bool meet = boxes[i].intersects_open(boxes[j]);
      if (meet != (j == i + 1)) {
        std::ostringstream os;
        os << "chain_cover: adjacency violated between boxes " << i << " and " << j;
        throw std::runtime_error(os.str());
      }
    }
  for (const Arc* a : order)
    for (std::size_t s = 0; s + 1 < a->poly.pts.size(); ++s) {
      const Point p0 = a->poly.pts[s], p1 = a->poly.pts[s + 1];
      const int steps = std::max(2, static_cast<int>((p1 - p0).norm() / (0.3 / res)));
      for (int k = 0; k <= steps; ++k) {
        const Point p = p0 + (static_cast<double>(k) / steps) * (p1 - p0);
        bool covered = false;
        for (const Box& b : boxes)
          if (b.contains_open(p)) {
            covered = true;
            break;
          }
        if (!covered) throw std::runtime_error("chain_cover: arcs not fully covered");
      }
    }
  return boxes;
}

// ---------------------------------------------------------------------------
// distinguish
// ---------------------------------------------------------------------------

DistinguishResult distinguish(const SchemeSpec& a, const SchemeSpec& b, bool measure, int res) {
  DistinguishResult r;
  using V = SchemeSpec::Variant;
  std::ostringstream ev;
  auto sig_str = [&](const SchemeSpec& s) {
    std::ostringstream os;
    os << "(";
    if (measure) {
      const DepthSignature sig = depth_signature(build_schema_stage(s), res);
      for (std::size_t i = 0; i < sig.values.size(); ++i) os << (i ? "," : "") << sig.values[i];
    } else {
      for (int i = 0; i < s.m; ++i) {
        const int ni = i < static_cast<int>(s.n.size())
                           ? s.n[static_cast<std::size_t>(i)]
                           : s.tail_period[(i - s.n.size()) % s.tail_period.size()];
        os << (i ? "," : "") << ni;
      }
    }
    os << ")";
    return os.str();
  };

  if (a.variant == V::Schema && b.variant == V::Schema) {
    if (tail_equivalent(seq_of(a), seq_of(b))) {
      r.verdict = Distinguish::EquivalentByConstruction;
      ev << "tail-equivalent sequences";
    } else {
      r.verdict = Distinguish::Inequivalent;
      ev << "depth signatures " << sig_str(a) << " vs " << sig_str(b);
    }
  } else if (a.variant == V::TypeA && b.variant == V::TypeA) {
    const int mm = std::min(a.m, b.m);
    int diff = -1;
    for (int i = 0; i < mm; ++i)
      if (a.bits[static_cast<std::size_t>(i)] != b.bits[static_cast<std::size_t>(i)]) {
        diff = i + 1;
        break;
      }
    if (diff > 0) {
      r.verdict = Distinguish::Inequivalent;
      ev << "bit " << diff << " differs: Q_" << diff << " endpoints "
         << (a.bits[static_cast<std::size_t>(diff - 1)] == 0 ? "both buried" : "bottom accessible")
         << " vs "
         << (b.bits[static_cast<std::size_t>(diff - 1)] == 0 ? "both buried" : "bottom accessible");
    } else if (a.m == b.m && a.bits == b.bits) {
      r.verdict = Distinguish::EquivalentByConstruction;
      ev << "identical bit sequences";
    } else {
      r.verdict = Distinguish::Indeterminate;
      ev << "bit sequences agree on the common window";
    }
  } else if ((a.variant == V::Standard && b.variant == V::Schema) ||
             (a.variant == V::Schema && b.variant == V::Standard)) {
    r.verdict = Distinguish::Inequivalent;
    const SchemeSpec& s = a.variant == V::Schema ? a : b;
    ev << "schema pocket of depth " << (s.n.empty() ? s.tail_period.front() : s.n.front())
       << " >= 4 absent from the standard embedding";
  } else if (a.variant == V::Standard && b.variant == V::Standard) {
    r.verdict = Distinguish::EquivalentByConstruction;
    ev << "same construction";
  } else if (a.variant == V::TypeA && b.variant == V::TypeA) {
    // unreachable; handled above
  } else if ((a.variant == V::Standard && b.variant == V::TypeA && b.m == 0) ||
             (a.variant == V::TypeA && a.m == 0 && b.variant == V::Standard)) {
    r.verdict = Distinguish::EquivalentByConstruction;
    ev << "empty perturbation";
  } else {
    r.verdict = Distinguish::Indeterminate;
    ev << "mixed scheme families";
  }
  r.evidence = ev.str();
  return r;
}

}  // namespace kvl
