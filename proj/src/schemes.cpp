#include "kvl/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <cstdlib>
#include <cstdio>
#include <stdexcept>

namespace kvl {

namespace {

// ---------------------------------------------------------------------------
// Schema layout constants. Blocks march leftward with geometrically shrinking
// slabs and vertically growing bands, so the blocks converge to {0} x [0,1].
// All tubes are affine images of the unit-square standard stage.
// ---------------------------------------------------------------------------
constexpr double kXR1 = 0.97;     // east edge of block 1
constexpr double kW1 = 0.40;      // slab width of block 1
constexpr double kWScale = 0.62;  // slab shrink per block
constexpr double kB1 = 0.125;     // bottom level of block 1
constexpr double kBScale = 0.57;  // band growth per block
constexpr double kTubeW = 0.0006; // tube width; lanes seal at analysis grids
constexpr double kLean = 0.16;    // eastward lean of the elbow rise

struct BlockGeom {
  int i = 1, n = 4;
  double W = 0, xL = 0, xR = 0, B = 0, T = 0, G = 0;
  double topOut = 0, topRet = 0, botOut = 0, botRet = 0;
  double foldLev = 0, pLev = 0, footLev = 0, underLev = 0;
  double X(double xi) const { return xL + xi * W; }
  double col(int k) const {  // outward junction columns c_1..c_{n-1}
    return 0.82 - 0.64 * (k - 1) / static_cast<double>(n - 2);
  }
};

BlockGeom block_geom(int i, int n) {
  BlockGeom g;
  g.i = i;
  g.n = n;
  g.W = kW1 * std::pow(kWScale, i - 1);
  g.xR = kXR1;
  for (int k = 1; k < i; ++k) g.xR -= kW1 * std::pow(kWScale, k - 1);
  g.xL = g.xR - g.W;
  g.B = kB1 * std::pow(kBScale, i - 1);
  g.T = 1.0 - g.B;
  g.G = 0.5 - g.B;
  g.topOut = g.T;
  g.topRet = 0.5 + 0.38 * g.G;
  g.botOut = 0.5 - 0.74 * g.G;
  g.botRet = 0.5 - 0.92 * g.G;
  g.foldLev = 0.5 - 0.96 * g.G;
  g.pLev = 0.5 - 0.93 * g.G;
  g.footLev = 0.5 - 0.975 * g.G;
  g.underLev = 0.5 - 1.24 * g.G;
  return g;
}

// Junction s^j of a block: columns pair across the fold (x(s^{n+k}) equals
// x(s^{n-k}) exactly); odd junctions are top points, even ones bottom points.
Point junction_point(const BlockGeom& g, int j) {
  const int n = g.n;
  double xi, lev;
  if (j < n) {
    xi = g.col(j);
    lev = (j % 2 == 1) ? g.topOut : g.botOut;
  } else if (j == n) {
    xi = 0.06;
    lev = g.foldLev;
  } else {
    xi = g.col(2 * n - j);
    lev = (j % 2 == 1) ? g.topRet : g.botRet;
  }
  return Point(g.X(xi), lev);
}

// One-sided tube: the copy's left end layer is the chord wall running
// through the piece's junction anchors; the body is the parallel slab
// shifted by sigma = w * perp + mu * along. The along-shear mu retreats the
// offset wall from sharp junction wedges.
struct StraightPiece {
  Point hi, lo;   // chord endpoints, hi above lo
  Point sigma;    // offset of the second wall
};

struct CopyMap {
  // corner images of (0,0),(1,0),(0,1),(1,1)
  Point c00, c10, c01, c11;
  // piecewise break along copy-y (elbow); unused when yc <= 0
  double yc = -1.0;
  Point o_mid0, o_mid1;  // E / E' wall points at y = yc

  Point operator()(double x, double y) const {
    if (x == 0.0 && y == 0.0) return c00;
    if (x == 1.0 && y == 0.0) return c10;
    if (x == 0.0 && y == 1.0) return c01;
    if (x == 1.0 && y == 1.0) return c11;
    if (yc <= 0.0) {
      const Point o = c00;
      const Point u = c10 - c00;
      const Point v = c01 - c00;
      return o + x * u + y * v;
    }
    Point e, ep;
    if (y <= yc) {
      const double s = y / yc;
      e = c00 + s * (o_mid0 - c00);
      ep = c10 + s * (o_mid1 - c10);
    } else {
      const double s = (y - yc) / (1.0 - yc);
      e = o_mid0 + s * (c01 - o_mid0);
      ep = o_mid1 + s * (c11 - o_mid1);
    }
    return e + x * (ep - e);
  }
};

CopyMap map_for_piece(const StraightPiece& t) {
  CopyMap m;
  m.c00 = t.lo;
  m.c01 = t.hi;
  m.c10 = t.lo + t.sigma;
  m.c11 = t.hi + t.sigma;
  return m;
}

// A squeeze: an arc segment leaving a point of the chord line at a shallow
// angle. The offset wall must retreat along the chord until the wedge between
// the chord and the threat is wide enough for the body.
struct Threat {
  Point at;
  Point dir;       // unit
  double len = 1.0;
  double body = 0.0;  // partner body thickness on our side of its chord
};

StraightPiece make_piece(const Point& hi, const Point& lo, const std::vector<Threat>& threats,
                         double w, int preferred_side = 0, int forced_side = 0,
                         int landing_end = 0) {
  StraightPiece p;
  p.hi = hi;
  p.lo = lo;
  Point axis = lo - hi;
  const double len = axis.norm();
  axis /= len;
  const Point ccw(-axis.y(), axis.x());

  auto plan_side = [&](int side, double& mu, bool& ok) {
    // mu interval [mu_lo, mu_hi]; positive mu shifts the offset wall toward lo.
    // The wall may overshoot the free stub end but never the landing corner,
    // whose far side belongs to the landed-on piece.
    double mu_lo = -0.45 * len, mu_hi = 0.45 * len;
    if (landing_end > 0) mu_lo = std::max(mu_lo, -0.5 * w);   // landed at hi
    if (landing_end < 0) mu_hi = std::min(mu_hi, 0.5 * w);    // landed at lo
    ok = true;
    for (const Threat& t : threats) {
      const double cr = axis.x() * t.dir.y() - axis.y() * t.dir.x();
      if (cr * side <= 0) continue;            // other side of the chord
      if (t.len * std::abs(cr) < 0.25 * w) continue;  // hugs the chord, too short to reach
      const double ang = std::asin(std::min(1.0, std::abs(cr)));
      if (ang > 1.05) continue;                // wide wedge, harmless
      const double slide = (w + t.body) / std::max(std::sin(ang), 1e-6);
      const double t_at = (t.at - hi).dot(axis);  // position along the chord
      if (t_at < 0.5 * len) {
        mu_lo = std::max(mu_lo, slide + 3.0 * (t_at + 1.2 * w));
      } else {
        mu_hi = std::min(mu_hi, -(slide + 3.0 * ((len - t_at) + 1.2 * w)));
      }
      if (std::getenv("KVL_DEBUG_PIECE"))
        std::fprintf(stderr, "  side=%d threat at t=%.4f ang=%.3fdeg slide=%.4f -> [%.4f, %.4f]\n",
                     side, t_at, ang * 57.3, slide, mu_lo, mu_hi);
    }
    if (mu_lo > mu_hi) { ok = false; return; }
    mu = std::clamp(0.0, mu_lo, mu_hi);
  };

  double best_mu = 0.0;
  int best_side = 0;
  int best_score = -1;
  const double poke_cap = -(3.2 * w);  // mu below this pokes past the top junction
  for (int side : {+1, -1}) {
    if (forced_side && side != forced_side) continue;
    double mu;
    bool ok;
    plan_side(side, mu, ok);
    if (!ok) continue;
    int score = 1;
    if (mu > poke_cap) score += 2;                    // no upward poke
    if (preferred_side && side == preferred_side) score += 1;  // away from the partner
    if (score > best_score) {
      best_score = score;
      best_side = side;
      best_mu = mu;
    }
  }
  if (best_side == 0) {
    std::ostringstream os;
    os << "schema: piece cannot clear its junction wedges (hi=" << hi.x() << "," << hi.y()
       << " lo=" << lo.x() << "," << lo.y() << " len=" << len << ")";
    throw std::runtime_error(os.str());
  }
  p.sigma = w * best_side * ccw + best_mu * axis;
  if (std::getenv("KVL_DEBUG_PIECE"))
    std::fprintf(stderr, "piece hi=(%.4f,%.4f) lo=(%.4f,%.4f) side=%d mu=%.4f\n", hi.x(), hi.y(),
                 lo.x(), lo.y(), best_side, best_mu);
  return p;
}

Polyline map_polyline(const CopyMap& m, const Polyline& src) {
  Polyline out;
  out.pts.reserve(src.pts.size() + 2);
  for (std::size_t k = 0; k < src.pts.size(); ++k) {
    const Point& p = src.pts[k];
    if (k > 0 && m.yc > 0.0) {
      const Point& q = src.pts[k - 1];
      if ((q.y() - m.yc) * (p.y() - m.yc) < 0) {
        const double u = (m.yc - q.y()) / (p.y() - q.y());
        const Point mid = q + u * (p - q);
        out.pts.push_back(m(mid.x(), m.yc));
      }
    }
    out.pts.push_back(m(p.x(), p.y()));
  }
  return out;
}

struct Assembly {
  StageApprox st;
  std::map<std::pair<int64_t, int64_t>, int> seen;

  void add_marked(const Point& p, bool top, const std::string& label) {
    const auto key = std::make_pair(static_cast<int64_t>(std::llround(p.x() * 1e12)),
                                    static_cast<int64_t>(std::llround(p.y() * 1e12)));
    if (seen.count(key)) return;
    seen[key] = 1;
    st.marked.push_back(MarkedPoint{p, top, label});
  }

  void add_piece(const StageApprox& copy, const CopyMap& m, int block, int piece) {
    for (const Arc& a : copy.arcs) {
      Arc out;
      out.poly = map_polyline(m, a.poly);
      out.tag = a.tag;
      out.tag.block = block;
      out.tag.piece = piece;
      st.arcs.push_back(std::move(out));
    }
    std::ostringstream pre;
    pre << "b" << block << "p" << piece << ":";
    for (const MarkedPoint& mp : copy.marked) {
      const Point q = m(mp.p.x(), mp.p.y());
      add_marked(q, mp.top, pre.str() + mp.label);
    }
  }
};

// Elbow piece: two straight tube pieces joined at a corner, carrying the
// connection p_prev -> rise top of the next block. The outer wall holds the
// next block's first junction; the inner wall ends exactly at p_prev.
struct Elbow {
  Point A;     // outer wall top (free corner above s^1)
  Point q;     // inner wall top endpoint
  Point Kout, Kin;
  Point C4b;   // outer wall bottom endpoint, below p_prev
  Point p_prev;
  CopyMap map;
  Segment rise_outer() const { return Segment(A, Kout); }
};

Point line_intersect(const Point& p, const Point& dp, const Point& q, const Point& dq) {
  const double den = dp.x() * dq.y() - dp.y() * dq.x();
  const double t = ((q.x() - p.x()) * dq.y() - (q.y() - p.y()) * dq.x()) / den;
  return p + t * dp;
}

Elbow make_elbow(const Point& s1, const Point& Knom, const Point& p_prev, double w, double rho) {
  Elbow e;
  e.p_prev = p_prev;
  Point dr = Knom - s1;  // rise direction, downward
  dr.normalize();
  e.A = s1 - rho * dr;   // outer wall extends past the junction
  Point du = p_prev - Knom;  // run direction, eastward
  du.normalize();
  Point er(-dr.y(), dr.x());
  if (er.x() < 0) er = -er;  // east perp of the rise
  Point uu(-du.y(), du.x());
  if (uu.y() < 0) uu = -uu;  // up perp of the run
  e.q = e.A + w * er;
  e.C4b = p_prev - w * uu - 2.0 * w * du;
  e.Kout = line_intersect(e.A, dr, e.C4b, du);
  e.Kin = line_intersect(e.q, dr, e.p_prev, du);
  CopyMap m;
  m.c00 = e.C4b;
  m.c10 = e.p_prev;
  m.c01 = e.A;
  m.c11 = e.q;
  const double Lrun = (e.Kout - e.C4b).norm();
  const double Lrise = (e.A - e.Kout).norm();
  m.yc = Lrun / (Lrun + Lrise);
  m.o_mid0 = e.Kout;
  m.o_mid1 = e.Kin;
  e.map = m;
  return e;
}

std::vector<int> expand_sequence(const SchemeSpec& spec, int count) {
  std::vector<int> out;
  for (int i = 0; i < count; ++i) {
    if (i < static_cast<int>(spec.n.size()))
      out.push_back(spec.n[static_cast<std::size_t>(i)]);
    else if (!spec.tail_period.empty())
      out.push_back(spec.tail_period[(i - spec.n.size()) % spec.tail_period.size()]);
    else
      throw std::runtime_error("schema: truncation m exceeds available prefix");
  }
  return out;
}

void check_schema_entries(const std::vector<int>& v) {
  for (int x : v)
    if (x < 4 || x % 2 != 0)
      throw std::runtime_error("schema: sequence entries must be even and >= 4");
}

}  // namespace

void SchemaSeq::validate() const {
  check_schema_entries(prefix);
  check_schema_entries(tail);
}

std::vector<SchemaBlockFrame> schema_frames(const SchemeSpec& spec) {
  const std::vector<int> seq = expand_sequence(spec, spec.m);
  std::vector<SchemaBlockFrame> out;
  for (int i = 1; i <= spec.m; ++i) {
    const BlockGeom g = block_geom(i, seq[static_cast<std::size_t>(i - 1)]);
    SchemaBlockFrame f;
    f.index = i;
    f.n = g.n;
    f.xL = g.xL;
    f.xR = g.xR;
    f.B = g.B;
    f.T = g.T;
    f.top_out = g.topOut;
    f.top_ret = g.topRet;
    f.bot_out = g.botOut;
    f.bot_ret = g.botRet;
    f.fold_lev = g.foldLev;
    f.p_lev = g.pLev;
    f.p_attach = Point(g.X(0.845), g.pLev);
    for (int j = 1; j <= 2 * g.n - 1; ++j) f.junctions.push_back(junction_point(g, j));
    out.push_back(std::move(f));
  }
  return out;
}

StageApprox build_schema_stage(const SchemeSpec& spec) {
  if (spec.variant != SchemeSpec::Variant::Schema)
    throw std::runtime_error("build_schema_stage: spec is not a schema variant");
  if (spec.m < 1) throw std::runtime_error("build_schema_stage: m must be >= 1");
  if (spec.resolution < 1 || spec.resolution > 6)
    throw std::runtime_error("build_schema_stage: resolution out of range [1,6]");
  const std::vector<int> seq = expand_sequence(spec, spec.m);
  check_schema_entries(seq);

  const StageApprox copy = build_standard_stage(spec.resolution);
  Assembly asm_;
  asm_.st.scheme = spec;
  asm_.st.stage = spec.m;

  Point p_prev;  // p_{i-1}
  double under_prev = 0.0;

  struct BlockCutAnchors {
    int index = 0;
    Point p;
    double level = 0;
    Point throat_bottom;
  };
  std::vector<BlockCutAnchors> anchors;

  double w = kTubeW, rho = 2.0 * kTubeW;
  auto extended = [&](const Point& from, const Point& through) {
    Point d = through - from;
    d.normalize();
    return Point(through + rho * d);
  };

  double hbound = 0.0;
  for (int i = 1; i <= spec.m + 1; ++i) {
    const bool tail = (i == spec.m + 1);
    const int n = tail ? 4 : seq[static_cast<std::size_t>(i - 1)];
    const BlockGeom g = block_geom(i, n);
    w = kTubeW * std::pow(kWScale, i - 1);  // tubes shrink with the slabs
    rho = 2.0 * w;

    std::vector<Point> s(static_cast<std::size_t>(2 * n), Point::Zero());  // s[j] = s^j
    for (int j = 1; j <= 2 * n - 1; ++j) s[static_cast<std::size_t>(j - 1)] = junction_point(g, j);
    auto sj = [&](int j) -> const Point& { return s[static_cast<std::size_t>(j - 1)]; };

    const Point p_i(g.X(0.845), g.pLev);
    const Point foot(g.X(0.94), g.footLev);
    const Point Knom(sj(1).x() + kLean * g.W, tail || i > 1 ? under_prev : 0.0);

    // departure direction of piece l+1 at s^l (used as a squeeze threat)
    auto departure = [&](int l) -> std::pair<Point, double> {
      Point d;
      if (l + 1 < 2 * n)
        d = sj(l + 1) - sj(l);
      else
        d = p_i - sj(2 * n - 1);
      const double dl = d.norm();
      d /= dl;
      return {d, dl};
    };

    // the wall each piece lands on: the previous piece's chord and body
    Point prev_hi, prev_lo, prev_sigma;

    // piece 1: plain east gate for block 1, bent elbow for later blocks
    Segment gate_wall;  // the wall the schema cut ends on
    if (i == 1) {
      const Point hi = extended(foot, sj(1));
      const auto dep = departure(1);
      std::vector<Threat> th{{sj(1), dep.first, dep.second}};
      const StraightPiece p1 = make_piece(hi, foot, th, w, +1, +1, 0);
      asm_.add_piece(copy, map_for_piece(p1), i, 1);
      gate_wall = Segment(p1.hi, p1.lo);
      prev_hi = p1.hi;
      prev_lo = p1.lo;
      prev_sigma = p1.sigma;
    } else {
      const Elbow e = make_elbow(sj(1), Knom, p_prev, w, rho);
      asm_.add_piece(copy, e.map, i, 1);
      asm_.st.declared_junctions.push_back(p_prev);
      gate_wall = e.rise_outer();
      prev_hi = e.A;
      prev_lo = e.Kout;
      prev_sigma = e.q - e.A;
    }
    asm_.st.declared_junctions.push_back(sj(1));

    auto landing_threats = [&](const Point& land, const Point& our_probe_dir) {
      std::vector<Threat> th;
      const Point pvec = prev_lo - prev_hi;
      const double our_side = pvec.x() * our_probe_dir.y() - pvec.y() * our_probe_dir.x();
      const double body_side = pvec.x() * prev_sigma.y() - pvec.y() * prev_sigma.x();
      const double body = (our_side * body_side > 0) ? kTubeW : 0.0;
      Point d1 = prev_hi - land;
      const double l1 = d1.norm();
      if (l1 > 1e-12) th.push_back({land, Point(d1 / l1), l1, body});
      Point d2 = prev_lo - land;
      const double l2 = d2.norm();
      if (l2 > 1e-12) th.push_back({land, Point(d2 / l2), l2, body});
      return th;
    };

    if (tail) {
      // single standard appendage beyond the truncation
      const Point lo2(g.X(0.45), g.botOut);
      const StraightPiece pt =
          make_piece(sj(1), lo2, landing_threats(sj(1), (lo2 - sj(1)).normalized()), w, -1, 0, +1);
      asm_.add_piece(copy, map_for_piece(pt), i, 2);
      hbound = std::max(hbound, g.xR);
      break;
    }

    // midpoint of the nesting partner's chord, for the preferred body side
    auto partner_mid = [&](int l) -> Point {
      const int pl = 2 * n - l + 1;
      if (pl <= 1) return Point(0.5 * (gate_wall.a + gate_wall.b));
      const Point a = sj(pl - 1);
      const Point b = (pl < 2 * n) ? sj(pl) : p_i;
      return Point(0.5 * (a + b));
    };

    // pieces 2 .. 2n
    for (int l = 2; l <= 2 * n; ++l) {
      const Point& land = sj(l - 1);
      const Point& next = (l < 2 * n) ? sj(l) : p_i;
      const Point far = (l < 2 * n) ? extended(land, next) : next;
      const Point hi = land.y() > far.y() ? land : far;
      const Point lo = land.y() > far.y() ? far : land;
      std::vector<Threat> th = landing_threats(land, (far - land).normalized());
      if (l < 2 * n) {
        const auto dep = departure(l);
        th.push_back({next, dep.first, dep.second, kTubeW});
      }
      int prefer = 0;
      {
        const Point own_mid = 0.5 * (hi + lo);
        Point away = own_mid - partner_mid(l);
        Point axis = lo - hi;
        axis.normalize();
        if (away.norm() > 1e-12) {
          away.normalize();
          const double cr = axis.x() * away.y() - axis.y() * away.x();
          prefer = cr >= 0 ? +1 : -1;
        }
      }
      const int landing_end = (land.y() > next.y()) ? +1 : -1;
      StraightPiece pc;
      if (l == 2 * n) {
        // mouth piece: body east of the chord, offset wall lifted just above
        // the schema cut's ray from p_i
        pc = make_piece(hi, lo, th, w, +1, +1, 0);
        const Point axis = (pc.lo - pc.hi).normalized();
        pc.sigma = pc.sigma - pc.sigma.dot(axis) * axis - 2.0 * w * axis;
      } else {
        pc = make_piece(hi, lo, th, w, prefer, 0, landing_end);
      }
      asm_.add_piece(copy, map_for_piece(pc), i, l);
      if (l < 2 * n) asm_.st.declared_junctions.push_back(sj(l));
      prev_hi = pc.hi;
      prev_lo = pc.lo;
      prev_sigma = pc.sigma;
    }

    // cut anchors; the cuts themselves are ray-cast after assembly
    BlockCutAnchors an;
    an.index = i;
    an.p = p_i;
    an.level = g.pLev;
    an.throat_bottom = sj(2 * n - 2);
    anchors.push_back(an);

    hbound = std::max(hbound, copy.hausdorff_bound * std::max(g.W, g.T - g.B));
    p_prev = p_i;
    under_prev = g.underLev;
  }

  // crosscuts by ray casting against the assembled arcs
  auto first_hit = [&](const Point& origin, const Point& dir) -> Point {
    double best = std::numeric_limits<double>::infinity();
    const Segment ray(origin, origin + 1.0 * dir);
    for (const Arc& a : asm_.st.arcs)
      for (std::size_t k = 0; k + 1 < a.poly.pts.size(); ++k) {
        const SegIntersect r = seg_intersect(ray, Segment(a.poly.pts[k], a.poly.pts[k + 1]));
        if (!r.hit()) continue;
        const double d = (r.p - origin).dot(dir);
        if (d > 1e-9 && d < best) best = d;
      }
    if (!std::isfinite(best))
      throw std::runtime_error("build_schema_stage: crosscut ray found no target");
    return origin + best * dir;
  };
  for (const auto& an : anchors) {
    Crosscut c;
    c.segment = Segment(an.p, first_hit(an.p, Point(1, 0)));
    c.kind = CutKind::SchemaCut;
    c.index = an.index;
    asm_.st.cuts.push_back(c);
    Crosscut c2;
    c2.segment = Segment(first_hit(an.throat_bottom, Point(0, 1)), an.throat_bottom);
    c2.kind = CutKind::AltSchemaCut;
    c2.index = an.index;
    asm_.st.cuts.push_back(c2);
  }

  asm_.st.hausdorff_bound = std::max(hbound, block_geom(spec.m + 1, 4).xR);
  return asm_.st;
}

// ---------------------------------------------------------------------------
// Type-A stages
// ---------------------------------------------------------------------------

namespace {

// Quad address of the i-th default Q layer neighborhood: i lefts then a right.
std::vector<int> typeA_block_address(int i) {
  std::vector<int> a(static_cast<std::size_t>(i), 0);
  a.push_back(1);
  return a;
}

bool has_prefix(const std::vector<int>& addr, const std::vector<int>& pre) {
  if (addr.size() < pre.size()) return false;
  return std::equal(pre.begin(), pre.end(), addr.begin());
}

const Quad* find_quad(const StageApprox& st, const std::vector<int>& addr) {
  const std::size_t depth = addr.size();
  if (depth + 1 > st.deltas.size()) return nullptr;
  for (const Quad& q : st.deltas[depth])
    if (q.address == addr) return &q;
  return nullptr;
}

}  // namespace

StageApprox build_typeA_stage(const SchemeSpec& spec) {
  if (spec.variant != SchemeSpec::Variant::TypeA)
    throw std::runtime_error("build_typeA_stage: spec is not a type_a variant");
  const int n = spec.resolution;
  const int m = spec.m;
  if (m < 0) throw std::runtime_error("type_a: m must be >= 0");
  if (static_cast<int>(spec.bits.size()) < m)
    throw std::runtime_error("type_a: bit sequence shorter than truncation m");
  for (int b : spec.bits)
    if (b != 0 && b != 1) throw std::runtime_error("type_a: bits must be 0/1");
  if (m > 0 && n < m + 2)
    throw std::runtime_error("type_a: base stage too small for m perturbed blocks");

  StageApprox st = build_standard_stage(n);
  st.scheme = spec;
  if (m == 0) return st;

  std::vector<std::vector<int>> prefixes;
  for (int i = 1; i <= m; ++i) prefixes.push_back(typeA_block_address(i));

  // drop standard content strictly inside the perturbed quads
  std::vector<Arc> kept;
  for (Arc& a : st.arcs) {
    bool drop = false;
    for (const auto& pre : prefixes)
      if (a.tag.stage_introduced > 0 && has_prefix(a.tag.address, pre)) drop = true;
    if (!drop) kept.push_back(std::move(a));
  }
  st.arcs = std::move(kept);

  // rebuild marked points from the remaining standard arcs
  st.marked.clear();
  std::map<std::pair<int64_t, int64_t>, int> seen;
  auto add_marked = [&](const Point& p, bool top, const std::string& label) {
    const auto key = std::make_pair(static_cast<int64_t>(std::llround(p.x() * 1e12)),
                                    static_cast<int64_t>(std::llround(p.y() * 1e12)));
    if (seen.count(key)) return;
    seen[key] = 1;
    st.marked.push_back(MarkedPoint{p, top, label});
  };
  for (const Arc& a : st.arcs) {
    switch (a.tag.kind) {
      case LayerKind::EndLeft:
      case LayerKind::EndRight:
        add_marked(a.poly.pts.front(), false, "end");
        add_marked(a.poly.pts.back(), true, "end");
        break;
      case LayerKind::V:
        add_marked(a.poly.pts.front(), true, "end");
        add_marked(a.poly.pts.back(), true, "end");
        add_marked(a.poly.pts[1], false, "vertex");
        break;
      case LayerKind::Lambda:
        add_marked(a.poly.pts.front(), false, "end");
        add_marked(a.poly.pts.back(), false, "end");
        add_marked(a.poly.pts[1], true, "vertex");
        break;
      default:
        break;
    }
  }

  // insert the straight image of Q_i plus the pinch labyrinths
  constexpr double kE0 = 0.05;
  for (int i = 1; i <= m; ++i) {
    const auto pre = prefixes[static_cast<std::size_t>(i - 1)];
    const Quad* q = find_quad(st, pre);
    if (!q) throw std::runtime_error("type_a: perturbed quad not found");
    const double x_lo = std::max(q->bl.x(), q->tl.x());
    const double x_hi = std::min(q->br.x(), q->tr.x());
    const double cx = 0.5 * (x_lo + x_hi);
    const double qw = x_hi - x_lo;
    const int bit = spec.bits[static_cast<std::size_t>(i - 1)];
    const int levels = n - (i + 1);

    Arc zq;
    zq.poly = Polyline{Point(cx, 0), Point(cx, 1)};
    zq.tag.kind = LayerKind::ContinuityEstimate;
    zq.tag.stage_introduced = i + 1;
    zq.tag.address = pre;
    zq.tag.block = i;
    st.arcs.push_back(zq);
    add_marked(Point(cx, 0), false, "Qb");
    add_marked(Point(cx, 1), true, "Qt");

    const double span = 0.45 * qw;
    const double over = 0.06 * qw;
    auto add_wall = [&](double y, bool from_left, int level) {
      Arc wall;
      const double x0 = from_left ? cx - span : cx - over;
      const double x1 = from_left ? cx + over : cx + span;
      wall.poly = Polyline{Point(x0, y), Point(x1, y)};
      wall.tag.kind = LayerKind::ContinuityEstimate;
      wall.tag.stage_introduced = i + 1 + level;
      wall.tag.address = pre;
      wall.tag.block = i;
      wall.tag.piece = level;
      st.arcs.push_back(wall);
    };
    for (int k = 1; k <= levels; ++k) {
      const double d = kE0 * std::pow(0.5, k - 1);
      add_wall(1.0 + d, k % 2 == 1, k);           // bury the top endpoint
      if (bit == 0) add_wall(0.0 - d, k % 2 == 1, k);  // and the bottom one
    }
  }
  return st;
}

StageApprox build_stage(const SchemeSpec& spec) {
  switch (spec.variant) {
    case SchemeSpec::Variant::Standard: {
      StageApprox st = build_standard_stage(spec.resolution);
      st.scheme = spec;
      return st;
    }
    case SchemeSpec::Variant::TypeA: return build_typeA_stage(spec);
    case SchemeSpec::Variant::Schema: return build_schema_stage(spec);
  }
  throw std::runtime_error("build_stage: bad variant");
}

std::vector<Crosscut> crosscuts(const StageApprox& stage) {
  std::vector<Crosscut> out = stage.cuts;
  for (const Arc& a : stage.arcs) {
    if (a.tag.kind != LayerKind::V && a.tag.kind != LayerKind::Lambda) continue;
    Crosscut c;
    c.segment = Segment(a.poly.pts.front(), a.poly.pts.back());
    c.kind = CutKind::LayerCut;
    c.layer = a.tag;
    out.push_back(c);
  }
  // verify cut interiors against the arcs
  for (const Crosscut& c : out) {
    const Point mid = 0.5 * (c.segment.a + c.segment.b);
    for (const Arc& a : stage.arcs)
      for (std::size_t k = 0; k + 1 < a.poly.pts.size(); ++k) {
        const SegIntersect r = seg_intersect(c.segment, Segment(a.poly.pts[k], a.poly.pts[k + 1]));
        if (r.kind == IntersectKind::Cross) {
          (void)mid;
          std::ostringstream os;
          os << "crosscuts: cut interior intersects an arc (kind=" << static_cast<int>(c.kind)
             << " idx=" << c.index << " arc tag=" << layer_kind_name(a.tag.kind)
             << " block=" << a.tag.block << " piece=" << a.tag.piece << " at " << r.p.x() << ","
             << r.p.y() << ")";
          throw std::runtime_error(os.str());
        }
      }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

bool near(const Point& a, const Point& b, double eps = 1e-9) { return (a - b).norm() <= eps; }

bool declared_point(const StageApprox& st, const Point& p, double eps = 1e-9) {
  for (const Point& j : st.declared_junctions)
    if (near(p, j, eps)) return true;
  return false;
}

}  // namespace

ValidationReport validate_embedding(const StageApprox& stage) {
  ValidationReport rep;

  // simplicity sweep: arcs intersect only at declared junction points
  {
    bool ok = true;
    std::string detail;
    std::vector<std::pair<Segment, int>> segs;
    for (std::size_t ai = 0; ai < stage.arcs.size(); ++ai) {
      const Arc& a = stage.arcs[ai];
      for (std::size_t k = 0; k + 1 < a.poly.pts.size(); ++k)
        segs.emplace_back(Segment(a.poly.pts[k], a.poly.pts[k + 1]), static_cast<int>(ai));
    }
    for (std::size_t x = 0; x < segs.size() && ok; ++x)
      for (std::size_t y = x + 1; y < segs.size(); ++y) {
        if (segs[x].second == segs[y].second) continue;  // same arc: is_simple covers it
        const SegIntersect r = seg_intersect(segs[x].first, segs[y].first);
        if (!r.hit()) continue;
        if (r.kind == IntersectKind::Touch && declared_point(stage, r.p)) continue;
        ok = false;
        std::ostringstream os;
        os << "arcs " << segs[x].second << " and " << segs[y].second << " meet near ("
           << r.p.x() << "," << r.p.y() << ")";
        detail = os.str();
        break;
      }
    for (const Arc& a : stage.arcs)
      if (!is_simple(a.poly)) {
        ok = false;
        detail = "self-intersecting arc";
      }
    rep.items.push_back({"simplicity", ok, detail});
  }

  // half-plane law for schema stages
  if (stage.scheme.variant == SchemeSpec::Variant::Schema) {
    bool ok = true;
    std::string detail;
    for (const MarkedPoint& mp : stage.marked) {
      if (mp.top && mp.p.y() <= 0.5) { ok = false; detail = "Q point at or below 1/2"; }
      if (!mp.top && mp.p.y() >= 0.5) { ok = false; detail = "P point at or above 1/2"; }
    }
    rep.items.push_back({"half_plane", ok, detail});
  } else if (stage.scheme.variant == SchemeSpec::Variant::Standard) {
    bool ok = true;
    for (const MarkedPoint& mp : stage.marked) {
      if (mp.top && std::abs(mp.p.y() - 1.0) > 1e-12) ok = false;
      if (!mp.top && std::abs(mp.p.y()) > 1e-12) ok = false;
    }
    rep.items.push_back({"half_plane", ok, ""});
  }

  // junction check: shared endpoints across pieces are exactly the declared set
  {
    bool ok = true;
    std::string detail;
    std::map<std::pair<int64_t, int64_t>, std::set<std::pair<int, int>>> ends;
    for (const Arc& a : stage.arcs) {
      for (const Point* p : {&a.poly.pts.front(), &a.poly.pts.back()}) {
        const auto key = std::make_pair(static_cast<int64_t>(std::llround(p->x() * 1e9)),
                                        static_cast<int64_t>(std::llround(p->y() * 1e9)));
        ends[key].insert({a.tag.block, a.tag.piece});
      }
    }
    for (const auto& [key, owners] : ends) {
      if (owners.size() < 2) continue;
      const Point p(key.first / 1e9, key.second / 1e9);
      if (!declared_point(stage, p, 1e-6)) {
        ok = false;
        std::ostringstream os;
        os << "undeclared shared endpoint near (" << p.x() << "," << p.y() << ")";
        detail = os.str();
      }
    }
    rep.items.push_back({"junctions", ok, detail});
  }

  // hausdorff cascade against the next truncation / stage
  {
    bool ok = true;
    bool ran = false;
    std::string detail = "skipped";
    try {
      StageApprox next;
      if (stage.scheme.variant == SchemeSpec::Variant::Schema) {
        SchemeSpec s2 = stage.scheme;
        s2.m += 1;
        if (s2.m <= static_cast<int>(s2.n.size()) || !s2.tail_period.empty()) {
          next = build_schema_stage(s2);
          ran = true;
        }
      } else if (stage.scheme.variant == SchemeSpec::Variant::Standard && stage.stage < 12) {
        next = build_standard_stage(stage.stage + 1);
        ran = true;
      }
      if (ran) {
        detail.clear();
        double worst = 0.0;
        for (const Arc& a : next.arcs) {
          for (std::size_t k = 0; k + 1 < a.poly.pts.size(); ++k) {
            for (int s = 0; s <= 4; ++s) {
              const Point p = a.poly.pts[k] + (s / 4.0) * (a.poly.pts[k + 1] - a.poly.pts[k]);
              double best = std::numeric_limits<double>::infinity();
              for (const Arc& b : stage.arcs) best = std::min(best, dist_point_polyline(p, b.poly));
              worst = std::max(worst, best);
            }
          }
        }
        ok = worst <= stage.hausdorff_bound + 1e-9;
        if (!ok) {
          std::ostringstream os;
          os << "cascade distance " << worst << " exceeds bound " << stage.hausdorff_bound;
          detail = os.str();
        }
      }
    } catch (const std::exception& ex) {
      ok = false;
      detail = ex.what();
    }
    rep.items.push_back({"hausdorff_cascade", ok, detail});
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : v) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

int to_int(const std::string& s) {
  std::size_t pos = 0;
  const int v = std::stoi(s, &pos);
  if (pos != s.size()) throw std::runtime_error("config: bad integer '" + s + "'");
  return v;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  std::size_t b = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

}  // namespace

SchemeSpec parse_config(const std::string& text) {
  SchemeSpec spec;
  bool have_variant = false;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("config: expected key = value: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "variant") {
      if (val == "standard") spec.variant = SchemeSpec::Variant::Standard;
      else if (val == "type_a") spec.variant = SchemeSpec::Variant::TypeA;
      else if (val == "schema") spec.variant = SchemeSpec::Variant::Schema;
      else throw std::runtime_error("config: unknown variant '" + val + "'");
      have_variant = true;
    } else if (key == "bits") {
      spec.bits.clear();
      for (const auto& tok : split_list(val)) spec.bits.push_back(to_int(tok));
    } else if (key == "n") {
      spec.n.clear();
      for (const auto& tok : split_list(val)) spec.n.push_back(to_int(tok));
    } else if (key == "tail_period") {
      spec.tail_period.clear();
      for (const auto& tok : split_list(val)) spec.tail_period.push_back(to_int(tok));
    } else if (key == "m") {
      spec.m = to_int(val);
    } else if (key == "resolution") {
      spec.resolution = to_int(val);
    } else {
      throw std::runtime_error("config: unknown key '" + key + "'");
    }
  }
  if (!have_variant) throw std::runtime_error("config: missing 'variant'");
  spec.stage = spec.resolution;
  if (spec.variant == SchemeSpec::Variant::Schema) {
    check_schema_entries(spec.n);
    check_schema_entries(spec.tail_period);
    if (spec.n.empty() && spec.tail_period.empty())
      throw std::runtime_error("config: schema variant requires 'n'");
  }
  return spec;
}

std::string write_config(const SchemeSpec& spec) {
  std::ostringstream os;
  os << "variant = " << spec.name() << "\n";
  auto list = [&](const char* key, const std::vector<int>& v) {
    if (v.empty()) return;
    os << key << " =";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : " ") << v[i];
    os << "\n";
  };
  list("bits", spec.bits);
  list("n", spec.n);
  list("tail_period", spec.tail_period);
  os << "m = " << spec.m << "\n";
  os << "resolution = " << spec.resolution << "\n";
  return os.str();
}

}  // namespace kvl
