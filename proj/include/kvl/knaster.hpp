#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kvl/geometry.hpp"

namespace kvl {

enum class LayerKind { EndLeft, EndRight, V, Lambda, ContinuityEstimate };

const char* layer_kind_name(LayerKind k);

/// Identifies an arc within a construction: V's appear only at odd stages,
/// Lambda's only at even ones; the address is the binary quad path.
struct LayerTag {
  LayerKind kind = LayerKind::V;
  int stage_introduced = 0;
  std::vector<int> address;  // left/right child choices, one per prior stage
  int block = 0;             // schema block index (0 = none / standard)
  int piece = 0;             // sub-copy index within a block (0 = none)
};

struct Arc {
  Polyline poly;
  LayerTag tag;
};

/// Quadrilateral of some Delta_n: corners in order left-bottom, right-bottom,
/// right-top, left-top.
struct Quad {
  Point bl, br, tr, tl;
  int stage = 0;
  int index = 0;
  std::vector<int> address;
  double bottom_width() const { return (br - bl).norm(); }
  double top_width() const { return (tr - tl).norm(); }
  double max_width() const { return std::max(bottom_width(), top_width()); }
  Segment left_side() const { return Segment(bl, tl); }
  Segment right_side() const { return Segment(br, tr); }
  bool contains(const Point& p, double eps = 1e-9) const;
};

struct MarkedPoint {
  Point p;
  bool top = false;  // Q point when true, P point otherwise
  std::string label;
};

/// Declarative description of which embedding to build.
struct SchemeSpec {
  enum class Variant { Standard, TypeA, Schema };
  Variant variant = Variant::Standard;
  int stage = 4;                // standard/typeA base stage n
  std::vector<int> bits;        // TypeA bit sequence prefix
  std::vector<int> n;           // Schema sequence prefix (even ints >= 4)
  std::vector<int> tail_period; // optional periodic tail (for equivalence tests)
  int m = 1;                    // truncation
  int resolution = 1;           // sub-copy render depth per copy of K
  std::string name() const;
};

enum class CutKind { SchemaCut, AltSchemaCut, LayerCut };

struct Crosscut {
  Segment segment;
  CutKind kind = CutKind::LayerCut;
  int index = 0;       // block index for schema/alt cuts
  LayerTag layer;      // for layer cuts
};

/// Finite-stage polyline approximation of an embedded copy of K.
struct StageApprox {
  SchemeSpec scheme;
  int stage = 0;  // construction steps for standard/typeA, truncation m for schema
  std::vector<Arc> arcs;
  std::vector<MarkedPoint> marked;
  double hausdorff_bound = 0.0;

  // Standard-scheme bookkeeping: deltas[k-1] = Delta_k for k = 1..stage+1.
  std::vector<std::vector<Quad>> deltas;

  // Scheme-declared data used by the analyses.
  std::vector<Crosscut> cuts;
  std::vector<Point> declared_junctions;

  std::vector<MarkedPoint> marked_P() const;
  std::vector<MarkedPoint> marked_Q() const;
  std::vector<Polyline> obstacle_polylines() const;
  int arc_count(LayerKind k) const;
};

/// Stage-n approximant of the standard planar embedding (end layers plus all
/// V/Lambda arcs of steps 1..n). Deterministic; 1 <= n <= 12.
StageApprox build_standard_stage(int n);

/// Delta_n of a standard-scheme stage; n <= stage.stage + 1.
std::vector<Quad> quadrilaterals(const StageApprox& stage, int n);

struct LayerEstimate {
  Segment segment;
  double bound = 0.0;
};

/// Left/right side of the stage-n quad selected by a binary address, plus a
/// Hausdorff bound to the limiting straight arc.
LayerEstimate continuity_layer_estimate(const std::vector<int>& address, int n);

struct MarkedSets {
  std::vector<MarkedPoint> P, Q;
};

MarkedSets marked_points(const StageApprox& stage);

/// Exact limit position of the interior continuity layer selected by an
/// infinite address with the given head and a two-periodic tail; used as a
/// stage-independent analysis target.
Segment continuity_layer_limit(const std::vector<int>& head, int tail_a, int tail_b,
                               int depth = 48);

}  // namespace kvl
