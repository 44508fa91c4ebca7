#pragma once

#include <optional>
#include <string>

#include "kvl/clearance.hpp"
#include "kvl/schemes.hpp"

namespace kvl {

/// Default analysis domain: the unit square plus margin, aligned so y = 1/2
/// falls on a grid row boundary for any resolution divisible by 16.
Box analysis_domain();

/// Grid-side view of one stage: clearance field, critical-row index and the
/// per-cell vertical-ray freedom flags.
struct Pocket {
  CutKind kind = CutKind::LayerCut;
  int index = 0;
  Crosscut cut;
  Point interior_sample;
  std::vector<int> mask;  // cell ids
};

struct StageAnalysis {
  const StageApprox* stage = nullptr;
  int res = 512;
  ClearanceField field;
  int cross_row = 0;               // boundary between rows cross_row-1, cross_row is y = 1/2
  std::vector<char> up_free, down_free;
  std::vector<char> in_pocket;     // cells inside schema / alternate schema pockets
  std::vector<Pocket> schema_pockets;  // pockets of the stage's own cuts
  std::vector<int> depth_cells;    // min critical-line crossings to a free cell (-1 unreachable)
  std::vector<int> depth_parent;   // BFS tree toward a free cell
};

StageAnalysis make_analysis(const StageApprox& stage, int res);

/// Independent oracle: room/door graph BFS (components above and below the
/// critical line, doors where they meet). Must agree with depth_cells.
std::vector<int> region_depth_field(const StageAnalysis& a);

struct DepthResult {
  int depth = -1;
  Polyline escape_path;
  std::vector<std::pair<Point, bool>> turning_points;  // (point, is_top)
};

/// Escape depth of a complement point: minimum crossings of y = 1/2 over grid
/// paths to a cell with a free vertical ray, plus one witnessing path.
DepthResult depth(const StageAnalysis& a, const Point& x);

/// One pocket per cut, flood-filled from the cut's bounded side. Schema cuts
/// always act as barriers; each pocket additionally blocks its own cut.
std::vector<Pocket> pockets(const StageAnalysis& a, const std::vector<Crosscut>& cuts);

int pocket_depth(const StageAnalysis& a, const Pocket& p);

struct DepthSignature {
  std::vector<int> values;
};

/// Depths of the schema pockets, ascending block index. Schema stages only.
DepthSignature depth_signature(const StageApprox& stage, int res);

/// Exact tail-equivalence of eventually periodic sequences.
bool tail_equivalent(const SchemaSeq& a, const SchemaSeq& b);

enum class Access { Accessible, Inaccessible, Indeterminate };

struct AccessVerdict {
  std::string target;
  std::vector<int> stages;
  std::vector<double> profile;
  Access verdict = Access::Indeterminate;
  double rho = 0.75;
  double floor_c = 0.0;
};

/// Clearance-profile accessibility verdict across a list of stages. Targets:
///   std_cont_mid | std_cont_bottom | std_cont_top   (interior continuity layer)
///   qa_bottom:i | qa_top:i                          (type-A Q_i endpoints)
///   schema_v:i | schema_end:i                       (schema layer samples)
AccessVerdict accessibility(const SchemeSpec& spec, const std::string& target,
                            const std::vector<int>& stages, int res);

/// Resolve an accessibility target on a concrete stage.
Point resolve_target(const SchemeSpec& spec, const StageApprox& stage, const std::string& target);

/// Ordered open chain cover of the stage arcs: box_i meets box_j iff
/// |i-j| <= 1, every diameter <= mesh. Throws if construction fails to
/// validate.
std::vector<Box> chain_cover(const StageApprox& stage, double mesh, int res = 512);

enum class Distinguish { EquivalentByConstruction, Inequivalent, Indeterminate };

struct DistinguishResult {
  Distinguish verdict = Distinguish::Indeterminate;
  std::string evidence;
};

/// Compare two scheme specs per the depth-signature / accessibility rules.
/// When `measure` is set, signatures are computed on built stages at `res`.
DistinguishResult distinguish(const SchemeSpec& a, const SchemeSpec& b, bool measure = false,
                              int res = 512);

SchemaSeq seq_of(const SchemeSpec& spec);

}  // namespace kvl
