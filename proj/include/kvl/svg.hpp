#pragma once

#include <string>

#include "kvl/analysis.hpp"

namespace kvl {

/// Deterministic rendering options; identical inputs give byte-identical SVG.
struct RenderStyle {
  bool draw_crosscuts = false;
  bool draw_critical_line = false;
  bool draw_pockets = false;
  bool draw_escape_paths = false;
};

struct Overlays {
  std::vector<Crosscut> cuts;
  std::vector<Polyline> escape_paths;
  std::vector<Pocket> pockets;
  int pocket_res = 512;  // grid the pocket masks were computed on
};

/// SVG 1.1 document, viewBox 0 0 1000 1000, one path element per arc in
/// construction order, then overlays in declared z-order.
std::string svg_render(const StageApprox& stage, const Overlays& overlays,
                       const RenderStyle& style);

}  // namespace kvl
