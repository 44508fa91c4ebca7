#include "kvl/svg.hpp"

#include <cstdio>
#include <sstream>

namespace kvl {

namespace {

constexpr double kSpan = 1.125;   // world width mapped onto the viewbox
constexpr double kLo = -0.0625;

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  std::string s(buf);
  return s == "-0.000" ? "0.000" : s;
}

std::string sx(double x) { return fmt3((x - kLo) * (1000.0 / kSpan)); }
std::string sy(double y) { return fmt3((kLo + kSpan - y) * (1000.0 / kSpan)); }

const char* stroke_for(LayerKind k) {
  switch (k) {
    case LayerKind::EndLeft: return "#1a1a1a";
    case LayerKind::EndRight: return "#1a1a1a";
    case LayerKind::V: return "#1f5fbf";
    case LayerKind::Lambda: return "#1f8f4f";
    case LayerKind::ContinuityEstimate: return "#777777";
  }
  return "#000000";
}

void path_el(std::ostringstream& os, const Polyline& poly, const char* stroke, const char* width,
             const char* extra = "") {
  os << "<path d=\"";
  for (std::size_t i = 0; i < poly.pts.size(); ++i)
    os << (i == 0 ? "M" : " L") << sx(poly.pts[i].x()) << " " << sy(poly.pts[i].y());
  os << "\" fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << width << "\"" << extra
     << "/>\n";
}

}  // namespace

std::string svg_render(const StageApprox& stage, const Overlays& overlays,
                       const RenderStyle& style) {
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
        "viewBox=\"0 0 1000 1000\">\n";
  for (const Arc& a : stage.arcs)
    path_el(os, a.poly, stroke_for(a.tag.kind),
            a.tag.kind == LayerKind::EndLeft || a.tag.kind == LayerKind::EndRight ? "2.0" : "1.2");
  if (style.draw_crosscuts) {
    for (const Crosscut& c : overlays.cuts) {
      Polyline p{c.segment.a, c.segment.b};
      path_el(os, p, c.kind == CutKind::SchemaCut ? "#cc2222" : "#cc22cc", "1.5",
              " stroke-dasharray=\"6 4\"");
    }
  }
  if (style.draw_pockets) {
    const GridSpec g(analysis_domain().lo, analysis_domain().hi, overlays.pocket_res);
    for (const Pocket& p : overlays.pockets) {
      // coarse deterministic shading: every 16th mask cell as a small square
      os << "<g fill=\"#e8b84b\" fill-opacity=\"0.45\" stroke=\"none\">\n";
      for (std::size_t k = 0; k < p.mask.size(); k += 16) {
        const int id = p.mask[k];
        const Point c = g.center(id % g.nx, id / g.nx);
        const double h = 0.75 / overlays.pocket_res;
        os << "<rect x=\"" << sx(c.x() - h) << "\" y=\"" << sy(c.y() + h) << "\" width=\""
           << fmt3(2 * h * (1000.0 / kSpan)) << "\" height=\"" << fmt3(2 * h * (1000.0 / kSpan))
           << "\"/>\n";
      }
      os << "</g>\n";
    }
  }
  if (style.draw_escape_paths)
    for (const Polyline& p : overlays.escape_paths) path_el(os, p, "#e07b1a", "1.5");
  if (style.draw_critical_line) {
    Polyline line{Point(kLo, 0.5), Point(kLo + kSpan, 0.5)};
    path_el(os, line, "#888888", "0.8", " stroke-dasharray=\"2 3\"");
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace kvl
