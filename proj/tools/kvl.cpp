#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "kvl/json_io.hpp"
#include "kvl/svg.hpp"

namespace {

using namespace kvl;

int default_grid_res() {
  if (const char* env = std::getenv("KVL_GRID_RES")) {
    const int v = std::atoi(env);
    if (v >= 64) return v;
  }
  return 512;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// temp file + rename so partially written outputs never appear
void atomic_write(const std::string& path, const std::string& data) {
  if (path == "-" || path.empty()) {
    std::cout << data;
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << data;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot rename into " + path);
}

SchemeSpec load_spec(const std::string& path, int stage_override, int m_override) {
  SchemeSpec spec = parse_config(read_file(path));
  if (stage_override > 0) {
    spec.resolution = stage_override;
    spec.stage = stage_override;
    if (spec.variant == SchemeSpec::Variant::Schema) spec.resolution = stage_override;
  }
  if (m_override >= 0) spec.m = m_override;
  return spec;
}

struct ValidationFailure : std::runtime_error {
  explicit ValidationFailure(const std::string& w) : std::runtime_error(w) {}
};

void require_valid(const StageApprox& st) {
  const ValidationReport rep = validate_embedding(st);
  if (!rep.pass()) {
    std::string msg = "validation failed:";
    for (const auto& item : rep.items)
      if (!item.pass) msg += " [" + item.name + "] " + item.detail;
    throw ValidationFailure(msg);
  }
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',' || c == ' ') {
      if (!cur.empty()) out.push_back(std::stoi(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knaster accordion embedding toolkit"};
  app.require_subcommand(1);
  int grid = default_grid_res();
  app.add_option("--grid", grid, "grid resolution in cells per unit (default 512)");

  std::string scheme_path, scheme_b_path, in_path, out_path = "-";
  int stage_override = -1, m_override = -1;
  double px = 0, py = 0, mesh = 0.25;
  std::string target = "std_cont_mid";
  std::string stages_csv = "3,4,5,6";
  bool ov_cuts = false, ov_critical = false, ov_pockets = false, measure = false;
  std::string escape_at;

  auto add_common = [&](CLI::App* c, bool needs_scheme) {
    if (needs_scheme) c->add_option("--scheme", scheme_path, "scheme config file")->required();
    c->add_option("--out", out_path, "output file (default stdout)");
    c->add_option("--stage", stage_override, "override stage / resolution");
    c->add_option("--m", m_override, "override truncation m");
  };

  CLI::App* cmd_build = app.add_subcommand("build", "build a stage and emit its JSON");
  add_common(cmd_build, true);

  CLI::App* cmd_render = app.add_subcommand("render", "render a stage to SVG");
  add_common(cmd_render, false);
  cmd_render->add_option("--scheme", scheme_path, "scheme config file");
  cmd_render->add_option("--in", in_path, "stage JSON produced by build");
  cmd_render->add_flag("--crosscuts", ov_cuts, "draw crosscuts");
  cmd_render->add_flag("--critical-line", ov_critical, "draw the line y = 1/2");
  cmd_render->add_flag("--pockets", ov_pockets, "shade schema pockets");
  cmd_render->add_option("--escape", escape_at, "overlay the escape path from x,y");

  CLI::App* cmd_access = app.add_subcommand("access", "accessibility profile for a target");
  add_common(cmd_access, true);
  cmd_access->add_option("--target", target, "target id (e.g. std_cont_mid, qa_bottom:1)");
  cmd_access->add_option("--stages", stages_csv, "comma-separated stage list");

  CLI::App* cmd_depth = app.add_subcommand("depth", "escape depth of a complement point");
  add_common(cmd_depth, false);
  cmd_depth->add_option("--scheme", scheme_path, "scheme config file");
  cmd_depth->add_option("--in", in_path, "stage JSON produced by build");
  cmd_depth->add_option("--x", px, "point x")->required();
  cmd_depth->add_option("--y", py, "point y")->required();

  CLI::App* cmd_sig = app.add_subcommand("signature", "depth signature of a schema stage");
  add_common(cmd_sig, false);
  cmd_sig->add_option("--scheme", scheme_path, "scheme config file");
  cmd_sig->add_option("--in", in_path, "stage JSON produced by build");

  CLI::App* cmd_dist = app.add_subcommand("distinguish", "compare two scheme specs");
  cmd_dist->add_option("--a", scheme_path, "first scheme config")->required();
  cmd_dist->add_option("--b", scheme_b_path, "second scheme config")->required();
  cmd_dist->add_option("--out", out_path, "output file (default stdout)");
  cmd_dist->add_flag("--measure", measure, "measure signatures on built stages");

  CLI::App* cmd_chain = app.add_subcommand("chain", "chain cover of a standard-scheme stage");
  add_common(cmd_chain, true);
  cmd_chain->add_option("--mesh", mesh, "mesh bound for the chain links");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << app.help() << std::endl;
    return 1;
  }

  try {
    auto stage_from_inputs = [&]() -> StageApprox {
      if (!in_path.empty()) return stage_from_json(json::parse(read_file(in_path)));
      if (scheme_path.empty()) throw std::runtime_error("need --scheme or --in");
      return build_stage(load_spec(scheme_path, stage_override, m_override));
    };

    if (*cmd_build) {
      const StageApprox st = build_stage(load_spec(scheme_path, stage_override, m_override));
      require_valid(st);
      atomic_write(out_path, dump_json(stage_to_json(st)));
    } else if (*cmd_render) {
      const StageApprox st = stage_from_inputs();
      Overlays ov;
      RenderStyle style;
      style.draw_crosscuts = ov_cuts;
      style.draw_critical_line = ov_critical;
      style.draw_pockets = ov_pockets;
      if (ov_cuts || ov_pockets) ov.cuts = crosscuts(st);
      if (ov_pockets) {
        const StageAnalysis a = make_analysis(st, grid);
        std::vector<Crosscut> sc;
        for (const Crosscut& c : st.cuts)
          if (c.kind == CutKind::SchemaCut) sc.push_back(c);
        ov.pockets = pockets(a, sc);
        ov.pocket_res = grid;
      }
      if (!escape_at.empty()) {
        const std::vector<int> xy2 = parse_int_list(escape_at);
        const StageAnalysis a = make_analysis(st, grid);
        double ex = 0, ey = 0;
        std::sscanf(escape_at.c_str(), "%lf,%lf", &ex, &ey);
        const DepthResult r = depth(a, Point(ex, ey));
        ov.escape_paths.push_back(r.escape_path);
        style.draw_escape_paths = true;
        (void)xy2;
      }
      atomic_write(out_path, svg_render(st, ov, style));
    } else if (*cmd_access) {
      const SchemeSpec spec = load_spec(scheme_path, stage_override, m_override);
      const AccessVerdict v = accessibility(spec, target, parse_int_list(stages_csv), grid);
      atomic_write(out_path, dump_json(access_to_json(v)));
    } else if (*cmd_depth) {
      const StageApprox st = stage_from_inputs();
      const StageAnalysis a = make_analysis(st, grid);
      const DepthResult r = depth(a, Point(px, py));
      atomic_write(out_path, dump_json(depth_to_json(r, Point(px, py), grid)));
    } else if (*cmd_sig) {
      const StageApprox st = stage_from_inputs();
      const DepthSignature sig = depth_signature(st, grid);
      atomic_write(out_path, dump_json(signature_to_json(st.scheme, sig, grid)));
    } else if (*cmd_dist) {
      const SchemeSpec a = parse_config(read_file(scheme_path));
      const SchemeSpec b = parse_config(read_file(scheme_b_path));
      const DistinguishResult r = distinguish(a, b, measure, grid);
      atomic_write(out_path, dump_json(distinguish_to_json(a, b, r)));
    } else if (*cmd_chain) {
      const StageApprox st = build_stage(load_spec(scheme_path, stage_override, m_override));
      const std::vector<Box> boxes = chain_cover(st, mesh, grid);
      atomic_write(out_path, dump_json(chain_to_json(boxes, mesh)));
    }
  } catch (const ValidationFailure& e) {
    std::cerr << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    const std::string w = e.what();
    std::cerr << w << std::endl;
    if (w.find("failed to separate") != std::string::npos ||
        w.find("validation") != std::string::npos)
      return 2;
    if (w.find("unknown key") != std::string::npos || w.find("config:") != std::string::npos) {
      std::cerr << app.help() << std::endl;
      return 1;
    }
    return 2;
  }
  return 0;
}
