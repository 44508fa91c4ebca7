#include "kvl/json_io.hpp"

#include <cstdio>

namespace kvl {

double round12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return std::strtod(buf, nullptr);
}

namespace {

json point_to_json(const Point& p) { return json::array({round12(p.x()), round12(p.y())}); }

Point point_from_json(const json& j) { return Point(j.at(0).get<double>(), j.at(1).get<double>()); }

json tag_to_json(const LayerTag& t) {
  json j;
  j["kind"] = layer_kind_name(t.kind);
  j["stage"] = t.stage_introduced;
  j["address"] = t.address;
  if (t.block) j["block"] = t.block;
  if (t.piece) j["piece"] = t.piece;
  return j;
}

LayerTag tag_from_json(const json& j) {
  LayerTag t;
  const std::string k = j.at("kind").get<std::string>();
  if (k == "end_left") t.kind = LayerKind::EndLeft;
  else if (k == "end_right") t.kind = LayerKind::EndRight;
  else if (k == "v") t.kind = LayerKind::V;
  else if (k == "lambda") t.kind = LayerKind::Lambda;
  else t.kind = LayerKind::ContinuityEstimate;
  t.stage_introduced = j.at("stage").get<int>();
  t.address = j.at("address").get<std::vector<int>>();
  if (j.contains("block")) t.block = j.at("block").get<int>();
  if (j.contains("piece")) t.piece = j.at("piece").get<int>();
  return t;
}

json marked_to_json(const MarkedPoint& m) {
  json j;
  j["point"] = point_to_json(m.p);
  j["tag"] = m.label;
  return j;
}

}  // namespace

json spec_to_json(const SchemeSpec& spec) {
  json j;
  j["variant"] = spec.name();
  if (!spec.bits.empty()) j["bits"] = spec.bits;
  if (!spec.n.empty()) j["n"] = spec.n;
  if (!spec.tail_period.empty()) j["tail_period"] = spec.tail_period;
  j["m"] = spec.m;
  j["resolution"] = spec.resolution;
  return j;
}

SchemeSpec spec_from_json(const json& j) {
  SchemeSpec s;
  const std::string v = j.at("variant").get<std::string>();
  if (v == "standard") s.variant = SchemeSpec::Variant::Standard;
  else if (v == "type_a") s.variant = SchemeSpec::Variant::TypeA;
  else if (v == "schema") s.variant = SchemeSpec::Variant::Schema;
  else throw std::runtime_error("spec_from_json: bad variant");
  if (j.contains("bits")) s.bits = j.at("bits").get<std::vector<int>>();
  if (j.contains("n")) s.n = j.at("n").get<std::vector<int>>();
  if (j.contains("tail_period")) s.tail_period = j.at("tail_period").get<std::vector<int>>();
  s.m = j.at("m").get<int>();
  s.resolution = j.at("resolution").get<int>();
  s.stage = s.resolution;
  return s;
}

json stage_to_json(const StageApprox& stage) {
  json j;
  j["scheme"] = spec_to_json(stage.scheme);
  j["stage"] = stage.stage;
  json arcs = json::array();
  for (const Arc& a : stage.arcs) {
    json e;
    e["tag"] = tag_to_json(a.tag);
    json pts = json::array();
    for (const Point& p : a.poly.pts) pts.push_back(point_to_json(p));
    e["points"] = pts;
    arcs.push_back(e);
  }
  j["arcs"] = arcs;
  json mp = json::array(), mq = json::array();
  for (const MarkedPoint& m : stage.marked) (m.top ? mq : mp).push_back(marked_to_json(m));
  j["marked_P"] = mp;
  j["marked_Q"] = mq;
  j["hausdorff_bound"] = round12(stage.hausdorff_bound);
  return j;
}

StageApprox stage_from_json(const json& j) {
  StageApprox st;
  st.scheme = spec_from_json(j.at("scheme"));
  st.stage = j.at("stage").get<int>();
  for (const json& e : j.at("arcs")) {
    Arc a;
    a.tag = tag_from_json(e.at("tag"));
    for (const json& p : e.at("points")) a.poly.pts.push_back(point_from_json(p));
    st.arcs.push_back(std::move(a));
  }
  auto read_marked = [&](const json& arr, bool top) {
    for (const json& e : arr)
      st.marked.push_back(MarkedPoint{point_from_json(e.at("point")), top,
                                      e.at("tag").get<std::string>()});
  };
  read_marked(j.at("marked_P"), false);
  read_marked(j.at("marked_Q"), true);
  st.hausdorff_bound = j.at("hausdorff_bound").get<double>();
  // derived data comes from the scheme
  try {
    const StageApprox rebuilt = build_stage(st.scheme);
    st.deltas = rebuilt.deltas;
    st.cuts = rebuilt.cuts;
    st.declared_junctions = rebuilt.declared_junctions;
  } catch (const std::exception&) {
    // leave derived data empty for foreign documents
  }
  return st;
}

json access_to_json(const AccessVerdict& v) {
  json j;
  j["operation"] = "accessibility";
  j["target"] = v.target;
  j["stages"] = v.stages;
  json prof = json::array();
  for (double p : v.profile) prof.push_back(round12(p));
  j["profile"] = prof;
  j["verdict"] = v.verdict == Access::Accessible
                     ? "accessible"
                     : (v.verdict == Access::Inaccessible ? "inaccessible" : "indeterminate");
  j["thresholds"] = {{"rho", v.rho}, {"floor_c", round12(v.floor_c)}};
  return j;
}

json signature_to_json(const SchemeSpec& spec, const DepthSignature& sig, int res) {
  json j;
  j["operation"] = "depth_signature";
  j["inputs"] = spec_to_json(spec);
  j["grid_resolution"] = res;
  j["values"] = sig.values;
  return j;
}

json depth_to_json(const DepthResult& r, const Point& x, int res) {
  json j;
  j["operation"] = "depth";
  j["inputs"] = {{"x", point_to_json(x)}, {"grid_resolution", res}};
  j["depth"] = r.depth;
  json path = json::array();
  for (const Point& p : r.escape_path.pts) path.push_back(point_to_json(p));
  j["escape_path"] = path;
  json tp = json::array();
  for (const auto& [p, top] : r.turning_points)
    tp.push_back(json{{"point", point_to_json(p)}, {"side", top ? "top" : "bottom"}});
  j["turning_points"] = tp;
  return j;
}

json distinguish_to_json(const SchemeSpec& a, const SchemeSpec& b, const DistinguishResult& r) {
  json j;
  j["operation"] = "distinguish";
  j["inputs"] = {{"a", spec_to_json(a)}, {"b", spec_to_json(b)}};
  switch (r.verdict) {
    case Distinguish::EquivalentByConstruction: j["verdict"] = "equivalent-by-construction"; break;
    case Distinguish::Inequivalent: j["verdict"] = "inequivalent"; break;
    case Distinguish::Indeterminate: j["verdict"] = "indeterminate"; break;
  }
  j["evidence"] = r.evidence;
  return j;
}

json chain_to_json(const std::vector<Box>& boxes, double mesh) {
  json j;
  j["operation"] = "chain_cover";
  j["mesh"] = round12(mesh);
  json arr = json::array();
  for (const Box& b : boxes)
    arr.push_back(json{{"lo", point_to_json(b.lo)}, {"hi", point_to_json(b.hi)}});
  j["boxes"] = arr;
  j["count"] = boxes.size();
  return j;
}

json validation_to_json(const ValidationReport& rep) {
  json j;
  j["operation"] = "validate_embedding";
  json arr = json::array();
  for (const auto& it : rep.items)
    arr.push_back(json{{"check", it.name}, {"pass", it.pass}, {"detail", it.detail}});
  j["checks"] = arr;
  j["pass"] = rep.pass();
  return j;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

}  // namespace kvl
