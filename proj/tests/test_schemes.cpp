#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kvl/json_io.hpp"
#include "kvl/schemes.hpp"

using namespace kvl;

namespace {

SchemeSpec schema_spec(std::vector<int> n, int m, int res = 1) {
  SchemeSpec s;
  s.variant = SchemeSpec::Variant::Schema;
  s.n = std::move(n);
  s.m = m;
  s.resolution = res;
  return s;
}

SchemeSpec typea_spec(std::vector<int> bits, int m, int stage) {
  SchemeSpec s;
  s.variant = SchemeSpec::Variant::TypeA;
  s.bits = std::move(bits);
  s.m = m;
  s.resolution = stage;
  s.stage = stage;
  return s;
}

int pieces_in_block(const StageApprox& st, int block) {
  int maxp = 0;
  for (const Arc& a : st.arcs)
    if (a.tag.block == block) maxp = std::max(maxp, a.tag.piece);
  return maxp;
}

}  // namespace

TEST_CASE("config parsing") {
  const SchemeSpec s = parse_config("variant = schema\nn = 4, 6\nm = 2\nresolution = 1\n");
  CHECK(s.variant == SchemeSpec::Variant::Schema);
  CHECK(s.n == std::vector<int>{4, 6});
  CHECK(s.m == 2);
  CHECK_THROWS(parse_config("variant = schema\nn = 4\nwhatever = 3\n"));
  CHECK_THROWS(parse_config("n = 4\n"));                       // missing variant
  CHECK_THROWS(parse_config("variant = schema\nn = 3\n"));     // odd entry
  CHECK_THROWS(parse_config("variant = schema\nn = 2\n"));     // below 4
  const SchemeSpec rt = parse_config(write_config(s));
  CHECK(rt.n == s.n);
  CHECK(rt.m == s.m);
}

TEST_CASE("schema block structure: counts and junction parity") {
  const StageApprox st = build_schema_stage(schema_spec({4}, 1));
  CHECK(pieces_in_block(st, 1) == 8);  // 2 n_1 sub-copies

  const auto frames = schema_frames(st.scheme);
  REQUIRE(frames.size() == 1);
  const auto& f = frames[0];
  REQUIRE(f.junctions.size() == 7);
  for (int j = 1; j <= 7; ++j) {
    const Point& s = f.junctions[static_cast<std::size_t>(j - 1)];
    if (j % 2 == 1)
      CHECK(s.y() > 0.5);  // Lambda vertices above the critical line
    else
      CHECK(s.y() < 0.5);  // V vertices below
    // junction points are marked with the right side
    bool found = false;
    for (const MarkedPoint& mp : st.marked)
      if ((mp.p - s).norm() < 1e-12) {
        found = true;
        CHECK(mp.top == (j % 2 == 1));
      }
    CHECK(found);
  }
}

TEST_CASE("fold collinearity is exact") {
  for (int n : {4, 6, 8, 10}) {
    const auto frames = schema_frames(schema_spec({n}, 1));
    const auto& f = frames[0];
    for (int k = 1; k <= n - 1; ++k) {
      const Point& ret = f.junctions[static_cast<std::size_t>(n + k - 1)];
      const Point& out = f.junctions[static_cast<std::size_t>(n - k - 1)];
      CHECK(ret.x() == out.x());
    }
  }
}

TEST_CASE("half-plane law for schema stages") {
  for (auto spec : {schema_spec({4}, 1), schema_spec({4, 6}, 2), schema_spec({6, 4, 8}, 3)}) {
    const StageApprox st = build_schema_stage(spec);
    for (const MarkedPoint& mp : st.marked) {
      if (mp.top)
        CHECK(mp.p.y() > 0.5);
      else
        CHECK(mp.p.y() < 0.5);
    }
  }
}

TEST_CASE("blocks meet only at the attachment points") {
  const StageApprox st = build_schema_stage(schema_spec({4, 6}, 2));
  CHECK(pieces_in_block(st, 2) == 12);
  const ValidationReport rep = validate_embedding(st);
  for (const auto& item : rep.items) {
    INFO(item.name, ": ", item.detail);
    CHECK(item.pass);
  }
}

TEST_CASE("validate_embedding accepts reference constructions") {
  {
    const StageApprox st = build_standard_stage(4);
    const ValidationReport rep = validate_embedding(st);
    for (const auto& item : rep.items) {
      INFO(item.name, ": ", item.detail);
      CHECK(item.pass);
    }
  }
  for (auto spec : {schema_spec({4}, 1), schema_spec({4, 4}, 2), schema_spec({10}, 1),
                    schema_spec({4, 6, 8, 10}, 4)}) {
    const StageApprox st = build_schema_stage(spec);
    const ValidationReport rep = validate_embedding(st);
    for (const auto& item : rep.items) {
      INFO("n0=", spec.n[0], " m=", spec.m, " ", item.name, ": ", item.detail);
      CHECK(item.pass);
    }
  }
}

TEST_CASE("hand-corrupted stage fails the simplicity check") {
  StageApprox st = build_schema_stage(schema_spec({4}, 1));
  Arc bad = st.arcs[5];
  bad.poly.pts[0] += Point(-0.01, 0.01);  // drag an endpoint across its neighbours
  bad.poly.pts.back() += Point(0.012, -0.02);
  st.arcs.push_back(bad);
  const ValidationReport rep = validate_embedding(st);
  bool simplicity_failed = false;
  for (const auto& item : rep.items)
    if (item.name == "simplicity" && !item.pass) simplicity_failed = true;
  CHECK(simplicity_failed);
}

TEST_CASE("crosscut inventory") {
  const StageApprox st = build_schema_stage(schema_spec({4}, 1));
  const auto cuts = crosscuts(st);
  int schema = 0, alt = 0, layer = 0, vlam = 0;
  for (const auto& c : cuts) {
    if (c.kind == CutKind::SchemaCut) {
      ++schema;
      CHECK(c.segment.a.y() < 0.5);
      CHECK(c.segment.b.y() < 0.5);
      CHECK(c.segment.a.y() == c.segment.b.y());  // horizontal
    }
    if (c.kind == CutKind::AltSchemaCut) ++alt;
    if (c.kind == CutKind::LayerCut) ++layer;
  }
  for (const Arc& a : st.arcs)
    if (a.tag.kind == LayerKind::V || a.tag.kind == LayerKind::Lambda) ++vlam;
  CHECK(schema == 1);
  CHECK(alt == 1);
  CHECK(layer == vlam);

  const StageApprox std4 = build_standard_stage(4);
  for (const auto& c : crosscuts(std4)) CHECK(c.kind == CutKind::LayerCut);
}

TEST_CASE("type-A with empty bits is the standard stage") {
  const StageApprox a = build_typeA_stage(typea_spec({}, 0, 5));
  const StageApprox b = build_standard_stage(5);
  REQUIRE(a.arcs.size() == b.arcs.size());
  for (std::size_t i = 0; i < a.arcs.size(); ++i) {
    REQUIRE(a.arcs[i].poly.pts.size() == b.arcs[i].poly.pts.size());
    for (std::size_t k = 0; k < a.arcs[i].poly.pts.size(); ++k)
      CHECK((a.arcs[i].poly.pts[k] - b.arcs[i].poly.pts[k]).norm() == 0.0);
  }
}

TEST_CASE("type-A locality and pinch decay") {
  const StageApprox st = build_typeA_stage(typea_spec({0}, 1, 5));
  const StageApprox ref = build_standard_stage(5);

  // arcs outside the perturbed block are bit-identical to the standard scheme
  int matched = 0;
  for (const Arc& a : st.arcs) {
    if (a.tag.kind == LayerKind::ContinuityEstimate) continue;
    bool found = false;
    for (const Arc& b : ref.arcs)
      if (b.tag.kind == a.tag.kind && b.tag.address == a.tag.address &&
          b.tag.stage_introduced == a.tag.stage_introduced) {
        found = true;
        for (std::size_t k = 0; k < a.poly.pts.size(); ++k)
          CHECK((a.poly.pts[k] - b.poly.pts[k]).norm() == 0.0);
      }
    if (found) ++matched;
  }
  CHECK(matched > 0);

  // gaps between consecutive pinch walls halve exactly
  std::vector<double> tops;
  for (const Arc& a : st.arcs)
    if (a.tag.kind == LayerKind::ContinuityEstimate && a.tag.block == 1 && a.tag.piece > 0 &&
        a.poly.pts[0].y() > 1.0)
      tops.push_back(a.poly.pts[0].y());
  std::sort(tops.rbegin(), tops.rend());
  REQUIRE(tops.size() >= 2);
  std::vector<double> gaps;
  for (std::size_t k = 0; k + 1 < tops.size(); ++k) gaps.push_back(tops[k] - tops[k + 1]);
  for (std::size_t k = 0; k + 1 < gaps.size(); ++k)
    CHECK(gaps[k + 1] == doctest::Approx(0.5 * gaps[k]).epsilon(1e-9));

  // bit 0 buries both endpoints: walls below y = 0 as well
  bool below = false;
  for (const Arc& a : st.arcs)
    if (a.tag.kind == LayerKind::ContinuityEstimate && a.poly.pts[0].y() < 0.0) below = true;
  CHECK(below);

  // bit 1 leaves the bottom approach open
  const StageApprox st1 = build_typeA_stage(typea_spec({1}, 1, 5));
  for (const Arc& a : st1.arcs)
    if (a.tag.kind == LayerKind::ContinuityEstimate) CHECK(a.poly.pts[0].y() > -1e-12);
}

TEST_CASE("scheme determinism: identical specs give identical serialized stages") {
  for (auto spec : {schema_spec({4, 6}, 2), schema_spec({8}, 1)}) {
    const std::string a = dump_json(stage_to_json(build_schema_stage(spec)));
    const std::string b = dump_json(stage_to_json(build_schema_stage(spec)));
    CHECK(a == b);
  }
  const SchemeSpec t = typea_spec({0, 1}, 2, 6);
  CHECK(dump_json(stage_to_json(build_typeA_stage(t))) ==
        dump_json(stage_to_json(build_typeA_stage(t))));
}

TEST_CASE("schema arc counts per block") {
  // each sub-copy renders 2^res - 1 zigzag arcs plus two end layers
  const StageApprox st = build_schema_stage(schema_spec({4, 6}, 2, 1));
  int block1 = 0, block2 = 0;
  for (const Arc& a : st.arcs) {
    if (a.tag.block == 1) ++block1;
    if (a.tag.block == 2) ++block2;
  }
  CHECK(block1 == 8 * 3);
  CHECK(block2 == 12 * 3);
}

TEST_CASE("schema rejects malformed specs") {
  CHECK_THROWS(build_schema_stage(schema_spec({3}, 1)));
  CHECK_THROWS(build_schema_stage(schema_spec({4}, 2)));  // m beyond prefix, no tail
  SchemeSpec s = schema_spec({4}, 3);
  s.tail_period = {6, 8};
  const StageApprox st = build_schema_stage(s);  // tail extends the sequence
  CHECK(pieces_in_block(st, 3) == 2 * 8);
}
