#pragma once

#include <string>

#include "kvl/knaster.hpp"

namespace kvl {

/// Eventually-periodic sequence of positive even integers >= 4.
struct SchemaSeq {
  std::vector<int> prefix;
  std::vector<int> tail;  // optional periodic block; empty = constant last element
  void validate() const;
};

/// Parse a UTF-8 key-value scheme config. Keys: variant, bits, n, tail_period,
/// m, resolution. Unknown keys are rejected.
SchemeSpec parse_config(const std::string& text);
std::string write_config(const SchemeSpec& spec);

/// Stage approximant of the schema embedding psi_N truncated at m blocks.
StageApprox build_schema_stage(const SchemeSpec& spec);

/// Stage approximant of a type-A embedding about the default Q-sequence.
StageApprox build_typeA_stage(const SchemeSpec& spec);

/// Dispatch on spec.variant (standard/type_a/schema).
StageApprox build_stage(const SchemeSpec& spec);

/// All declared crosscuts of the stage: schema cuts, alt schema cuts and one
/// layer cut per rendered V/Lambda arc.
std::vector<Crosscut> crosscuts(const StageApprox& stage);

struct ValidationItem {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationItem> items;
  bool pass() const {
    for (const auto& i : items)
      if (!i.pass) return false;
    return true;
  }
};

/// Simplicity / half-plane / junction / cascade checks.
ValidationReport validate_embedding(const StageApprox& stage);

/// Geometry parameters of one schema block (exposed for analyses and tests).
struct SchemaBlockFrame {
  int index = 1;
  int n = 4;
  double xL = 0, xR = 0, B = 0, T = 0;
  double top_out = 0, top_ret = 0, bot_out = 0, bot_ret = 0, fold_lev = 0, p_lev = 0;
  Point p_attach;              // p_i, where block i+1 attaches
  std::vector<Point> junctions;  // s^1..s^{2n-1}
};

std::vector<SchemaBlockFrame> schema_frames(const SchemeSpec& spec);

}  // namespace kvl
