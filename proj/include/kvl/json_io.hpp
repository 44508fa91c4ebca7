#pragma once

#include <json.hpp>

#include "kvl/analysis.hpp"

namespace kvl {

using json = nlohmann::ordered_json;

/// Round toward a 12-significant-digit decimal so serialized coordinates are
/// stable under parse/serialize round trips.
double round12(double x);

json stage_to_json(const StageApprox& stage);

/// Reconstructs the stage from its JSON document. Derived data (cuts, quads)
/// is rebuilt from the serialized scheme.
StageApprox stage_from_json(const json& j);

json spec_to_json(const SchemeSpec& spec);
SchemeSpec spec_from_json(const json& j);

json access_to_json(const AccessVerdict& v);
json signature_to_json(const SchemeSpec& spec, const DepthSignature& sig, int res);
json depth_to_json(const DepthResult& r, const Point& x, int res);
json distinguish_to_json(const SchemeSpec& a, const SchemeSpec& b, const DistinguishResult& r);
json chain_to_json(const std::vector<Box>& boxes, double mesh);
json validation_to_json(const ValidationReport& rep);

std::string dump_json(const json& j);

}  // namespace kvl
