#pragma once

#include <json.hpp>

#include "gfmp/analysis.hpp"
#include "gfmp/bp.hpp"
#include "gfmp/fmp.hpp"
#include "gfmp/graph.hpp"

namespace gfmp {

using Json = nlohmann::ordered_json;

/// Finite reals as numbers, ±inf as the strings "inf"/"-inf", NaN as null.
Json real_to_json(double v);
/// Infinite girth as "inf".
Json girth_to_json(std::size_t g);

Json to_json(const FvsResult& fvs);
Json to_json(const BpResult& result);
Json to_json(const FmpResult& result);
Json to_json(const DiagnosisReport& report);
Json to_json(const PrefixCurve& curve);

}  // namespace gfmp
