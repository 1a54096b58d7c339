#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "skyfed/error.hpp"
#include "skyfed/result_table.hpp"
#include "skyfed/xmatch.hpp"

// JSON shapes exchanged between nodes, the portal and clients.
namespace skyfed::wire {

using nlohmann::json;

json value_to_json(const Value& v);
Value value_from_json(const json& j, ValueKind kind);

/// {"columns":[{"name","kind"}], "rows":[[...]], "stats":{"row_count","division_by_zero"}}
/// Elapsed time is deliberately left out so identical queries give identical bodies.
json table_to_json(const ResultTable& t);
ResultTable table_from_json(const json& j);

/// {"error":{"code","message","offset"?}}
json error_envelope(const Error& e);
json error_envelope(const std::string& code, const std::string& message);

json request_to_json(const XMatchRequest& r);
/// Throws Error("invalid_request") on missing or mistyped fields.
XMatchRequest request_from_json(const json& j);

struct MatchedRow {
    double separation_arcsec = 0.0;
    std::vector<Value> row;  // domestic columns
    bool operator==(const MatchedRow&) const = default;
};

struct ProbeMatches {
    std::int64_t probe_id = 0;
    std::vector<MatchedRow> objects;
    bool operator==(const ProbeMatches&) const = default;
};

struct XMatchResponse {
    std::vector<ColumnSpec> columns;
    std::vector<ProbeMatches> matches;
    bool operator==(const XMatchResponse&) const = default;
};

json response_to_json(const XMatchResponse& r);
XMatchResponse response_from_json(const json& j);

std::vector<ColumnSpec> columns_from_json(const json& j);
json columns_to_json(const std::vector<ColumnSpec>& cols);

}  // namespace skyfed::wire
