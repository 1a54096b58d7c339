#include "skyfed/wire.hpp"

#include <cmath>

namespace skyfed::wire {

namespace {
ValueKind parse_kind(const std::string& s) {
    if (s == "int") return ValueKind::Int;
    if (s == "float") return ValueKind::Float;
    if (s == "text") return ValueKind::Text;
    throw Error("invalid_response", "unknown column kind " + s);
}

template <typename T>
T field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw Error("invalid_request", std::string("missing field ") + key);
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw Error("invalid_request", std::string("field ") + key + " has the wrong type");
    }
}
}  // namespace

json value_to_json(const Value& v) {
    switch (kind_of(v)) {
        case ValueKind::Int: return std::get<std::int64_t>(v);
        case ValueKind::Float: {
            const double d = std::get<double>(v);
            return std::isfinite(d) ? json(d) : json(nullptr);
        }
        case ValueKind::Text: return std::get<std::string>(v);
        case ValueKind::Bool: return std::get<bool>(v);
        case ValueKind::Null: break;
    }
    return nullptr;
}

Value value_from_json(const json& j, ValueKind kind) {
    if (j.is_null()) return std::monostate{};
    switch (kind) {
        case ValueKind::Int:
            if (j.is_number_integer()) return j.get<std::int64_t>();
            break;
        case ValueKind::Float:
            if (j.is_number()) return j.get<double>();
            break;
        case ValueKind::Text:
            if (j.is_string()) return j.get<std::string>();
            break;
        default: break;
    }
    throw Error("invalid_response", "value " + j.dump() + " does not match column kind " + kind_name(kind));
}

json columns_to_json(const std::vector<ColumnSpec>& cols) {
    json out = json::array();
    for (const auto& c : cols) out.push_back({{"name", c.name}, {"kind", kind_name(c.kind)}});
    return out;
}

std::vector<ColumnSpec> columns_from_json(const json& j) {
    std::vector<ColumnSpec> cols;
    for (const auto& c : j) cols.push_back({c.at("name").get<std::string>(), parse_kind(c.at("kind").get<std::string>())});
    return cols;
}

json table_to_json(const ResultTable& t) {
    json rows = json::array();
    for (const auto& r : t.rows()) {
        json row = json::array();
        for (const auto& v : r) row.push_back(value_to_json(v));
        rows.push_back(std::move(row));
    }
    return {{"columns", columns_to_json(t.columns())},
            {"rows", std::move(rows)},
            {"stats", {{"row_count", t.rows().size()}, {"division_by_zero", t.stats.division_by_zero}}}};
}

ResultTable table_from_json(const json& j) {
    try {
        ResultTable t(columns_from_json(j.at("columns")));
        const auto& cols = t.columns();
        for (const auto& r : j.at("rows")) {
            if (r.size() != cols.size()) throw Error("invalid_response", "row arity mismatch");
            std::vector<Value> row;
            row.reserve(cols.size());
            for (std::size_t i = 0; i < cols.size(); ++i) row.push_back(value_from_json(r[i], cols[i].kind));
            t.add_row(std::move(row));
        }
        if (auto s = j.find("stats"); s != j.end())
            t.stats.division_by_zero = s->value("division_by_zero", std::size_t{0});
        return t;
    } catch (const json::exception& e) {
        throw Error("invalid_response", std::string("malformed result table: ") + e.what());
    }
}

json error_envelope(const Error& e) {
    json err{{"code", e.code()}, {"message", e.what()}};
    if (e.offset()) err["offset"] = *e.offset();
    return {{"error", std::move(err)}};
}

json error_envelope(const std::string& code, const std::string& message) {
    return {{"error", {{"code", code}, {"message", message}}}};
}

json request_to_json(const XMatchRequest& r) {
    json positions = json::array();
    for (const auto& p : r.positions)
        positions.push_back({{"probe_id", p.probe_id}, {"ra", p.ra_deg}, {"dec", p.dec_deg}, {"sigma_arcsec", p.sigma_arcsec}});
    return {{"positions", std::move(positions)}, {"k", r.k}, {"max_radius_arcsec", r.max_radius_arcsec}};
}

XMatchRequest request_from_json(const json& j) {
    if (!j.is_object()) throw Error("invalid_request", "xmatch body must be a JSON object");
    XMatchRequest r;
    auto positions = j.find("positions");
    if (positions == j.end() || !positions->is_array()) throw Error("invalid_request", "positions must be an array");
    for (const auto& p : *positions) {
        if (!p.is_object()) throw Error("invalid_request", "each position must be an object");
        r.positions.push_back({field<std::int64_t>(p, "probe_id"), field<double>(p, "ra"), field<double>(p, "dec"),
                               field<double>(p, "sigma_arcsec")});
    }
    if (j.contains("k")) r.k = field<double>(j, "k");
    if (j.contains("max_radius_arcsec")) r.max_radius_arcsec = field<double>(j, "max_radius_arcsec");
    r.validate();
    return r;
}

json response_to_json(const XMatchResponse& r) {
    json matches = json::array();
    for (const auto& pm : r.matches) {
        json objects = json::array();
        for (const auto& m : pm.objects) {
            json row = json::array();
            for (const auto& v : m.row) row.push_back(value_to_json(v));
            objects.push_back({{"separation_arcsec", m.separation_arcsec}, {"row", std::move(row)}});
        }
        matches.push_back({{"probe_id", pm.probe_id}, {"objects", std::move(objects)}});
    }
    return {{"columns", columns_to_json(r.columns)}, {"matches", std::move(matches)}};
}

XMatchResponse response_from_json(const json& j) {
    try {
        XMatchResponse r;
        r.columns = columns_from_json(j.at("columns"));
        for (const auto& pm : j.at("matches")) {
            ProbeMatches out;
            out.probe_id = pm.at("probe_id").get<std::int64_t>();
            for (const auto& o : pm.at("objects")) {
                MatchedRow m;
                m.separation_arcsec = o.at("separation_arcsec").get<double>();
                const auto& row = o.at("row");
                if (row.size() != r.columns.size()) throw Error("invalid_response", "match row arity mismatch");
                for (std::size_t i = 0; i < row.size(); ++i) m.row.push_back(value_from_json(row[i], r.columns[i].kind));
                out.objects.push_back(std::move(m));
            }
            r.matches.push_back(std::move(out));
        }
        return r;
    } catch (const json::exception& e) {
        throw Error("invalid_response", std::string("malformed xmatch response: ") + e.what());
    }
}

}  // namespace skyfed::wire
