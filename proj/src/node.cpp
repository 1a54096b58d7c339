#include "skyfed/node.hpp"

#include <fstream>

#include "skyfed/query/parser.hpp"
#include "skyfed/query/plan.hpp"

namespace skyfed {

using nlohmann::json;

NodeConfig NodeConfig::from_json(std::string_view text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error("invalid_json", std::string("node config is not valid JSON: ") + e.what());
    }
    NodeConfig c;
    std::vector<std::string> problems;
    auto path_of = [&](const char* key) -> std::filesystem::path {
        if (!j.contains(key) || !j[key].is_string()) {
            problems.push_back(std::string("missing key: ") + key);
            return {};
        }
        std::filesystem::path p = j[key].get<std::string>();
        return p.is_relative() ? base_dir / p : p;
    };
    try {
        c.host = j.value("host", c.host);
        c.port = j.value("port", c.port);
        c.zone_height_deg = j.value("zone_height_deg", c.zone_height_deg);
        c.row_cap = j.value("row_cap", c.row_cap);
        c.request_timeout_ms = j.value("request_timeout_ms", c.request_timeout_ms);
    } catch (const json::exception& e) {
        problems.push_back(std::string("bad value in node config: ") + e.what());
    }
    c.catalog_path = path_of("catalog");
    c.schema_path = path_of("schema");
    if (c.port < 0 || c.port > 65535) problems.push_back("port out of range");
    if (c.request_timeout_ms <= 0) problems.push_back("request_timeout_ms must be positive");
    if (!problems.empty()) throw ValidationError(problems);
    return c;
}

NodeService::NodeService(Catalog catalog, double zone_height_deg, std::size_t row_cap,
                         std::chrono::milliseconds timeout)
    : catalog_(std::move(catalog)),
      index_(std::span<const SkyObject>(catalog_.objects), zone_height_deg),
      row_cap_(row_cap),
      timeout_(timeout) {}

NodeService::NodeService(Catalog catalog, ZoneIndex index, std::size_t row_cap, std::chrono::milliseconds timeout)
    : catalog_(std::move(catalog)), index_(std::move(index)), row_cap_(row_cap), timeout_(timeout) {}

namespace {

bool snapshot_matches(const ZoneIndex& index, const Catalog& catalog) {
    if (index.object_count() != catalog.objects.size()) return false;
    for (std::size_t z = 0; z < index.zone_count(); ++z) {
        for (const auto& e : index.zone(z)) {
            if (e.ref >= catalog.objects.size()) return false;
            const auto& pos = catalog.objects[e.ref].pos;
            if (e.ra_deg != pos.ra_deg() || e.dec_deg != pos.dec_deg()) return false;
        }
    }
    return true;
}

}  // namespace

std::shared_ptr<const NodeService> NodeService::from_config(const NodeConfig& config) {
    if (!std::filesystem::exists(config.catalog_path))
        throw Error("io_error", "catalog not found: " + config.catalog_path.string());
    if (!std::filesystem::exists(config.schema_path))
        throw Error("io_error", "schema descriptor not found: " + config.schema_path.string());
    const auto schema = parse_schema(read_file(config.schema_path));
    auto ingested = ingest_csv(config.catalog_path, schema);
    const auto timeout = std::chrono::milliseconds(config.request_timeout_ms);

    const auto snapshot = config.catalog_path.parent_path() / "index.bin";
    if (std::filesystem::exists(snapshot)) {
        std::ifstream in(snapshot, std::ios::binary);
        try {
            ZoneIndex index = ZoneIndex::load(in);
            if (index.zone_height_deg() == config.zone_height_deg && snapshot_matches(index, ingested.catalog))
                return std::shared_ptr<const NodeService>(
                    new NodeService(std::move(ingested.catalog), std::move(index), config.row_cap, timeout));
        } catch (const Error&) {
            // stale or foreign snapshot: rebuild below
        }
    }
    return std::make_shared<const NodeService>(std::move(ingested.catalog), config.zone_height_deg, config.row_cap,
                                               timeout);
}

json NodeService::metadata() const {
    const auto& s = catalog_.schema;
    const auto layout = query::node_layout(s);
    std::vector<ColumnSpec> cols;
    for (const auto& c : layout.columns) cols.push_back({c.name, c.kind});
    double max_sigma = 0.0;
    for (const auto& o : catalog_.objects) max_sigma = std::max(max_sigma, o.sigma_pos_arcsec);
    return {{"survey", s.survey_name},
            {"bands", s.bands},
            {"columns", wire::columns_to_json(cols)},
            {"object_count", catalog_.objects.size()},
            {"epoch_mjd", s.epoch_mjd ? json(*s.epoch_mjd) : json(nullptr)},
            {"sigma_default_arcsec", s.sigma_default_arcsec},
            {"max_sigma_arcsec", max_sigma},
            {"zone_height_deg", index_.zone_height_deg()},
            {"row_cap", row_cap_}};
}

ResultTable NodeService::query(std::string_view text) const { return query(text, row_cap_); }

ResultTable NodeService::query(std::string_view text, std::size_t row_cap) const {
    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    const auto ast = query::parse_query(text);
    const auto plan = query::plan(ast, catalog_.schema);
    return query::execute(plan, catalog_, index_, {row_cap, deadline});
}

ResultTable NodeService::cone(double ra_deg, double dec_deg, double radius_deg) const {
    const ConeQuery q(EquatorialPosition(ra_deg, dec_deg), radius_deg);
    auto refs = index_.cone_search(q);
    if (refs.size() > row_cap_)
        throw Error("row_cap_exceeded", "cone holds " + std::to_string(refs.size()) + " objects, over the cap of " +
                                            std::to_string(row_cap_));
    std::sort(refs.begin(), refs.end(), [&](std::size_t a, std::size_t b) {
        return catalog_.objects[a].object_id < catalog_.objects[b].object_id;
    });
    const auto layout = query::node_layout(catalog_.schema);
    std::vector<ColumnSpec> cols;
    for (const auto& c : layout.columns) cols.push_back({c.name, c.kind});
    ResultTable table(std::move(cols));
    std::vector<Value> row;
    for (std::size_t ref : refs) {
        query::materialize_row(catalog_.objects[ref], catalog_.schema, row);
        table.add_row(row);
    }
    return table;
}

wire::XMatchResponse NodeService::xmatch(const XMatchRequest& request) const {
    const auto results = skyfed::xmatch(catalog_, index_, request);
    wire::XMatchResponse response;
    for (const auto& c : query::node_layout(catalog_.schema).columns) response.columns.push_back({c.name, c.kind});
    std::vector<Value> row;
    for (const auto& r : results) {
        wire::ProbeMatches pm{r.probe_id, {}};
        for (const auto& m : r.matches) {
            query::materialize_row(catalog_.objects[m.object_index], catalog_.schema, row);
            pm.objects.push_back({m.separation_arcsec, row});
        }
        response.matches.push_back(std::move(pm));
    }
    return response;
}

}  // namespace skyfed
