#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include "json.hpp"
#include "skyfed/ingest.hpp"
#include "skyfed/query/executor.hpp"
#include "skyfed/result_table.hpp"
#include "skyfed/wire.hpp"
#include "skyfed/xmatch.hpp"
#include "skyfed/zone_index.hpp"

namespace skyfed {

struct NodeConfig {
    std::string host = "127.0.0.1";
    int port = 8101;
    std::filesystem::path catalog_path;  // CSV (foreign or domestic)
    std::filesystem::path schema_path;   // descriptor for catalog_path
    double zone_height_deg = ZoneIndex::kDefaultZoneHeightDeg;
    std::size_t row_cap = query::kDefaultRowCap;
    int request_timeout_ms = 30000;

    /// Parses the JSON config; relative paths resolve against `base_dir`.
    static NodeConfig from_json(std::string_view text, const std::filesystem::path& base_dir = {});
};

/// One archive as a service: an immutable catalog plus its zone index. Every
/// method is const and safe to call concurrently; the HTTP layer is a thin
/// adapter over these calls.
class NodeService {
public:
    NodeService(Catalog catalog, double zone_height_deg = ZoneIndex::kDefaultZoneHeightDeg,
                std::size_t row_cap = query::kDefaultRowCap,
                std::chrono::milliseconds timeout = std::chrono::milliseconds(30000));

    /// Ingests the configured file, reusing <catalog dir>/index.bin when it
    /// matches the catalog and zone height.
    static std::shared_ptr<const NodeService> from_config(const NodeConfig& config);

    const Catalog& catalog() const noexcept { return catalog_; }
    const ZoneIndex& index() const noexcept { return index_; }
    std::size_t row_cap() const noexcept { return row_cap_; }

    nlohmann::json metadata() const;
    ResultTable query(std::string_view text) const;
    ResultTable query(std::string_view text, std::size_t row_cap) const;
    /// Domestic rows of every object in the cone, by object_id.
    ResultTable cone(double ra_deg, double dec_deg, double radius_deg) const;
    wire::XMatchResponse xmatch(const XMatchRequest& request) const;

private:
    NodeService(Catalog catalog, ZoneIndex index, std::size_t row_cap, std::chrono::milliseconds timeout);

    Catalog catalog_;
    ZoneIndex index_;
    std::size_t row_cap_;
    std::chrono::milliseconds timeout_;
};

}  // namespace skyfed
