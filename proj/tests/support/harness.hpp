#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "skyfed/fixture.hpp"
#include "skyfed/http.hpp"
#include "skyfed/ingest.hpp"
#include "skyfed/node.hpp"
#include "skyfed/portal/federation.hpp"

namespace harness {

/// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// A generated fixture with every survey ingested.
struct Fixture {
    std::unique_ptr<TempDir> dir;
    nlohmann::json manifest;
    std::map<std::string, skyfed::Catalog> catalogs;  // sdss, epoch2, first, twomass

    const skyfed::Catalog& operator[](const std::string& s) const { return catalogs.at(s); }
};

Fixture make_fixture(const skyfed::fixture::Options& options);

/// Ingests <dir>/catalog.csv with <dir>/schema.json; fails on any rejection.
skyfed::Catalog ingest_dir(const std::filesystem::path& dir);

/// Non-comment, non-blank lines of tests/corpus/<name>.
std::vector<std::string> read_corpus(const std::string& name);

/// Runs the command line gen-fixture into `out` and returns its manifest.
nlohmann::json gen_fixture_cli(const std::filesystem::path& out, const std::vector<std::string>& args);

/// The catalog the node corpus expectations were computed on, generated
/// into `dir` as described by corpus/node/fixture.json.
skyfed::Catalog corpus_catalog(const TempDir& dir);

/// Domestic column names of a catalog, in layout order.
std::vector<std::string> domestic_columns(const skyfed::Catalog& c);

/// In-process nodes served over HTTP on free ports, and portals over them.
class Cluster {
public:
    explicit Cluster(const std::vector<const skyfed::Catalog*>& catalogs, int node_timeout_ms = 30000,
                     std::size_t row_cap = skyfed::query::kDefaultRowCap);
    ~Cluster();

    const std::map<std::string, std::shared_ptr<const skyfed::NodeService>>& nodes() const { return nodes_; }
    std::string node_url(const std::string& survey) const;
    /// Stops one node's HTTP server; the node stays in the federation config.
    void stop_node(const std::string& survey);

    skyfed::portal::FederationConfig federation() const;
    /// Portal that reaches nodes over HTTP.
    std::shared_ptr<skyfed::portal::Portal> http_portal() const;
    /// Portal calling the same NodeService objects in-process.
    std::shared_ptr<skyfed::portal::Portal> local_portal() const;

    /// Portal HTTP server over http_portal(); started on first use.
    std::string portal_url();

private:
    std::vector<std::string> order_;
    std::map<std::string, std::shared_ptr<const skyfed::NodeService>> nodes_;
    std::map<std::string, std::unique_ptr<skyfed::http::Server>> servers_;
    std::map<std::string, int> ports_;
    std::unique_ptr<skyfed::http::Server> portal_server_;
};

}  // namespace harness
