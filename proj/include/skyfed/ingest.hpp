#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "skyfed/schema.hpp"
#include "skyfed/sky_object.hpp"

namespace skyfed {

struct Provenance {
    std::string source_file;
    std::size_t rows_read = 0;
    std::size_t rows_accepted = 0;
    std::size_t rows_rejected = 0;
    std::string ingested_at;  // ISO-8601 UTC
};

struct Catalog {
    CatalogSchema schema;
    std::vector<SkyObject> objects;
    Provenance provenance;
};

struct Rejection {
    std::size_t line = 0;
    std::string reason;  // machine-readable code, e.g. "dec_out_of_range"
    std::string detail;
};

struct RejectionReport {
    std::size_t rows_read = 0;
    std::size_t rows_accepted = 0;
    std::size_t rows_rejected = 0;
    std::size_t unmatched_class = 0;
    std::vector<Rejection> rejections;

    std::string to_json_lines() const;
};

struct IngestResult {
    Catalog catalog;
    RejectionReport report;
};

/// Converts a header-first CSV into the domestic model. Domain violations
/// reject the row and continue; a missing header column aborts with
/// Error("missing_column").
IngestResult ingest_csv(std::istream& in, const CatalogSchema& schema, std::string source_name = "<stream>");
IngestResult ingest_csv(const std::filesystem::path& path, const CatalogSchema& schema);

/// CSV in domestic columns; floats written in shortest round-trip form.
void write_domestic_csv(const Catalog& catalog, std::ostream& out);

/// Writes <dir>/catalog.csv and <dir>/schema.json.
void export_domestic(const Catalog& catalog, const std::filesystem::path& dir);

/// Reads a directory written by export_domestic.
Catalog load_store(const std::filesystem::path& dir);

std::string read_file(const std::filesystem::path& path);

}  // namespace skyfed
