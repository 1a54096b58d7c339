#pragma once

#include <chrono>
#include <optional>
#include <span>
#include <vector>

#include "skyfed/ingest.hpp"
#include "skyfed/query/plan.hpp"
#include "skyfed/result_table.hpp"
#include "skyfed/zone_index.hpp"

namespace skyfed::query {

inline constexpr std::size_t kDefaultRowCap = 100000;

struct ExecOptions {
    std::size_t row_cap = kDefaultRowCap;
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

/// Fills `out` with the node_layout() values of one object.
void materialize_row(const SkyObject& o, const CatalogSchema& schema, std::vector<Value>& out);

/// Runs a node plan. Results are deterministic: rows come out in ORDER BY
/// order with ties broken by object_id; groups come out by key. Exceeding the
/// row cap raises Error("row_cap_exceeded"); passing the deadline raises
/// Error("timeout").
ResultTable execute(const Plan& plan, const Catalog& catalog, const ZoneIndex& index,
                    const ExecOptions& options = {});

/// Runs a plan over rows already shaped like plan.layout. Cone scans are not
/// available on this path.
ResultTable execute_rows(const Plan& plan, std::span<const std::vector<Value>> rows,
                         const ExecOptions& options = {});

}  // namespace skyfed::query
