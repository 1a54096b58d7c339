#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "skyfed/ingest.hpp"
#include "skyfed/zone_index.hpp"

namespace skyfed {

struct GridSpec {
    explicit GridSpec(double cell_deg);
    double cell_deg;
};

/// (ra cell, dec cell) -> count. Cells are floor(ra/cell), floor((dec+90)/cell).
using GridCounts = std::map<std::pair<std::int64_t, std::int64_t>, std::size_t>;

/// Counts objects passing `cut` (a node-dialect boolean expression; empty
/// means every object). Empty cells are omitted.
GridCounts grided_count(const Catalog& catalog, const GridSpec& grid, std::string_view cut = {});

struct ClusterLabeling {
    std::map<std::uint64_t, std::size_t> cluster_of;  // object_id -> cluster id
    std::size_t cluster_count = 0;

    /// Members of each cluster, ascending ids, indexed by cluster id.
    std::vector<std::vector<std::uint64_t>> clusters() const;
};

/// Single-linkage components of the within-radius graph. The component with
/// the smallest object_id gets id 0, and so on.
ClusterLabeling friends_of_friends(const Catalog& catalog, const ZoneIndex& index, double link_radius_arcsec);

/// Ids with at most `max_neighbors` other objects within the radius, ascending.
std::vector<std::uint64_t> isolated_points(const Catalog& catalog, const ZoneIndex& index, double radius_arcsec,
                                           std::size_t max_neighbors);

struct MovingCandidate {
    std::uint64_t id_a = 0;
    std::uint64_t id_b = 0;
    double separation_arcsec = 0.0;
    std::optional<double> motion_arcsec_per_day;
    friend bool operator==(const MovingCandidate&, const MovingCandidate&) = default;
};

/// Pairs a in A, b in B with min_sep <= separation <= max_sep, for objects a
/// that have no B object within min_sep. Sorted by (id_a, id_b).
std::vector<MovingCandidate> moving_candidates(const Catalog& a, const Catalog& b, const ZoneIndex& index_b,
                                               double min_sep_arcsec, double max_sep_arcsec);
std::vector<MovingCandidate> moving_candidates(const Catalog& a, const Catalog& b, double min_sep_arcsec,
                                               double max_sep_arcsec);

}  // namespace skyfed
