#pragma once

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "skyfed/ingest.hpp"
#include "skyfed/mining.hpp"
#include "skyfed/query/ast.hpp"
#include "skyfed/xmatch.hpp"

namespace oracle {

/// Haversine great-circle distance in degrees.
double separation_deg(double ra1, double dec1, double ra2, double dec2);

/// Indices of every position within r, by full scan.
std::vector<std::size_t> cone(const std::vector<skyfed::EquatorialPosition>& pts, double ra, double dec, double r_deg);

/// All unordered index pairs (i < j) within r, by full scan.
std::vector<std::pair<std::size_t, std::size_t>> pairs(const std::vector<skyfed::EquatorialPosition>& pts,
                                                       double r_deg);

double match_radius_arcsec(double k, double cap, double s1, double s2);

/// Per probe: (object_id, separation arcsec) of every object inside the match
/// radius, by full scan, sorted by (separation, object_id).
std::vector<std::vector<std::pair<std::uint64_t, double>>> xmatch(const skyfed::Catalog& c,
                                                                  const skyfed::XMatchRequest& req);

/// Object ids of `c` passing a node-dialect predicate, evaluated by the naive interpreter.
std::set<std::uint64_t> passing(const skyfed::Catalog& c, const std::optional<skyfed::query::Expr>& where);

struct TupleSpec {
    const skyfed::Catalog* catalog;
    std::set<std::uint64_t> allowed;  // objects passing that survey's own filters
};

/// Id tuples (in `surveys` order) produced by anchor-relative inner matching,
/// by nested loops over every catalog. `anchor` indexes `surveys`.
std::set<std::vector<std::uint64_t>> tuples(const std::vector<TupleSpec>& surveys, std::size_t anchor, double k,
                                            double cap, bool best);

/// (id_a, id_b) pairs of moving_candidates by full scan.
std::vector<std::pair<std::uint64_t, std::uint64_t>> movers(const skyfed::Catalog& a, const skyfed::Catalog& b,
                                                            double min_sep, double max_sep);

/// Connected components of the within-radius graph by breadth-first search,
/// as sets of object ids.
std::set<std::set<std::uint64_t>> components(const skyfed::Catalog& c, double radius_arcsec);

std::vector<std::uint64_t> isolated(const skyfed::Catalog& c, double radius_arcsec, std::size_t max_neighbors);

}  // namespace oracle
