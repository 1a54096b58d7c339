#include "skyfed/mining.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "skyfed/error.hpp"
#include "skyfed/query/executor.hpp"
#include "skyfed/query/parser.hpp"
#include "skyfed/query/plan.hpp"

namespace skyfed {

GridSpec::GridSpec(double cell) : cell_deg(cell) {
    if (!(cell > 0.0) || !std::isfinite(cell)) throw Error("invalid_grid", "cell size must be a positive number of degrees");
}

GridCounts grided_count(const Catalog& catalog, const GridSpec& grid, std::string_view cut) {
    std::optional<query::Compiled> filter;
    const query::RowLayout layout = query::node_layout(catalog.schema);
    if (!cut.empty()) {
        filter = query::compile_expression(query::parse_expression(cut), layout);
        if (filter->type != ValueKind::Bool && filter->type != ValueKind::Null)
            throw Error("plan_error", "cut must be a boolean expression", 0);
    }
    GridCounts counts;
    std::vector<Value> row;
    query::EvalStats stats;
    for (const auto& o : catalog.objects) {
        if (filter) {
            query::materialize_row(o, catalog.schema, row);
            const Value v = query::evaluate(*filter, row, stats);
            if (!std::holds_alternative<bool>(v) || !std::get<bool>(v)) continue;
        }
        const auto i = static_cast<std::int64_t>(std::floor(o.pos.ra_deg() / grid.cell_deg));
        const auto j = static_cast<std::int64_t>(std::floor((o.pos.dec_deg() + 90.0) / grid.cell_deg));
        ++counts[{i, j}];
    }
    return counts;
}

std::vector<std::vector<std::uint64_t>> ClusterLabeling::clusters() const {
    std::vector<std::vector<std::uint64_t>> out(cluster_count);
    for (const auto& [id, c] : cluster_of) out[c].push_back(id);
    return out;
}

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

void check_index(const Catalog& catalog, const ZoneIndex& index) {
    if (index.object_count() != catalog.objects.size())
        throw Error("index_mismatch", "index does not cover the catalog");
}

void check_radius(double radius_arcsec) {
    if (!(radius_arcsec >= 0.0) || !std::isfinite(radius_arcsec))
        throw Error("invalid_radius", "radius must be a non-negative number of arcseconds");
}

}  // namespace

ClusterLabeling friends_of_friends(const Catalog& catalog, const ZoneIndex& index, double link_radius_arcsec) {
    check_index(catalog, index);
    check_radius(link_radius_arcsec);
    const auto& objs = catalog.objects;
    DisjointSets sets(objs.size());
    index.for_each_neighbor_pair(arcsec_to_deg(link_radius_arcsec),
                                 [&](const NeighborPair& p) { sets.unite(p.first, p.second); });

    // Canonical labels: order components by their smallest object_id.
    std::vector<std::uint64_t> min_id(objs.size(), UINT64_MAX);
    for (std::size_t i = 0; i < objs.size(); ++i) {
        auto& m = min_id[sets.find(i)];
        m = std::min(m, objs[i].object_id);
    }
    std::vector<std::pair<std::uint64_t, std::size_t>> roots;
    for (std::size_t i = 0; i < objs.size(); ++i)
        if (sets.find(i) == i) roots.emplace_back(min_id[i], i);
    std::sort(roots.begin(), roots.end());
    std::vector<std::size_t> label(objs.size());
    for (std::size_t c = 0; c < roots.size(); ++c) label[roots[c].second] = c;

    ClusterLabeling out;
    out.cluster_count = roots.size();
    for (std::size_t i = 0; i < objs.size(); ++i) out.cluster_of[objs[i].object_id] = label[sets.find(i)];
    return out;
}

std::vector<std::uint64_t> isolated_points(const Catalog& catalog, const ZoneIndex& index, double radius_arcsec,
                                           std::size_t max_neighbors) {
    check_index(catalog, index);
    check_radius(radius_arcsec);
    std::vector<std::size_t> neighbors(catalog.objects.size(), 0);
    index.for_each_neighbor_pair(arcsec_to_deg(radius_arcsec), [&](const NeighborPair& p) {
        ++neighbors[p.first];
        ++neighbors[p.second];
    });
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < neighbors.size(); ++i)
        if (neighbors[i] <= max_neighbors) out.push_back(catalog.objects[i].object_id);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<MovingCandidate> moving_candidates(const Catalog& a, const Catalog& b, const ZoneIndex& index_b,
                                               double min_sep_arcsec, double max_sep_arcsec) {
    check_index(b, index_b);
    if (!(min_sep_arcsec >= 0.0) || !(min_sep_arcsec < max_sep_arcsec) || !std::isfinite(max_sep_arcsec))
        throw Error("invalid_window", "need 0 <= min_sep < max_sep");
    std::optional<double> days;
    if (a.schema.epoch_mjd && b.schema.epoch_mjd && *a.schema.epoch_mjd != *b.schema.epoch_mjd)
        days = std::abs(*b.schema.epoch_mjd - *a.schema.epoch_mjd);

    std::vector<MovingCandidate> out;
    std::vector<MovingCandidate> local;
    for (const auto& oa : a.objects) {
        const Vec3 va = to_unit_vector(oa.pos);
        local.clear();
        bool is_static = false;
        for (std::size_t ref : index_b.cone_search(ConeQuery(oa.pos, arcsec_to_deg(max_sep_arcsec)))) {
            const auto& ob = b.objects[ref];
            const double sep = deg_to_arcsec(angular_separation(va, to_unit_vector(ob.pos)));
            if (sep < min_sep_arcsec) {
                is_static = true;
                break;
            }
            if (sep <= max_sep_arcsec) {
                MovingCandidate c{oa.object_id, ob.object_id, sep, std::nullopt};
                if (days) c.motion_arcsec_per_day = sep / *days;
                local.push_back(c);
            }
        }
        if (!is_static) out.insert(out.end(), local.begin(), local.end());
    }
    std::sort(out.begin(), out.end(), [](const MovingCandidate& x, const MovingCandidate& y) {
        return std::tie(x.id_a, x.id_b) < std::tie(y.id_a, y.id_b);
    });
    return out;
}

std::vector<MovingCandidate> moving_candidates(const Catalog& a, const Catalog& b, double min_sep_arcsec,
                                               double max_sep_arcsec) {
    const ZoneIndex index_b(b.objects);
    return moving_candidates(a, b, index_b, min_sep_arcsec, max_sep_arcsec);
}

}  // namespace skyfed
