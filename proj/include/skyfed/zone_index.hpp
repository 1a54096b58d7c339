#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "skyfed/geometry.hpp"
#include "skyfed/sky_object.hpp"

namespace skyfed {

struct ConeQuery {
    ConeQuery(EquatorialPosition center, double radius_deg);
    EquatorialPosition center;
    double radius_deg;
};

/// An unordered pair of object references; `first < second`.
struct NeighborPair {
    std::size_t first;
    std::size_t second;
    double separation_deg;
    friend bool operator==(const NeighborPair&, const NeighborPair&) = default;
};

/// Declination-zone index. The sphere is cut into bands of constant height;
/// each band keeps its members sorted by right ascension so that a cone or a
/// neighbour window becomes a handful of binary searches. Objects are referred
/// to by their position in the sequence the index was built from.
class ZoneIndex {
public:
    static constexpr double kDefaultZoneHeightDeg = 4.0 / 60.0;

    struct Entry {
        double ra_deg;
        double dec_deg;
        Vec3 unit;
        std::size_t ref;
        friend bool operator==(const Entry&, const Entry&) = default;
    };

    ZoneIndex() : ZoneIndex(std::span<const EquatorialPosition>{}, kDefaultZoneHeightDeg) {}
    ZoneIndex(std::span<const EquatorialPosition> positions, double zone_height_deg);
    ZoneIndex(std::span<const SkyObject> objects, double zone_height_deg = kDefaultZoneHeightDeg);

    double zone_height_deg() const noexcept { return zone_height_; }
    std::size_t zone_count() const noexcept { return zones_.size(); }
    std::size_t object_count() const noexcept { return object_count_; }
    std::span<const Entry> zone(std::size_t z) const { return zones_.at(z); }

    /// Zone number holding declination `dec_deg`; monotone in dec.
    std::size_t zone_of(double dec_deg) const noexcept;

    /// References of every object within the cone, ascending.
    std::vector<std::size_t> cone_search(const ConeQuery& q) const;

    /// Calls `fn` once per unordered pair closer than or at `radius_deg`.
    /// Throws Error("radius_too_large") when the radius exceeds the zone height.
    void for_each_neighbor_pair(double radius_deg,
                                const std::function<void(const NeighborPair&)>& fn) const;
    std::vector<NeighborPair> neighbor_pairs(double radius_deg) const;

    void save(std::ostream& out) const;
    static ZoneIndex load(std::istream& in);

    friend bool operator==(const ZoneIndex&, const ZoneIndex&) = default;

private:
    ZoneIndex(double zone_height_deg, std::vector<std::vector<Entry>> zones, std::size_t count)
        : zone_height_(zone_height_deg), zones_(std::move(zones)), object_count_(count) {}

    static std::vector<std::vector<Entry>> make_zones(double zone_height_deg);
    void insert_sorted(std::vector<Entry> entries);
    double zone_floor(std::size_t z) const noexcept;

    template <typename Fn>
    void scan_window(std::size_t z, double ra_center, double half_width, Fn&& fn) const;

    double zone_height_;
    std::vector<std::vector<Entry>> zones_;
    std::size_t object_count_ = 0;
};

}  // namespace skyfed
