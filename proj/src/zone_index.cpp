#include "skyfed/zone_index.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "skyfed/error.hpp"

namespace skyfed {

namespace {

// Slack added to every candidate window. Candidates are always verified with
// the exact separation, so over-selection only costs time.
constexpr double kSlackDeg = 1e-9;

double haversine(double angle_rad) {
    const double s = std::sin(angle_rad / 2.0);
    return s * s;
}

// Smallest cosine of declination over [lo, hi] (degrees).
double min_cos_dec(double lo, double hi) {
    const double extreme = std::max(std::fabs(lo), std::fabs(hi));
    if (extreme >= 90.0) return 0.0;
    return std::cos(extreme * kDegToRad);
}

// Half-width in RA (degrees) of a window that contains every point within
// `radius` of a centre at declination `dec_center` whose own declination lies
// in [band_lo, band_hi]. From hav(d) >= cos(d1) cos(d2) hav(dRA). Returns 180
// when the whole band must be scanned.
double ra_half_width(double radius_deg, double dec_center, double band_lo, double band_hi) {
    const double denom = std::cos(std::fabs(dec_center) * kDegToRad) * min_cos_dec(band_lo, band_hi);
    if (denom <= 1e-12) return 180.0;
    const double ratio = haversine(radius_deg * kDegToRad) / denom;
    if (ratio >= 1.0) return 180.0;
    const double w = 2.0 * std::asin(std::sqrt(ratio)) * kRadToDeg + kSlackDeg;
    return w >= 180.0 ? 180.0 : w;
}

constexpr char kMagic[4] = {'S', 'K', 'Z', 'I'};
constexpr std::uint32_t kSnapshotVersion = 1;

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw Error("snapshot_error", "truncated zone index snapshot");
    return v;
}

}  // namespace

ConeQuery::ConeQuery(EquatorialPosition c, double r) : center(c), radius_deg(r) {
    if (!std::isfinite(r) || r < 0.0 || r > 180.0)
        throw Error("invalid_cone", "cone radius must lie in [0, 180] degrees");
}

std::vector<std::vector<ZoneIndex::Entry>> ZoneIndex::make_zones(double zone_height_deg) {
    if (!std::isfinite(zone_height_deg) || zone_height_deg <= 0.0 || zone_height_deg > 180.0)
        throw Error("invalid_zone_height", "zone height must lie in (0, 180] degrees");
    const auto count = static_cast<std::size_t>(std::ceil(180.0 / zone_height_deg));
    return std::vector<std::vector<Entry>>(std::max<std::size_t>(count, 1));
}

ZoneIndex::ZoneIndex(std::span<const EquatorialPosition> positions, double zone_height_deg)
    : zone_height_(zone_height_deg), zones_(make_zones(zone_height_deg)) {
    std::vector<Entry> entries;
    entries.reserve(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const auto& p = positions[i];
        entries.push_back({p.ra_deg(), p.dec_deg(), to_unit_vector(p), i});
    }
    insert_sorted(std::move(entries));
}

ZoneIndex::ZoneIndex(std::span<const SkyObject> objects, double zone_height_deg)
    : zone_height_(zone_height_deg), zones_(make_zones(zone_height_deg)) {
    std::vector<Entry> entries;
    entries.reserve(objects.size());
    for (std::size_t i = 0; i < objects.size(); ++i) {
        const auto& p = objects[i].pos;
        entries.push_back({p.ra_deg(), p.dec_deg(), to_unit_vector(p), i});
    }
    insert_sorted(std::move(entries));
}

void ZoneIndex::insert_sorted(std::vector<Entry> entries) {
    object_count_ = entries.size();
    for (auto& e : entries) zones_[zone_of(e.dec_deg)].push_back(e);
    for (auto& z : zones_)
        std::sort(z.begin(), z.end(), [](const Entry& a, const Entry& b) {
            return a.ra_deg != b.ra_deg ? a.ra_deg < b.ra_deg : a.ref < b.ref;
        });
}

std::size_t ZoneIndex::zone_of(double dec_deg) const noexcept {
    const double f = std::floor((dec_deg + 90.0) / zone_height_);
    if (!(f > 0.0)) return 0;
    const auto z = static_cast<std::size_t>(f);
    return std::min(z, zones_.size() - 1);
}

double ZoneIndex::zone_floor(std::size_t z) const noexcept {
    return static_cast<double>(z) * zone_height_ - 90.0;
}

template <typename Fn>
void ZoneIndex::scan_window(std::size_t z, double ra_center, double half_width, Fn&& fn) const {
    const auto& zone = zones_[z];
    if (zone.empty()) return;
    auto scan = [&](double lo, double hi) {
        auto first = std::lower_bound(zone.begin(), zone.end(), lo,
                                      [](const Entry& e, double v) { return e.ra_deg < v; });
        for (auto it = first; it != zone.end() && it->ra_deg <= hi; ++it)
            fn(static_cast<std::size_t>(it - zone.begin()), *it);
    };
    if (half_width >= 180.0) {
        scan(-1.0, 361.0);
        return;
    }
    const double lo = ra_center - half_width;
    const double hi = ra_center + half_width;
    if (lo < 0.0) {
        scan(lo + 360.0, 361.0);
        scan(-1.0, hi);
    } else if (hi >= 360.0) {
        scan(lo, 361.0);
        scan(-1.0, hi - 360.0);
    } else {
        scan(lo, hi);
    }
}

std::vector<std::size_t> ZoneIndex::cone_search(const ConeQuery& q) const {
    std::vector<std::size_t> out;
    const Vec3 center = to_unit_vector(q.center);
    const double dec0 = q.center.dec_deg();
    const double r = q.radius_deg;
    const double lo = std::max(-90.0, dec0 - r - kSlackDeg);
    const double hi = std::min(90.0, dec0 + r + kSlackDeg);
    const std::size_t z_lo = zone_of(lo), z_hi = zone_of(hi);
    for (std::size_t z = z_lo; z <= z_hi; ++z) {
        const double band_lo = std::max(lo, zone_floor(z) - kSlackDeg);
        const double band_hi = std::min(hi, zone_floor(z + 1) + kSlackDeg);
        const double w = ra_half_width(r, dec0, band_lo, band_hi);
        scan_window(z, q.center.ra_deg(), w, [&](std::size_t, const Entry& e) {
            if (angular_separation(center, e.unit) <= r) out.push_back(e.ref);
        });
    }
    std::sort(out.begin(), out.end());
    return out;
}

void ZoneIndex::for_each_neighbor_pair(double radius_deg,
                                       const std::function<void(const NeighborPair&)>& fn) const {
    if (!std::isfinite(radius_deg) || radius_deg < 0.0)
        throw Error("invalid_radius", "neighbour radius must be non-negative");
    if (radius_deg > zone_height_)
        throw Error("radius_too_large", "neighbour radius " + std::to_string(radius_deg) +
                                            " deg exceeds zone height " + std::to_string(zone_height_) +
                                            " deg");
    for (std::size_t z = 0; z < zones_.size(); ++z) {
        const auto& zone = zones_[z];
        for (std::size_t i = 0; i < zone.size(); ++i) {
            const Entry& a = zone[i];
            const double hi = std::min(90.0, a.dec_deg + radius_deg + kSlackDeg);
            const std::size_t z_hi = zone_of(hi);
            for (std::size_t zz = z; zz <= z_hi; ++zz) {
                const double band_lo = std::max(a.dec_deg - radius_deg, zone_floor(zz)) - kSlackDeg;
                const double band_hi = std::min(hi, zone_floor(zz + 1) + kSlackDeg);
                const double w = ra_half_width(radius_deg, a.dec_deg, band_lo, band_hi);
                scan_window(zz, a.ra_deg, w, [&](std::size_t pos, const Entry& b) {
                    if (zz == z && pos <= i) return;
                    const double sep = angular_separation(a.unit, b.unit);
                    if (sep <= radius_deg)
                        fn(NeighborPair{std::min(a.ref, b.ref), std::max(a.ref, b.ref), sep});
                });
            }
        }
    }
}

std::vector<NeighborPair> ZoneIndex::neighbor_pairs(double radius_deg) const {
    std::vector<NeighborPair> out;
    for_each_neighbor_pair(radius_deg, [&](const NeighborPair& p) { out.push_back(p); });
    return out;
}

void ZoneIndex::save(std::ostream& out) const {
    out.write(kMagic, sizeof kMagic);
    write_pod(out, kSnapshotVersion);
    write_pod(out, zone_height_);
    write_pod(out, static_cast<std::uint64_t>(zones_.size()));
    for (const auto& zone : zones_) {
        write_pod(out, static_cast<std::uint64_t>(zone.size()));
        for (const auto& e : zone) {
            write_pod(out, e.ra_deg);
            write_pod(out, e.dec_deg);
            write_pod(out, static_cast<std::uint64_t>(e.ref));
        }
    }
    if (!out) throw Error("io_error", "failed writing zone index snapshot");
}

ZoneIndex ZoneIndex::load(std::istream& in) {
    char magic[4];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw Error("snapshot_error", "not a zone index snapshot");
    if (read_pod<std::uint32_t>(in) != kSnapshotVersion)
        throw Error("snapshot_error", "unsupported zone index snapshot version");
    const double height = read_pod<double>(in);
    auto zones = make_zones(height);
    if (read_pod<std::uint64_t>(in) != zones.size())
        throw Error("snapshot_error", "zone count does not match zone height");
    std::size_t count = 0;
    for (auto& zone : zones) {
        const auto n = read_pod<std::uint64_t>(in);
        zone.reserve(n);
        for (std::uint64_t k = 0; k < n; ++k) {
            const double ra = read_pod<double>(in);
            const double dec = read_pod<double>(in);
            const auto ref = read_pod<std::uint64_t>(in);
            zone.push_back({ra, dec, to_unit_vector(ra, dec), static_cast<std::size_t>(ref)});
        }
        count += n;
    }
    return ZoneIndex(height, std::move(zones), count);
}

}  // namespace skyfed
