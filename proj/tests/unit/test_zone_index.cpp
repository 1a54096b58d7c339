#include <algorithm>
#include <set>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "skyfed/error.hpp"
#include "skyfed/fixture.hpp"
#include "skyfed/zone_index.hpp"

using namespace skyfed;

namespace {

std::vector<EquatorialPosition> random_points(std::uint64_t seed, std::size_t n) {
    fixture::Rng rng(seed);
    std::vector<EquatorialPosition> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(fixture::uniform_sphere(rng));
    return out;
}

// Uniform background plus tight groups, so short radii see real pairs.
std::vector<EquatorialPosition> clustered_points(std::uint64_t seed, std::size_t n) {
    fixture::Rng rng(seed);
    std::vector<EquatorialPosition> out;
    while (out.size() < n) {
        const auto c = fixture::uniform_sphere(rng);
        out.push_back(c);
        const std::size_t members = rng.below(8);
        for (std::size_t m = 0; m < members && out.size() < n; ++m) out.push_back(fixture::jitter(rng, c, 20.0));
    }
    return out;
}

std::set<std::pair<std::size_t, std::size_t>> as_set(const std::vector<NeighborPair>& v) {
    std::set<std::pair<std::size_t, std::size_t>> s;
    for (const auto& p : v) s.emplace(p.first, p.second);
    return s;
}

}  // namespace

TEST_CASE("empty index") {
    const ZoneIndex idx;
    CHECK(idx.object_count() == 0);
    for (std::size_t z = 0; z < idx.zone_count(); ++z) CHECK(idx.zone(z).empty());
    CHECK(idx.cone_search(ConeQuery(EquatorialPosition(0, 0), 180)).empty());
}

TEST_CASE("zone numbering") {
    const std::vector<EquatorialPosition> one{EquatorialPosition(12, 0)};
    const ZoneIndex idx(one, 1.0);
    CHECK(idx.zone_count() == 180);
    CHECK(idx.zone_of(0.0) == 90);
    CHECK(idx.zone(90).size() == 1);
    CHECK(idx.zone_of(-90.0) == 0);
    CHECK(idx.zone_of(90.0) == 179);
    double prev = -90.0;
    for (double d = -90.0; d <= 90.0; d += 0.37) {
        CHECK(idx.zone_of(d) >= idx.zone_of(prev));
        prev = d;
    }
}

TEST_CASE("every object is found by a zero-radius cone at its own position") {
    const auto pts = random_points(3, 10000);
    const ZoneIndex idx(pts, ZoneIndex::kDefaultZoneHeightDeg);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto hits = idx.cone_search(ConeQuery(pts[i], 0.0));
        CHECK(std::find(hits.begin(), hits.end(), i) != hits.end());
    }
}

TEST_CASE("radius 0 returns exact duplicates, radius 180 returns everything") {
    std::vector<EquatorialPosition> pts{EquatorialPosition(10, 10), EquatorialPosition(10, 10),
                                        EquatorialPosition(10, 10.0001), EquatorialPosition(200, -45)};
    const ZoneIndex idx(pts, 0.5);
    CHECK(idx.cone_search(ConeQuery(pts[0], 0.0)) == std::vector<std::size_t>{0, 1});
    CHECK(idx.cone_search(ConeQuery(EquatorialPosition(0, 0), 180.0)) == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("cone radius outside [0, 180] is rejected") {
    CHECK_THROWS_AS(ConeQuery(EquatorialPosition(0, 0), -1.0), Error);
    CHECK_THROWS_AS(ConeQuery(EquatorialPosition(0, 0), 180.5), Error);
}

TEST_CASE("cone search equals a full scan, including poles and the ra seam") {
    const auto pts = random_points(17, 20000);
    for (double h : {ZoneIndex::kDefaultZoneHeightDeg, 0.5, 3.0}) {
        const ZoneIndex idx(pts, h);
        fixture::Rng rng(99);
        for (int i = 0; i < 150; ++i) {
            double ra = rng.uniform(0.0, 360.0), dec = std::asin(2 * rng.uniform() - 1) * 57.29577951308232;
            if (i % 5 == 0) dec = i % 10 == 0 ? 90.0 : -90.0;
            if (i % 5 == 1) ra = i % 2 ? 359.9 : 0.05;
            if (i % 5 == 2) dec = rng.uniform(84.0, 90.0);
            const double r = i % 7 == 0 ? rng.uniform(20.0, 120.0) : rng.uniform(0.0, 5.0);
            CAPTURE(ra);
            CAPTURE(dec);
            CAPTURE(r);
            CHECK(idx.cone_search(ConeQuery(EquatorialPosition(ra, dec), r)) == oracle::cone(pts, ra, dec, r));
        }
    }
}

TEST_CASE("neighbor pairs") {
    SUBCASE("two objects one arcsecond apart") {
        const std::vector<EquatorialPosition> pts{EquatorialPosition(50, 20),
                                                  offset_position(EquatorialPosition(50, 20), 1.0 / 3600.0, 33.0)};
        const ZoneIndex idx(pts, ZoneIndex::kDefaultZoneHeightDeg);
        const auto pairs = idx.neighbor_pairs(2.0 / 3600.0);
        REQUIRE(pairs.size() == 1);
        CHECK(pairs[0].first == 0);
        CHECK(pairs[0].second == 1);
        CHECK(pairs[0].separation_deg * 3600.0 == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("single object has none") {
        const std::vector<EquatorialPosition> pts{EquatorialPosition(1, 2)};
        CHECK(ZoneIndex(pts, 0.1).neighbor_pairs(0.05).empty());
    }
    SUBCASE("radius above the zone height is refused") {
        const ZoneIndex idx(random_points(1, 10), 0.1);
        try {
            idx.neighbor_pairs(0.2);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == "radius_too_large");
        }
    }
    SUBCASE("clustered field equals the double loop") {
        const auto pts = clustered_points(23, 10000);
        const ZoneIndex idx(pts, ZoneIndex::kDefaultZoneHeightDeg);
        const double r = 30.0 / 3600.0;
        const auto got = idx.neighbor_pairs(r);
        const auto want = oracle::pairs(pts, r);
        CHECK(got.size() == want.size());
        CHECK(as_set(got) == std::set<std::pair<std::size_t, std::size_t>>(want.begin(), want.end()));
        CHECK(got.size() > 1000);
    }
    SUBCASE("pairs across the seam and near the pole") {
        std::vector<EquatorialPosition> pts{EquatorialPosition(359.9999, 10), EquatorialPosition(0.0001, 10),
                                            EquatorialPosition(0, 89.99), EquatorialPosition(180, 89.99),
                                            EquatorialPosition(90, -89.995), EquatorialPosition(270, -89.995)};
        const ZoneIndex idx(pts, 0.05);
        CHECK(as_set(idx.neighbor_pairs(0.03)) ==
              std::set<std::pair<std::size_t, std::size_t>>{{0, 1}, {2, 3}, {4, 5}});
    }
}

TEST_CASE("snapshot round trip") {
    const auto pts = random_points(8, 3000);
    const ZoneIndex idx(pts, 0.25);
    std::stringstream buf;
    idx.save(buf);
    const ZoneIndex back = ZoneIndex::load(buf);
    CHECK(back == idx);
    std::stringstream bad("nonsense");
    CHECK_THROWS_AS(ZoneIndex::load(bad), Error);
}
