#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "harness.hpp"
#include "oracles.hpp"
#include "skyfed/error.hpp"
#include "skyfed/mining.hpp"

using namespace skyfed;

namespace {

Catalog catalog_at(const std::vector<std::pair<double, double>>& pts, std::uint64_t first_id = 1) {
    Catalog c;
    c.schema.survey_name = "m";
    c.schema.sigma_default_arcsec = 0.1;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        SkyObject o;
        o.object_id = first_id + i;
        o.pos = EquatorialPosition(pts[i].first, pts[i].second);
        o.sigma_pos_arcsec = 0.1;
        c.objects.push_back(o);
    }
    return c;
}

constexpr double kArcsec = 1.0 / 3600.0;

const harness::Fixture& mining_fixture() {
    static const harness::Fixture f = [] {
        fixture::Options o;
        o.objects = 4000;
        o.seed = 606;
        o.clusters = 4;
        o.cluster_size = 60;
        o.movers = 25;
        o.density_per_deg2 = 400;
        return harness::make_fixture(o);
    }();
    return f;
}

std::set<std::set<std::uint64_t>> as_sets(const ClusterLabeling& l) {
    std::set<std::set<std::uint64_t>> out;
    for (const auto& c : l.clusters()) out.insert(std::set<std::uint64_t>(c.begin(), c.end()));
    return out;
}

}  // namespace

TEST_CASE("grid cells validate their size") {
    CHECK_THROWS_AS(GridSpec(0), Error);
    CHECK_THROWS_AS(GridSpec(-1), Error);
    CHECK_THROWS_AS(GridSpec(NAN), Error);
    CHECK_NOTHROW(GridSpec(0.5));
}

TEST_CASE("gridded counts match a direct histogram") {
    const auto& c = mining_fixture()["sdss"];
    for (double cell : {0.25, 1.0, 7.5}) {
        std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> hist;
        for (const auto& o : c.objects) {
            if (!(o.mags.count("g") && o.mags.at("g") < 19)) continue;
            ++hist[{static_cast<std::int64_t>(std::floor(o.pos.ra_deg() / cell)),
                    static_cast<std::int64_t>(std::floor((o.pos.dec_deg() + 90.0) / cell))}];
        }
        CHECK(grided_count(c, GridSpec(cell), "mag_g < 19") == hist);
    }
    std::size_t total = 0;
    for (const auto& [_, n] : grided_count(c, GridSpec(2))) total += n;
    CHECK(total == c.objects.size());
    CHECK_THROWS(grided_count(c, GridSpec(1), "mag_q < 3"));
}

TEST_CASE("friends of friends links transitively") {
    // 0-1-2 chain of 8" steps, 3 isolated, 4-5 pair
    const Catalog c = catalog_at({{10, 0}, {10 + 8 * kArcsec, 0}, {10 + 16 * kArcsec, 0}, {10, 1},
                                  {20, 5}, {20, 5 + 9 * kArcsec}});
    const auto l = friends_of_friends(c, ZoneIndex(c.objects), 10);
    CHECK(l.cluster_count == 3);
    CHECK(l.cluster_of.at(1) == 0);
    CHECK(l.cluster_of.at(3) == 0);
    CHECK(l.cluster_of.at(4) == 1);
    CHECK(l.cluster_of.at(5) == 2);
    CHECK(l.cluster_of.at(6) == 2);
    CHECK(friends_of_friends(c, ZoneIndex(c.objects), 7).cluster_count == 6);
    CHECK(friends_of_friends(catalog_at({}), ZoneIndex(), 10).cluster_count == 0);
}

TEST_CASE("friends of friends matches breadth-first components and recovers blobs") {
    const auto& c = mining_fixture()["sdss"];
    const auto l = friends_of_friends(c, ZoneIndex(c.objects), 15);
    CHECK(as_sets(l) == oracle::components(c, 15));
    for (const auto& blob : mining_fixture().manifest["clusters"]) {
        std::map<std::size_t, std::size_t> votes;
        for (const auto& id : blob["members"]) ++votes[l.cluster_of.at(id.get<std::uint64_t>())];
        std::size_t top = 0;
        for (const auto& [_, n] : votes) top = std::max(top, n);
        CHECK(top * 10 >= blob["members"].size() * 8);
    }
}

TEST_CASE("friends of friends labels do not depend on input order") {
    Catalog c = mining_fixture()["sdss"];
    const auto before = friends_of_friends(c, ZoneIndex(c.objects), 15);
    fixture::Rng rng(3);
    for (std::size_t i = c.objects.size(); i > 1; --i) std::swap(c.objects[i - 1], c.objects[rng.below(i)]);
    const auto after = friends_of_friends(c, ZoneIndex(c.objects), 15);
    CHECK(after.cluster_of == before.cluster_of);
    CHECK(after.cluster_count == before.cluster_count);
}

TEST_CASE("isolated points match a full scan and move monotonically") {
    const auto& c = mining_fixture()["sdss"];
    const ZoneIndex index(c.objects);
    std::vector<std::uint64_t> prev;
    for (double r : {200.0, 120.0, 60.0, 20.0}) {
        CAPTURE(r);
        const auto got = isolated_points(c, index, r, 0);
        CHECK(got == oracle::isolated(c, r, 0));
        CHECK(std::includes(got.begin(), got.end(), prev.begin(), prev.end()));
        prev = got;
    }
    const auto none = isolated_points(c, index, 60, 0);
    const auto some = isolated_points(c, index, 60, 2);
    CHECK(std::includes(some.begin(), some.end(), none.begin(), none.end()));
    CHECK(some == oracle::isolated(c, 60, 2));
}

TEST_CASE("moving candidates on small examples") {
    const Catalog a = catalog_at({{10, 0}, {20, 0}, {30, 0}, {40, 0}});
    // b: 1 stays put, 2 moves 10", 3 moves 100", 4 has a static twin and a far companion
    const Catalog b = catalog_at({{10, 0}, {20 + 10 * kArcsec, 0}, {30 + 100 * kArcsec, 0}, {40 + 0.5 * kArcsec, 0},
                                  {40, 20 * kArcsec}},
                                 1);
    const auto got = moving_candidates(a, b, 2, 60);
    REQUIRE(got.size() == 1);
    CHECK(got[0].id_a == 2);
    CHECK(got[0].id_b == 2);
    CHECK(got[0].separation_arcsec == doctest::Approx(10).epsilon(1e-6));
    CHECK(!got[0].motion_arcsec_per_day);
    CHECK_THROWS(moving_candidates(a, b, 10, 5));
    CHECK_THROWS(moving_candidates(a, b, -1, 5));
}

TEST_CASE("moving candidates report motion when both epochs are known") {
    const auto& f = mining_fixture();
    const auto got = moving_candidates(f["sdss"], f["epoch2"], 2, 60);
    REQUIRE(!got.empty());
    for (const auto& m : got) {
        REQUIRE(m.motion_arcsec_per_day);
        CHECK(*m.motion_arcsec_per_day == doctest::Approx(m.separation_arcsec / 30.0));
    }
}

TEST_CASE("planted movers are recovered and agree with a full scan") {
    const auto& f = mining_fixture();
    const auto got = moving_candidates(f["sdss"], f["epoch2"], ZoneIndex(f["epoch2"].objects), 2, 60);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> ids;
    for (const auto& m : got) ids.emplace_back(m.id_a, m.id_b);
    CHECK(ids == oracle::movers(f["sdss"], f["epoch2"], 2, 60));
    for (const auto& m : f.manifest["movers"]) {
        const std::pair<std::uint64_t, std::uint64_t> want{m["id_a"], m["id_b"]};
        CHECK(std::find(ids.begin(), ids.end(), want) != ids.end());
    }
}

TEST_CASE("small clustering and isolation examples") {
    const Catalog pair = catalog_at({{50, 10}, {50, 10 + kArcsec}});
    const auto l = friends_of_friends(pair, ZoneIndex(pair.objects), 2);
    CHECK(l.cluster_count == 1);
    CHECK(l.clusters() == std::vector<std::vector<std::uint64_t>>{{1, 2}});
    CHECK(isolated_points(pair, ZoneIndex(pair.objects), 2, 0).empty());
    CHECK(isolated_points(pair, ZoneIndex(pair.objects), 2, 1) == std::vector<std::uint64_t>{1, 2});

    const Catalog spread = catalog_at({{1, 1}, {2, 2}, {3, 3}});
    CHECK(friends_of_friends(spread, ZoneIndex(spread.objects), 60).cluster_count == 3);

    const Catalog single = catalog_at({{100, -45}}, 42);
    for (double r : {0.5, 30.0, 240.0})
        CHECK(isolated_points(single, ZoneIndex(single.objects), r, 0) == std::vector<std::uint64_t>{42});
    CHECK_THROWS(friends_of_friends(pair, ZoneIndex(pair.objects), 3600));
}

TEST_CASE("planted blobs among isolated points come back as exactly the planted clusters") {
    fixture::Rng rng(17);
    std::vector<std::pair<double, double>> pts;
    std::vector<std::set<std::uint64_t>> planted;
    for (int b = 0; b < 3; ++b) {
        const EquatorialPosition centre(40.0 + 60.0 * b, -20.0 + 20.0 * b);
        std::set<std::uint64_t> ids;
        for (int i = 0; i < 100; ++i) {
            const auto p = fixture::jitter(rng, centre, 2.0);
            pts.emplace_back(p.ra_deg(), p.dec_deg());
            ids.insert(pts.size());
        }
        planted.push_back(ids);
    }
    for (int i = 0; i < 50; ++i) {
        const auto p = fixture::uniform_sphere(rng);
        pts.emplace_back(p.ra_deg(), p.dec_deg());
    }
    const Catalog c = catalog_at(pts);
    const auto l = friends_of_friends(c, ZoneIndex(c.objects), 10);
    std::set<std::set<std::uint64_t>> multi;
    for (const auto& s : as_sets(l))
        if (s.size() > 1) multi.insert(s);
    CHECK(multi == std::set<std::set<std::uint64_t>>(planted.begin(), planted.end()));
    CHECK(as_sets(l) == oracle::components(c, 10));
    CHECK(l.cluster_count == 53);
}

TEST_CASE("identical epochs have no movers and widening the window never loses one") {
    const auto& f = mining_fixture();
    CHECK(moving_candidates(f["sdss"], f["sdss"], 0.5, 60).empty());
    const auto narrow = moving_candidates(f["sdss"], f["epoch2"], 5, 30);
    const auto wide = moving_candidates(f["sdss"], f["epoch2"], 2, 60);
    for (const auto& m : narrow) {
        const bool kept = std::any_of(wide.begin(), wide.end(),
                                      [&](const MovingCandidate& w) { return w.id_a == m.id_a && w.id_b == m.id_b; });
        CHECK(kept);
    }
    CHECK(narrow.size() <= wide.size());
}
