#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

#include "naive_sql.hpp"

namespace oracle {

using namespace skyfed;

namespace {

constexpr double kRad = 3.14159265358979323846 / 180.0;

struct Unit {
    double x, y, z;
};

Unit unit(double ra, double dec) {
    return {std::cos(dec * kRad) * std::cos(ra * kRad), std::cos(dec * kRad) * std::sin(ra * kRad),
            std::sin(dec * kRad)};
}

double dot(const Unit& a, const Unit& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

// Cheap rejection: chord-based bound with generous slack, exact test after.
bool maybe_within(const Unit& a, const Unit& b, double r_deg) {
    return dot(a, b) >= std::cos(std::min(180.0, r_deg * 1.001 + 1e-6) * kRad) - 1e-12;
}

}  // namespace

double separation_deg(double ra1, double dec1, double ra2, double dec2) {
    const double s1 = std::sin((dec2 - dec1) * kRad / 2.0);
    const double s2 = std::sin((ra2 - ra1) * kRad / 2.0);
    const double h = s1 * s1 + std::cos(dec1 * kRad) * std::cos(dec2 * kRad) * s2 * s2;
    return 2.0 * std::asin(std::min(1.0, std::sqrt(h))) / kRad;
}

std::vector<std::size_t> cone(const std::vector<EquatorialPosition>& pts, double ra, double dec, double r_deg) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (separation_deg(ra, dec, pts[i].ra_deg(), pts[i].dec_deg()) <= r_deg) out.push_back(i);
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> pairs(const std::vector<EquatorialPosition>& pts, double r_deg) {
    std::vector<Unit> u;
    for (const auto& p : pts) u.push_back(unit(p.ra_deg(), p.dec_deg()));
    const double c = std::cos(std::min(180.0, r_deg * 1.001 + 1e-6) * kRad) - 1e-12;
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            if (dot(u[i], u[j]) >= c &&
                separation_deg(pts[i].ra_deg(), pts[i].dec_deg(), pts[j].ra_deg(), pts[j].dec_deg()) <= r_deg)
                out.emplace_back(i, j);
    return out;
}

double match_radius_arcsec(double k, double cap, double s1, double s2) {
    return std::min(cap, k * std::sqrt(s1 * s1 + s2 * s2));
}

std::vector<std::vector<std::pair<std::uint64_t, double>>> xmatch(const Catalog& c, const XMatchRequest& req) {
    std::vector<Unit> u;
    for (const auto& o : c.objects) u.push_back(unit(o.pos.ra_deg(), o.pos.dec_deg()));
    std::vector<std::vector<std::pair<std::uint64_t, double>>> out;
    for (const auto& p : req.positions) {
        const Unit up = unit(p.ra_deg, p.dec_deg);
        std::vector<std::pair<std::uint64_t, double>> hits;
        for (std::size_t i = 0; i < c.objects.size(); ++i) {
            if (!maybe_within(up, u[i], req.max_radius_arcsec / 3600.0)) continue;
            const auto& o = c.objects[i];
            const double sep = separation_deg(p.ra_deg, p.dec_deg, o.pos.ra_deg(), o.pos.dec_deg()) * 3600.0;
            if (sep <= match_radius_arcsec(req.k, req.max_radius_arcsec, p.sigma_arcsec, o.sigma_pos_arcsec))
                hits.emplace_back(o.object_id, sep);
        }
        std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
            return a.second != b.second ? a.second < b.second : a.first < b.first;
        });
        out.push_back(std::move(hits));
    }
    return out;
}

std::set<std::uint64_t> passing(const Catalog& c, const std::optional<query::Expr>& where) {
    std::set<std::uint64_t> out;
    const auto table = naive::rows_of(c);
    for (std::size_t i = 0; i < c.objects.size(); ++i)
        if (!where || naive::truthy(*where, table[i])) out.insert(c.objects[i].object_id);
    return out;
}

std::set<std::vector<std::uint64_t>> tuples(const std::vector<TupleSpec>& surveys, std::size_t anchor, double k,
                                            double cap, bool best) {
    std::vector<std::vector<Unit>> units(surveys.size());
    for (std::size_t s = 0; s < surveys.size(); ++s)
        for (const auto& o : surveys[s].catalog->objects) units[s].push_back(unit(o.pos.ra_deg(), o.pos.dec_deg()));

    std::set<std::vector<std::uint64_t>> out;
    const auto& anchors = surveys[anchor].catalog->objects;
    for (std::size_t a = 0; a < anchors.size(); ++a) {
        const auto& ao = anchors[a];
        if (!surveys[anchor].allowed.count(ao.object_id)) continue;
        // Candidates per survey; the anchor contributes only itself.
        std::vector<std::vector<std::uint64_t>> choices(surveys.size());
        bool dead = false;
        for (std::size_t s = 0; s < surveys.size() && !dead; ++s) {
            if (s == anchor) {
                choices[s] = {ao.object_id};
                continue;
            }
            std::vector<std::pair<double, std::uint64_t>> hits;
            const auto& objs = surveys[s].catalog->objects;
            for (std::size_t i = 0; i < objs.size(); ++i) {
                if (!maybe_within(units[anchor][a], units[s][i], cap / 3600.0)) continue;
                const double sep =
                    separation_deg(ao.pos.ra_deg(), ao.pos.dec_deg(), objs[i].pos.ra_deg(), objs[i].pos.dec_deg()) *
                    3600.0;
                if (sep <= match_radius_arcsec(k, cap, ao.sigma_pos_arcsec, objs[i].sigma_pos_arcsec))
                    hits.emplace_back(sep, objs[i].object_id);
            }
            std::sort(hits.begin(), hits.end());
            if (best && !hits.empty()) hits.resize(1);
            // Survey-local filters apply after matching.
            for (const auto& h : hits)
                if (surveys[s].allowed.count(h.second)) choices[s].push_back(h.second);
            if (choices[s].empty()) dead = true;
        }
        if (dead) continue;
        std::vector<std::size_t> pick(surveys.size(), 0);
        for (;;) {
            std::vector<std::uint64_t> t;
            for (std::size_t s = 0; s < surveys.size(); ++s) t.push_back(choices[s][pick[s]]);
            out.insert(std::move(t));
            std::size_t s = 0;
            while (s < pick.size() && ++pick[s] == choices[s].size()) pick[s++] = 0;
            if (s == pick.size()) break;
        }
    }
    return out;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> movers(const Catalog& a, const Catalog& b, double min_sep,
                                                            double max_sep) {
    std::vector<Unit> ub;
    for (const auto& o : b.objects) ub.push_back(unit(o.pos.ra_deg(), o.pos.dec_deg()));
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    for (const auto& oa : a.objects) {
        const Unit ua = unit(oa.pos.ra_deg(), oa.pos.dec_deg());
        std::vector<std::pair<std::uint64_t, std::uint64_t>> local;
        bool is_static = false;
        for (std::size_t i = 0; i < b.objects.size(); ++i) {
            if (!maybe_within(ua, ub[i], max_sep / 3600.0)) continue;
            const auto& ob = b.objects[i];
            const double sep =
                separation_deg(oa.pos.ra_deg(), oa.pos.dec_deg(), ob.pos.ra_deg(), ob.pos.dec_deg()) * 3600.0;
            if (sep < min_sep) is_static = true;
            else if (sep <= max_sep) local.emplace_back(oa.object_id, ob.object_id);
        }
        if (!is_static) out.insert(out.end(), local.begin(), local.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::set<std::set<std::uint64_t>> components(const Catalog& c, double radius_arcsec) {
    std::vector<EquatorialPosition> pts;
    for (const auto& o : c.objects) pts.push_back(o.pos);
    std::vector<std::vector<std::size_t>> adj(pts.size());
    for (auto [i, j] : pairs(pts, radius_arcsec / 3600.0)) {
        adj[i].push_back(j);
        adj[j].push_back(i);
    }
    std::vector<bool> seen(pts.size(), false);
    std::set<std::set<std::uint64_t>> out;
    for (std::size_t s = 0; s < pts.size(); ++s) {
        if (seen[s]) continue;
        std::set<std::uint64_t> comp;
        std::deque<std::size_t> q{s};
        seen[s] = true;
        while (!q.empty()) {
            const auto v = q.front();
            q.pop_front();
            comp.insert(c.objects[v].object_id);
            for (auto w : adj[v])
                if (!seen[w]) {
                    seen[w] = true;
                    q.push_back(w);
                }
        }
        out.insert(std::move(comp));
    }
    return out;
}

std::vector<std::uint64_t> isolated(const Catalog& c, double radius_arcsec, std::size_t max_neighbors) {
    std::vector<EquatorialPosition> pts;
    for (const auto& o : c.objects) pts.push_back(o.pos);
    std::vector<std::size_t> n(pts.size(), 0);
    for (auto [i, j] : pairs(pts, radius_arcsec / 3600.0)) {
        ++n[i];
        ++n[j];
    }
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (n[i] <= max_neighbors) out.push_back(c.objects[i].object_id);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace oracle
