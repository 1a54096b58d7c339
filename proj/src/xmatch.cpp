#include "skyfed/xmatch.hpp"

#include <algorithm>
#include <cmath>

#include "skyfed/error.hpp"

namespace skyfed {

double match_radius_arcsec(double k, double sigma1_arcsec, double sigma2_arcsec, double cap_arcsec) {
    return std::min(cap_arcsec, k * std::sqrt(sigma1_arcsec * sigma1_arcsec + sigma2_arcsec * sigma2_arcsec));
}

void XMatchRequest::validate() const {
    if (positions.empty()) throw Error("invalid_request", "positions must not be empty");
    if (!(k > 0.0) || !std::isfinite(k)) throw Error("invalid_request", "k must be positive");
    if (!(max_radius_arcsec > 0.0) || !std::isfinite(max_radius_arcsec))
        throw Error("invalid_request", "max_radius_arcsec must be positive");
    for (const auto& p : positions) {
        if (!std::isfinite(p.ra_deg) || !(std::fabs(p.dec_deg) <= 90.0))
            throw Error("invalid_request", "probe " + std::to_string(p.probe_id) + " has an invalid position");
        if (!(p.sigma_arcsec > 0.0) || !std::isfinite(p.sigma_arcsec))
            throw Error("invalid_request", "probe " + std::to_string(p.probe_id) + " needs a positive sigma_arcsec");
    }
}

std::vector<ProbeResult> xmatch(const Catalog& catalog, const ZoneIndex& index, const XMatchRequest& request) {
    request.validate();
    double max_sigma = 0.0;
    for (const auto& o : catalog.objects) max_sigma = std::max(max_sigma, o.sigma_pos_arcsec);

    std::vector<ProbeResult> out;
    out.reserve(request.positions.size());
    for (const auto& p : request.positions) {
        ProbeResult res{p.probe_id, {}};
        const EquatorialPosition center(p.ra_deg, p.dec_deg);
        const double search_arcsec =
            match_radius_arcsec(request.k, p.sigma_arcsec, max_sigma, request.max_radius_arcsec);
        const double search_deg = std::min(180.0, arcsec_to_deg(search_arcsec) * (1.0 + 1e-9) + 1e-12);
        const Vec3 c = to_unit_vector(center);
        for (std::size_t ref : index.cone_search(ConeQuery(center, search_deg))) {
            const auto& o = catalog.objects[ref];
            const double sep = deg_to_arcsec(angular_separation(c, to_unit_vector(o.pos)));
            if (sep <= match_radius_arcsec(request.k, p.sigma_arcsec, o.sigma_pos_arcsec, request.max_radius_arcsec))
                res.matches.push_back({ref, sep});
        }
        std::sort(res.matches.begin(), res.matches.end(), [&](const ProbeMatch& a, const ProbeMatch& b) {
            if (a.separation_arcsec != b.separation_arcsec) return a.separation_arcsec < b.separation_arcsec;
            return catalog.objects[a.object_index].object_id < catalog.objects[b.object_index].object_id;
        });
        out.push_back(std::move(res));
    }
    return out;
}

}  // namespace skyfed
