#pragma once

#include <cstdint>
#include <vector>

#include "skyfed/ingest.hpp"
#include "skyfed/zone_index.hpp"

namespace skyfed {

/// Circular k-sigma gate: min(cap, k * sqrt(s1^2 + s2^2)), arcseconds.
double match_radius_arcsec(double k, double sigma1_arcsec, double sigma2_arcsec, double cap_arcsec);

struct Probe {
    std::int64_t probe_id = 0;
    double ra_deg = 0.0;
    double dec_deg = 0.0;
    double sigma_arcsec = 0.0;
};

struct XMatchRequest {
    std::vector<Probe> positions;
    double k = 3.0;
    double max_radius_arcsec = 30.0;

    /// Throws Error("invalid_request") listing the first violated invariant.
    void validate() const;
};

struct ProbeMatch {
    std::size_t object_index;  // position in Catalog::objects
    double separation_arcsec;
};

struct ProbeResult {
    std::int64_t probe_id;
    std::vector<ProbeMatch> matches;  // ascending separation, then object_id
};

/// For each probe (in request order), every catalog object within the probe's
/// pairwise match radius.
std::vector<ProbeResult> xmatch(const Catalog& catalog, const ZoneIndex& index, const XMatchRequest& request);

}  // namespace skyfed
