#include "skyfed/photometry.hpp"

#include <cmath>

#include "skyfed/error.hpp"

namespace skyfed {

double flux_to_magnitude(double flux, double flux_zero, std::uint64_t row_id) {
    if (!(flux > 0.0) || !std::isfinite(flux)) throw FluxError(row_id, flux);
    if (!(flux_zero > 0.0) || !std::isfinite(flux_zero))
        throw Error("invalid_zero_point", "flux zero point must be positive");
    return -2.5 * std::log10(flux / flux_zero);
}

double color_index(const MagnitudeMap& mags, const std::string& band_a, const std::string& band_b) {
    auto a = mags.find(band_a);
    if (a == mags.end()) throw MissingBandError(band_a);
    auto b = mags.find(band_b);
    if (b == mags.end()) throw MissingBandError(band_b);
    return a->second - b->second;
}

}  // namespace skyfed
