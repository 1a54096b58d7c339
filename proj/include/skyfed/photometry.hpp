#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace skyfed {

/// Pogson magnitude m = -2.5 log10(flux / flux_zero). `row_id` only labels
/// the FluxError raised for a non-positive flux.
double flux_to_magnitude(double flux, double flux_zero, std::uint64_t row_id = 0);

using MagnitudeMap = std::map<std::string, double, std::less<>>;

/// m_a - m_b; throws MissingBandError naming the first absent band.
double color_index(const MagnitudeMap& mags, const std::string& band_a, const std::string& band_b);

}  // namespace skyfed
