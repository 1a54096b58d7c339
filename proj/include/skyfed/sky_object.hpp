#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "skyfed/geometry.hpp"
#include "skyfed/photometry.hpp"

namespace skyfed {

enum class ObjectClass { Star, Galaxy, Qso, Unknown };

std::string_view to_string(ObjectClass c) noexcept;
/// Parses the canonical upper-case names; anything else yields nullopt.
std::optional<ObjectClass> parse_object_class(std::string_view text) noexcept;

struct SkyObject {
    std::uint64_t object_id = 0;
    EquatorialPosition pos{0.0, 0.0};
    double sigma_pos_arcsec = 0.1;
    MagnitudeMap mags;
    ObjectClass object_class = ObjectClass::Unknown;
    std::optional<double> extent_arcsec;

    friend bool operator==(const SkyObject&, const SkyObject&) = default;
};

}  // namespace skyfed
