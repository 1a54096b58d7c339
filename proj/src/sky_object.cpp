#include "skyfed/sky_object.hpp"

namespace skyfed {

std::string_view to_string(ObjectClass c) noexcept {
    switch (c) {
        case ObjectClass::Star: return "STAR";
        case ObjectClass::Galaxy: return "GALAXY";
        case ObjectClass::Qso: return "QSO";
        case ObjectClass::Unknown: break;
    }
    return "UNKNOWN";
}

std::optional<ObjectClass> parse_object_class(std::string_view text) noexcept {
    if (text == "STAR") return ObjectClass::Star;
    if (text == "GALAXY") return ObjectClass::Galaxy;
    if (text == "QSO") return ObjectClass::Qso;
    if (text == "UNKNOWN") return ObjectClass::Unknown;
    return std::nullopt;
}

}  // namespace skyfed
