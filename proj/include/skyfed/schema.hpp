#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "skyfed/sky_object.hpp"

namespace skyfed {

enum class TargetField { Ra, Dec, ObjectId, SigmaPos, Class, Extent, Mag, Flux };
enum class Unit { None, Deg, Rad, Hours, Arcsec, Mag, Flux };

std::string_view to_string(Unit u) noexcept;

/// One source column and the recipe that turns it into a domestic field.
struct ColumnMapping {
    std::string source_column;
    TargetField target = TargetField::Ra;
    std::string band;  // set for Mag and Flux targets
    Unit unit = Unit::None;
    std::optional<double> flux_zero;
    std::map<std::string, ObjectClass> class_map;

    /// Text form of the target as written in descriptors, e.g. "mag:g".
    std::string target_name() const;
};

struct CatalogSchema {
    std::string survey_name;
    std::vector<std::string> bands;
    std::vector<ColumnMapping> columns;
    double sigma_default_arcsec = 0.1;
    std::optional<double> epoch_mjd;

    bool has_band(std::string_view band) const;
    const ColumnMapping* mapping_for(TargetField target, std::string_view band = {}) const;
    /// object_id, ra, dec, sigma_pos, class, extent, mag_<band>...
    std::vector<std::string> domestic_columns() const;
};

/// Validates a JSON schema descriptor. Every problem found is reported in a
/// single ValidationError; malformed JSON raises Error("invalid_json").
CatalogSchema parse_schema(std::string_view descriptor_text);
std::string schema_to_json(const CatalogSchema& schema);

/// The descriptor that reads back a catalog written in domestic columns.
CatalogSchema domestic_schema(const CatalogSchema& schema);

}  // namespace skyfed
