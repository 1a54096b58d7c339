#include "skyfed/schema.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"

#include "skyfed/error.hpp"

namespace skyfed {

using nlohmann::json;

std::string_view to_string(Unit u) noexcept {
    switch (u) {
        case Unit::Deg: return "deg";
        case Unit::Rad: return "rad";
        case Unit::Hours: return "hours";
        case Unit::Arcsec: return "arcsec";
        case Unit::Mag: return "mag";
        case Unit::Flux: return "flux";
        case Unit::None: break;
    }
    return "";
}

namespace {

std::optional<Unit> parse_unit(std::string_view s) {
    if (s == "deg") return Unit::Deg;
    if (s == "rad") return Unit::Rad;
    if (s == "hours") return Unit::Hours;
    if (s == "arcsec") return Unit::Arcsec;
    if (s == "mag") return Unit::Mag;
    if (s == "flux") return Unit::Flux;
    return std::nullopt;
}

std::string_view target_base(TargetField t) {
    switch (t) {
        case TargetField::Ra: return "ra";
        case TargetField::Dec: return "dec";
        case TargetField::ObjectId: return "object_id";
        case TargetField::SigmaPos: return "sigma_pos";
        case TargetField::Class: return "class";
        case TargetField::Extent: return "extent";
        case TargetField::Mag: return "mag";
        case TargetField::Flux: return "flux";
    }
    return "";
}

// Units each target accepts; the first entry is the default when omitted.
std::vector<Unit> allowed_units(TargetField t) {
    switch (t) {
        case TargetField::Ra: return {Unit::Deg, Unit::Rad, Unit::Hours};
        case TargetField::Dec: return {Unit::Deg, Unit::Rad};
        case TargetField::SigmaPos:
        case TargetField::Extent: return {Unit::Arcsec, Unit::Deg};
        case TargetField::Mag: return {Unit::Mag};
        case TargetField::Flux: return {Unit::Flux};
        case TargetField::ObjectId:
        case TargetField::Class: return {Unit::None};
    }
    return {};
}

bool valid_survey_name(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    });
}

bool valid_band(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    });
}

}  // namespace

std::string ColumnMapping::target_name() const {
    std::string out(target_base(target));
    if (target == TargetField::Mag || target == TargetField::Flux) out += ":" + band;
    return out;
}

bool CatalogSchema::has_band(std::string_view band) const {
    return std::find(bands.begin(), bands.end(), band) != bands.end();
}

const ColumnMapping* CatalogSchema::mapping_for(TargetField target, std::string_view band) const {
    for (const auto& c : columns) {
        if (c.target != target) continue;
        if ((target == TargetField::Mag || target == TargetField::Flux) && c.band != band) continue;
        return &c;
    }
    return nullptr;
}

std::vector<std::string> CatalogSchema::domestic_columns() const {
    std::vector<std::string> out{"object_id", "ra", "dec", "sigma_pos", "class", "extent"};
    for (const auto& b : bands) out.push_back("mag_" + b);
    return out;
}

CatalogSchema parse_schema(std::string_view descriptor_text) {
    json doc;
    try {
        doc = json::parse(descriptor_text);
    } catch (const json::parse_error& e) {
        throw Error("invalid_json", std::string("schema descriptor is not valid JSON: ") + e.what());
    }
    std::vector<std::string> problems;
    CatalogSchema schema;
    if (!doc.is_object()) throw ValidationError({"descriptor must be a JSON object"});

    if (auto it = doc.find("survey"); it == doc.end() || !it->is_string()) {
        problems.push_back("missing key: survey");
    } else {
        schema.survey_name = it->get<std::string>();
        if (!valid_survey_name(schema.survey_name))
            problems.push_back("invalid survey name: " + schema.survey_name + " (expected [a-z0-9_]+)");
    }

    if (auto it = doc.find("bands"); it != doc.end()) {
        if (!it->is_array()) {
            problems.push_back("bands must be an array");
        } else {
            for (const auto& b : *it) {
                if (!b.is_string() || !valid_band(b.get<std::string>())) {
                    problems.push_back("invalid band label: " + b.dump());
                    continue;
                }
                auto band = b.get<std::string>();
                if (schema.has_band(band))
                    problems.push_back("duplicate band: " + band);
                else
                    schema.bands.push_back(band);
            }
        }
    }

    if (auto it = doc.find("sigma_default_arcsec"); it != doc.end()) {
        if (!it->is_number() || !(it->get<double>() > 0.0) || !std::isfinite(it->get<double>()))
            problems.push_back("sigma_default_arcsec must be a positive number");
        else
            schema.sigma_default_arcsec = it->get<double>();
    } else {
        problems.push_back("missing key: sigma_default_arcsec");
    }

    if (auto it = doc.find("epoch_mjd"); it != doc.end() && !it->is_null()) {
        if (!it->is_number())
            problems.push_back("epoch_mjd must be a number or null");
        else
            schema.epoch_mjd = it->get<double>();
    }

    std::set<std::string> seen_targets;
    auto cols = doc.find("columns");
    if (cols == doc.end() || !cols->is_array()) {
        problems.push_back("missing key: columns");
    } else {
        for (std::size_t i = 0; i < cols->size(); ++i) {
            const auto& c = (*cols)[i];
            const std::string where = "columns[" + std::to_string(i) + "]";
            if (!c.is_object()) {
                problems.push_back(where + " must be an object");
                continue;
            }
            ColumnMapping m;
            bool ok = true;
            if (auto s = c.find("source"); s == c.end() || !s->is_string() || s->get<std::string>().empty()) {
                problems.push_back(where + ": missing source");
                ok = false;
            } else {
                m.source_column = s->get<std::string>();
            }
            auto t = c.find("target");
            if (t == c.end() || !t->is_string()) {
                problems.push_back(where + ": missing target");
                continue;
            }
            const auto target = t->get<std::string>();
            if (target == "ra") m.target = TargetField::Ra;
            else if (target == "dec") m.target = TargetField::Dec;
            else if (target == "object_id") m.target = TargetField::ObjectId;
            else if (target == "sigma_pos") m.target = TargetField::SigmaPos;
            else if (target == "class") m.target = TargetField::Class;
            else if (target == "extent") m.target = TargetField::Extent;
            else if (target.starts_with("mag:") || target.starts_with("flux:")) {
                const bool is_mag = target.starts_with("mag:");
                m.target = is_mag ? TargetField::Mag : TargetField::Flux;
                m.band = target.substr(is_mag ? 4 : 5);
                if (!schema.has_band(m.band)) {
                    problems.push_back(where + ": band " + m.band + " is not listed in bands");
                    ok = false;
                }
            } else {
                problems.push_back(where + ": unknown target: " + target);
                continue;
            }

            const auto allowed = allowed_units(m.target);
            if (auto u = c.find("unit"); u != c.end() && !u->is_null()) {
                auto unit = u->is_string() ? parse_unit(u->get<std::string>()) : std::nullopt;
                if (!unit) {
                    problems.push_back(where + ": unknown unit " + u->dump());
                    ok = false;
                } else if (std::find(allowed.begin(), allowed.end(), *unit) == allowed.end()) {
                    problems.push_back(where + ": incompatible unit " + std::string(to_string(*unit)) +
                                       " for target " + target);
                    ok = false;
                } else {
                    m.unit = *unit;
                }
            } else {
                m.unit = allowed.front();
            }

            auto fz = c.find("flux_zero");
            if (m.target == TargetField::Flux) {
                if (fz == c.end() || !fz->is_number() || !(fz->get<double>() > 0.0)) {
                    problems.push_back(where + ": flux target requires a positive flux_zero");
                    ok = false;
                } else {
                    m.flux_zero = fz->get<double>();
                }
            } else if (fz != c.end()) {
                problems.push_back(where + ": flux_zero is only valid for flux targets");
                ok = false;
            }

            auto cm = c.find("class_map");
            if (m.target == TargetField::Class) {
                if (cm == c.end() || !cm->is_object()) {
                    problems.push_back(where + ": class target requires a class_map object");
                    ok = false;
                } else {
                    for (const auto& [key, value] : cm->items()) {
                        auto cls = value.is_string() ? parse_object_class(value.get<std::string>()) : std::nullopt;
                        if (!cls) {
                            problems.push_back(where + ": class_map value for '" + key +
                                               "' must be one of STAR, GALAXY, QSO, UNKNOWN");
                            ok = false;
                        } else {
                            m.class_map.emplace(key, *cls);
                        }
                    }
                }
            } else if (cm != c.end()) {
                problems.push_back(where + ": class_map is only valid for class targets");
                ok = false;
            }

            // mag:<b> and flux:<b> both fill the same domestic field.
            const std::string field = (m.target == TargetField::Mag || m.target == TargetField::Flux)
                                          ? "mag_" + m.band
                                          : std::string(target_base(m.target));
            if (!seen_targets.insert(field).second) {
                problems.push_back(where + ": duplicate target: " + target);
                ok = false;
            }
            if (ok) schema.columns.push_back(std::move(m));
        }
        if (!seen_targets.count("ra")) problems.push_back("missing target: ra");
        if (!seen_targets.count("dec")) problems.push_back("missing target: dec");
    }

    if (!problems.empty()) throw ValidationError(std::move(problems));
    return schema;
}

std::string schema_to_json(const CatalogSchema& schema) {
    json doc;
    doc["survey"] = schema.survey_name;
    doc["bands"] = schema.bands;
    doc["sigma_default_arcsec"] = schema.sigma_default_arcsec;
    doc["epoch_mjd"] = schema.epoch_mjd ? json(*schema.epoch_mjd) : json(nullptr);
    json cols = json::array();
    for (const auto& c : schema.columns) {
        json col;
        col["source"] = c.source_column;
        col["target"] = c.target_name();
        if (c.unit != Unit::None) col["unit"] = std::string(to_string(c.unit));
        if (c.flux_zero) col["flux_zero"] = *c.flux_zero;
        if (c.target == TargetField::Class) {
            json map = json::object();
            for (const auto& [k, v] : c.class_map) map[k] = std::string(to_string(v));
            col["class_map"] = map;
        }
        cols.push_back(std::move(col));
    }
    doc["columns"] = std::move(cols);
    return doc.dump(2) + "\n";
}

CatalogSchema domestic_schema(const CatalogSchema& schema) {
    CatalogSchema out;
    out.survey_name = schema.survey_name;
    out.bands = schema.bands;
    out.sigma_default_arcsec = schema.sigma_default_arcsec;
    out.epoch_mjd = schema.epoch_mjd;
    auto add = [&](std::string source, TargetField target, Unit unit, std::string band = {}) {
        ColumnMapping m;
        m.source_column = std::move(source);
        m.target = target;
        m.unit = unit;
        m.band = std::move(band);
        out.columns.push_back(std::move(m));
    };
    add("object_id", TargetField::ObjectId, Unit::None);
    add("ra", TargetField::Ra, Unit::Deg);
    add("dec", TargetField::Dec, Unit::Deg);
    add("sigma_pos", TargetField::SigmaPos, Unit::Arcsec);
    add("class", TargetField::Class, Unit::None);
    for (auto c : {ObjectClass::Star, ObjectClass::Galaxy, ObjectClass::Qso, ObjectClass::Unknown})
        out.columns.back().class_map.emplace(std::string(to_string(c)), c);
    add("extent", TargetField::Extent, Unit::Arcsec);
    for (const auto& b : schema.bands) add("mag_" + b, TargetField::Mag, Unit::Mag, b);
    return out;
}

}  // namespace skyfed
