#include "skyfed/ingest.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "skyfed/csv.hpp"
#include "skyfed/error.hpp"
#include "skyfed/value.hpp"

namespace skyfed {

namespace {

struct RowReject {
    std::string reason;
    std::string detail;
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view text, const ColumnMapping& m) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw RowReject{"bad_number", m.source_column + ": not a number: '" + std::string(text) + "'"};
    return v;
}

std::uint64_t parse_id(std::string_view text, const ColumnMapping& m) {
    text = trim(text);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw RowReject{"bad_id", m.source_column + ": not an unsigned integer: '" + std::string(text) + "'"};
    return v;
}

double angle_to_deg(double v, Unit unit) {
    switch (unit) {
        case Unit::Rad: return v * kRadToDeg;
        case Unit::Hours: return v * 15.0;
        case Unit::Arcsec: return v / kArcsecPerDeg;
        default: return v;
    }
}

double to_arcsec(double v, Unit unit) { return unit == Unit::Deg ? v * kArcsecPerDeg : v; }

std::string now_iso8601() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

class RowConverter {
public:
    RowConverter(const CatalogSchema& schema, const std::vector<std::string>& header)
        : schema_(schema) {
        std::vector<std::string> missing;
        for (const auto& m : schema.columns) {
            std::optional<std::size_t> idx;
            for (std::size_t i = 0; i < header.size(); ++i)
                if (trim(header[i]) == m.source_column) idx = i;
            if (!idx)
                missing.push_back(m.source_column);
            else
                slots_.emplace_back(&m, *idx);
        }
        if (!missing.empty()) {
            std::string msg = "missing header column(s):";
            for (const auto& m : missing) msg += " " + m;
            throw Error("missing_column", msg);
        }
        width_ = header.size();
    }

    SkyObject convert(const csv::Record& rec, std::uint64_t ordinal, std::size_t& unmatched_class) const {
        if (rec.fields.size() != width_)
            throw RowReject{"wrong_field_count", "expected " + std::to_string(width_) + " fields, found " +
                                                     std::to_string(rec.fields.size())};
        std::uint64_t id = ordinal;
        std::optional<double> ra, dec, sigma, extent;
        MagnitudeMap mags;
        ObjectClass cls = ObjectClass::Unknown;
        bool class_unmatched = false;

        for (const auto& [m, idx] : slots_) {
            const std::string_view raw = trim(rec.fields[idx]);
            const bool blank = raw.empty();
            switch (m->target) {
                case TargetField::ObjectId:
                    if (blank) throw RowReject{"missing_value", m->source_column + " is empty"};
                    id = parse_id(raw, *m);
                    break;
                case TargetField::Ra: {
                    if (blank) throw RowReject{"missing_value", m->source_column + " is empty"};
                    const double v = parse_double(raw, *m);
                    if (!std::isfinite(v)) throw RowReject{"ra_not_finite", "right ascension is not finite"};
                    ra = normalize_ra(angle_to_deg(v, m->unit));
                    break;
                }
                case TargetField::Dec: {
                    if (blank) throw RowReject{"missing_value", m->source_column + " is empty"};
                    const double v = angle_to_deg(parse_double(raw, *m), m->unit);
                    if (!std::isfinite(v) || v < -90.0 || v > 90.0)
                        throw RowReject{"dec_out_of_range", "dec out of range: " + std::string(raw)};
                    dec = v;
                    break;
                }
                case TargetField::SigmaPos: {
                    if (blank) break;
                    const double v = to_arcsec(parse_double(raw, *m), m->unit);
                    if (!(v > 0.0) || !std::isfinite(v))
                        throw RowReject{"sigma_nonpositive", "astrometric error must be positive"};
                    sigma = v;
                    break;
                }
                case TargetField::Extent: {
                    if (blank) break;
                    const double v = to_arcsec(parse_double(raw, *m), m->unit);
                    if (!(v >= 0.0) || !std::isfinite(v))
                        throw RowReject{"extent_negative", "extent must be finite and non-negative"};
                    extent = v;
                    break;
                }
                case TargetField::Mag: {
                    if (blank) break;
                    const double v = parse_double(raw, *m);
                    if (!std::isfinite(v))
                        throw RowReject{"mag_not_finite", "magnitude " + m->band + " is not finite"};
                    mags[m->band] = v;
                    break;
                }
                case TargetField::Flux: {
                    if (blank) break;
                    const double v = parse_double(raw, *m);
                    try {
                        mags[m->band] = flux_to_magnitude(v, *m->flux_zero, id);
                    } catch (const FluxError& e) {
                        throw RowReject{"nonpositive_flux", e.what()};
                    }
                    break;
                }
                case TargetField::Class: {
                    if (blank) break;
                    auto it = m->class_map.find(std::string(raw));
                    if (it == m->class_map.end())
                        class_unmatched = true;
                    else
                        cls = it->second;
                    break;
                }
            }
        }
        SkyObject obj;
        obj.object_id = id;
        obj.pos = EquatorialPosition(*ra, *dec, schema_.epoch_mjd);
        obj.sigma_pos_arcsec = sigma.value_or(schema_.sigma_default_arcsec);
        obj.mags = std::move(mags);
        obj.object_class = cls;
        obj.extent_arcsec = extent;
        if (class_unmatched) ++unmatched_class;
        return obj;
    }

private:
    const CatalogSchema& schema_;
    std::vector<std::pair<const ColumnMapping*, std::size_t>> slots_;
    std::size_t width_ = 0;
};

bool blank_record(const csv::Record& r) { return r.fields.size() == 1 && trim(r.fields[0]).empty(); }

}  // namespace

std::string RejectionReport::to_json_lines() const {
    std::string out;
    for (const auto& r : rejections) {
        nlohmann::json j{{"line", r.line}, {"reason", r.reason}, {"detail", r.detail}};
        out += j.dump() + "\n";
    }
    nlohmann::json summary{{"rows_read", rows_read},
                           {"rows_accepted", rows_accepted},
                           {"rows_rejected", rows_rejected},
                           {"unmatched_class", unmatched_class}};
    out += summary.dump() + "\n";
    return out;
}

IngestResult ingest_csv(std::istream& in, const CatalogSchema& schema, std::string source_name) {
    csv::Reader reader(in);
    auto header = reader.next();
    if (!header) throw Error("missing_column", "input has no header row");
    RowConverter converter(schema, header->fields);

    IngestResult result;
    result.catalog.schema = schema;
    auto& report = result.report;
    std::unordered_set<std::uint64_t> ids;
    std::uint64_t ordinal = 0;
    while (auto rec = reader.next()) {
        if (blank_record(*rec)) continue;
        ++report.rows_read;
        ++ordinal;
        try {
            std::size_t unmatched = 0;
            SkyObject obj = converter.convert(*rec, ordinal, unmatched);
            if (!ids.insert(obj.object_id).second)
                throw RowReject{"duplicate_id", "object_id " + std::to_string(obj.object_id) + " already seen"};
            report.unmatched_class += unmatched;
            result.catalog.objects.push_back(std::move(obj));
            ++report.rows_accepted;
        } catch (const RowReject& r) {
            report.rejections.push_back({rec->line, r.reason, r.detail});
            ++report.rows_rejected;
        }
    }
    auto& prov = result.catalog.provenance;
    prov.source_file = std::move(source_name);
    prov.rows_read = report.rows_read;
    prov.rows_accepted = report.rows_accepted;
    prov.rows_rejected = report.rows_rejected;
    prov.ingested_at = now_iso8601();
    return result;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io_error", "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

IngestResult ingest_csv(const std::filesystem::path& path, const CatalogSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io_error", "cannot open " + path.string());
    return ingest_csv(in, schema, path.filename().string());
}

void write_domestic_csv(const Catalog& catalog, std::ostream& out) {
    const auto& schema = catalog.schema;
    csv::write_row(out, schema.domestic_columns());
    std::vector<std::string> row;
    for (const auto& o : catalog.objects) {
        row.clear();
        row.push_back(std::to_string(o.object_id));
        row.push_back(format_double(o.pos.ra_deg()));
        row.push_back(format_double(o.pos.dec_deg()));
        row.push_back(format_double(o.sigma_pos_arcsec));
        row.emplace_back(to_string(o.object_class));
        row.push_back(o.extent_arcsec ? format_double(*o.extent_arcsec) : std::string());
        for (const auto& b : schema.bands) {
            auto it = o.mags.find(b);
            row.push_back(it == o.mags.end() ? std::string() : format_double(it->second));
        }
        csv::write_row(out, row);
    }
}

void export_domestic(const Catalog& catalog, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "catalog.csv", std::ios::binary);
        if (!out) throw Error("io_error", "cannot write " + (dir / "catalog.csv").string());
        write_domestic_csv(catalog, out);
        if (!out) throw Error("io_error", "failed writing " + (dir / "catalog.csv").string());
    }
    std::ofstream out(dir / "schema.json", std::ios::binary);
    if (!out) throw Error("io_error", "cannot write " + (dir / "schema.json").string());
    out << schema_to_json(domestic_schema(catalog.schema));
    if (!out) throw Error("io_error", "failed writing " + (dir / "schema.json").string());
}

Catalog load_store(const std::filesystem::path& dir) {
    const auto schema = parse_schema(read_file(dir / "schema.json"));
    auto result = ingest_csv(dir / "catalog.csv", schema);
    if (result.report.rows_rejected != 0)
        throw Error("corrupt_store", "store " + dir.string() + " contains " +
                                         std::to_string(result.report.rows_rejected) + " invalid rows");
    return std::move(result.catalog);
}

}  // namespace skyfed
