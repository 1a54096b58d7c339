#include "skyfed/fixture.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "skyfed/csv.hpp"
#include "skyfed/error.hpp"
#include "skyfed/value.hpp"

namespace skyfed::fixture {

using nlohmann::json;
namespace fs = std::filesystem;

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
    if (spare_) {
        const double v = *spare_;
        spare_.reset();
        return v;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    return r * std::cos(2.0 * kPi * u2);
}

std::uint64_t Rng::below(std::uint64_t n) { return n == 0 ? 0 : static_cast<std::uint64_t>(uniform() * static_cast<double>(n)); }

EquatorialPosition uniform_sphere(Rng& rng) {
    const double ra = rng.uniform(0.0, 360.0);
    const double dec = std::asin(2.0 * rng.uniform() - 1.0) * kRadToDeg;
    return EquatorialPosition(ra, dec);
}

EquatorialPosition uniform_cap(Rng& rng, const EquatorialPosition& center, double area_deg2) {
    const double sr = std::min(area_deg2 * kDegToRad * kDegToRad, 4.0 * kPi);
    const double cos_max = 1.0 - sr / (2.0 * kPi);
    const double cos_t = rng.uniform(cos_max, 1.0);
    const double bearing = rng.uniform(0.0, 360.0);
    return offset_position(center, std::acos(std::clamp(cos_t, -1.0, 1.0)) * kRadToDeg, bearing);
}

EquatorialPosition jitter(Rng& rng, const EquatorialPosition& p, double sigma_arcsec) {
    const double dx = rng.normal() * sigma_arcsec;
    const double dy = rng.normal() * sigma_arcsec;
    return offset_position(p, arcsec_to_deg(std::hypot(dx, dy)), std::atan2(dx, dy) * kRadToDeg);
}

namespace {

struct Truth {
    std::uint64_t id;
    EquatorialPosition pos;
    double sigma_arcsec;
};

std::string num(double v) { return format_double(v); }

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io_error", "cannot write " + path.string());
    out << text;
}

void write_node_config(const fs::path& dir) {
    json cfg{{"catalog", "catalog.csv"}, {"schema", "schema.json"}};
    write_text(dir / "node.json", cfg.dump(2) + "\n");
}

struct OpticalRow {
    std::uint64_t id;
    EquatorialPosition pos;
    double sigma;
    std::string type;
    double radius;
    double g, r, i;
    bool has_i;
};

OpticalRow optical_row(Rng& rng, std::uint64_t id, const EquatorialPosition& pos, double sigma) {
    static const char* kTypes[] = {"S", "G", "Q", "?"};
    const double pick = rng.uniform();
    const std::string type = kTypes[pick < 0.55 ? 0 : pick < 0.9 ? 1 : pick < 0.98 ? 2 : 3];
    const double g = rng.uniform(15.0, 23.0);
    const double r = g - rng.uniform(-0.2, 1.2);
    const double i = r - rng.uniform(-0.2, 0.8);
    return {id, pos, sigma, type, type == "G" ? rng.uniform(1.0, 8.0) : 0.0, g, r, i, rng.uniform() > 0.05};
}

// sdss-like: degrees, magnitudes, string class codes.
void write_optical(const fs::path& dir, const std::string& survey, double epoch, const std::vector<OpticalRow>& rows) {
    fs::create_directories(dir);
    json schema{{"survey", survey},
                {"bands", {"g", "r", "i"}},
                {"sigma_default_arcsec", 0.1},
                {"epoch_mjd", epoch},
                {"columns",
                 {{{"source", "objid"}, {"target", "object_id"}},
                  {{"source", "ra"}, {"target", "ra"}, {"unit", "deg"}},
                  {{"source", "dec"}, {"target", "dec"}, {"unit", "deg"}},
                  {{"source", "err_pos"}, {"target", "sigma_pos"}, {"unit", "arcsec"}},
                  {{"source", "type"},
                   {"target", "class"},
                   {"class_map", {{"S", "STAR"}, {"G", "GALAXY"}, {"Q", "QSO"}}}},
                  {{"source", "petro_rad"}, {"target", "extent"}, {"unit", "arcsec"}},
                  {{"source", "g"}, {"target", "mag:g"}, {"unit", "mag"}},
                  {{"source", "r"}, {"target", "mag:r"}, {"unit", "mag"}},
                  {{"source", "i"}, {"target", "mag:i"}, {"unit", "mag"}}}}};
    write_text(dir / "schema.json", schema.dump(2) + "\n");
    std::ofstream out(dir / "catalog.csv", std::ios::binary);
    csv::write_row(out, {"objid", "ra", "dec", "err_pos", "type", "petro_rad", "g", "r", "i"});
    for (const auto& o : rows)
        csv::write_row(out, {std::to_string(o.id), num(o.pos.ra_deg()), num(o.pos.dec_deg()), num(o.sigma), o.type,
                             num(o.radius), num(o.g), num(o.r), o.has_i ? num(o.i) : ""});
    write_node_config(dir);
}

}  // namespace

json generate(const Options& opt, const fs::path& out_dir) {
    Rng rng(opt.seed);
    const EquatorialPosition cap_center(180.0, 0.0);
    auto background = [&] {
        return opt.density_per_deg2 ? uniform_cap(rng, cap_center, static_cast<double>(opt.objects) / *opt.density_per_deg2)
                                    : uniform_sphere(rng);
    };
    constexpr double kSigmaOptical = 0.1, kSigmaRadio = 1.0, kSigmaInfrared = 0.3;

    // Ground-truth positions, drawn in a fixed order.
    std::vector<OpticalRow> sdss;
    std::uint64_t next_id = 1;
    for (std::size_t n = 0; n < opt.objects; ++n)
        sdss.push_back(optical_row(rng, next_id++, background(), kSigmaOptical));

    json clusters = json::array();
    for (std::size_t c = 0; c < opt.clusters; ++c) {
        const auto center = uniform_sphere(rng);
        json members = json::array();
        for (std::size_t m = 0; m < opt.cluster_size; ++m) {
            members.push_back(next_id);
            sdss.push_back(optical_row(rng, next_id++, jitter(rng, center, opt.cluster_sigma_arcsec), kSigmaOptical));
        }
        clusters.push_back({{"ra", center.ra_deg()}, {"dec", center.dec_deg()}, {"members", std::move(members)}});
    }

    std::vector<Truth> movers;
    for (std::size_t m = 0; m < opt.movers; ++m) {
        const std::uint64_t id = next_id++;
        const auto pos = uniform_sphere(rng);
        sdss.push_back(optical_row(rng, id, pos, kSigmaOptical));
        movers.push_back({id, pos, kSigmaOptical});
    }

    std::vector<EquatorialPosition> coincident;
    for (std::size_t k = 0; k < opt.coincidences; ++k) coincident.push_back(uniform_sphere(rng));
    json coincidences = json::array();
    for (std::size_t k = 0; k < coincident.size(); ++k) {
        coincidences.push_back({{"sdss", next_id}, {"ra", coincident[k].ra_deg()}, {"dec", coincident[k].dec_deg()}});
        sdss.push_back(optical_row(rng, next_id++, jitter(rng, coincident[k], kSigmaOptical), kSigmaOptical));
    }
    write_optical(out_dir / "sdss", "sdss", 51000.0, sdss);

    // Second epoch: every object re-observed; movers displaced.
    std::vector<OpticalRow> epoch2;
    json mover_truth = json::array();
    std::size_t mover_at = 0;
    for (const auto& o : sdss) {
        OpticalRow copy = o;
        if (mover_at < movers.size() && movers[mover_at].id == o.id) {
            const double d = rng.uniform(opt.mover_min_arcsec, opt.mover_max_arcsec);
            copy.pos = offset_position(o.pos, arcsec_to_deg(d), rng.uniform(0.0, 360.0));
            mover_truth.push_back({{"id_a", o.id},
                                   {"id_b", o.id},
                                   {"displacement_arcsec", deg_to_arcsec(angular_separation(o.pos, copy.pos))}});
            ++mover_at;
        } else {
            copy.pos = jitter(rng, o.pos, 0.05);
        }
        epoch2.push_back(copy);
    }
    write_optical(out_dir / "epoch2", "epoch2", 51030.0, epoch2);

    // first-like: RA in hours, integrated flux in mJy, extent in degrees.
    {
        const fs::path dir = out_dir / "first";
        fs::create_directories(dir);
        json schema{{"survey", "first"},
                    {"bands", {"l20"}},
                    {"sigma_default_arcsec", kSigmaRadio},
                    {"epoch_mjd", 50500.0},
                    {"columns",
                     {{{"source", "source_id"}, {"target", "object_id"}},
                      {{"source", "ra_h"}, {"target", "ra"}, {"unit", "hours"}},
                      {{"source", "dec_d"}, {"target", "dec"}, {"unit", "deg"}},
                      {{"source", "pos_err"}, {"target", "sigma_pos"}, {"unit", "arcsec"}},
                      {{"source", "fint_mjy"}, {"target", "flux:l20"}, {"unit", "flux"}, {"flux_zero", 3631000.0}},
                      {{"source", "maj_axis"}, {"target", "extent"}, {"unit", "deg"}}}}};
        write_text(dir / "schema.json", schema.dump(2) + "\n");
        std::ofstream out(dir / "catalog.csv", std::ios::binary);
        csv::write_row(out, {"source_id", "ra_h", "dec_d", "pos_err", "fint_mjy", "maj_axis"});
        std::uint64_t id = 1;
        auto row = [&](const EquatorialPosition& p) {
            csv::write_row(out, {std::to_string(id++), num(p.ra_deg() / 15.0), num(p.dec_deg()), num(kSigmaRadio),
                                 num(std::exp(rng.uniform(0.0, 6.0))), num(rng.uniform(0.0, 5.0) / 3600.0)});
        };
        for (std::size_t n = 0; n < opt.objects; ++n) row(background());
        for (std::size_t k = 0; k < coincident.size(); ++k) {
            coincidences[k]["first"] = id;
            row(jitter(rng, coincident[k], kSigmaRadio));
        }
        write_node_config(dir);
    }

    // twomass-like: radians, J/H/K magnitudes, no class column.
    {
        const fs::path dir = out_dir / "twomass";
        fs::create_directories(dir);
        json schema{{"survey", "twomass"},
                    {"bands", {"j", "h", "k"}},
                    {"sigma_default_arcsec", kSigmaInfrared},
                    {"epoch_mjd", 51200.0},
                    {"columns",
                     {{{"source", "cntr"}, {"target", "object_id"}},
                      {{"source", "ra_rad"}, {"target", "ra"}, {"unit", "rad"}},
                      {{"source", "dec_rad"}, {"target", "dec"}, {"unit", "rad"}},
                      {{"source", "err_maj"}, {"target", "sigma_pos"}, {"unit", "arcsec"}},
                      {{"source", "j_m"}, {"target", "mag:j"}},
                      {{"source", "h_m"}, {"target", "mag:h"}},
                      {{"source", "k_m"}, {"target", "mag:k"}}}}};
        write_text(dir / "schema.json", schema.dump(2) + "\n");
        std::ofstream out(dir / "catalog.csv", std::ios::binary);
        csv::write_row(out, {"cntr", "ra_rad", "dec_rad", "err_maj", "j_m", "h_m", "k_m"});
        std::uint64_t id = 1;
        auto row = [&](const EquatorialPosition& p) {
            const double j = rng.uniform(9.0, 16.0);
            csv::write_row(out, {std::to_string(id++), num(p.ra_deg() * kDegToRad), num(p.dec_deg() * kDegToRad),
                                 num(kSigmaInfrared), num(j), num(j - rng.uniform(0.0, 0.7)),
                                 num(j - rng.uniform(0.0, 1.2))});
        };
        for (std::size_t n = 0; n < opt.objects; ++n) row(background());
        for (std::size_t k = 0; k < coincident.size(); ++k) {
            coincidences[k]["twomass"] = id;
            row(jitter(rng, coincident[k], kSigmaInfrared));
        }
        write_node_config(dir);
    }

    // The sdss catalog again in three RA/Dec unit conventions.
    for (const std::string unit : {"deg", "rad", "hours"}) {
        const fs::path dir = out_dir / "units" / unit;
        fs::create_directories(dir);
        const std::string dec_unit = unit == "rad" ? "rad" : "deg";
        json schema{{"survey", "units"},
                    {"bands", {"g", "r", "i"}},
                    {"sigma_default_arcsec", kSigmaOptical},
                    {"epoch_mjd", 51000.0},
                    {"columns",
                     {{{"source", "id"}, {"target", "object_id"}},
                      {{"source", "ra"}, {"target", "ra"}, {"unit", unit}},
                      {{"source", "dec"}, {"target", "dec"}, {"unit", dec_unit}},
                      {{"source", "g"}, {"target", "mag:g"}},
                      {{"source", "r"}, {"target", "mag:r"}},
                      {{"source", "i"}, {"target", "mag:i"}}}}};
        write_text(dir / "schema.json", schema.dump(2) + "\n");
        std::ofstream out(dir / "catalog.csv", std::ios::binary);
        csv::write_row(out, {"id", "ra", "dec", "g", "r", "i"});
        const double ra_scale = unit == "rad" ? kDegToRad : unit == "hours" ? 1.0 / 15.0 : 1.0;
        const double dec_scale = unit == "rad" ? kDegToRad : 1.0;
        for (const auto& o : sdss)
            csv::write_row(out, {std::to_string(o.id), num(o.pos.ra_deg() * ra_scale), num(o.pos.dec_deg() * dec_scale),
                                 num(o.g), num(o.r), o.has_i ? num(o.i) : ""});
        write_node_config(dir);
    }

    json manifest{{"seed", opt.seed},
                  {"objects", opt.objects},
                  {"cluster_size", opt.cluster_size},
                  {"movers", std::move(mover_truth)},
                  {"clusters", std::move(clusters)},
                  {"coincidences", std::move(coincidences)},
                  {"counts",
                   {{"sdss", sdss.size()},
                    {"epoch2", epoch2.size()},
                    {"first", opt.objects + opt.coincidences},
                    {"twomass", opt.objects + opt.coincidences}}}};
    write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
    return manifest;
}

}  // namespace skyfed::fixture
