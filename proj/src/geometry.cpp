#include "skyfed/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "skyfed/error.hpp"

namespace skyfed {

double normalize_ra(double ra_raw) {
    if (!std::isfinite(ra_raw)) throw Error("invalid_coordinate", "right ascension is not finite");
    double ra = std::fmod(ra_raw, 360.0);
    if (ra < 0.0) ra += 360.0;
    // fmod of a tiny negative value can round up to exactly 360.
    if (ra >= 360.0) ra = 0.0;
    return ra;
}

EquatorialPosition::EquatorialPosition(double ra_deg, double dec_deg, std::optional<double> epoch_mjd)
    : ra_(normalize_ra(ra_deg)), dec_(dec_deg), epoch_(epoch_mjd) {
    if (!std::isfinite(dec_deg) || dec_deg < -90.0 || dec_deg > 90.0)
        throw Error("invalid_coordinate", "declination out of range: " + std::to_string(dec_deg));
    if (epoch_ && !std::isfinite(*epoch_)) throw Error("invalid_coordinate", "epoch is not finite");
}

Vec3 to_unit_vector(double ra_deg, double dec_deg) {
    const double ra = ra_deg * kDegToRad;
    const double dec = dec_deg * kDegToRad;
    const double cd = std::cos(dec);
    return {cd * std::cos(ra), cd * std::sin(ra), std::sin(dec)};
}

Vec3 to_unit_vector(const EquatorialPosition& p) { return to_unit_vector(p.ra_deg(), p.dec_deg()); }

double angular_separation(const Vec3& a, const Vec3& b) {
    const double cx = a[1] * b[2] - a[2] * b[1];
    const double cy = a[2] * b[0] - a[0] * b[2];
    const double cz = a[0] * b[1] - a[1] * b[0];
    const double cross = std::sqrt(cx * cx + cy * cy + cz * cz);
    const double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    return std::atan2(cross, dot) * kRadToDeg;
}

double angular_separation(const EquatorialPosition& a, const EquatorialPosition& b) {
    return angular_separation(to_unit_vector(a), to_unit_vector(b));
}

double angular_separation(double ra1_deg, double dec1_deg, double ra2_deg, double dec2_deg) {
    return angular_separation(to_unit_vector(ra1_deg, dec1_deg), to_unit_vector(ra2_deg, dec2_deg));
}

EquatorialPosition offset_position(const EquatorialPosition& p, double distance_deg, double bearing_deg) {
    const double d = distance_deg * kDegToRad;
    const double b = bearing_deg * kDegToRad;
    const double dec0 = p.dec_deg() * kDegToRad;
    const double sin_dec = std::clamp(std::sin(dec0) * std::cos(d) + std::cos(dec0) * std::sin(d) * std::cos(b), -1.0, 1.0);
    const double dec = std::asin(sin_dec);
    const double dra = std::atan2(std::sin(b) * std::sin(d) * std::cos(dec0), std::cos(d) - std::sin(dec0) * sin_dec);
    return EquatorialPosition(p.ra_deg() + dra * kRadToDeg, dec * kRadToDeg, p.epoch_mjd());
}

}  // namespace skyfed
