#pragma once

#include <array>
#include <optional>

namespace skyfed {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kRadToDeg = 180.0 / kPi;
inline constexpr double kArcsecPerDeg = 3600.0;

constexpr double arcsec_to_deg(double arcsec) { return arcsec / kArcsecPerDeg; }
constexpr double deg_to_arcsec(double deg) { return deg * kArcsecPerDeg; }

using Vec3 = std::array<double, 3>;

/// Maps any finite angle onto [0, 360). Throws on NaN/inf.
double normalize_ra(double ra_raw);

/// A direction on the celestial sphere in degrees. RA is normalized on
/// construction; a declination outside [-90, 90] is rejected.
class EquatorialPosition {
public:
    EquatorialPosition(double ra_deg, double dec_deg, std::optional<double> epoch_mjd = std::nullopt);

    double ra_deg() const noexcept { return ra_; }
    double dec_deg() const noexcept { return dec_; }
    std::optional<double> epoch_mjd() const noexcept { return epoch_; }

    friend bool operator==(const EquatorialPosition&, const EquatorialPosition&) = default;

private:
    double ra_;
    double dec_;
    std::optional<double> epoch_;
};

Vec3 to_unit_vector(const EquatorialPosition& p);
Vec3 to_unit_vector(double ra_deg, double dec_deg);

/// Great-circle distance in degrees, atan2(|a x b|, a . b) on unit vectors.
double angular_separation(const EquatorialPosition& a, const EquatorialPosition& b);
double angular_separation(const Vec3& a, const Vec3& b);
double angular_separation(double ra1_deg, double dec1_deg, double ra2_deg, double dec2_deg);

/// Point reached by travelling `distance_deg` along the great circle leaving
/// `p` at position angle `bearing_deg` (north through east).
EquatorialPosition offset_position(const EquatorialPosition& p, double distance_deg, double bearing_deg);

}  // namespace skyfed
