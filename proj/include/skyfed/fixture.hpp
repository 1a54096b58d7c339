#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <vector>

#include "json.hpp"
#include "skyfed/geometry.hpp"

namespace skyfed::fixture {

/// Deterministic uniform and normal draws from a 64-bit Mersenne twister.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform();  // [0, 1)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();   // standard normal, Box-Muller
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

/// Uniform on the sphere: ra uniform, dec = asin(2u - 1).
EquatorialPosition uniform_sphere(Rng& rng);
/// Uniform on the cap of the given area (deg^2) around `center`.
EquatorialPosition uniform_cap(Rng& rng, const EquatorialPosition& center, double area_deg2);
/// Gaussian scatter with `sigma_arcsec` per axis around `p`.
EquatorialPosition jitter(Rng& rng, const EquatorialPosition& p, double sigma_arcsec);

struct Options {
    std::size_t objects = 1000;           // uniform background per survey
    std::uint64_t seed = 1;
    std::size_t movers = 0;               // sdss objects displaced in epoch2
    std::size_t clusters = 0;             // Gaussian blobs added to sdss
    std::size_t cluster_size = 100;
    double cluster_sigma_arcsec = 20.0;
    std::size_t coincidences = 0;         // positions present in sdss, first and twomass
    double mover_min_arcsec = 5.0;
    double mover_max_arcsec = 40.0;
    /// When set, backgrounds fill a cap at (180, 0) of area objects / density
    /// instead of the whole sphere.
    std::optional<double> density_per_deg2;
};

/// Writes sdss/, epoch2/, first/, twomass/ and units/{deg,rad,hours}/ (each a
/// foreign-format catalog.csv with its schema.json and node.json) plus
/// manifest.json with the planted ground truth. Returns the manifest.
nlohmann::json generate(const Options& options, const std::filesystem::path& out_dir);

}  // namespace skyfed::fixture
