#include "urban/synth.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

using nlohmann::json;

namespace urban {

double SplitMix64::next_gaussian() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    // Box-Muller on (0,1] uniforms
    const double u1 = 1.0 - next_unit();
    const double u2 = next_unit();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double two_pi_u2 = 2.0 * 3.14159265358979323846 * u2;
    cached_ = mag * std::sin(two_pi_u2);
    has_cached_ = true;
    return mag * std::cos(two_pi_u2);
}

void SyntheticSpec::validate() const {
    if (width < 1 || height < 1) throw InputError("synthetic scene dimensions must be positive");
    if (!(resolution_m > 0)) throw InputError("synthetic resolution must be > 0");
    if (centers.empty()) throw InputError("synthetic spec needs at least one center");
    for (const auto& c : centers) {
        if (!(c.d0 > 0)) throw InputError("synthetic center d0 must be > 0");
        if (!(c.decay_per_km > 0)) throw InputError("synthetic center decay must be > 0");
    }
    if (noise_sigma < 0) throw InputError("noise_sigma must be >= 0");
}

Grid generate_density(const SyntheticSpec& spec) {
    spec.validate();
    Grid g(spec.width, spec.height, spec.resolution_m);
    const double km_per_px = spec.resolution_m / 1000.0;
    for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
            double best = 0.0;
            for (const auto& c : spec.centers) {
                const double dx = (x - c.x) * km_per_px;
                const double dy = (y - c.y) * km_per_px;
                const double r_km = std::sqrt(dx * dx + dy * dy);
                best = std::max(best, c.d0 * std::exp(-c.decay_per_km * r_km));
            }
            g.at(x, y) = best;
        }
    }
    if (spec.noise_sigma > 0) {
        SplitMix64 rng(spec.seed);
        for (auto& v : g.values) v = std::max(0.0, v + spec.noise_sigma * rng.next_gaussian());
    }
    return g;
}

namespace {

// stable per-cell coin: hash of (seed, cell coordinates) via SplitMix64
double cell_unit(std::uint64_t seed, std::int64_t cx, std::int64_t cy) {
    SplitMix64 rng(seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(cx + 1)) ^
                   (0xc2b2ae3d27d4eb4fULL * static_cast<std::uint64_t>(cy + 1)));
    return rng.next_unit();
}

}  // namespace

ScenePair generate_scene_pair(const SyntheticSpec& spec) {
    const Grid density = generate_density(spec);
    const double dmax = *std::max_element(density.values.begin(), density.values.end());
    const double inv_dmax = dmax > 0 ? 1.0 / dmax : 0.0;

    // SAR: normalized density with multiplicative speckle
    Grid sar(spec.width, spec.height, spec.resolution_m);
    {
        SplitMix64 rng(spec.seed ^ 0x5a5a5a5a5a5a5a5aULL);
        for (std::size_t i = 0; i < sar.size(); ++i) {
            const double base = density.values[i] * inv_dmax;
            const double speckle = 1.0 + 0.08 * rng.next_gaussian();
            sar.values[i] = std::clamp(base * speckle, 0.0, 1.0);
        }
    }

    // Optical: terrain gray with a built-block texture. A cell is built with
    // probability equal to the local normalized density; built cells render
    // bright/dark by parity so adjacent built cells always form edges, and
    // the parity contrast exceeds the built/terrain contrast so edge density
    // rises monotonically with built coverage.
    constexpr int kCell = 4;
    constexpr double kTerrain = 0.5;
    Grid optical(spec.width, spec.height, spec.resolution_m, kTerrain);
    {
        SplitMix64 noise_rng(spec.seed ^ 0xa5a5a5a5a5a5a5a5ULL);
        for (int y = 0; y < spec.height; ++y) {
            for (int x = 0; x < spec.width; ++x) {
                const std::int64_t cx = x / kCell, cy = y / kCell;
                const int ccx = std::min(kCell * static_cast<int>(cx) + kCell / 2, spec.width - 1);
                const int ccy = std::min(kCell * static_cast<int>(cy) + kCell / 2, spec.height - 1);
                // thresholded density: settlements end where the normalized
                // density drops below 0.3, and saturate above 0.75
                const double dn = density.at(ccx, ccy) * inv_dmax;
                const double p_built = std::clamp((dn - 0.3) / 0.45, 0.0, 1.0);
                double v;
                if (cell_unit(spec.seed, cx, cy) < p_built) {
                    v = ((cx + cy) & 1) ? 0.85 : 0.15;
                } else if (cell_unit(spec.seed ^ 0x6b43a9b5d2f831ULL, cx, cy) < 0.30) {
                    // sparse field-boundary texture: countryside has mild
                    // edge density of its own, forming the terrain mode
                    v = ((cx + cy) & 1) ? 0.70 : 0.30;
                } else {
                    v = kTerrain;
                }
                v += 0.005 * noise_rng.next_gaussian();
                optical.at(x, y) = std::clamp(v, 0.0, 1.0);
            }
        }
    }
    return {std::move(optical), std::move(sar)};
}

SyntheticSpec parse_synth_spec(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw InputError(std::string("invalid synthetic spec JSON: ") + e.what());
    }
    SyntheticSpec spec;
    try {
        spec.width = j.at("width").get<int>();
        spec.height = j.at("height").get<int>();
        spec.resolution_m = j.at("resolution_m").get<double>();
        spec.noise_sigma = j.value("noise_sigma", 0.0);
        spec.seed = j.value("seed", std::uint64_t{0});
        for (const auto& c : j.at("centers")) {
            SynthCenter sc;
            sc.x = c.at("x").get<double>();
            sc.y = c.at("y").get<double>();
            sc.d0 = c.at("d0").get<double>();
            sc.decay_per_km = c.at("decay_per_km").get<double>();
            spec.centers.push_back(sc);
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("invalid synthetic spec JSON: ") + e.what());
    }
    spec.validate();
    return spec;
}

std::string synth_truth_json(const SyntheticSpec& spec) {
    json j;
    j["width"] = spec.width;
    j["height"] = spec.height;
    j["resolution_m"] = spec.resolution_m;
    j["noise_sigma"] = spec.noise_sigma;
    j["seed"] = spec.seed;
    j["centers"] = json::array();
    for (const auto& c : spec.centers)
        j["centers"].push_back({{"x", c.x}, {"y", c.y}, {"d0", c.d0}, {"decay_per_km", c.decay_per_km}});
    return j.dump(2) + "\n";
}

}  // namespace urban
