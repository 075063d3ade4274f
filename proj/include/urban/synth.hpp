#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "urban/grid.hpp"

namespace urban {

// SplitMix64: the fixed, portable PRNG behind every synthetic fixture.
// Same seed -> bit-identical stream on every platform.
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // standard normal via Box-Muller (one draw per call, pair cached)
    double next_gaussian();

private:
    bool has_cached_ = false;
    double cached_ = 0.0;
};

// One exponential-decay density kernel: d0 * exp(-decay_per_km * r_km).
struct SynthCenter {
    double x = 0.0;  // px
    double y = 0.0;  // px
    double d0 = 1.0;
    double decay_per_km = 1.0;
};

struct SyntheticSpec {
    int width = 512;
    int height = 512;
    double resolution_m = 20.0;
    std::vector<SynthCenter> centers;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

// Ground-truth density: max over kernels of d0*exp(-decay*r_km), plus
// seeded Gaussian noise, clamped at 0. The max rule keeps each kernel's d0
// as the exact peak density at its center.
Grid generate_density(const SyntheticSpec& spec);

struct ScenePair {
    Grid optical;
    Grid sar;
};

// Pseudo inputs emulating a registered optical/SAR pair:
//  - sar: density normalized to [0,1] with multiplicative speckle-like
//    noise, clamped back to [0,1];
//  - optical: flat terrain plus a block texture whose built-cell coverage
//    follows the density, so Sobel edge density tracks the true field.
// Deterministic per (spec, seed).
ScenePair generate_scene_pair(const SyntheticSpec& spec);

SyntheticSpec parse_synth_spec(const std::string& json_text);
std::string synth_truth_json(const SyntheticSpec& spec);

}  // namespace urban
