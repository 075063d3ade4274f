#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "urban/grid.hpp"

namespace urban {

// Exact Euclidean distance (in pixels) to the nearest center pixel, for
// every pixel. Two-pass lower-envelope transform on squared distances; the
// result matches a brute-force min over all center pixels exactly.
Grid distance_transform(const Mask& centers, double resolution_m);

// Distance-binned urban density series. Bin d collects urban pixels with
// d <= D < d+1 (1 px bins); bin distance in km is d * resolution / 1000.
// Empty bins are omitted, so consecutive entries may skip bin indices.
struct DensityProfile {
    std::vector<double> bin_distance_km;
    std::vector<double> mean_density;
    std::vector<std::int64_t> pixel_count;
    std::vector<double> q25, q75;

    std::size_t size() const { return mean_density.size(); }
};

DensityProfile extract_profile(const Grid& dist, const Grid& rho, const Mask& u_final);

// Bins that are strict minima of their sliding window (default 5 bins wide,
// i.e. +/-2 neighbors); the first and last bins never qualify. Falls back to
// every profile point when fewer than two minima exist.
struct MinimaResult {
    std::vector<std::pair<double, double>> points;  // (distance_km, density)
    bool used_fallback = false;
};

MinimaResult find_local_minima(const DensityProfile& p, int window = 5);

// Ordinary least squares through the selected points.
struct GradientFit {
    double alpha = 0.0;  // slope, density units per km
    double beta = 0.0;   // intercept, density units
    double r_squared = 0.0;
    std::vector<std::pair<double, double>> points;  // the points fitted
};

GradientFit fit_gradient(const std::vector<std::pair<double, double>>& points);

// LD = (rho_target - beta) / alpha. Negative results are reported as-is
// (the profile already starts below the target); alpha == 0 is an error.
double compute_ld(const GradientFit& fit, double rho_target);

struct Peak {
    double distance_km = 0.0;
    double density = 0.0;
    double prominence = 0.0;
    std::size_t bin_index = 0;  // index into the profile arrays
};

// Local maxima whose prominence exceeds prominence_factor * (max - min) of
// the profile. A peak's prominence is its height above the lower of the two
// key saddles: on each side, the minimum value between the peak and the
// nearest strictly higher value (profile ends act as higher barriers).
// Returned sorted by distance.
std::vector<Peak> detect_peaks(const DensityProfile& p, double prominence_factor = 0.02);

enum class Morphology { monocentric, polycentric };

// Monocentric iff at most one peak. `no_distinct_peak` flags the zero-peak
// case, which the dichotomy does not otherwise cover.
Morphology classify_morphology(const std::vector<Peak>& peaks, bool* no_distinct_peak = nullptr);

}  // namespace urban
